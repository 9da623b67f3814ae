#include "volput/pricing.hpp"

#include <algorithm>
#include <cmath>

#include "volput/roots.hpp"

namespace volput::pricing {

namespace {

constexpr double kDispatchTol = 1e-12;   // delta >= delta* - tol maps to Case 1
constexpr double kAdmissSlack = 1e-9;    // payoff-dominance slack in root selection

std::pair<double, double> coefficients_at(const ModelParams& params,
                                          const model::PhiBasis& at_s,
                                          const model::PhiBasis& at_K, double s) {
    const double K = params.strike_K, delta = params.delta;
    const double det = at_s.phi1 * at_K.phi2 - at_s.phi2 * at_K.phi1;
    const double scale = std::max(std::abs(at_s.phi1 * at_K.phi2),
                                  std::abs(at_s.phi2 * at_K.phi1));
    if (std::abs(det) <= 1e-14 * std::max(scale, 1.0)) {
        throw SingularSystem("knockout coefficients: Phi system singular at s=" +
                             std::to_string(s));
    }
    const double c1 = ((K - s) * at_K.phi2 - delta * at_s.phi2) / det;
    const double c2 = (delta * at_s.phi1 - (K - s) * at_K.phi1) / det;
    return {c1, c2};
}

}  // namespace

Payoffs payoffs(const ModelParams& params) { return {params.strike_K, params.delta}; }

std::string to_string(Regime regime) {
    switch (regime) {
        case Regime::AmericanEquivalent: return "AmericanEquivalent";
        case Regime::KnockoutEquivalent: return "KnockoutEquivalent";
        default: return "Undetermined";
    }
}

double AmericanSolution::value(double x) const {
    if (x <= boundary_s) return params.strike_K - x;
    return coefficient * model::phi_basis(params, x).phi1;
}

double KnockoutSolution::value(double x) const {
    const double K = params.strike_K;
    if (x <= boundary_s) return K - x;
    if (x <= K) {
        const auto b = model::phi_basis(params, x);
        return c1 * b.phi1 + c2 * b.phi2;
    }
    return knockout_tail_value(params, x);
}

double KnockoutSolution::slope(double x) const {
    const auto b = model::phi_basis(params, x);
    return c1 * b.dphi1 + c2 * b.dphi2;
}

double CallableSolution::value(double x) const {
    if (regime == Regime::AmericanEquivalent) return american.value(x);
    return knockout->value(x);
}

std::pair<double, double> knockout_coefficients(const ModelParams& params, double s) {
    model::validate(params);
    return coefficients_at(params, model::phi_basis(params, s),
                           model::phi_basis(params, params.strike_K), s);
}

AmericanSolution solve_american(const ModelParams& params) {
    model::validate(params);
    const double K = params.strike_K;
    // Smooth pasting: -Phi1(s)/Phi1'(s) = K - s (Phi1' < 0 on (0,K)).
    const auto objective = [&](double s) {
        const auto b = model::phi_basis(params, s);
        return -b.phi1 / b.dphi1 - (K - s);
    };
    roots::RootProblem problem{objective, 1e-3 * K, K * (1.0 - 1e-9)};
    const auto brackets = roots::bracket_roots(problem);
    std::vector<double> candidates;
    for (const auto& br : brackets) candidates.push_back(roots::refine_root(problem, br));
    // The admissible boundary makes the continuation value dominate the payoff.
    for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
        const double s = *it;
        if (!(s > 0.0 && s < K)) continue;
        const double coeff = (K - s) / model::phi_basis(params, s).phi1;
        bool ok = coeff > 0.0;
        for (int i = 1; ok && i <= 32; ++i) {
            const double x = s + (K - s) * i / 32.0;
            ok = coeff * model::phi_basis(params, x).phi1 >= (K - x) - kAdmissSlack;
        }
        if (ok) return {s, coeff, params};
    }
    throw NoAdmissibleRoot("solve_american: no admissible boundary in (0,K); " +
                           std::to_string(candidates.size()) + " candidate roots");
}

KnockoutSolution solve_knockout(const ModelParams& params) {
    model::validate(params);
    const double K = params.strike_K, delta = params.delta;
    if (delta == 0.0) {
        // Zero rebate: the smooth-pasting objective is negative throughout
        // (0,K) and immediate exercise is optimal everywhere below the
        // barrier; the boundary degenerates to s = K and v = g1.
        return {K, 0.0, 0.0, params, {}};
    }
    const auto at_K = model::phi_basis(params, K);
    const auto objective = [&](double s) {
        const auto at_s = model::phi_basis(params, s);
        const auto [c1, c2] = coefficients_at(params, at_s, at_K, s);
        return c1 * at_s.dphi1 + c2 * at_s.dphi2 + 1.0;  // v'(s) = -1
    };
    roots::RootProblem problem{objective, 1e-3 * K, K * (1.0 - 1e-9)};
    const auto brackets = roots::bracket_roots(problem);
    std::vector<double> candidates;
    for (const auto& br : brackets) {
        try {
            candidates.push_back(roots::refine_root(problem, br));
        } catch (const SingularSystem&) {
        }
    }
    std::sort(candidates.begin(), candidates.end());
    // Largest admissible root: the latest exercise consistent with payoff
    // dominance on (s,K). Extreme-argument probes can cross zero in noise,
    // so every candidate is screened.
    for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
        const double s = *it;
        if (!(s > 0.0 && s < K)) continue;
        const auto at_s = model::phi_basis(params, s);
        double c1, c2;
        try {
            std::tie(c1, c2) = coefficients_at(params, at_s, at_K, s);
        } catch (const SingularSystem&) {
            continue;
        }
        bool ok = true;
        for (int i = 1; ok && i <= 64; ++i) {
            const double x = s + (K - s) * i / 64.0;
            const auto b = model::phi_basis(params, x);
            const double v = c1 * b.phi1 + c2 * b.phi2;
            ok = v >= std::max(K - x, 0.0) - kAdmissSlack && v >= -kAdmissSlack;
        }
        if (ok) return {s, c1, c2, params, candidates};
    }
    throw NoAdmissibleRoot("solve_knockout: no admissible boundary in (0,K); " +
                           std::to_string(candidates.size()) + " candidate roots");
}

double knockout_tail_value(const ModelParams& params, double x) {
    if (!(x > params.strike_K)) {
        throw std::invalid_argument("knockout_tail_value: requires x > K");
    }
    return params.delta * model::phi_basis(params, x).phi1 /
           model::phi_basis(params, params.strike_K).phi1;
}

double compute_d1(const ModelParams& params) {
    model::validate(params);
    const double excess = params.alpha - params.r;
    const double disc = excess * excess +
                        4.0 * params.beta * params.r * (params.strike_K + params.delta);
    const double d1 = (excess + std::sqrt(disc)) / (2.0 * params.beta);
    const double residual = params.beta * d1 * d1 - excess * d1 -
                            params.r * (params.strike_K + params.delta);
    if (std::abs(residual) > 1e-10 * std::max(1.0, params.r * (params.strike_K + params.delta))) {
        throw std::runtime_error("compute_d1: quadratic residual check failed");
    }
    return d1;
}

bool check_theorem4(const ModelParams& params) {
    return params.strike_K <= compute_d1(params);
}

bool check_theorem5(const ModelParams& params, const KnockoutSolution& solution) {
    const auto at_K = model::phi_basis(params, params.strike_K);
    const double a = solution.c1 * at_K.dphi1 + solution.c2 * at_K.dphi2;
    const double drift_term = 2.0 * params.beta * solution.boundary_s + params.r - params.alpha;
    return a > -1.0 && drift_term > 0.0;
}

CallableSolution solve_callable(const ModelParams& params) {
    model::validate(params);
    CallableSolution out{Regime::Undetermined, 0.0, std::nullopt, compute_d1(params),
                         solve_american(params), std::nullopt, {}};
    out.delta_star = out.american.value(params.strike_K);

    try {
        out.knockout = solve_knockout(params);
        const auto at_K = model::phi_basis(params, params.strike_K);
        out.slope_a = out.knockout->c1 * at_K.dphi1 + out.knockout->c2 * at_K.dphi2;
    } catch (const std::exception&) {
        // diagnostics only in the American regime; rethrown below if needed
    }

    if (params.delta >= out.delta_star - kDispatchTol) {
        out.regime = Regime::AmericanEquivalent;
        return out;
    }
    if (!out.knockout) {
        throw NoAdmissibleRoot("solve_callable: knock-out solve failed below delta*");
    }
    const bool t4 = check_theorem4(params);
    const bool t5 = check_theorem5(params, *out.knockout);
    if (t4 || t5) {
        out.regime = Regime::KnockoutEquivalent;
    } else {
        out.regime = Regime::Undetermined;
        out.warnings.push_back(
            "sufficient conditions for knock-out equivalence both fail "
            "(K <= d1 is false and v'(K-) <= -1); returning the knock-out value, "
            "which the grid game solver can adjudicate");
    }
    return out;
}

}  // namespace volput::pricing
