#include "volput/model.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include "volput/specfn.hpp"

namespace volput::model {

namespace {

constexpr double kFloorY = 1e-12;

double checked_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string("ModelParams: ") + name + " must be positive");
    }
    return v;
}

}  // namespace

void validate(const ModelParams& params) {
    checked_positive(params.alpha, "alpha");
    checked_positive(params.beta, "beta");
    checked_positive(params.k, "k");
    checked_positive(params.r, "r");
    checked_positive(params.strike_K, "strike_K");
    if (!(params.delta >= 0.0) || !std::isfinite(params.delta)) {
        throw std::invalid_argument("ModelParams: delta must be >= 0");
    }
}

std::vector<Advisory> advisories(const ModelParams& params) {
    std::vector<Advisory> out;
    if (params.alpha <= params.r) {
        out.push_back({"alpha_le_r",
                       "alpha <= r: the drift assumption alpha > r behind the condition "
                       "checks is violated; closed forms remain defined"});
    }
    if (params.beta >= 0.5 * params.k * params.k) {
        out.push_back({"beta_ge_half_k2",
                       "beta >= k^2/2: outside the standing assumption beta < k^2/2; "
                       "closed forms remain defined"});
    }
    return out;
}

DerivedConstants derive_constants(const ModelParams& params) {
    validate(params);
    const double A = 2.0 * (1.0 + params.beta / (params.k * params.k));
    const double B = 2.0 * params.alpha / (params.k * params.k);
    if (!(A > 0.0)) throw std::invalid_argument("derive_constants: A must be positive");
    return {A, B};
}

PhiBasis phi_basis(const ModelParams& params, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("phi_basis: x must be positive");
    const auto [A, B] = derive_constants(params);
    const double a = params.r / params.alpha;
    const double z = B / x;

    PhiBasis out;
    out.phi1 = specfn::kummer_m({a, A, z});
    // d/dx M(a,A;B/x) = M'(z) * (-B/x^2)
    out.dphi1 = -params.r * B / (params.alpha * A) / (x * x) *
                specfn::kummer_m({a + 1.0, A + 1.0, z});

    const double pow_pref = std::pow(z, 1.0 - A);
    const double m2 = specfn::kummer_m({a + 1.0 - A, 2.0 - A, z});
    out.phi2 = pow_pref * m2;
    out.dphi2 = std::pow(B, 1.0 - A) * std::pow(x, A - 2.0) *
                ((A - 1.0) * m2 -
                 (a + 1.0 - A) * B / ((2.0 - A) * x) *
                     specfn::kummer_m({a + 2.0 - A, 3.0 - A, z}));
    if (!std::isfinite(out.phi1) || !std::isfinite(out.phi2) ||
        !std::isfinite(out.dphi1) || !std::isfinite(out.dphi2)) {
        throw std::overflow_error("phi_basis: non-finite basis value (x too small?)");
    }
    return out;
}

double generator_residual(const ModelParams& params,
                          const std::function<double(double)>& f, double x) {
    // Proportional step: the operator's coefficients vanish towards 0 and the
    // second-difference rounding noise grows like k^2 x eps / c^2, so a purely
    // relative step keeps both ends of a wide log grid below the tolerance.
    const double h = 1e-4 * x;
    const double fm = f(x - h), f0 = f(x), fp = f(x + h);
    const double d1 = (fp - fm) / (2.0 * h);
    const double d2 = (fp - 2.0 * f0 + fm) / (h * h);
    return 0.5 * params.k * params.k * x * x * x * d2 +
           (params.alpha * x - params.beta * x * x) * d1 - params.r * f0;
}

double ReciprocalCirStepper::step(double y, double z, double dt) const {
    const double yp = std::max(y, 0.0);
    return y + (kappa - alpha * yp) * dt - k * std::sqrt(yp * dt) * z;
}

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path_index) {
    // splitmix64 output at stream position path_index. A plain seed ^ index
    // combine would make the per-path seed multiset invariant under small
    // seed changes (XOR by s < 64 permutes indices within aligned 64-blocks),
    // so distinct seeds could produce identical ensemble statistics.
    std::uint64_t x = seed + (path_index + 1) * 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

PathEnsemble simulate_paths(const ModelParams& params, const PathConfig& config) {
    validate(params);
    if (!(config.dt > 0.0) || !(config.horizon >= config.dt) || config.n_paths < 1 ||
        !(config.x0 > 0.0)) {
        throw std::invalid_argument("PathConfig: requires x0 > 0, dt > 0, horizon >= dt, n_paths >= 1");
    }
    const ReciprocalCirStepper stepper(params);
    const auto n_steps = static_cast<std::size_t>(std::llround(config.horizon / config.dt));

    PathEnsemble out;
    out.times.resize(n_steps + 1);
    for (std::size_t i = 0; i <= n_steps; ++i) out.times[i] = static_cast<double>(i) * config.dt;
    out.paths.assign(static_cast<std::size_t>(config.n_paths), {});

    std::uint64_t floor_hits = 0;
    for (int p = 0; p < config.n_paths; ++p) {
        std::mt19937_64 eng(path_seed(config.seed, static_cast<std::uint64_t>(p)));
        std::normal_distribution<double> normal(0.0, 1.0);
        auto& path = out.paths[static_cast<std::size_t>(p)];
        path.resize(n_steps + 1);
        double y = 1.0 / config.x0;
        path[0] = config.x0;
        for (std::size_t i = 1; i <= n_steps; ++i) {
            y = stepper.step(y, normal(eng), config.dt);
            if (y < kFloorY) ++floor_hits;
            path[i] = 1.0 / std::max(y, kFloorY);
        }
    }
    const double total_steps = static_cast<double>(n_steps) * config.n_paths;
    out.floor_trigger_fraction = static_cast<double>(floor_hits) / total_steps;
    if (out.floor_trigger_fraction > 0.01) {
        throw std::runtime_error("simulate_paths: positivity floor triggered on more than 1% "
                                 "of steps; reduce dt");
    }
    return out;
}

void PathEnsemble::write_csv(std::ostream& out) const {
    out << "path_id,t,x\n";
    for (std::size_t p = 0; p < paths.size(); ++p) {
        for (std::size_t i = 0; i < times.size(); ++i) {
            out << p << ',' << times[i] << ',' << paths[p][i] << '\n';
        }
    }
}

}  // namespace volput::model
