#include "volput/specfn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace volput::specfn {

namespace {

constexpr double kBadBTol = 1e-8;
constexpr double kSeriesStop = 1e-16;
constexpr int kMaxSeriesTerms = 10000;
constexpr double kAsymptoticZ = 60.0;

void validate(const KummerArgs& args) {
    if (!std::isfinite(args.a) || !std::isfinite(args.b) || !std::isfinite(args.z)) {
        throw std::domain_error("kummer_m: non-finite argument");
    }
    if (args.b <= 0.5) {
        const double nearest = std::round(args.b);
        if (nearest <= 0.0 && std::abs(args.b - nearest) < kBadBTol) {
            throw std::domain_error("kummer_m: b within 1e-8 of a non-positive integer (b=" +
                                    std::to_string(args.b) + ")");
        }
    }
}

// Series sum with compensated accumulation and a running log-scale offset so
// intermediate magnitudes never overflow. Returns log|sum| and sign.
SignedLog series_log(double a, double b, double z) {
    double sum = 1.0, comp = 0.0, term = 1.0, log_offset = 0.0;
    int small_streak = 0;
    for (int n = 0; n < kMaxSeriesTerms; ++n) {
        term *= (a + n) * z / ((b + n) * (n + 1));
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (std::abs(term) < kSeriesStop * std::abs(sum)) {
            if (++small_streak >= 3) {
                const double mag = std::abs(sum);
                return {sum < 0.0 ? -1.0 : 1.0, log_offset + std::log(mag)};
            }
        } else {
            small_streak = 0;
        }
        if (std::abs(sum) > 1e280 || std::abs(term) > 1e280) {
            const double scale = std::max(std::abs(sum), std::abs(term));
            sum /= scale;
            term /= scale;
            comp /= scale;
            log_offset += std::log(scale);
        }
    }
    throw std::runtime_error("kummer_m: series did not converge in 10000 terms");
}

// sign and log|Gamma(x)| for any non-pole x (reflection below zero). Internal
// helper for the asymptotic prefactor; the public log_gamma keeps x > 0.
SignedLog signed_log_gamma(double x) {
    if (x > 0.0) return {1.0, log_gamma(x)};
    const double s = std::sin(M_PI * x);
    if (s == 0.0) throw std::domain_error("signed_log_gamma: pole");
    // Gamma(x) = pi / (sin(pi x) Gamma(1-x))
    return {s < 0.0 ? -1.0 : 1.0, std::log(M_PI / std::abs(s)) - log_gamma(1.0 - x)};
}

// Large-z expansion M(a,b;z) ~ (Gamma(b)/Gamma(a)) e^z z^{a-b}
//   * sum_n (b-a)_n (1-a)_n / (n! z^n), truncated at the smallest term.
SignedLog asymptotic_log(double a, double b, double z) {
    // Non-positive integer a makes the series a polynomial; the prefactor
    // 1/Gamma(a) vanishes and this branch would lose it entirely.
    if (a <= 0.0 && std::abs(a - std::round(a)) < 1e-12) {
        return series_log(a, b, z);
    }
    double sum = 1.0, term = 1.0, prev = std::numeric_limits<double>::infinity();
    for (int n = 0; n < 500; ++n) {
        const double next = term * (b - a + n) * (1.0 - a + n) / ((n + 1) * z);
        if (std::abs(next) >= std::abs(prev) || std::abs(next) < 1e-17 * std::abs(sum)) {
            if (std::abs(next) < std::abs(prev)) sum += next;
            break;
        }
        term = next;
        prev = next;
        sum += term;
    }
    const SignedLog ga = signed_log_gamma(a);
    const SignedLog gb = signed_log_gamma(b);
    const double log_mag = gb.log_magnitude - ga.log_magnitude + z +
                           (a - b) * std::log(z) + std::log(std::abs(sum));
    const double sign = gb.sign * ga.sign * (sum < 0.0 ? -1.0 : 1.0);
    return {sign, log_mag};
}

SignedLog kummer_log_impl(double a, double b, double z) {
    if (z == 0.0) return {1.0, 0.0};
    if (z < 0.0) {
        // Kummer transform M(a,b;z) = e^z M(b-a,b;-z) avoids the cancelling
        // alternating series at negative arguments.
        SignedLog pos = (-z > kAsymptoticZ) ? asymptotic_log(b - a, b, -z)
                                            : series_log(b - a, b, -z);
        pos.log_magnitude += z;
        return pos;
    }
    if (z > kAsymptoticZ) return asymptotic_log(a, b, z);
    return series_log(a, b, z);
}

}  // namespace

double log_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("log_gamma: requires x > 0");
    // Lanczos, g = 7, 9 coefficients.
    static const double kCoef[9] = {
        0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // Reflection keeps the approximation on its accurate half-line.
        return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
    }
    const double xx = x - 1.0;
    double acc = kCoef[0];
    for (int i = 1; i < 9; ++i) acc += kCoef[i] / (xx + i);
    const double t = xx + 7.5;
    return 0.5 * std::log(2.0 * M_PI) + (xx + 0.5) * std::log(t) - t + std::log(acc);
}

double kummer_m(const KummerArgs& args) {
    validate(args);
    const SignedLog r = kummer_log_impl(args.a, args.b, args.z);
    if (r.log_magnitude > 709.0) {
        throw std::overflow_error("kummer_m: result exceeds double range, use kummer_m_log");
    }
    return r.sign * std::exp(r.log_magnitude);
}

SignedLog kummer_m_log(const KummerArgs& args) {
    validate(args);
    return kummer_log_impl(args.a, args.b, args.z);
}

double kummer_m_dz(const KummerArgs& args) {
    return args.a / args.b * kummer_m({args.a + 1.0, args.b + 1.0, args.z});
}

double kummer_m_quadrature(const KummerArgs& args) {
    validate(args);
    const double a = args.a, b = args.b, z = args.z;
    if (!(b > a) || !(a > 0.0)) {
        throw std::domain_error("kummer_m_quadrature: requires b > a > 0");
    }
    // tanh-sinh quadrature on (0,1); the double-exponential substitution
    // absorbs the endpoint singularities of u^{a-1}(1-u)^{b-a-1}. With
    // x = (pi/2) sinh t the node is u = 1/(1+e^{-2x}); u and 1-u are kept as
    // separate exact expressions so neither endpoint loses precision.
    const auto node_value = [&](double t) {
        const double x = 0.5 * M_PI * std::sinh(t);
        const double soft = std::log1p(std::exp(-2.0 * std::abs(x)));
        const double log_u = (x >= 0.0) ? -soft : 2.0 * x - soft;
        const double log_omu = (x >= 0.0) ? -2.0 * x - soft : -soft;
        const double u = std::exp(log_u);
        // dt weight: (pi/4) cosh t / cosh^2 x, folded into the exponent.
        const double log_cosh_x = std::abs(x) + soft - std::log(2.0);
        const double log_w = std::log(0.25 * M_PI * std::cosh(t)) - 2.0 * log_cosh_x;
        return std::exp(log_w + u * z + (a - 1.0) * log_u + (b - a - 1.0) * log_omu);
    };
    // Range must cover the slower endpoint decay rate ~exp(-2 min(a, b-a) |x|):
    // at t = 6.5, pi*sinh(t) ~ 1045, so even a = 0.05 is fully resolved.
    const double kHmax = 6.5;
    double result = 0.0, prev = 0.0;
    for (int level = 2; level <= 12; ++level) {
        const int n = 1 << level;
        const double h = kHmax / n;
        double acc = 0.0;
        for (int j = -n; j <= n; ++j) acc += node_value(j * h);
        result = acc * h;
        if (level > 4 && std::abs(result - prev) < 1e-13 * std::abs(result) + 1e-300) break;
        prev = result;
    }
    const double pref = log_gamma(b) - log_gamma(a) - log_gamma(b - a);
    return std::exp(pref) * result;
}

}  // namespace volput::specfn
