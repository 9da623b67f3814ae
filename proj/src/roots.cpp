#include "volput/roots.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace volput::roots {

std::vector<Bracket> bracket_roots(const RootProblem& problem, int n_probe) {
    if (!(problem.search_lo > 0.0) || !(problem.search_lo < problem.search_hi)) {
        throw std::invalid_argument("bracket_roots: requires 0 < search_lo < search_hi");
    }
    if (n_probe < 2) throw std::invalid_argument("bracket_roots: n_probe < 2");

    const double llo = std::log(problem.search_lo);
    const double lhi = std::log(problem.search_hi);
    std::vector<Bracket> out;
    double prev_x = 0.0, prev_f = 0.0;
    bool have_prev = false;
    for (int i = 0; i < n_probe; ++i) {
        const double x = std::exp(llo + (lhi - llo) * i / (n_probe - 1));
        double f;
        try {
            f = problem.objective(x);
        } catch (const std::exception&) {
            continue;  // isolated failure point, skip
        }
        if (!std::isfinite(f)) continue;
        if (have_prev && std::signbit(prev_f) != std::signbit(f) && prev_f != 0.0) {
            out.emplace_back(prev_x, x);
        }
        prev_x = x;
        prev_f = f;
        have_prev = true;
    }
    return out;
}

double refine_root(const RootProblem& problem, const Bracket& interval) {
    // Brent's method: inverse quadratic / secant steps accepted only while
    // they stay inside the bracket and shrink fast enough, bisection otherwise.
    double a = interval.first, b = interval.second;
    double fa = problem.objective(a), fb = problem.objective(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (std::signbit(fa) == std::signbit(fb)) {
        throw std::invalid_argument("refine_root: endpoints do not bracket a root");
    }
    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int iter = 0; iter < problem.max_iter; ++iter) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
                           0.5 * problem.rel_tol * std::abs(b);
        const double m = 0.5 * (c - b);
        if (std::abs(fb) <= problem.abs_tol || std::abs(m) <= tol) return b;
        if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
            d = m; e = m;  // bisection
        } else {
            double p, q;
            const double s = fb / fa;
            if (a == c) {  // secant
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {  // inverse quadratic
                const double qq = fa / fc, rr = fb / fc;
                p = s * (2.0 * m * qq * (qq - rr) - (b - a) * (rr - 1.0));
                q = (qq - 1.0) * (rr - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d; d = p / q;
            } else {
                d = m; e = m;
            }
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = problem.objective(b);
        if (fb == 0.0) return b;
        if (std::signbit(fb) == std::signbit(fc)) {
            c = a; fc = fa;
            d = b - a; e = d;
        }
    }
    throw std::runtime_error("refine_root: iteration limit reached");
}

}  // namespace volput::roots
