#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace volput::roots {

struct RootProblem {
    std::function<double(double)> objective;
    double search_lo;
    double search_hi;
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_iter = 200;
};

using Bracket = std::pair<double, double>;

// Probes the objective on a log-spaced grid of n_probe points and returns
// every adjacent pair with opposite signs. Evaluation failures at isolated
// probes are skipped. Empty result means no sign change was found.
std::vector<Bracket> bracket_roots(const RootProblem& problem, int n_probe = 400);

// Refines a sign-change interval by a bisection / inverse-quadratic /
// secant hybrid that never leaves the bracket. Throws std::runtime_error
// after max_iter iterations.
double refine_root(const RootProblem& problem, const Bracket& interval);

}  // namespace volput::roots
