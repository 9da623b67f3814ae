#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "volput/model.hpp"

namespace volput::oracle {

using model::ModelParams;
using model::PathConfig;

struct Grid {
    std::vector<double> nodes;  // strictly increasing, log-spaced
    double x_min;
    double x_max;
    int n;
};

// Log-spaced grid on [1e-3, max(10, 20K)] by default.
Grid make_log_grid(const ModelParams& params, int n,
                   std::optional<double> x_min = std::nullopt,
                   std::optional<double> x_max = std::nullopt);

enum class GridMode {
    DynkinGame,      // double obstacle g1 <= v <= g2
    AmericanOnly,    // single obstacle v >= g1 (cancellation disabled)
    KnockoutBarrier  // v >= g1 with the node at K pinned to the rebate
};

struct GridSolution {
    Grid grid;
    std::vector<double> values;
    std::vector<int> exercise_set;  // nodes where value = g1 (within tol)
    std::vector<int> cancel_set;    // nodes where value = g2 (within tol)
    int iterations;
    double residual;  // final max update of the relaxation sweep
    ModelParams params;
    GridMode mode;
    double value_at(double x) const;  // linear interpolation between nodes
    void write_csv(std::ostream& out) const;  // node,value,g1,g2,region
};

struct McEstimate {
    double mean;
    double std_error;
    int n_paths;
    bool discount_applied;
};

struct PsorConfig {
    double omega = 1.95;
    double tol = 1e-10;
    int max_sweeps = 50000;
};

// Solves the discretized stationary obstacle problem for L with central
// differences (drift upwinded per node where the centered stencil loses
// positivity) by projected SOR: value = median(g1, w, g2) at each update.
// Left boundary value(x_min) = K - x_min (deep-in-the-money exercise); the
// right boundary is a far-field Robin condition matched to the bounded basis
// solution, v'(x_max) = (phi1'/phi1)(x_max) * value(x_max), since values tend
// to a multiple of phi1 at large x under mean reversion (zero-slope fallback
// when the basis degenerates). Throws on non-convergence.
GridSolution solve_dynkin_grid(const ModelParams& params, const Grid& grid,
                               GridMode mode = GridMode::DynkinGame,
                               const PsorConfig& psor = {});

// Discounted payoff of the forced stopping pair: exercise at the first
// crossing below exercise_s (payoff K - s), cancel at the first crossing
// above barrier_K (payoff rebate), crossing times linearly interpolated
// within the step. Paths that reach the horizon contribute 0; more than 5%
// of them is an error. Deterministic given config.seed.
McEstimate mc_stopping_value(const ModelParams& params, const PathConfig& config,
                             double exercise_s, std::optional<double> barrier_K,
                             double rebate);

// Exercise boundary estimate: largest exercise-set node, refined by linear
// extrapolation of value - g1 back to zero from the two nodes above.
double boundary_from_grid(const GridSolution& solution);

}  // namespace volput::oracle
