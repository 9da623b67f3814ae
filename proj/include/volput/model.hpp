#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace volput::model {

// 3/2-model and contract constants:
//   dx = (alpha x - beta x^2) dt + k x^{3/2} dz, discount rate r,
//   strike K, cancellation penalty delta.
struct ModelParams {
    double alpha;
    double beta;
    double k;
    double r;
    double strike_K;
    double delta;
};

struct DerivedConstants {
    double A;
    double B;
};

// Values of the fundamental solutions of L f = 0 and their x-derivatives.
struct PhiBasis {
    double phi1;
    double phi2;
    double dphi1;
    double dphi2;
};

struct Advisory {
    std::string code;
    std::string message;
};

struct PathConfig {
    double x0;
    double dt;
    double horizon;
    std::uint64_t seed;
    int n_paths;
};

struct PathEnsemble {
    std::vector<double> times;            // shared time axis, size n_steps+1
    std::vector<std::vector<double>> paths;  // one x-trajectory per path
    double floor_trigger_fraction;        // fraction of steps hitting the positivity floor
    void write_csv(std::ostream& out) const;  // columns path_id,t,x
};

// Throws std::invalid_argument on violated fatal invariants.
void validate(const ModelParams& params);

// Non-fatal parameter warnings (drift/volatility regime outside the standing
// assumptions behind the condition checks).
std::vector<Advisory> advisories(const ModelParams& params);

// Substituting z = B/x into L f = 0 yields Kummer's equation
// z g'' + (A - z) g' - (r/alpha) g = 0 with A = 2(1 + beta/k^2), B = 2 alpha/k^2.
DerivedConstants derive_constants(const ModelParams& params);

// Phi1(x) = M(r/alpha, A; B/x)                       (bounded, decreasing, -> 1)
// Phi2(x) = (B/x)^{1-A} M(r/alpha+1-A, 2-A; B/x)     (grows like (x/B)^{A-1})
// plus first x-derivatives.
PhiBasis phi_basis(const ModelParams& params, double x);

// L f (x) = 0.5 k^2 x^3 f'' + (alpha x - beta x^2) f' - r f, with derivatives
// taken by central differences of step 1e-4 x. Test instrument.
double generator_residual(const ModelParams& params,
                          const std::function<double(double)>& f, double x);

// One full-truncation Euler step of the reciprocal process y = 1/x, which by
// Ito's formula follows dy = ((beta + k^2) - alpha y) dt - k sqrt(y) dz.
struct ReciprocalCirStepper {
    double kappa;  // beta + k^2
    double alpha;
    double k;
    explicit ReciprocalCirStepper(const ModelParams& p)
        : kappa(p.beta + p.k * p.k), alpha(p.alpha), k(p.k) {}
    // y may be carried negative by the scheme; coefficients use y^+.
    double step(double y, double z, double dt) const;
};

// Per-path deterministic substream derived from (seed, path_index).
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path_index);

// Simulates n_paths trajectories of x on the shared time grid. Deterministic
// given the seed regardless of threading. Throws std::runtime_error when the
// positivity floor triggers on more than 1% of steps (dt too coarse).
PathEnsemble simulate_paths(const ModelParams& params, const PathConfig& config);

}  // namespace volput::model
