#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "volput/model.hpp"

namespace volput::pricing {

using model::ModelParams;

struct NoAdmissibleRoot : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularSystem : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// g1(x) = (K-x)^+ and g2(x) = g1(x) + delta.
struct Payoffs {
    double strike_K;
    double delta;
    double g1(double x) const { return strike_K > x ? strike_K - x : 0.0; }
    double g2(double x) const { return g1(x) + delta; }
};

Payoffs payoffs(const ModelParams& params);

// Perpetual American put: v = K-x on (0,s], C Phi1(x) on (s,infinity) with
// smooth pasting -Phi1(s)/Phi1'(s) = K-s. The value tends to C > 0 at large x
// (the mean-reverting index returns from any level).
struct AmericanSolution {
    double boundary_s;
    double coefficient;  // C = (K-s)/Phi1(s)
    ModelParams params;
    double value(double x) const;
};

// Knock-out put with rebate delta paid at the barrier K:
//   v = K-x on (0,s];  C1 Phi1 + C2 Phi2 on (s,K];  delta Phi1(x)/Phi1(K) beyond,
// with v(s)=K-s, v'(s)=-1, v(K)=delta. delta=0 degenerates to s=K, v=g1.
struct KnockoutSolution {
    double boundary_s;
    double c1;
    double c2;
    ModelParams params;
    std::vector<double> candidate_roots;  // every bracketed root, diagnostics
    double value(double x) const;
    double slope(double x) const;  // closed-form v' on (s,K)
};

enum class Regime { AmericanEquivalent, KnockoutEquivalent, Undetermined };

std::string to_string(Regime regime);

// Callable (game) put dispatch:
//   delta >= delta* = v_A(K)      -> AmericanEquivalent, value = v_A
//   else, Theorem-4 or Theorem-5 sufficient condition holds
//                                 -> KnockoutEquivalent, value = v
//   else                          -> Undetermined, value = v plus a warning
struct CallableSolution {
    Regime regime;
    double delta_star;
    std::optional<double> slope_a;  // knock-out v'(K-), when that solve succeeded
    double d1;
    AmericanSolution american;
    std::optional<KnockoutSolution> knockout;
    std::vector<std::string> warnings;
    double value(double x) const;
};

// Solves the two-coefficient linear system
//   C1 Phi1(s) + C2 Phi2(s) = K-s,  C1 Phi1(K) + C2 Phi2(K) = delta
// at a given s. Throws SingularSystem when the determinant vanishes.
std::pair<double, double> knockout_coefficients(const ModelParams& params, double s);

AmericanSolution solve_american(const ModelParams& params);
KnockoutSolution solve_knockout(const ModelParams& params);

// Rebate-discounted barrier-hit value delta*Phi1(x)/Phi1(K) for x > K;
// strictly decreasing toward delta/Phi1(K), and < delta throughout.
double knockout_tail_value(const ModelParams& params, double x);

// Positive root of beta x^2 - (alpha-r) x - r(K+delta) = 0.
double compute_d1(const ModelParams& params);

// K <= d1 (sufficient condition for v <= g2 on the barrier side).
bool check_theorem4(const ModelParams& params);

// a = v'(K-) > -1 together with 2 beta s + r - alpha > 0.
bool check_theorem5(const ModelParams& params, const KnockoutSolution& solution);

CallableSolution solve_callable(const ModelParams& params);

}  // namespace volput::pricing
