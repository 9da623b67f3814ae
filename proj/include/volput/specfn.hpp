#pragma once

namespace volput::specfn {

// Arguments of Kummer's confluent hypergeometric function M(a,b;z).
struct KummerArgs {
    double a;
    double b;
    double z;
};

struct SignedLog {
    double sign;           // +1 or -1
    double log_magnitude;  // natural log of |value|
};

// M(a,b;z). Series for moderate z, Kummer transform for z<0, large-z
// asymptotic expansion beyond z=60 (documented accuracy 1e-8 there,
// 1e-12 relative for |z| <= 30). Throws std::domain_error when b is
// within 1e-8 of a non-positive integer, std::overflow_error when the
// result leaves double range (use kummer_m_log instead).
double kummer_m(const KummerArgs& args);

// Overflow-safe form: sign * exp(log_magnitude) = M(a,b;z).
SignedLog kummer_m_log(const KummerArgs& args);

// d/dz M(a,b;z) = (a/b) M(a+1,b+1;z).
double kummer_m_dz(const KummerArgs& args);

// Independent evaluation through the integral representation
//   M(a,b;z) = Gamma(b)/(Gamma(a)Gamma(b-a)) * int_0^1 e^{uz} u^{a-1}(1-u)^{b-a-1} du,
// valid for b > a > 0. Test oracle for the series path.
double kummer_m_quadrature(const KummerArgs& args);

// log Gamma(x) for x > 0 (Lanczos approximation, relative accuracy ~1e-13).
double log_gamma(double x);

}  // namespace volput::specfn
