#pragma once

namespace fpt::specfun {

/// Controls the accuracy/cost trade-off of the hypergeometric evaluators.
struct EvalPolicy {
    double rel_tol = 1e-12;
    int max_terms = 500;
    /// Above this argument U(a, b, x) is taken from its large-x asymptotic series.
    double asymptotic_switch = 50.0;

    /// Throws DomainError when a field violates its invariant.
    void validate() const;
};

/// Gamma function. Lanczos approximation with reflection for x < 1/2.
/// Throws PoleError at 0, -1, -2, ...
double gamma(double x);

/// 1 / Gamma(x); zero at the poles of Gamma instead of throwing.
double rgamma(double x);

/// Kummer's function M(a, b, x) by direct summation of its power series.
/// The sum terminates exactly when a is a non-positive integer.
double kummer_m(double a, double b, double x, const EvalPolicy& policy = {});

/// Tricomi's function U(a, b, x) for real a, non-integer b and x > 0.
///
/// For a > 0 the value comes from one of three routes depending on x: the
/// two-term Kummer connection formula (small x), the Laplace integral
/// representation (intermediate x) or the asymptotic series (x at or above
/// policy.asymptotic_switch). Non-positive a is reached from two positive
/// seeds by the three-term recurrence in a, which is stable in that
/// direction. Non-positive integer a yields the exact polynomial.
double tricomi_u(double a, double b, double x, const EvalPolicy& policy = {});

}  // namespace fpt::specfun
