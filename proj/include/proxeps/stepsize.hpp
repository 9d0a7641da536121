#pragma once

#include <stdexcept>
#include <vector>

namespace proxeps {

/// Numerator (f+g)(x^k) - s_k - eps_k of a Polyak step was nonpositive:
/// the estimate s_k is too high (or the iterate is optimal).
struct EstimateViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Denominator of a Polyak step vanished: the iterate is stationary.
struct StationaritySignal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fixed stepsize.
double step_constant(double alpha);

/// alpha0 / k^p, 1-based (k = 0 maps to k = 1).
double step_diminishing(double alpha0, double p, int k);

/// Polyak step gamma * (F - s_k - eps_k) / ||u + w||^2.
double step_polyak_alg1(double gamma, double F_xk, double s_k, double eps_k,
                        double u_plus_w_normsq);

/// Polyak step with the sigma-augmented denominator
/// sigma^2 c^2 / (1-sigma)^2 + ||u + w||^2.
double step_polyak_alg2(double gamma, double F_xk, double s_k, double eps_k,
                        double u_plus_w_normsq, double sigma, double c);

/// Known-optimum Polyak step (s_k == s_star, eps == 0). Returns 0 when
/// F_xk == s_star (converged). denom is the full denominator, so the
/// sigma-augmented variant is obtained by passing it in.
double step_polyak_exact(double gamma, double F_xk, double s_star, double denom);

/// Stepsize policy selected by a solver configuration.
struct StepsizePolicy {
    enum class Kind { Constant, Diminishing, PolyakAlg1, PolyakAlg2, PolyakExact };
    Kind kind = Kind::Constant;
    double alpha = 1.0;       // Constant
    double alpha0 = 1.0;      // Diminishing
    double exponent = 1.0;    // Diminishing
    double gamma_lo = 1.0;    // Polyak family
    double gamma_hi = 1.0;
    double s_star = 0;        // PolyakExact
    double s0 = 0;            // Polyak estimate start
    double s_decrease = 0.5;  // factor applied to (s_k - floor) on estimate violation

    static StepsizePolicy constant(double a);
    static StepsizePolicy diminishing(double a0, double p = 1.0);
    static StepsizePolicy polyak_exact(double s_star, double gamma = 1.0);

    void validate() const;
};

/// Monotone non-increasing optimal-value estimates for Polyak steps.
struct EstimateSequence {
    std::vector<double> values;

    void push(double s) {
        if (!values.empty() && s > values.back())
            throw std::invalid_argument("EstimateSequence: estimates must be non-increasing");
        values.push_back(s);
    }
    double current() const { return values.back(); }
};

}  // namespace proxeps
