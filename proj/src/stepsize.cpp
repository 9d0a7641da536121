#include "proxeps/stepsize.hpp"

#include <cmath>

namespace proxeps {

double step_constant(double alpha) {
    if (!(alpha > 0)) throw std::invalid_argument("step_constant: alpha must be positive");
    return alpha;
}

double step_diminishing(double alpha0, double p, int k) {
    if (!(alpha0 > 0)) throw std::invalid_argument("step_diminishing: alpha0 must be positive");
    if (!(p > 0 && p <= 1)) throw std::invalid_argument("step_diminishing: p must be in (0,1]");
    if (k < 1) k = 1;
    return alpha0 / std::pow(static_cast<double>(k), p);
}

double step_polyak_alg1(double gamma, double F_xk, double s_k, double eps_k,
                        double u_plus_w_normsq) {
    double numerator = F_xk - s_k - eps_k;
    if (u_plus_w_normsq <= 0) throw StationaritySignal("step_polyak_alg1: zero denominator");
    if (numerator <= 0) throw EstimateViolation("step_polyak_alg1: nonpositive numerator");
    return gamma * numerator / u_plus_w_normsq;
}

double step_polyak_alg2(double gamma, double F_xk, double s_k, double eps_k,
                        double u_plus_w_normsq, double sigma, double c) {
    double numerator = F_xk - s_k - eps_k;
    double denom = sigma * sigma * c * c / ((1.0 - sigma) * (1.0 - sigma)) + u_plus_w_normsq;
    if (denom <= 0) throw StationaritySignal("step_polyak_alg2: zero denominator");
    if (numerator <= 0) throw EstimateViolation("step_polyak_alg2: nonpositive numerator");
    return gamma * numerator / denom;
}

double step_polyak_exact(double gamma, double F_xk, double s_star, double denom) {
    double numerator = F_xk - s_star;
    if (numerator <= 0) return 0.0;  // converged
    if (denom <= 0) throw StationaritySignal("step_polyak_exact: zero denominator");
    return gamma * numerator / denom;
}

StepsizePolicy StepsizePolicy::constant(double a) {
    StepsizePolicy p;
    p.kind = Kind::Constant;
    p.alpha = a;
    p.validate();
    return p;
}

StepsizePolicy StepsizePolicy::diminishing(double a0, double pw) {
    StepsizePolicy p;
    p.kind = Kind::Diminishing;
    p.alpha0 = a0;
    p.exponent = pw;
    p.validate();
    return p;
}

StepsizePolicy StepsizePolicy::polyak_exact(double s_star, double gamma) {
    StepsizePolicy p;
    p.kind = Kind::PolyakExact;
    p.s_star = s_star;
    p.gamma_lo = p.gamma_hi = gamma;
    p.validate();
    return p;
}

void StepsizePolicy::validate() const {
    switch (kind) {
    case Kind::Constant:
        if (!(alpha > 0)) throw std::invalid_argument("StepsizePolicy: alpha must be positive");
        break;
    case Kind::Diminishing:
        if (!(alpha0 > 0)) throw std::invalid_argument("StepsizePolicy: alpha0 must be positive");
        if (!(exponent > 0 && exponent <= 1))
            throw std::invalid_argument("StepsizePolicy: exponent must be in (0,1]");
        break;
    case Kind::PolyakAlg1:
    case Kind::PolyakAlg2:
    case Kind::PolyakExact:
        if (!(gamma_lo > 0 && gamma_lo <= gamma_hi && gamma_hi < 2))
            throw std::invalid_argument("StepsizePolicy: need 0 < gamma_lo <= gamma_hi < 2");
        break;
    }
}

}  // namespace proxeps
