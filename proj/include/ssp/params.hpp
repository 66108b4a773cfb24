#ifndef SSP_PARAMS_HPP
#define SSP_PARAMS_HPP

#include <stdexcept>
#include <string>

namespace ssp {

// Problem parameters of u_t = Lap(u^m) + u^p. N is kept as a real so the
// exponent curves can be evaluated continuously in the dimension.
struct ParamTriple {
    double m;  // diffusion exponent, m > 1
    double N;  // space dimension, N >= 3
    double p;  // reaction exponent, p > m
};

inline void validate(const ParamTriple& q) {
    if (!(q.m > 1.0))
        throw std::domain_error("ParamTriple: m must be > 1, got m=" + std::to_string(q.m));
    if (!(q.N >= 3.0))
        throw std::domain_error("ParamTriple: N must be >= 3, got N=" + std::to_string(q.N));
    if (!(q.p > q.m))
        throw std::domain_error("ParamTriple: p must be > m, got p=" + std::to_string(q.p));
}

// Sobolev-critical threshold m(N+2)/(N-2); several routines require p above it.
double sobolev_exponent(double m, double N);

inline void require_supercritical(const ParamTriple& q, const char* who) {
    validate(q);
    if (!(q.p > sobolev_exponent(q.m, q.N)))
        throw std::domain_error(std::string(who) + ": requires p > m(N+2)/(N-2)");
}

}  // namespace ssp

#endif
