#ifndef SSP_EXPONENTS_HPP
#define SSP_EXPONENTS_HPP

#include <string>

#include "ssp/params.hpp"

namespace ssp::exponents {

// Critical exponents of the reaction-diffusion problem, as functions of (m, N).
// Values that are infinite in low dimension are IEEE +inf, which compares
// greater than any finite reaction exponent.
struct ExponentTable {
    double p_F;   // Fujita: m + 2/N
    double p_s;   // Sobolev: m(N+2)/(N-2)
    double p_JL;  // Joseph-Lundgren: +inf for N < 11
    double p_L;   // Lepin: +inf for N < 11
};

double fujita_exponent(double m, double N);
double joseph_lundgren_exponent(double m, double N);
double lepin_exponent(double m, double N);

// All four exponents. Requires m > 1 and N >= 3.
ExponentTable exponent_table(double m, double N);
ExponentTable exponent_table(const ParamTriple& q);

// Dimension threshold above which at least K distinct profiles exist for
// every p in (p_L, (Km-1)/(K-1)):  2(8K^2 m - 3Km - 4K^2 - 2K + 1)/((2K-1)(m-1)).
double multiplicity_dimension_bound(int K, double m);

// Upper end (Km-1)/(K-1) of the reaction range carrying K distinct profiles.
double max_reaction_for_k(int K, double m);

enum class Regime {
    SubFujita,        // p <= p_F (all nontrivial solutions blow up)
    FujitaToSobolev,  // p_F < p < p_s
    CriticalSobolev,  // p == p_s
    SobolevToJL,      // p_s < p < p_JL
    CriticalJL,       // p == p_JL
    JLToLepin,        // p_JL < p < p_L
    CriticalLepin,    // p == p_L
    SupraLepin,       // p > p_L
};

Regime classify_regime(const ParamTriple& q);
std::string to_string(Regime r);

}  // namespace ssp::exponents

#endif
