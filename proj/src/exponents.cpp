#include "ssp/exponents.hpp"

#include <cmath>
#include <limits>

namespace ssp {

double sobolev_exponent(double m, double N) {
    if (N < 3.0) return std::numeric_limits<double>::infinity();
    return m * (N + 2.0) / (N - 2.0);
}

}  // namespace ssp

namespace ssp::exponents {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_mN(double m, double N) {
    if (!(m > 1.0)) throw std::domain_error("exponents: m must be > 1");
    if (!(N >= 3.0)) throw std::domain_error("exponents: N must be >= 3");
}
}  // namespace

double fujita_exponent(double m, double N) {
    check_mN(m, N);
    return m + 2.0 / N;
}

double joseph_lundgren_exponent(double m, double N) {
    check_mN(m, N);
    if (N < 11.0) return kInf;
    return m * (1.0 + 4.0 / (N - 4.0 - 2.0 * std::sqrt(N - 1.0)));
}

double lepin_exponent(double m, double N) {
    check_mN(m, N);
    if (N < 11.0) return kInf;
    const double d = N - 10.0;
    const double rad = (m - 1.0) * (m - 1.0) * d * d
                       + 2.0 * (m - 1.0) * (5.0 * m - 4.0) * d
                       + 9.0 * m * m;
    return 1.0 + (3.0 * m + std::sqrt(rad)) / d;
}

ExponentTable exponent_table(double m, double N) {
    check_mN(m, N);
    return ExponentTable{fujita_exponent(m, N), sobolev_exponent(m, N),
                         joseph_lundgren_exponent(m, N), lepin_exponent(m, N)};
}

ExponentTable exponent_table(const ParamTriple& q) { return exponent_table(q.m, q.N); }

double multiplicity_dimension_bound(int K, double m) {
    if (K < 2) throw std::domain_error("multiplicity_dimension_bound: K must be >= 2");
    if (!(m > 1.0)) throw std::domain_error("multiplicity_dimension_bound: m must be > 1");
    const double k = K;
    return 2.0 * (8.0 * k * k * m - 3.0 * k * m - 4.0 * k * k - 2.0 * k + 1.0)
           / ((2.0 * k - 1.0) * (m - 1.0));
}

double max_reaction_for_k(int K, double m) {
    if (K < 2) throw std::domain_error("max_reaction_for_k: K must be >= 2");
    if (!(m > 1.0)) throw std::domain_error("max_reaction_for_k: m must be > 1");
    return (K * m - 1.0) / (K - 1.0);
}

Regime classify_regime(const ParamTriple& q) {
    validate(q);
    const ExponentTable t = exponent_table(q.m, q.N);
    // p = p_F is folded into the all-blow-up range; the three upper boundary
    // cases are reported as distinct labels.
    if (q.p <= t.p_F) return Regime::SubFujita;
    if (q.p == t.p_s) return Regime::CriticalSobolev;
    if (q.p < t.p_s) return Regime::FujitaToSobolev;
    if (q.p == t.p_JL) return Regime::CriticalJL;
    if (q.p < t.p_JL) return Regime::SobolevToJL;
    if (q.p == t.p_L) return Regime::CriticalLepin;
    if (q.p < t.p_L) return Regime::JLToLepin;
    return Regime::SupraLepin;
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::SubFujita: return "subFujita";
        case Regime::FujitaToSobolev: return "Fujita-to-Sobolev";
        case Regime::CriticalSobolev: return "critical-Sobolev";
        case Regime::SobolevToJL: return "Sobolev-to-JL";
        case Regime::CriticalJL: return "critical-JL";
        case Regime::JLToLepin: return "JL-to-Lepin";
        case Regime::CriticalLepin: return "critical-Lepin";
        case Regime::SupraLepin: return "supra-Lepin";
    }
    return "unknown";
}

}  // namespace ssp::exponents
