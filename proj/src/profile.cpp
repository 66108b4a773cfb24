#include "ssp/profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ssp/dynsys.hpp"
#include "ssp/exponents.hpp"

namespace ssp::profile {

ProfilePoint state_to_profile(const ParamTriple& q, const State& s) {
    validate(q);
    const double X = s[0], Z = s[2];
    if (!(X > 0.0) || !(Z > 0.0))
        throw std::domain_error("state_to_profile: requires X > 0 and Z > 0");
    const double beta = (q.p - q.m) / (2.0 * (q.p - 1.0));
    ProfilePoint pt;
    pt.f = std::pow(Z / ((q.p - 1.0) * X), 1.0 / (q.p - 1.0));
    pt.xi = std::sqrt(q.m) * std::pow((q.p - 1.0) * X, beta) *
            std::pow(Z, (q.m - 1.0) / (2.0 * (q.p - 1.0)));
    return pt;
}

std::pair<double, double> profile_to_XZ(const ParamTriple& q, const ProfilePoint& pt) {
    validate(q);
    if (!(pt.xi > 0.0) || !(pt.f > 0.0))
        throw std::domain_error("profile_to_XZ: requires xi > 0 and f > 0");
    const double X = pt.xi * pt.xi * std::pow(pt.f, 1.0 - q.m) / (q.m * (q.p - 1.0));
    const double Z = pt.xi * pt.xi * std::pow(pt.f, q.p - q.m) / q.m;
    return {X, Z};
}

double flat_constant(const ParamTriple& q) {
    return std::pow(1.0 / (q.p - 1.0), 1.0 / (q.p - 1.0));
}

namespace {

void check_sobolev(const ParamTriple& q) {
    const double ps = sobolev_exponent(q.m, q.N);
    if (std::abs(q.p - ps) > 1e-12 * ps)
        throw std::domain_error("SobolevFamily: requires p = m(N+2)/(N-2)");
}

// f = [K0 C / (xi^2 + C)^2]^s with K0 = N(N-2), s = (N-2)/(4m)
double sobolev_value(const ParamTriple& q, double xi, double C) {
    const double s = (q.N - 2.0) / (4.0 * q.m);
    const double den = xi * xi + C;
    return std::pow(q.N * (q.N - 2.0) * C / (den * den), s);
}

}  // namespace

double exact_profile(ExactKind kind, const ParamTriple& q, double xi, double Cfam) {
    validate(q);
    switch (kind) {
        case ExactKind::ConstantStar: return flat_constant(q);
        case ExactKind::StationarySingular: {
            if (!(xi > 0.0))
                throw std::domain_error("StationarySingular: requires xi > 0");
            return dynsys::singular_constant(q) * std::pow(xi, -2.0 / (q.p - q.m));
        }
        case ExactKind::SobolevFamily: {
            check_sobolev(q);
            if (!(Cfam > 0.0)) throw std::domain_error("SobolevFamily: requires C > 0");
            return sobolev_value(q, xi, Cfam);
        }
    }
    throw std::domain_error("exact_profile: unknown kind");
}

double exact_profile_deriv(ExactKind kind, const ParamTriple& q, double xi, double Cfam) {
    switch (kind) {
        case ExactKind::ConstantStar: return 0.0;
        case ExactKind::StationarySingular: {
            const double a = -2.0 / (q.p - q.m);
            return a * exact_profile(kind, q, xi, Cfam) / xi;
        }
        case ExactKind::SobolevFamily: {
            // d/dxi of [K0 C]^s (xi^2+C)^(-2s)
            const double s = (q.N - 2.0) / (4.0 * q.m);
            const double den = xi * xi + Cfam;
            return exact_profile(kind, q, xi, Cfam) * (-2.0 * s) * 2.0 * xi / den;
        }
    }
    throw std::domain_error("exact_profile_deriv: unknown kind");
}

double exact_profile_deriv2(ExactKind kind, const ParamTriple& q, double xi, double Cfam) {
    switch (kind) {
        case ExactKind::ConstantStar: return 0.0;
        case ExactKind::StationarySingular: {
            const double a = -2.0 / (q.p - q.m);
            return a * (a - 1.0) * exact_profile(kind, q, xi, Cfam) / (xi * xi);
        }
        case ExactKind::SobolevFamily: {
            const double s = (q.N - 2.0) / (4.0 * q.m);
            const double den = xi * xi + Cfam;
            const double f = exact_profile(kind, q, xi, Cfam);
            const double lp = -4.0 * s * xi / den;  // (log f)'
            const double lpp = -4.0 * s * (Cfam - xi * xi) / (den * den);
            return f * (lp * lp + lpp);
        }
    }
    throw std::domain_error("exact_profile_deriv2: unknown kind");
}

ProfileFn exact_profile_fn(ExactKind kind, const ParamTriple& q, double Cfam) {
    ProfileFn fn;
    fn.f = [=](double xi) { return exact_profile(kind, q, xi, Cfam); };
    fn.df = [=](double xi) { return exact_profile_deriv(kind, q, xi, Cfam); };
    fn.d2f = [=](double xi) { return exact_profile_deriv2(kind, q, xi, Cfam); };
    return fn;
}

namespace {

// (f^m)' and (f^m)'' from f, f', f''
std::pair<double, double> power_derivs(double m, double f, double df, double d2f) {
    const double fm1 = std::pow(f, m - 1.0);
    const double fm2 = std::pow(f, m - 2.0);
    const double d1 = m * fm1 * df;
    const double d2 = m * (m - 1.0) * fm2 * df * df + m * fm1 * d2f;
    return {d1, d2};
}

}  // namespace

double ode_residual(const ParamTriple& q, const ProfileFn& fn, double xi) {
    validate(q);
    if (!(xi > 0.0)) throw std::domain_error("ode_residual: requires xi > 0");
    const double f = fn.f(xi), df = fn.df(xi), d2f = fn.d2f(xi);
    const auto [g1, g2] = power_derivs(q.m, f, df, d2f);
    const double beta = (q.p - q.m) / (2.0 * (q.p - 1.0));
    return g2 + (q.N - 1.0) / xi * g1 - f / (q.p - 1.0) - beta * xi * df +
           std::pow(f, q.p);
}

double stationary_residual(const ParamTriple& q, const ProfileFn& fn, double xi) {
    validate(q);
    if (!(xi > 0.0)) throw std::domain_error("stationary_residual: requires xi > 0");
    const double f = fn.f(xi), df = fn.df(xi), d2f = fn.d2f(xi);
    const auto [g1, g2] = power_derivs(q.m, f, df, d2f);
    return g2 + (q.N - 1.0) / xi * g1 + std::pow(f, q.p);
}

std::vector<double> sampled_residuals(const ParamTriple& q,
                                      const std::vector<ProfilePoint>& samples) {
    validate(q);
    std::vector<double> out;
    if (samples.size() < 5) return out;
    // resample assumed: callers provide a uniform log-xi grid
    const double h = std::log(samples[1].xi) - std::log(samples[0].xi);
    for (std::size_t i = 2; i + 2 < samples.size(); ++i) {
        const double xi = samples[i].xi;
        const double fm2 = samples[i - 2].f, fm1 = samples[i - 1].f, f0 = samples[i].f,
                     fp1 = samples[i + 1].f, fp2 = samples[i + 2].f;
        // d/du with u = log xi, 5-point centered
        const double du = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
        const double duu =
            (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
        const double df = du / xi;
        const double d2f = (duu - du) / (xi * xi);
        ProfileFn fn;
        fn.f = [f0](double) { return f0; };
        fn.df = [df](double) { return df; };
        fn.d2f = [d2f](double) { return d2f; };
        out.push_back(ode_residual(q, fn, xi));
    }
    return out;
}

SolutionProfile reconstruct(const ParamTriple& q, const shooter::ShotOutcome& outcome,
                            double C_shoot) {
    validate(q);
    SolutionProfile sp;
    sp.C_shoot = C_shoot;
    sp.oscillations = outcome.oscillations;
    for (const auto& s : outcome.trajectory.samples) {
        if (!(s.y[0] > 0.0 && s.y[2] > 0.0)) continue;
        const ProfilePoint pt = state_to_profile(q, s.y);
        if (!sp.samples.empty() && !(pt.xi > sp.samples.back().xi)) continue;
        sp.samples.push_back(pt);
    }
    if (sp.samples.empty()) throw std::domain_error("reconstruct: no admissible samples");
    sp.f0 = sp.samples.front().f;
    sp.monotone = true;
    for (std::size_t i = 1; i < sp.samples.size(); ++i)
        if (sp.samples[i].f > sp.samples[i - 1].f * (1.0 + 1e-12)) sp.monotone = false;
    if (outcome.classification == shooter::SetLabel::ConnectsQ1)
        sp.decay_C = extract_decay(q, outcome).first;
    return sp;
}

std::pair<double, double> extract_decay(const ParamTriple& q,
                                        const shooter::ShotOutcome& outcome) {
    validate(q);
    if (outcome.classification != shooter::SetLabel::ConnectsQ1 || !outcome.z_limit)
        throw std::domain_error("extract_decay: outcome does not connect to the far field");
    const double decay_C = std::pow(q.m * *outcome.z_limit, 1.0 / (q.p - q.m));
    const double a = 2.0 / (q.p - q.m);
    // deviation of f xi^a from decay_C over the last decade of xi
    double xi_end = 0.0;
    for (auto it = outcome.trajectory.samples.rbegin();
         it != outcome.trajectory.samples.rend(); ++it) {
        if (it->y[0] > 0.0 && it->y[2] > 0.0) {
            xi_end = state_to_profile(q, it->y).xi;
            break;
        }
    }
    double fit = 0.0;
    for (const auto& s : outcome.trajectory.samples) {
        if (!(s.y[0] > 0.0 && s.y[2] > 0.0)) continue;
        const ProfilePoint pt = state_to_profile(q, s.y);
        if (pt.xi < 0.1 * xi_end) continue;
        fit = std::max(fit, std::abs(pt.f * std::pow(pt.xi, a) - decay_C) / decay_C);
    }
    return {decay_C, fit};
}

DeadCoreReport dead_core_diagnostic(const ParamTriple& q,
                                    const shooter::ShotOutcome& outcome, double f_floor) {
    validate(q);
    if (!outcome.reached_q3)
        throw std::domain_error("dead_core_diagnostic: outcome did not escape below "
                                "Y = -(N-2)/m");
    DeadCoreReport rep;
    rep.f_floor = f_floor;
    const auto& samples = outcome.trajectory.samples;
    ProfilePoint prev{};
    bool have_prev = false;
    for (const auto& s : samples) {
        if (!(s.y[0] > 0.0 && s.y[2] > 0.0)) continue;
        const ProfilePoint pt = state_to_profile(q, s.y);
        if (pt.f < f_floor) {
            // log-linear interpolation in (xi, f) to the crossing
            double xi0 = pt.xi;
            if (have_prev && prev.f > f_floor && pt.xi > prev.xi) {
                const double t = (std::log(prev.f) - std::log(f_floor)) /
                                 (std::log(prev.f) - std::log(pt.f));
                xi0 = prev.xi + t * (pt.xi - prev.xi);
            }
            rep.xi0_estimate = xi0;
            // (f^m)' = m Y f^m / xi
            rep.flux = q.m * s.y[1] * std::pow(pt.f, q.m) / pt.xi;
            return rep;
        }
        prev = pt;
        have_prev = true;
    }
    throw std::domain_error("dead_core_diagnostic: profile never fell below the floor; "
                            "extend the plunge (continue_past_q3)");
}

double dead_core_local_profile(const ParamTriple& q, double xi, double xi0) {
    validate(q);
    const double arg =
        (q.p - q.m) * (q.m - 1.0) * (xi * xi - xi0 * xi0) / (4.0 * q.m * (q.p - 1.0));
    return arg > 0.0 ? std::pow(arg, 1.0 / (q.m - 1.0)) : 0.0;
}

double near_origin_profile(const ParamTriple& q, double C, double xi) {
    validate(q);
    if (!(C > 0.0)) throw std::domain_error("near_origin_profile: requires C > 0");
    const double lead = std::pow(C / (q.p - 1.0), (q.m - 1.0) / (q.p - 1.0));
    const double quad =
        (1.0 - C) * (q.m - 1.0) * xi * xi / (2.0 * q.m * q.N * (q.p - 1.0));
    return std::pow(lead + quad, 1.0 / (q.m - 1.0));
}

int interior_local_maxima(const std::vector<ProfilePoint>& samples,
                          double rel_prominence) {
    if (samples.size() < 3) return 0;
    // multiplicative hysteresis, so humps on the power-law tail count the
    // same as humps near the origin
    const double up = 1.0 + rel_prominence;
    int count = 0;
    bool armed = false;  // rose by the factor since the last valley
    double vmin = samples[0].f, vmax = samples[0].f;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double f = samples[i].f;
        if (!armed) {
            vmin = std::min(vmin, f);
            if (f > vmin * up) {
                armed = true;
                vmax = f;
            }
        } else {
            vmax = std::max(vmax, f);
            if (f * up < vmax) {
                ++count;
                armed = false;
                vmin = f;
            }
        }
    }
    return count;
}

}  // namespace ssp::profile
