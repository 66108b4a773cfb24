// Acceptance suite: one end-to-end criterion per case, each printed as a
// single pass/fail line with its measured values and runtime.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ssp/dynsys.hpp"
#include "ssp/exponents.hpp"
#include "ssp/odeint.hpp"
#include "ssp/profile.hpp"
#include "ssp/shooter.hpp"

using namespace ssp;
using Clock = std::chrono::steady_clock;

namespace {

const ParamTriple kFig1{2.0, 20.0, 10.0};
const ParamTriple kFig2{2.0, 100.0, 2.2};

// boundary member of the first experiment at the default settings, computed
// once by this suite's own bisection and frozen as a regression fixture
constexpr double kFrozenC0 = 5.34926681621118;

struct Criterion {
    std::string detail;
    bool ok = true;
    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::array<std::complex<double>, 3> eig3(const dynsys::Mat3& M) {
    const double tr = M(0, 0) + M(1, 1) + M(2, 2);
    const double c2 = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0) + M(0, 0) * M(2, 2) -
                      M(0, 2) * M(2, 0) + M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1);
    const double det = M(0, 0) * (M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1)) -
                       M(0, 1) * (M(1, 0) * M(2, 2) - M(1, 2) * M(2, 0)) +
                       M(0, 2) * (M(1, 0) * M(2, 1) - M(1, 1) * M(2, 0));
    const double a = c2 - tr * tr / 3.0;
    const double b = -det + tr * c2 / 3.0 - 2.0 * tr * tr * tr / 27.0;
    const std::complex<double> shift(tr / 3.0, 0.0);
    const std::complex<double> disc(b * b / 4.0 + a * a * a / 27.0, 0.0);
    const std::complex<double> sq = std::sqrt(disc);
    std::complex<double> u = std::pow(-b / 2.0 + sq, 1.0 / 3.0);
    if (std::abs(u) < 1e-30) u = std::pow(-b / 2.0 - sq, 1.0 / 3.0);
    const std::complex<double> v = (std::abs(u) > 0) ? -a / (3.0 * u) : 0.0;
    const std::complex<double> w(-0.5, std::sqrt(3.0) / 2.0);
    std::array<std::complex<double>, 3> roots{u + v + shift,
                                              u * w + v * std::conj(w) + shift,
                                              u * std::conj(w) + v * w + shift};
    for (auto& r : roots) {  // Newton polish; linear rate at repeated roots
        for (int it = 0; it < 48; ++it) {
            const std::complex<double> P = ((r - tr) * r + c2) * r - det;
            const std::complex<double> dP = (3.0 * r - 2.0 * tr) * r + c2;
            if (std::abs(dP) < 1e-300) break;
            const std::complex<double> step = P / dP;
            r -= step;
            if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(r))) break;
        }
    }
    return roots;
}

bool close_multiset(std::array<std::complex<double>, 3> a,
                    std::array<std::complex<double>, 3> b, double tol) {
    std::array<bool, 3> used{};
    for (std::size_t i = 0; i < 3; ++i) {
        // a repeated analytic root is only half-precision-conditioned for a
        // polynomial eigensolver
        bool repeated = false;
        for (std::size_t k = 0; k < 3; ++k)
            if (k != i && std::abs(a[i] - a[k]) <= 1e-9 * std::max(1.0, std::abs(a[i])))
                repeated = true;
        const double ti = repeated ? std::max(tol, 1e-6) : tol;
        bool hit = false;
        for (std::size_t j = 0; j < 3; ++j) {
            if (!used[j] && std::abs(a[i] - b[j]) <= ti * std::max(1.0, std::abs(a[i]))) {
                used[j] = true;
                hit = true;
                break;
            }
        }
        if (!hit) return false;
    }
    return true;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// shared state between criteria 5/6 and 8
struct SuiteState {
    std::vector<odeint::Trajectory> figure_trajectories;
    ParamTriple figure_params[2] = {kFig1, kFig2};
    std::vector<int> figure_which;  // 0 -> first experiment, 1 -> second
};
SuiteState g_state;

// ---------------------------------------------------------------------------

Criterion criterion1() {
    Criterion c;
    const auto t1 = exponents::exponent_table(2.0, 20.0);
    c.require(std::abs(t1.p_L - 3.2) < 1e-9, "p_L(2,20) = " + fmt(t1.p_L));
    const auto t2 = exponents::exponent_table(2.0, 100.0);
    c.require(std::abs(t2.p_L - (1.0 + 102.0 / 90.0)) < 1e-9,
              "p_L(2,100) = " + fmt(t2.p_L));
    c.require(std::abs(t2.p_L - 2.133) < 5e-4, "p_L(2,100) != 2.133 to 3 decimals");
    c.require(std::abs(t1.p_JL - 3.0986) < 1e-3, "p_JL(2,20) = " + fmt(t1.p_JL));
    if (c.ok)
        c.detail = "p_L(2,20) = " + fmt(t1.p_L) + ", p_L(2,100) = " + fmt(t2.p_L) +
                   ", p_JL(2,20) = " + fmt(t1.p_JL);
    return c;
}

Criterion criterion2() {
    Criterion c;
    double worst_s = 0.0, worst_jl = 0.0;
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            const double m = 1.1 + 3.9 * i / 9.0;
            const double N = 11.0 + 149.0 * j / 9.0;
            const auto t = exponents::exponent_table(m, N);
            const double scale = 4.0 * (N - 2.0);
            worst_s = std::max(worst_s,
                               std::abs(dynsys::discriminant_F({m, N, t.p_s}) + scale) / scale);
            worst_jl = std::max(
                worst_jl, std::abs(dynsys::discriminant_F({m, N, t.p_JL})) / scale);
        }
    }
    c.require(worst_s < 1e-9, "identity at the Sobolev exponent off by " + fmt(worst_s));
    c.require(worst_jl < 1e-9, "identity at the JL exponent off by " + fmt(worst_jl));

    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> um(1.2, 4.0), uN(11.0, 80.0), up(1.05, 5.0);
    int eig_fail = 0;
    for (int i = 0; i < 50; ++i) {
        const double m = um(rng), N = uN(rng);
        const ParamTriple q{m, N, sobolev_exponent(m, N) * up(rng)};
        for (const auto& cp : dynsys::critical_points(q)) {
            if (cp.chart != dynsys::Chart::Main || !cp.has_chart) continue;
            const auto J = dynsys::jacobian(dynsys::Chart::Main, q, cp.location);
            if (!close_multiset(cp.eigenvalues, eig3(J), 1e-8)) ++eig_fail;
        }
    }
    c.require(eig_fail == 0, std::to_string(eig_fail) + " eigen mismatches");
    if (c.ok)
        c.detail = "grid identities to " + fmt(std::max(worst_s, worst_jl)) +
                   " rel; 50 random spectra match to 1e-8";
    return c;
}

Criterion criterion3() {
    Criterion c;
    const auto flat = odeint::integrate(dynsys::Chart::Main, kFig1, {1.0, 0.0, 1.0}, 0.0,
                                        5.0, {}, {});
    double dev_flat = 0.0;
    for (const auto& s : flat.samples)
        dev_flat = std::max({dev_flat, std::abs(s.y[0] - s.y[2]), std::abs(s.y[1])});
    c.require(dev_flat < 1e-7, "flat-orbit deviation " + fmt(dev_flat));

    const auto s0 = dynsys::exact_orbit_state(dynsys::ExactOrbit::StatOrbit, kFig1, 0.0);
    const auto stat =
        odeint::integrate(dynsys::Chart::Main, kFig1, s0, 0.0, 5.0, {}, {});
    double dev_stat = 0.0;
    for (const auto& s : stat.samples)
        dev_stat = std::max({dev_stat, std::abs(s.y[1] + 0.25),
                             std::abs(s.y[2] - dynsys::stationary_Z0(kFig1))});
    c.require(dev_stat < 1e-7, "stationary-orbit deviation " + fmt(dev_stat));
    if (c.ok)
        c.detail = "deviations " + fmt(dev_flat) + " (flat), " + fmt(dev_stat) +
                   " (stationary) over span 5";
    return c;
}

Criterion criterion4() {
    Criterion c;
    const auto sing = profile::exact_profile_fn(profile::ExactKind::StationarySingular, kFig1);
    const auto flat = profile::exact_profile_fn(profile::ExactKind::ConstantStar, kFig1);
    double worst = 0.0;
    for (double xi : {0.1, 1.0, 10.0}) {
        worst = std::max(worst, std::abs(profile::ode_residual(kFig1, sing, xi)));
        worst = std::max(worst, std::abs(profile::ode_residual(kFig1, flat, xi)));
    }
    c.require(worst < 1e-10, "exact-solution residual " + fmt(worst));

    ParamTriple qs = kFig1;
    qs.p = sobolev_exponent(qs.m, qs.N);
    // independent calibration of the bubble constant by minimizing the
    // relative stationary residual of the parameterized family
    auto residual_at = [&](double k0) {
        const double s = (qs.N - 2.0) / (4.0 * qs.m);
        profile::ProfileFn fn;
        fn.f = [=](double xi) {
            const double den = xi * xi + 1.0;
            return std::pow(k0 / (den * den), s);
        };
        fn.df = [=, f = fn.f](double xi) {
            return f(xi) * (-4.0 * s * xi / (xi * xi + 1.0));
        };
        fn.d2f = [=, f = fn.f](double xi) {
            const double den = xi * xi + 1.0;
            const double lp = -4.0 * s * xi / den;
            const double lpp = -4.0 * s * (1.0 - xi * xi) / (den * den);
            return f(xi) * (lp * lp + lpp);
        };
        double w = 0.0;
        for (double xi : {0.4, 1.0, 2.5}) {
            const double scale = std::max(1.0, std::pow(fn.f(xi), qs.p));
            w = std::max(w, std::abs(profile::stationary_residual(qs, fn, xi)) / scale);
        }
        return w;
    };
    const double target = qs.N * (qs.N - 2.0);
    double a = 0.5 * target, b = 2.0 * target;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = residual_at(x1), f2 = residual_at(x2);
    for (int it = 0; it < 120; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = residual_at(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = residual_at(x2);
        }
    }
    const double k0_cal = 0.5 * (a + b);
    c.require(std::abs(k0_cal - target) / target < 1e-6,
              "calibrated constant " + fmt(k0_cal) + " vs " + fmt(target));
    const auto sob = profile::exact_profile_fn(profile::ExactKind::SobolevFamily, qs);
    double worst_sob = 0.0;
    for (double xi : {0.1, 0.4, 1.0, 2.5, 10.0})
        worst_sob = std::max(
            worst_sob, std::abs(profile::stationary_residual(qs, sob, xi)) /
                           std::max(1.0, std::pow(sob.f(xi), qs.p)));
    c.require(worst_sob < 1e-8, "bubble stationary residual " + fmt(worst_sob));
    if (c.ok)
        c.detail = "residuals " + fmt(worst) + " (closed forms), " + fmt(worst_sob) +
                   " (bubble); constant " + fmt(k0_cal);
    return c;
}

Criterion criterion5() {
    Criterion c;
    const auto lo = shooter::classify({1.5, 1e-7, kFig1}, {});
    const auto hi = shooter::classify({50.0, 1e-7, kFig1}, {});
    c.require(lo.oscillations >= 1 && lo.first_event &&
                  lo.first_event->name == shooter::kEventYZero,
              "C = 1.5 not on the oscillating side");
    c.require(hi.classification == shooter::SetLabel::SetA,
              "C = 50 not on the plunging side");

    shooter::ShooterOptions opts;
    const auto res = shooter::bisect_boundary(kFig1, 1.5, 50.0, 1e-10, opts, 0);
    c.require(res.converged, "bisection did not converge");
    c.require(res.outcome.classification == shooter::SetLabel::ConnectsQ1,
              "boundary outcome is " + shooter::to_string(res.outcome.classification));
    c.require(res.outcome.oscillations == 0,
              "oscillations = " + std::to_string(res.outcome.oscillations));

    const auto sp = profile::reconstruct(kFig1, res.outcome, res.C0);
    c.require(sp.monotone, "profile is not strictly decreasing");
    double decay = 0.0;
    if (res.outcome.z_limit) {
        decay = profile::extract_decay(kFig1, res.outcome).first;
        c.require(decay > dynsys::singular_constant(kFig1),
                  "decay constant " + fmt(decay) + " below the singular constant");
    } else {
        c.require(false, "no far-field limit recorded");
    }

    shooter::ShooterOptions halved;
    halved.delta = 0.5e-7;
    halved.tol.rel = 0.5e-12;
    halved.tol.abs = 0.5e-14;
    const auto res2 = shooter::bisect_boundary(kFig1, 1.5, 50.0, 1e-10, halved, 0);
    c.require(std::abs(res.C0 - res2.C0) < 10.0 * 1e-10,
              "re-run moved the boundary by " + fmt(std::abs(res.C0 - res2.C0)));
    c.require(std::abs(res.C0 - kFrozenC0) < 5e-8,
              "boundary " + fmt(res.C0) + " drifted from the frozen fixture");

    g_state.figure_trajectories.push_back(res.outcome.trajectory);
    g_state.figure_which.push_back(0);
    g_state.figure_trajectories.push_back(lo.trajectory);
    g_state.figure_which.push_back(0);
    g_state.figure_trajectories.push_back(hi.trajectory);
    g_state.figure_which.push_back(0);
    if (c.ok)
        c.detail = "boundary C = " + fmt(res.C0) + ", decay constant " + fmt(decay) +
                   " > " + fmt(dynsys::singular_constant(kFig1)) + ", re-run agrees to " +
                   fmt(std::abs(res.C0 - res2.C0));
    return c;
}

Criterion criterion6() {
    Criterion c;
    shooter::ShooterOptions opts;
    const auto rep = shooter::find_solutions(kFig2, 2, opts);
    c.require(rep.solutions.size() >= 2,
              "found " + std::to_string(rep.solutions.size()) + " solutions");
    if (rep.solutions.size() >= 2) {
        const auto& s0 = rep.solutions[0];
        const auto& s1 = rep.solutions[1];
        c.require(s0.outcome.oscillations == 0 && s1.outcome.oscillations == 1,
                  "oscillation counts {" + std::to_string(s0.outcome.oscillations) + ", " +
                      std::to_string(s1.outcome.oscillations) + "} instead of {0, 1}");
        c.require(s0.C != s1.C, "duplicate shooting parameters");
        const double cs = dynsys::singular_constant(kFig2);
        for (const auto& sol : {std::cref(s0), std::cref(s1)}) {
            const auto& out = sol.get().outcome;
            c.require(out.classification == shooter::SetLabel::ConnectsQ1,
                      "solution at C = " + fmt(sol.get().C) + " is " +
                          shooter::to_string(out.classification));
            if (out.z_limit) {
                const double decay = profile::extract_decay(kFig2, out).first;
                c.require(decay > cs, "decay constant " + fmt(decay) + " not above " + fmt(cs));
            }
            const auto sp = profile::reconstruct(kFig2, out, sol.get().C);
            c.require(profile::interior_local_maxima(sp.samples) == out.oscillations,
                      "profile maxima " +
                          std::to_string(profile::interior_local_maxima(sp.samples)) +
                          " != oscillations " + std::to_string(out.oscillations));
            g_state.figure_trajectories.push_back(out.trajectory);
            g_state.figure_which.push_back(1);
        }
        if (!c.ok)
            c.detail += "; measured classes {" + std::to_string(s0.outcome.oscillations) +
                        ", " + std::to_string(s1.outcome.oscillations) + "} at C = {" +
                        fmt(s0.C) + ", " + fmt(s1.C) + "}";
    }
    if (c.ok) c.detail = "two connecting orbits with the expected classes";
    return c;
}

Criterion criterion7() {
    Criterion c;
    const int c30 = shooter::lepin_zero_count({2.0, 20.0, 3.0}, 10.0, -30.0);
    c.require(c30 >= 3, "count(3.0) = " + std::to_string(c30));
    const int c4 = shooter::lepin_zero_count({2.0, 20.0, 4.0}, 10.0, -30.0);
    c.require(c4 == 2, "count(4) = " + std::to_string(c4));
    const int c10 = shooter::lepin_zero_count({2.0, 20.0, 10.0}, 10.0, -30.0);
    c.require(c10 == 2, "count(10) = " + std::to_string(c10));

    // transition of the count to 2 under bisection in the reaction exponent
    double lo = 3.0, hi = 4.0;
    for (int i = 0; i < 40 && hi - lo > 1e-4; ++i) {
        const double mid = 0.5 * (lo + hi);
        (shooter::lepin_zero_count({2.0, 20.0, mid}, 10.0, -30.0) >= 3 ? lo : hi) = mid;
    }
    const double p_star = 0.5 * (lo + hi);
    c.require(std::abs(p_star - 3.2) <= 0.05,
              "count transition at p = " + fmt(p_star) + " (0.05 band around 3.2)");

    for (const ParamTriple& q : {kFig1, kFig2}) {
        const int base = shooter::lepin_zero_count(q, 10.0, -30.0);
        shooter::LepinOptions big, small;
        big.c_scale = 10.0;
        small.c_scale = 0.1;
        const bool inv = shooter::lepin_zero_count(q, 10.0, -30.0, big) == base &&
                         shooter::lepin_zero_count(q, 10.0, -30.0, small) == base &&
                         shooter::lepin_zero_count(q, 20.0, -30.0) == base;
        c.require(inv, "count not invariant under the guard rescalings");
    }
    if (c.ok)
        c.detail = "counts {" + std::to_string(c30) + ", " + std::to_string(c4) + ", " +
                   std::to_string(c10) + "}, transition at " + fmt(p_star);
    return c;
}

Criterion criterion8() {
    Criterion c;
    if (g_state.figure_trajectories.empty()) {
        criterion5();
        criterion6();
    }
    int extrema = 0, cylinder = 0;
    for (std::size_t i = 0; i < g_state.figure_trajectories.size(); ++i) {
        const auto& traj = g_state.figure_trajectories[i];
        const ParamTriple& q = g_state.figure_params[g_state.figure_which[i]];
        extrema += shooter::region_extremum_violations(traj, q);
        cylinder += shooter::cylinder_violations(traj, q);
    }
    c.require(extrema == 0, std::to_string(extrema) + " forbidden interior extrema");
    c.require(cylinder == 0, std::to_string(cylinder) + " cylinder violations");

    int sign_fail = 0;
    for (int i = 1; i <= 1000; ++i) {
        const double y = -(kFig1.N - 2.0) / kFig1.m * i / 1001.0;
        const double z = dynsys::separating_curve_Z(kFig1, y);
        if (z > 0.0 && !(dynsys::separating_curve_flow(kFig1, y, z) < 0.0)) ++sign_fail;
        if (!(dynsys::dulac_divergence(kFig1, 0.01 + 10.0 * i / 1000.0) < 0.0)) ++sign_fail;
        const double yb = -2.0 / (kFig1.p - kFig1.m) * i / 1001.0;
        const double x = 30.0 * i / 1000.0;
        if (!(dynsys::cylinder_flow(kFig1, x, yb, dynsys::cylinder_Z(kFig1, yb)) >= 0.0))
            ++sign_fail;
    }
    c.require(sign_fail == 0, std::to_string(sign_fail) + " sign-check failures");
    if (c.ok)
        c.detail = "no forbidden extrema or cylinder crossings on " +
                   std::to_string(g_state.figure_trajectories.size()) +
                   " trajectories; 3000 sign checks hold";
    return c;
}

Criterion criterion9() {
    Criterion c;
    shooter::ShooterOptions opts;
    opts.continue_past_q3 = true;
    const auto out = shooter::classify({50.0, 1e-7, kFig1}, opts);
    c.require(out.reached_q3, "the plunging member missed the escape plane");
    try {
        const auto rep = profile::dead_core_diagnostic(kFig1, out);
        c.require(std::isfinite(rep.xi0_estimate) && rep.xi0_estimate > 0.0,
                  "interface radius " + fmt(rep.xi0_estimate));
        c.require(rep.flux < 0.0, "interface flux " + fmt(rep.flux));
        if (c.ok)
            c.detail = "profile falls below 1e-3 at radius " + fmt(rep.xi0_estimate) +
                       " with flux " + fmt(rep.flux);
    } catch (const std::exception& e) {
        c.require(false, e.what());
    }
    return c;
}

struct Entry {
    int number;
    double budget_seconds;
    std::function<Criterion()> run;
};

const std::vector<Entry> kCriteria = {
    {1, 1.0, criterion1},   {2, 10.0, criterion2}, {3, 1.0, criterion3},
    {4, 10.0, criterion4},  {5, 120.0, criterion5}, {6, 300.0, criterion6},
    {7, 60.0, criterion7},  {8, 60.0, criterion8},  {9, 10.0, criterion9},
};

}  // namespace

int main(int argc, char** argv) {
    int failures = 0;
    const int only = argc > 1 ? std::atoi(argv[1]) : 0;
    for (const auto& entry : kCriteria) {
        if (only != 0 && entry.number != only) continue;
        const auto t0 = Clock::now();
        Criterion c;
        try {
            c = entry.run();
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        if (secs > entry.budget_seconds) {
            c.ok = false;
            c.detail += (c.detail.empty() ? "" : "; ") + std::string("runtime ") +
                        fmt(secs) + " s over the " + fmt(entry.budget_seconds) +
                        " s budget";
        }
        std::printf("%s criterion-%d (%.2fs): %s\n", c.ok ? "PASS" : "FAIL", entry.number,
                    secs, c.detail.c_str());
        if (!c.ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
