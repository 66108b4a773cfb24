#include "ssp/shooter.hpp"

#include <quadmath.h>

#include <algorithm>
#include <climits>
#include <cmath>
#include <stdexcept>

#include "ssp/dynsys.hpp"
#include "ssp/exponents.hpp"

namespace ssp::shooter {

using dynsys::Chart;
using odeint::Direction;
using odeint::EventSpec;
using odeint::IntegrateOptions;
using odeint::Termination;

namespace {

struct Effective {
    double y_lower;   // -2/(p-m)
    double y_q3;      // -(N-2)/m
    double x_big;
    double x_cap;
    double band_lo;   // -(N-2)/m + 1e-6
    double band_hi;   // -1e-9
};

Effective resolve(const ParamTriple& q, const ShooterOptions& opts) {
    Effective e;
    e.y_lower = -2.0 / (q.p - q.m);
    e.y_q3 = -(q.N - 2.0) / q.m;
    e.x_big = opts.x_big > 0.0 ? opts.x_big : default_x_big(q);
    e.x_cap = opts.x_cap > 0.0 ? opts.x_cap : std::max(1e4, 100.0 * e.x_big);
    e.x_cap = std::max(e.x_cap, 2.0 * e.x_big);
    e.band_lo = e.y_q3 + 1e-6;
    e.band_hi = -1e-9;
    return e;
}

IntegrateOptions make_iopts(const ShooterOptions& opts) {
    IntegrateOptions io;
    io.tol = opts.tol;
    io.overflow_bound = opts.overflow_bound;
    return io;
}

std::vector<EventSpec> base_events(const Effective& e, const ShooterOptions& opts,
                                   int zero_budget) {
    std::vector<EventSpec> ev;
    ev.push_back(EventSpec{kEventYZero, [](double, const State& s) { return s[1]; },
                           Direction::Any, zero_budget});
    ev.push_back(EventSpec{kEventYLower,
                           [y = e.y_lower](double, const State& s) { return s[1] - y; },
                           Direction::Any, 0});
    ev.push_back(EventSpec{kEventYQ3,
                           [y = e.y_q3](double, const State& s) { return s[1] - y; },
                           Direction::Falling, opts.continue_past_q3 ? 0 : 1});
    // the hard cap guards classification runs; a deliberate plunge past the
    // escape plane must run to the interface instead
    if (!opts.continue_past_q3)
        ev.push_back(EventSpec::terminal(
            kEventXCap, [x = e.x_cap](double, const State& s) { return s[0] - x; },
            Direction::Rising));
    return ev;
}

EventSpec q1_monitor(const Effective& e, double x_threshold) {
    return EventSpec::terminal(
        kEventQ1,
        [xb = x_threshold, lo = e.band_lo, hi = e.band_hi](double, const State& s) {
            return std::min({s[0] - xb, s[1] - lo, hi - s[1]});
        },
        Direction::Rising);
}

void append_trajectory(Trajectory& dst, const Trajectory& src) {
    for (std::size_t i = 0; i < src.samples.size(); ++i) {
        if (!dst.samples.empty() && src.samples[i].eta <= dst.samples.back().eta) continue;
        dst.samples.push_back(src.samples[i]);
    }
    dst.events.insert(dst.events.end(), src.events.begin(), src.events.end());
    dst.near_misses.insert(dst.near_misses.end(), src.near_misses.begin(),
                           src.near_misses.end());
    dst.termination = src.termination;
    dst.terminal_event = src.terminal_event;
    dst.eta_end = src.eta_end;
}

double peak_in_window(const Trajectory& traj, double eta_a, double eta_b) {
    double peak = 0.0;
    for (const auto& s : traj.samples) {
        if (s.eta <= eta_a) continue;
        if (s.eta >= eta_b) break;
        peak = std::max(peak, s.y[1]);
    }
    for (int j = 1; j <= 3; ++j) {
        const double eta = eta_a + (eta_b - eta_a) * j / 4.0;
        peak = std::max(peak, traj.dense_eval(eta)[1]);
    }
    return peak;
}

ShotOutcome build_outcome(Trajectory traj, const ParamTriple& q, const Effective& e,
                          const ShooterOptions& opts) {
    ShotOutcome out;

    // set-deciding first crossing
    for (const auto& ev : traj.events) {
        const bool deciding = (ev.name == kEventYLower && ev.direction < 0) ||
                              (ev.name == kEventYZero && ev.direction > 0);
        if (deciding) {
            out.first_event = ev;
            break;
        }
    }

    // excursions into {Y > 0}
    for (const auto& ev : traj.events) {
        if (ev.name != kEventYZero) continue;
        if (ev.direction > 0) {
            Oscillation o;
            o.eta_enter = ev.eta;
            o.eta_exit = std::numeric_limits<double>::quiet_NaN();
            out.excursions.push_back(o);
        } else if (!out.excursions.empty() && !out.excursions.back().complete &&
                   std::isnan(out.excursions.back().eta_exit)) {
            Oscillation& o = out.excursions.back();
            o.eta_exit = ev.eta;
            o.peak = peak_in_window(traj, o.eta_enter, o.eta_exit);
            o.complete = true;
        }
    }
    int started = 0;
    for (auto& o : out.excursions) {
        if (!o.complete) {
            o.peak = peak_in_window(traj, o.eta_enter, traj.samples.back().eta);
            ++started;  // open excursion: counted (a genuine upcrossing happened)
        } else if (o.peak > opts.osc_hysteresis) {
            ++started;
        }
    }
    out.oscillations = started;

    out.reached_q3 = traj.find_event(kEventYQ3) != nullptr;
    for (const auto& s : traj.samples)
        if (s.y[1] < e.y_q3) out.reached_q3 = true;

    const bool q1_fired = traj.termination == Termination::EventTerminal &&
                          traj.terminal_event == kEventQ1;
    const State last = traj.samples.back().y;
    const bool cap_in_band = traj.termination == Termination::EventTerminal &&
                             traj.terminal_event == kEventXCap && last[1] > e.band_lo &&
                             last[1] < e.band_hi;

    if (q1_fired || cap_in_band) {
        out.classification = SetLabel::ConnectsQ1;
        // far-field diagnostics on the tail
        const double eta_f = traj.samples.back().eta;
        double eta_entry = traj.eta_begin;
        for (const auto& ev : traj.events)
            if (ev.name == kEventYZero || ev.name == kEventYLower)
                eta_entry = std::max(eta_entry, ev.eta);
        const double d = std::clamp((eta_f - eta_entry) / 3.0, 1e-3, 2.0);
        if (eta_f - 2.0 * d > traj.eta_begin) {
            const double z1 = traj.dense_eval(eta_f - 2.0 * d)[2];
            const double z2 = traj.dense_eval(eta_f - d)[2];
            const double z3 = traj.samples.back().y[2];
            const double dz1 = z2 - z1, dz2 = z3 - z2;
            if (dz1 * dz2 > 0.0 && std::abs(dz2) < std::abs(dz1))
                out.z_limit = z3 - dz2 * dz2 / (dz2 - dz1);
            else
                out.z_limit = z3;
        } else {
            out.z_limit = last[2];
        }
        const double x_end = last[0];
        double zmin = last[2], zmax = last[2];
        for (const auto& s : traj.samples) {
            if (s.y[0] >= 0.1 * x_end) {
                zmin = std::min(zmin, s.y[2]);
                zmax = std::max(zmax, s.y[2]);
            }
        }
        out.z_drift = (zmax - zmin) / std::max(std::abs(last[2]), 1e-300);
        // center-manifold residual at mid-tail and at the end
        const State* mid = nullptr;
        for (const auto& s : traj.samples)
            if (s.y[0] >= 0.25 * x_end && s.y[0] > 0.0) {
                mid = &s.y;
                break;
            }
        if (mid) out.cmf_residual_mid = dynsys::center_manifold_residual(q, *mid);
        out.cmf_residual_end = dynsys::center_manifold_residual(q, last);
        if (out.z_drift > opts.drift_tol) out.classification = SetLabel::Undetermined;
    } else if (out.first_event && out.first_event->name == kEventYLower) {
        out.classification = SetLabel::SetA;
    } else if (out.first_event) {
        // upcross first: oscillating side; in confirmation mode a tail that
        // subsequently fell below the escape plane is the plunging verdict
        out.classification = (opts.target_oscillations >= 0 && out.reached_q3)
                                 ? SetLabel::EntersQ3
                                 : SetLabel::SetC;
    } else if (out.reached_q3) {
        out.classification = SetLabel::SetA;
    } else {
        out.classification = SetLabel::Undetermined;
    }
    out.trajectory = std::move(traj);
    return out;
}

}  // namespace

std::string to_string(SetLabel s) {
    switch (s) {
        case SetLabel::SetA: return "SetA";
        case SetLabel::SetC: return "SetC";
        case SetLabel::ConnectsQ1: return "ConnectsQ1";
        case SetLabel::EntersQ3: return "EntersQ3";
        case SetLabel::Undetermined: return "Undetermined";
    }
    return "?";
}

double default_x_big(const ParamTriple& q) {
    return std::max(10.0, 2.5 * 2.0 * (q.N - 2.0) / (q.p - 1.0));
}

State launch_state(const LaunchSpec& spec) {
    validate(spec.params);
    if (!(spec.C > 0.0)) throw std::domain_error("launch: requires C > 0");
    if (!(spec.delta >= 1e-8 && spec.delta <= 1e-4))
        throw std::domain_error("launch: delta must lie in [1e-8, 1e-4]");
    // Offset normalized by max(1, C) so the launch point stays within the
    // tangent-plane regime for every member of the family. The ratio Z/X
    // additionally carries the first-order drift of the family label
    // accumulated between the saddle and the offset; without it the located
    // boundaries move linearly in delta.
    const double x0 = spec.delta / std::max(1.0, spec.C);
    const double z_tan = spec.C * x0;
    const double drift =
        std::exp((spec.params.p - 1.0) * (x0 - z_tan) / (2.0 * spec.params.N));
    const double z0 = z_tan * drift;
    return State{x0, (x0 - z0) / spec.params.N, z0};
}

Trajectory launch(const LaunchSpec& spec, const ShooterOptions& opts) {
    const Effective e = resolve(spec.params, opts);
    const auto events = base_events(e, opts, opts.max_zero_crossings);
    return odeint::integrate(Chart::Main, spec.params, launch_state(spec), 0.0,
                             opts.eta_span, events, make_iopts(opts));
}

ShotOutcome classify(const LaunchSpec& spec, const ShooterOptions& opts) {
    require_supercritical(spec.params, "classify");
    const ParamTriple q = spec.params;
    const Effective e = resolve(q, opts);
    const IntegrateOptions io = make_iopts(opts);

    if (opts.target_oscillations < 0)
        return build_outcome(launch(spec, opts), q, e, opts);

    // Confirmation mode: traverse the first k oscillations, then watch the
    // far-field monitor on the tail.
    const int k = opts.target_oscillations;
    Trajectory traj;
    State y0 = launch_state(spec);
    double eta0 = 0.0;
    if (k > 0) {
        auto ev = base_events(e, opts, 2 * k);
        traj = odeint::integrate(Chart::Main, q, y0, eta0, opts.eta_span, ev, io);
        if (!(traj.termination == Termination::EventTerminal &&
              traj.terminal_event == kEventYZero))
            return build_outcome(std::move(traj), q, e, opts);
        y0 = traj.samples.back().y;
        eta0 = traj.samples.back().eta;
    }
    std::vector<EventSpec> ev;
    ev.push_back(EventSpec{kEventYZero, [](double, const State& s) { return s[1]; },
                           Direction::Rising, 1});
    ev.push_back(EventSpec{kEventYLower,
                           [y = e.y_lower](double, const State& s) { return s[1] - y; },
                           Direction::Any, 0});
    ev.push_back(EventSpec{kEventYQ3,
                           [y = e.y_q3](double, const State& s) { return s[1] - y; },
                           Direction::Falling, opts.continue_past_q3 ? 0 : 1});
    ev.push_back(EventSpec::terminal(
        kEventXCap, [x = e.x_cap](double, const State& s) { return s[0] - x; },
        Direction::Rising));
    // The far-field certificate wants the band held while X keeps growing,
    // not merely entered at large X after the oscillations.
    const double x_threshold = std::max(e.x_big, opts.x_growth * y0[0]);
    ev.push_back(q1_monitor(e, x_threshold));
    Trajectory tail =
        odeint::integrate(Chart::Main, q, y0, eta0, eta0 + opts.eta_span, ev, io);
    if (k > 0) {
        append_trajectory(traj, tail);
    } else {
        traj = std::move(tail);
    }
    return build_outcome(std::move(traj), q, e, opts);
}

namespace {

// +1: plunging side; -1: oscillating side; 0: undecided
int side_of(const ShotOutcome& out, int level) {
    if (out.oscillations >= level + 1) return -1;
    if (out.reached_q3 && out.oscillations <= level) return +1;
    return 0;
}

}  // namespace

BisectResult bisect_boundary(const ParamTriple& q, double C_lo, double C_hi, double tol_C,
                             const ShooterOptions& opts, int level) {
    require_supercritical(q, "bisect_boundary");
    if (!(C_lo < C_hi))
        throw std::invalid_argument("bisect_boundary: bracket is degenerate or reversed");
    if (!(tol_C > 0.0)) throw std::invalid_argument("bisect_boundary: tol_C must be > 0");

    ShooterOptions bopts = opts;
    bopts.target_oscillations = -1;
    bopts.max_zero_crossings = 2 * level + 1;

    auto probe = [&](double C, const ShooterOptions& o) {
        return classify(LaunchSpec{C, opts.delta, q}, o);
    };

    ShotOutcome lo_out = probe(C_lo, bopts);
    if (side_of(lo_out, level) != -1)
        throw std::invalid_argument("bisect_boundary: C_lo is not on the oscillating side");
    ShotOutcome hi_out = probe(C_hi, bopts);
    if (side_of(hi_out, level) != +1)
        throw std::invalid_argument("bisect_boundary: C_hi is not on the plunging side");

    BisectResult res;
    double lo = C_lo, hi = C_hi;
    while (hi - lo > tol_C && res.iterations < 200) {
        const double mid = 0.5 * (lo + hi);
        ShotOutcome out = probe(mid, bopts);
        int s = side_of(out, level);
        if (s == 0 && out.classification == SetLabel::ConnectsQ1) {
            // the probe already shadowed the connection past the hard cap
            res.C0 = mid;
            res.outcome = std::move(out);
            res.converged = true;
            return res;
        }
        if (s == 0) {
            ShooterOptions retry = bopts;
            retry.eta_span = 2.0 * bopts.eta_span;
            out = probe(mid, retry);
            s = side_of(out, level);
        }
        if (s == 0) {
            res.C0 = mid;
            res.outcome = std::move(out);
            res.converged = false;
            return res;
        }
        if (s < 0)
            lo = mid;
        else
            hi = mid;
        ++res.iterations;
    }
    res.C0 = 0.5 * (lo + hi);
    ShooterOptions copts = opts;
    copts.target_oscillations = level;
    copts.max_zero_crossings = 0;
    res.outcome = probe(res.C0, copts);
    res.converged = hi - lo <= tol_C &&
                    res.outcome.classification == SetLabel::ConnectsQ1 &&
                    res.outcome.oscillations == level;
    return res;
}

FindReport find_solutions(const ParamTriple& q, int K_max, const ShooterOptions& opts) {
    require_supercritical(q, "find_solutions");
    if (K_max < 1) throw std::domain_error("find_solutions: K_max must be >= 1");
    FindReport report;

    ShooterOptions scan = opts;
    scan.target_oscillations = -1;
    scan.max_zero_crossings = 0;

    struct Entry {
        double C;
        int oscillations;
        bool plunged;
    };
    std::vector<Entry> seen;
    auto probe = [&](double C) {
        ShotOutcome out = classify(LaunchSpec{C, opts.delta, q}, scan);
        seen.push_back(Entry{C, out.oscillations, out.reached_q3});
        return seen.back();
    };

    // oscillating side near C = 1
    bool any_osc = false;
    for (double c : {1.0 + 1e-3, 1.0 + 1e-4, 1.0 + 1e-2, 1.1}) {
        if (probe(c).oscillations >= 1) {
            any_osc = true;
            break;
        }
    }
    if (!any_osc) {
        report.failures.push_back("no oscillating orbit found near C = 1");
        return report;
    }

    // Geometric ladder up to the point where the distance between family
    // members falls under the integration noise; the plunge class saturates
    // at the lowest class reachable on the family. No monotone classification
    // in C is assumed beyond this empirical plateau map.
    int k0 = INT_MAX;
    for (double c = 2.0; c <= 1.1e9; c *= 4.0) {
        const Entry e = probe(c);
        if (e.plunged) k0 = std::min(k0, e.oscillations);
    }
    if (k0 == INT_MAX) {
        report.failures.push_back("no plunging orbit found on the scan ladder");
        return report;
    }
    if (k0 > 0)
        report.failures.push_back(
            "no plunging orbit with fewer than " + std::to_string(k0) +
            " oscillations is reachable on the family; classes start at " +
            std::to_string(k0));

    double upper = std::numeric_limits<double>::infinity();
    for (int k = k0; k < k0 + K_max; ++k) {
        if (k >= 1 && k > k0 && q.p >= exponents::max_reaction_for_k(k + 1, q.m)) {
            report.failures.push_back("level " + std::to_string(k) +
                                      ": p >= (Km-1)/(K-1) for K = " + std::to_string(k + 1) +
                                      "; no further class predicted");
            break;
        }
        // lowest adjacent probed pair (oscillating side below, plunging above)
        std::sort(seen.begin(), seen.end(),
                  [](const Entry& a, const Entry& b) { return a.C < b.C; });
        double lo = 0.0, hi = 0.0;
        for (const Entry& e : seen) {
            if (e.C >= upper) break;
            const int s = e.oscillations >= k + 1 ? -1
                          : (e.plunged && e.oscillations <= k ? +1 : 0);
            if (s == -1) lo = e.C;
            if (s == +1 && lo > 0.0) {
                hi = e.C;
                break;
            }
        }
        if ((lo == 0.0 || hi == 0.0) && std::isfinite(upper)) {
            // probe just below the previous boundary
            for (double t : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.3, 0.6, 0.9}) {
                const double c = upper - (upper - 1.0) * t;
                const Entry e = probe(c);
                if (e.plunged && e.oscillations <= k) hi = e.C;
                if (e.oscillations >= k + 1) {
                    lo = e.C;
                    break;
                }
            }
        }
        if (lo == 0.0 || hi == 0.0 || !(lo < hi)) {
            report.failures.push_back("level " + std::to_string(k) +
                                      ": no bracket found for the class boundary");
            break;
        }
        BisectResult bk = bisect_boundary(q, lo, hi, opts.tol_C, opts, k);
        const bool ok = bk.converged;
        upper = bk.C0;
        report.solutions.push_back(Solution{bk.C0, std::move(bk.outcome)});
        if (!ok) {
            report.failures.push_back("level " + std::to_string(k) +
                                      ": bisection did not certify a connecting orbit");
            break;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------

std::pair<double, double> lepin_coefficients(const ParamTriple& q) {
    const double A = q.N - 2.0 - 4.0 * q.m / (q.p - q.m);
    const double B = 2.0 * (q.N - 2.0 - 2.0 * q.m / (q.p - q.m));
    return {A, B};
}

namespace {

using Quad = __float128;

int sign_of(Quad v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

}  // namespace

// Backward march of h'' + A h' + B h - C e^(eta/beta) h' = 0 from the
// asymptotic (slow-manifold) initialization at the far end. The fast
// characteristic mode swamps the slow one by many orders of magnitude along
// the way, so the march runs in quadruple precision with local Taylor steps,
// and the crossings that fall below the window are resolved analytically from
// the two-mode decomposition at the bottom.
int lepin_zero_count(const ParamTriple& q, double eta_end, double eta_start,
                     const LepinOptions& opts) {
    require_supercritical(q, "lepin_zero_count");
    if (!(eta_start < 0.0 && 0.0 < eta_end))
        throw std::domain_error("lepin_zero_count: requires eta_start < 0 < eta_end");
    const auto [Ad, Bd] = lepin_coefficients(q);
    const Quad A = Ad;
    const Quad B = Bd;
    const Quad beta = (Quad)(q.p - q.m) / (2 * (Quad)(q.p - 1.0));
    const Quad C = (Quad)opts.c_scale * beta /
                   ((Quad)q.m * powq((Quad)dynsys::singular_constant(q), (Quad)(q.m - 1.0)));

    // Beyond eta_cap the stiff term dominates and pins h to its far-field
    // constant; start on that slow manifold.
    const Quad eta_cap = beta * logq((Quad)opts.lambda_cap / C);
    const Quad eta_eff = std::min((Quad)eta_end, eta_cap);
    if (!(eta_eff > (Quad)eta_start + (Quad)1e-6))
        throw std::domain_error("lepin_zero_count: window collapsed; raise eta_end");

    const double disc = Ad * Ad - 4.0 * Bd;
    const Quad mu1 = disc >= 0.0 ? (-A + sqrtq((Quad)disc)) / 2 : 0;
    const Quad mu2 = disc >= 0.0 ? (-A - sqrtq((Quad)disc)) / 2 : 0;

    Quad eta = eta_eff;
    Quad h = 1;
    Quad g = B / (C * expq(eta_eff / beta));
    Quad bound = powq((Quad)10, (Quad)4900);  // representability guard
    if (std::isfinite(opts.h_bound)) bound = std::min(bound, (Quad)opts.h_bound);

    constexpr int K = 28;
    Quad a[K + 1], b[K + 1], E[K + 1];
    int visible = 0;
    int sign_prev = 1;
    int sign_b = 0;
    Quad va_bot = 0, vb_bot = 0;
    while (eta > (Quad)eta_start) {
        const Quad stiff = C * expq(eta / beta);
        const Quad lambda = fabsq(A) + 2 * sqrtq(fabsq(B)) + stiff;
        Quad hs = std::min((Quad)0.15, (Quad)1.5 / lambda);
        if (eta - hs < (Quad)eta_start) hs = eta - (Quad)eta_start;
        a[0] = h;
        b[0] = g;
        E[0] = stiff;
        for (int k = 1; k <= K; ++k) E[k] = E[k - 1] / (beta * k);
        for (int k = 0; k < K; ++k) {
            Quad conv = 0;
            for (int j = 0; j <= k; ++j) conv += E[j] * b[k - j];
            a[k + 1] = b[k] / (k + 1);
            b[k + 1] = (-A * b[k] - B * a[k] + conv) / (k + 1);
        }
        for (int s = 1; s <= 4; ++s) {
            const Quad t = -hs * s / 4;
            Quad hh = a[K], gg = b[K];
            for (int k = K - 1; k >= 0; --k) {
                hh = hh * t + a[k];
                gg = gg * t + b[k];
            }
            const int sgn = sign_of(hh);
            if (sgn != 0 && sgn != sign_prev) {
                ++visible;
                sign_prev = sgn;
            }
            if (s == 4) {
                h = hh;
                g = gg;
            }
        }
        eta -= hs;
        if (fabsq(h) > bound)
            throw std::overflow_error(
                "lepin_zero_count: |h| exceeded bound; reduce eta_start");
        if (disc > 0.0 && stiff < (Quad)1e-8 * B) {
            // autonomous zone: split into the two characteristic modes
            const Quad va = (g - mu2 * h) / (mu1 - mu2);
            const Quad vb = (mu1 * h - g) / (mu1 - mu2);
            va_bot = va;
            vb_bot = vb;
            if (sign_b == 0 && fabsq(vb) >= (Quad)1e-30 * fabsq(va)) sign_b = sign_of(vb);
        }
    }
    // One more crossing lies below the window when the fast mode has a
    // resolved sign opposite to the still-dominant slow mode.
    int tail = 0;
    if (sign_b != 0 && sign_of(va_bot) != 0 && sign_b != sign_of(va_bot) &&
        fabsq(va_bot) >= fabsq(vb_bot))
        tail = 1;
    return visible + tail;
}

// ---------------------------------------------------------------------------

int region_extremum_violations(const Trajectory& traj, const ParamTriple& q, double tol) {
    const double x_thr = 2.0 * (q.N - 2.0) / (q.p - 1.0);
    const double y_low = -2.0 / (q.p - q.m);
    int violations = 0;
    for (std::size_t i = 1; i + 1 < traj.samples.size(); ++i) {
        const double a = traj.samples[i - 1].y[1];
        const double b = traj.samples[i].y[1];
        const double c = traj.samples[i + 1].y[1];
        if (traj.samples[i].y[0] < x_thr) continue;
        const bool local_max = b > a + tol && b > c + tol;
        const bool local_min = b < a - tol && b < c - tol;
        if (local_max && b > y_low + tol && b < -tol) ++violations;
        if (local_min && b < y_low - tol) ++violations;
    }
    return violations;
}

int cylinder_violations(const Trajectory& traj, const ParamTriple& q, double slack) {
    double eta_stop = std::numeric_limits<double>::infinity();
    for (const auto& ev : traj.events)
        if (ev.name == kEventYLower && ev.direction < 0) {
            eta_stop = ev.eta;
            break;
        }
    const double y_low = -2.0 / (q.p - q.m);
    int violations = 0;
    for (const auto& s : traj.samples) {
        if (s.eta >= eta_stop) break;
        const double Y = s.y[1];
        if (Y < y_low || Y > 0.0) continue;
        if (s.y[2] < dynsys::cylinder_Z(q, Y) - slack) ++violations;
    }
    return violations;
}

int monotone_escape_violations(const Trajectory& traj, const ParamTriple& q) {
    const double y_q3 = -(q.N - 2.0) / q.m;
    double eta_cross = std::numeric_limits<double>::infinity();
    for (const auto& ev : traj.events)
        if (ev.name == kEventYQ3 && ev.direction < 0) {
            eta_cross = ev.eta;
            break;
        }
    if (!std::isfinite(eta_cross)) {
        for (const auto& s : traj.samples)
            if (s.y[1] < y_q3) {
                eta_cross = s.eta;
                break;
            }
    }
    int violations = 0;
    for (const auto& s : traj.samples) {
        if (s.eta <= eta_cross || !(s.y[1] < y_q3)) continue;
        const State f = dynsys::detail::rhs_raw(Chart::Main, q, s.y);
        if (!(f[0] > 0.0 && f[1] < 0.0 && f[2] < 0.0)) ++violations;
    }
    return violations;
}

}  // namespace ssp::shooter
