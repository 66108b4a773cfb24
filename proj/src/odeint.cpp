#include "ssp/odeint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ssp::odeint {

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// y1 - yhat1
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// dense-output weights
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

int sgn(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

// Quartic interpolant over one accepted step.
struct DenseStep {
    std::size_t dim;
    double eta0, h;
    State r1, r2, r3, r4, r5;

    State eval(double eta) const {
        const double th = (eta - eta0) / h;
        const double th1 = 1.0 - th;
        State out{};
        for (std::size_t i = 0; i < dim; ++i)
            out[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        return out;
    }
};

struct EventState {
    int last_sign = 0;
    int fires = 0;
    double g_prev = 0.0;
};

struct Candidate {
    double eta;
    std::size_t event_index;
    State state;
    int direction;
};

}  // namespace

std::string to_string(Termination t) {
    switch (t) {
        case Termination::EventTerminal: return "EventTerminal";
        case Termination::SpanEnd: return "SpanEnd";
        case Termination::StepUnderflow: return "StepUnderflow";
        case Termination::StateOverflow: return "StateOverflow";
        case Termination::StepBudget: return "StepBudget";
    }
    return "?";
}

State Trajectory::dense_eval(double eta) const {
    if (samples.empty()) throw std::out_of_range("dense_eval: empty trajectory");
    const double lo = samples.front().eta, hi = samples.back().eta;
    if (eta < lo - 1e-14 * std::max(1.0, std::abs(lo)) ||
        eta > hi + 1e-14 * std::max(1.0, std::abs(hi)))
        throw std::out_of_range("dense_eval: eta outside the integrated span");
    eta = std::clamp(eta, lo, hi);
    auto it = std::lower_bound(samples.begin(), samples.end(), eta,
                               [](const Sample& s, double v) { return s.eta < v; });
    if (it == samples.begin()) return it->y;
    if (it == samples.end()) return samples.back().y;
    const Sample& b = *it;
    const Sample& a = *(it - 1);
    if (b.eta == eta) return b.y;
    const double h = b.eta - a.eta;
    const double th = (eta - a.eta) / h;
    const double t2 = th * th, t3 = t2 * th;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + th;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    State out{};
    for (std::size_t i = 0; i < dim; ++i)
        out[i] = h00 * a.y[i] + h * h10 * a.dy[i] + h01 * b.y[i] + h * h11 * b.dy[i];
    return out;
}

const EventRecord* Trajectory::find_event(const std::string& name) const {
    for (const auto& e : events)
        if (e.name == name) return &e;
    return nullptr;
}

Trajectory integrate(const System& sys, const State& y0, double eta0, double eta1,
                     std::span<const EventSpec> events, const IntegrateOptions& opts) {
    if (!(eta0 < eta1)) throw std::invalid_argument("integrate: requires eta0 < eta1");
    if (!(opts.tol.rel > 0.0) || !(opts.tol.abs > 0.0))
        throw std::invalid_argument("integrate: tolerances must be positive");
    const std::size_t n = sys.dim;
    if (n == 0 || n > 3) throw std::invalid_argument("integrate: dim must be 1..3");

    Trajectory traj;
    traj.dim = n;
    traj.eta_begin = eta0;
    traj.eta_end = eta1;

    auto rhs = [&](double t, const State& y, State& dy) { sys.rhs(t, y, dy); };

    auto overflowed = [&](const State& y) {
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isfinite(y[i]) || std::abs(y[i]) > opts.overflow_bound) return true;
        return false;
    };

    double t = eta0;
    State y = y0;
    State k1{};
    rhs(t, y, k1);

    std::vector<EventState> estate(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        estate[i].g_prev = events[i].guard(t, y);
        estate[i].last_sign = sgn(estate[i].g_prev);
    }

    std::size_t keep_stride = 1, step_index = 0;
    auto push_sample = [&](double te, const State& ye, const State& dye, bool force) {
        if (!force && (step_index % keep_stride) != 0) return;
        if (!traj.samples.empty() && traj.samples.back().eta >= te) return;
        traj.samples.push_back(Sample{te, ye, dye});
        if (traj.samples.size() > opts.sample_cap) {
            std::vector<Sample> kept;
            kept.reserve(traj.samples.size() / 2 + 2);
            for (std::size_t i = 0; i < traj.samples.size(); i += 2) kept.push_back(traj.samples[i]);
            if (kept.back().eta != traj.samples.back().eta) kept.push_back(traj.samples.back());
            traj.samples = std::move(kept);
            keep_stride *= 2;
        }
    };
    push_sample(t, y, k1, true);

    const double span = eta1 - eta0;
    const double hmin = 1e-14 * span;

    // initial step size
    double h;
    if (opts.fixed_step > 0.0) {
        h = opts.fixed_step;
    } else {
        double dn = 0.0, yn = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = opts.tol.abs + opts.tol.rel * std::abs(y[i]);
            dn = std::max(dn, std::abs(k1[i]) / sc);
            yn = std::max(yn, std::abs(y[i]) / sc);
        }
        h = (dn > 0.0) ? 0.01 * std::max(yn, 1.0) / dn : 1e-6 * span;
        h = std::min(h, 0.1 * span);
        h = std::max(h, 1e3 * hmin);
    }
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);

    State k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, ytmp{}, y5{};
    std::size_t steps = 0;

    auto finish = [&](Termination why) {
        traj.termination = why;
        return traj;
    };

    while (t < eta1) {
        if (steps++ >= opts.max_steps) return finish(Termination::StepBudget);
        bool last = false;
        if (t + h >= eta1) {
            h = eta1 - t;
            last = true;
        }
        if (h < hmin) return finish(Termination::StepUnderflow);

        // stages
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] +
                      h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(t + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            y5[i] = y[i] +
                    h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        rhs(t + h, y5, k7);

        if (opts.fixed_step <= 0.0) {
            double err = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                       e6 * k6[i] + e7 * k7[i]);
                const double sc =
                    opts.tol.abs + opts.tol.rel * std::max(std::abs(y[i]), std::abs(y5[i]));
                err += (ei / sc) * (ei / sc);
            }
            err = std::sqrt(err / static_cast<double>(n));
            if (!(err <= 1.0) || !std::isfinite(err)) {
                double fac = std::isfinite(err) ? 0.9 * std::pow(err, -0.2) : 0.1;
                h *= std::clamp(fac, 0.1, 1.0);
                continue;  // reject
            }
            double fac = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
            double hnext = h * std::clamp(fac, 0.2, 5.0);
            if (opts.max_step > 0.0) hnext = std::min(hnext, opts.max_step);

            DenseStep dense{n, t, h, {}, {}, {}, {}, {}};
            for (std::size_t i = 0; i < n; ++i) {
                const double dy = y5[i] - y[i];
                dense.r1[i] = y[i];
                dense.r2[i] = dy;
                dense.r3[i] = h * k1[i] - dy;
                dense.r4[i] = dy - h * k7[i] - dense.r3[i];
                dense.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                   d6 * k6[i] + d7 * k7[i]);
            }

            // event scan over the accepted step
            std::vector<Candidate> found;
            for (std::size_t ei_ = 0; ei_ < events.size(); ++ei_) {
                const EventSpec& ev = events[ei_];
                EventState& st = estate[ei_];
                constexpr int kScan = 4;
                std::array<double, kScan + 1> gv;
                gv[0] = st.g_prev;
                for (int kpt = 1; kpt <= kScan; ++kpt) {
                    const double thb = static_cast<double>(kpt) / kScan;
                    const State yb = (kpt == kScan) ? y5 : dense.eval(t + thb * h);
                    gv[static_cast<std::size_t>(kpt)] = ev.guard(t + thb * h, yb);
                }
                double ga = st.g_prev;
                double tha = 0.0;
                int sa = st.last_sign;
                bool crossed = false;
                for (int kpt = 1; kpt <= kScan; ++kpt) {
                    const double thb = static_cast<double>(kpt) / kScan;
                    const double gb = gv[static_cast<std::size_t>(kpt)];
                    const int sb = sgn(gb);
                    if (sa == 0) {
                        sa = sb;
                        ga = gb;
                        tha = thb;
                        continue;
                    }
                    if (sb != 0 && sb != sa) {
                        const int dir = sb > sa ? +1 : -1;
                        const bool want = ev.direction == Direction::Any ||
                                          (ev.direction == Direction::Rising && dir > 0) ||
                                          (ev.direction == Direction::Falling && dir < 0);
                        if (want) {
                            // bisection refine on the in-step interpolant
                            const double gtol =
                                1e-12 * std::max({std::abs(ga), std::abs(gb),
                                                  std::numeric_limits<double>::min()});
                            double lo = tha, hi = thb, glo = ga;
                            for (int it = 0; it < 200; ++it) {
                                const double mid = 0.5 * (lo + hi);
                                const State ym = dense.eval(t + mid * h);
                                const double gm = ev.guard(t + mid * h, ym);
                                if (sgn(gm) == sgn(glo) && gm != 0.0) {
                                    lo = mid;
                                    glo = gm;
                                } else {
                                    hi = mid;
                                }
                                if ((hi - lo) * std::abs(h) <
                                        1e-15 * std::max(1.0, std::abs(t)) ||
                                    std::abs(gm) <= gtol)
                                    break;
                            }
                            // report the root, continue from the far side
                            const double theta_root = 0.5 * (lo + hi);
                            State ystar = dense.eval(t + hi * h);
                            found.push_back(
                                Candidate{t + theta_root * h, ei_, ystar, dir});
                            crossed = true;
                        }
                        sa = sb;
                        ga = gb;
                        tha = thb;
                    } else {
                        ga = gb;
                        tha = thb;
                        if (sb != 0) sa = sb;
                    }
                }
                if (!crossed && traj.near_misses.size() < 256) {
                    // tangential dip: an interior magnitude minimum of the
                    // guard, refined on the interpolant
                    int dip = -1;
                    for (int k = 1; k < kScan; ++k) {
                        const std::size_t ku = static_cast<std::size_t>(k);
                        if (std::abs(gv[ku]) < std::abs(gv[ku - 1]) &&
                            std::abs(gv[ku]) <= std::abs(gv[ku + 1]))
                            dip = k;
                    }
                    if (dip > 0) {
                        double lo = (dip - 1) / static_cast<double>(kScan);
                        double hi = (dip + 1) / static_cast<double>(kScan);
                        for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
                            const double m1 = lo + (hi - lo) / 3.0;
                            const double m2 = hi - (hi - lo) / 3.0;
                            const double g1 =
                                std::abs(ev.guard(t + m1 * h, dense.eval(t + m1 * h)));
                            const double g2 =
                                std::abs(ev.guard(t + m2 * h, dense.eval(t + m2 * h)));
                            if (g1 < g2)
                                hi = m2;
                            else
                                lo = m1;
                        }
                        const double thm = 0.5 * (lo + hi);
                        const double gm = ev.guard(t + thm * h, dense.eval(t + thm * h));
                        if (std::abs(gm) < 1e-9 * std::max(1.0, std::abs(st.g_prev)) &&
                            gm != 0.0)
                            traj.near_misses.push_back(NearMiss{ev.name, t + thm * h, gm});
                    }
                }
            }
            std::sort(found.begin(), found.end(),
                      [](const Candidate& a, const Candidate& b) { return a.eta < b.eta; });
            for (const Candidate& cand : found) {
                const EventSpec& ev = events[cand.event_index];
                traj.events.push_back(EventRecord{ev.name, cand.eta, cand.state, cand.direction});
                EventState& st = estate[cand.event_index];
                st.fires += 1;
                if (ev.terminal_after > 0 && st.fires >= ev.terminal_after) {
                    State dye{};
                    rhs(cand.eta, cand.state, dye);
                    push_sample(cand.eta, cand.state, dye, true);
                    traj.terminal_event = ev.name;
                    return finish(Termination::EventTerminal);
                }
            }

            t += h;
            y = y5;
            k1 = k7;  // FSAL
            h = hnext;
            for (std::size_t ei_ = 0; ei_ < events.size(); ++ei_) {
                estate[ei_].g_prev = events[ei_].guard(t, y);
                const int s = sgn(estate[ei_].g_prev);
                if (s != 0) estate[ei_].last_sign = s;
            }
        } else {
            t += h;
            y = y5;
            k1 = k7;
        }

        ++step_index;
        push_sample(t, y, k1, last || overflowed(y));
        if (overflowed(y)) return finish(Termination::StateOverflow);
    }
    push_sample(t, y, k1, true);
    return finish(Termination::SpanEnd);
}

Trajectory integrate(dynsys::Chart chart, const ParamTriple& q, const State& y0,
                     double eta0, double eta1, std::span<const EventSpec> events,
                     const IntegrateOptions& opts) {
    validate(q);
    if (!dynsys::admissible(chart, y0))
        throw std::domain_error("integrate: initial state inadmissible in chart " +
                                dynsys::to_string(chart));
    System sys;
    sys.dim = dynsys::chart_dim(chart);
    sys.rhs = [chart, q](double, const State& y, State& dy) {
        dy = dynsys::detail::rhs_raw(chart, q, y);
    };
    Trajectory traj = integrate(sys, y0, eta0, eta1, events, opts);
    traj.chart = chart;
    traj.params = q;
    return traj;
}

}  // namespace ssp::odeint
