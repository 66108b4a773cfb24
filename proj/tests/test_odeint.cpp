#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ssp/odeint.hpp"
#include "ssp/shooter.hpp"

using namespace ssp;
using namespace ssp::odeint;
using dynsys::Chart;

namespace {

System scalar_decay() {
    System sys;
    sys.dim = 1;
    sys.rhs = [](double, const State& y, State& dy) { dy[0] = -y[0]; };
    return sys;
}

}  // namespace

TEST_CASE("scalar field: endpoint, dense output, event location") {
    const System sys = scalar_decay();
    EventSpec ev = EventSpec::terminal(
        "level", [](double, const State& y) { return y[0] - std::exp(-1.0); },
        Direction::Falling);
    IntegrateOptions opts;
    const auto traj = integrate(sys, {1.0, 0.0, 0.0}, 0.0, 3.0, {{ev}}, opts);
    REQUIRE(traj.termination == Termination::EventTerminal);
    REQUIRE(traj.events.size() == 1);
    CHECK(std::abs(traj.events[0].eta - 1.0) < 1e-9);
    CHECK(traj.events[0].direction == -1);

    const auto full = integrate(sys, {1.0, 0.0, 0.0}, 0.0, 3.0, {}, opts);
    CHECK(std::abs(full.back().y[0] - std::exp(-3.0)) < 1e-10);
    // dense output at step midpoints reproduces the analytic solution
    for (std::size_t i = 1; i + 1 < full.samples.size(); i += 3) {
        const double mid = 0.5 * (full.samples[i].eta + full.samples[i + 1].eta);
        CHECK(std::abs(full.dense_eval(mid)[0] - std::exp(-mid)) < 1e-8);
    }
    // at a stored node the stored state comes back exactly
    const auto& node = full.samples[full.samples.size() / 2];
    CHECK(full.dense_eval(node.eta)[0] == node.y[0]);
    CHECK_THROWS_AS(full.dense_eval(3.5), std::out_of_range);
    CHECK_THROWS_AS(full.dense_eval(-0.5), std::out_of_range);
}

TEST_CASE("flat orbit stays exactly on its line") {
    const ParamTriple q{2.0, 20.0, 10.0};
    const auto traj = integrate(Chart::Main, q, {1.0, 0.0, 1.0}, 0.0, 5.0, {}, {});
    REQUIRE(traj.termination == Termination::SpanEnd);
    for (const auto& s : traj.samples) {
        CHECK(std::abs(s.y[0] - s.y[2]) < 1e-7);
        CHECK(std::abs(s.y[1]) < 1e-7);
    }
    const auto mid = traj.dense_eval(2.5);
    CHECK(std::abs(mid[0] - mid[2]) < 1e-7);
}

TEST_CASE("stationary line stays exactly on its line over the span") {
    const ParamTriple q{2.0, 20.0, 10.0};
    const auto s0 = dynsys::exact_orbit_state(dynsys::ExactOrbit::StatOrbit, q, 0.0);
    const auto traj = integrate(Chart::Main, q, s0, 0.0, 5.0, {}, {});
    REQUIRE(traj.termination == Termination::SpanEnd);
    for (const auto& s : traj.samples) {
        CHECK(std::abs(s.y[1] + 2.0 / (q.p - q.m)) < 1e-7);
        CHECK(std::abs(s.y[2] - dynsys::stationary_Z0(q)) < 1e-7);
    }
}

TEST_CASE("fixed-step order: halving the step shrinks the error by 8x or more") {
    const ParamTriple q{2.0, 20.0, 10.0};
    auto endpoint_error = [&](double h) {
        IntegrateOptions opts;
        opts.fixed_step = h;
        const auto traj = integrate(Chart::Main, q, {1.0, 0.0, 1.0}, 0.0, 2.0, {}, opts);
        return std::abs(traj.back().y[0] - std::exp(4.0));
    };
    double prev = endpoint_error(0.1);
    for (const double h : {0.05, 0.025}) {
        const double err = endpoint_error(h);
        CHECK(err * 8.0 <= prev);
        prev = err;
    }
}

TEST_CASE("event idempotence: restarting at the event fires no re-trigger") {
    const System sys = scalar_decay();
    EventSpec ev = EventSpec::terminal(
        "level", [](double, const State& y) { return y[0] - std::exp(-1.0); },
        Direction::Falling);
    const auto first = integrate(sys, {1.0, 0.0, 0.0}, 0.0, 3.0, {{ev}}, {});
    REQUIRE(first.termination == Termination::EventTerminal);
    const auto resumed =
        integrate(sys, first.back().y, first.back().eta, 3.0, {{ev}}, {});
    CHECK(resumed.termination == Termination::SpanEnd);
    CHECK(resumed.events.empty());
}

TEST_CASE("direction filtering") {
    System sys;
    sys.dim = 1;
    sys.rhs = [](double eta, const State&, State& dy) { dy[0] = std::cos(eta); };
    // u = sin(eta) from u(0.1) = sin(0.1): falling zero at pi, rising at 2 pi
    EventSpec rising{"up", [](double, const State& y) { return y[0]; }, Direction::Rising, 0};
    const auto traj =
        integrate(sys, {std::sin(0.1), 0.0, 0.0}, 0.1, 7.0, {{rising}}, {});
    REQUIRE(traj.events.size() == 1);
    CHECK(std::abs(traj.events[0].eta - 2.0 * std::acos(-1.0)) < 1e-8);
}

TEST_CASE("several crossings of one guard are all recorded") {
    System sys;
    sys.dim = 1;
    sys.rhs = [](double eta, const State&, State& dy) { dy[0] = std::cos(eta); };
    EventSpec any{"zero", [](double, const State& y) { return y[0]; }, Direction::Any, 0};
    const auto traj = integrate(sys, {std::sin(0.1), 0.0, 0.0}, 0.1, 13.0, {{any}}, {});
    CHECK(traj.events.size() == 4);  // pi, 2pi, 3pi, 4pi
}

TEST_CASE("tangential near-miss records a diagnostic but no event") {
    System sys;
    sys.dim = 1;
    sys.rhs = [](double, const State&, State& dy) { dy[0] = 1.0; };
    // u = eta - 1; guard (u)^2 + eps touches ~0 near eta = 1 without crossing
    EventSpec ev{"graze",
                 [](double, const State& y) { return y[0] * y[0] + 1e-13; },
                 Direction::Any, 0};
    const auto traj = integrate(sys, {-1.0, 0.0, 0.0}, 0.0, 2.0, {{ev}}, {});
    CHECK(traj.events.empty());
    CHECK(!traj.near_misses.empty());
}

TEST_CASE("quadrant preservation along a plunging launch") {
    const ParamTriple q{2.0, 20.0, 10.0};
    shooter::ShooterOptions sopts;
    sopts.continue_past_q3 = true;
    const auto traj = shooter::launch({50.0, 1e-7, q}, sopts);
    CHECK((traj.termination == Termination::StateOverflow ||
           traj.termination == Termination::StepUnderflow));
    for (const auto& s : traj.samples) {
        CHECK(s.y[0] > 0.0);
        CHECK(s.y[2] > 0.0);
    }
    // eta strictly increasing across samples
    for (std::size_t i = 1; i < traj.samples.size(); ++i)
        CHECK(traj.samples[i].eta > traj.samples[i - 1].eta);
}

TEST_CASE("terminal count: n-th crossing stops the run") {
    System sys;
    sys.dim = 1;
    sys.rhs = [](double eta, const State&, State& dy) { dy[0] = std::cos(eta); };
    EventSpec ev{"zero", [](double, const State& y) { return y[0]; }, Direction::Any, 3};
    const auto traj = integrate(sys, {std::sin(0.1), 0.0, 0.0}, 0.1, 30.0, {{ev}}, {});
    REQUIRE(traj.termination == Termination::EventTerminal);
    CHECK(traj.events.size() == 3);
    CHECK(std::abs(traj.events.back().eta - 3.0 * std::acos(-1.0)) < 1e-8);
}

TEST_CASE("blow-up terminates by state overflow or step underflow") {
    System sys;
    sys.dim = 1;
    sys.rhs = [](double, const State& y, State& dy) { dy[0] = y[0] * y[0]; };
    SUBCASE("overflow at the configured bound") {
        IntegrateOptions opts;
        opts.overflow_bound = 1e8;
        const auto traj = integrate(sys, {1.0, 0.0, 0.0}, 0.0, 2.0, {}, opts);
        CHECK(traj.termination == Termination::StateOverflow);
        CHECK(traj.back().eta < 1.01);  // pole at eta = 1
    }
    SUBCASE("underflow when the bound is out of reach") {
        IntegrateOptions opts;
        opts.overflow_bound = 1e306;
        const auto traj = integrate(sys, {1.0, 0.0, 0.0}, 0.0, 2.0, {}, opts);
        CHECK(traj.termination == Termination::StepUnderflow);
    }
}

TEST_CASE("thinning keeps events and ordering under a small sample cap") {
    System sys;
    sys.dim = 1;
    sys.rhs = [](double eta, const State&, State& dy) { dy[0] = std::cos(eta); };
    EventSpec any{"zero", [](double, const State& y) { return y[0]; }, Direction::Any, 0};
    IntegrateOptions opts;
    opts.sample_cap = 64;
    opts.max_step = 0.01;  // force many steps
    const auto traj = integrate(sys, {std::sin(0.1), 0.0, 0.0}, 0.1, 13.0, {{any}}, opts);
    CHECK(traj.samples.size() <= 130);
    CHECK(traj.events.size() == 4);
    for (std::size_t i = 1; i < traj.samples.size(); ++i)
        CHECK(traj.samples[i].eta > traj.samples[i - 1].eta);
    CHECK(traj.back().eta == doctest::Approx(13.0));
}

TEST_CASE("raw family launch hits a plane crossing as its first terminal event") {
    const ParamTriple q{2.0, 20.0, 10.0};
    const double d = 1e-6, C = 5.0;
    std::vector<EventSpec> ev;
    ev.push_back(EventSpec::terminal(
        "upper", [](double, const State& y) { return y[1]; }, Direction::Rising));
    ev.push_back(EventSpec::terminal(
        "lower", [&q](double, const State& y) { return y[1] + 2.0 / (q.p - q.m); },
        Direction::Falling));
    const auto traj =
        integrate(Chart::Main, q, {d, d * (1.0 - C) / q.N, C * d}, 0.0, 80.0, ev, {});
    REQUIRE(traj.termination == Termination::EventTerminal);
    CHECK((traj.terminal_event == "upper" || traj.terminal_event == "lower"));
    CHECK(std::isfinite(traj.back().eta));
    // the recorded event state satisfies its guard to tolerance
    REQUIRE(!traj.events.empty());
    const auto& e = traj.events.back();
    const double g = e.name == "upper" ? e.state[1] : e.state[1] + 0.25;
    CHECK(std::abs(g) <= 1e-9);
}

TEST_CASE("argument validation") {
    const System sys = scalar_decay();
    CHECK_THROWS_AS(integrate(sys, {1.0, 0.0, 0.0}, 1.0, 0.0, {}, {}),
                    std::invalid_argument);
    IntegrateOptions bad;
    bad.tol.rel = 0.0;
    CHECK_THROWS_AS(integrate(sys, {1.0, 0.0, 0.0}, 0.0, 1.0, {}, bad),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        integrate(Chart::Main, {2.0, 20.0, 10.0}, {-1.0, 0.0, 0.0}, 0.0, 1.0, {}, {}),
        std::domain_error);
}
