#ifndef SSP_ODEINT_HPP
#define SSP_ODEINT_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssp/dynsys.hpp"
#include "ssp/params.hpp"

namespace ssp::odeint {

using dynsys::State;

enum class Direction { Rising, Falling, Any };

// A root-located event on the flow. The guard must be continuous along
// trajectories; the event fires at a sign change consistent with direction.
struct EventSpec {
    std::string name;
    std::function<double(double, const State&)> guard;
    Direction direction = Direction::Any;
    // 0: never terminal; n >= 1: integration stops at the n-th firing.
    int terminal_after = 0;

    static EventSpec terminal(std::string name,
                              std::function<double(double, const State&)> guard,
                              Direction dir = Direction::Any) {
        return EventSpec{std::move(name), std::move(guard), dir, 1};
    }
};

enum class Termination { EventTerminal, SpanEnd, StepUnderflow, StateOverflow, StepBudget };

std::string to_string(Termination t);

struct EventRecord {
    std::string name;
    double eta = 0.0;
    State state{};
    int direction = 0;  // +1 rising, -1 falling
};

// |guard| dipped below tolerance without completing a sign change.
struct NearMiss {
    std::string name;
    double eta = 0.0;
    double guard = 0.0;
};

struct Sample {
    double eta = 0.0;
    State y{};
    State dy{};
};

struct Tolerances {
    double rel = 1e-10;
    double abs = 1e-12;
};

struct IntegrateOptions {
    Tolerances tol{};
    double overflow_bound = 1e8;  // per coordinate
    double max_step = 0.0;        // 0: uncapped
    double fixed_step = 0.0;      // > 0: fixed-step mode (convergence studies)
    std::size_t max_steps = 20'000'000;
    std::size_t sample_cap = 200'000;  // thinning threshold; events always kept
};

struct Trajectory {
    std::size_t dim = 3;
    std::optional<dynsys::Chart> chart;
    ParamTriple params{1.0, 0.0, 0.0};  // meaningful only when chart is set
    std::vector<Sample> samples;        // eta strictly increasing
    std::vector<EventRecord> events;
    std::vector<NearMiss> near_misses;
    Termination termination = Termination::SpanEnd;
    std::string terminal_event;  // set when termination == EventTerminal
    double eta_begin = 0.0;
    double eta_end = 0.0;  // requested span end (actual end is samples.back().eta)

    const Sample& front() const { return samples.front(); }
    const Sample& back() const { return samples.back(); }

    // Continuous extension between retained samples (cubic Hermite, same
    // order as the step error on unthinned output). Throws std::out_of_range
    // outside the integrated span.
    State dense_eval(double eta) const;

    // First recorded event with the given name, if any.
    const EventRecord* find_event(const std::string& name) const;
};

struct System {
    std::function<void(double, const State&, State&)> rhs;
    std::size_t dim = 3;
};

// Adaptive embedded Runge-Kutta pair of order 5(4) with dense output and
// bisection-refined event location.
Trajectory integrate(const System& sys, const State& y0, double eta0, double eta1,
                     std::span<const EventSpec> events = {},
                     const IntegrateOptions& opts = {});

// Chart front-end: integrates dynsys::vector_field(chart, ...). The initial
// state must be admissible in the chart.
Trajectory integrate(dynsys::Chart chart, const ParamTriple& q, const State& y0,
                     double eta0, double eta1, std::span<const EventSpec> events = {},
                     const IntegrateOptions& opts = {});

}  // namespace ssp::odeint

#endif
