#ifndef SSP_SHOOTER_HPP
#define SSP_SHOOTER_HPP

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ssp/odeint.hpp"
#include "ssp/params.hpp"

namespace ssp::shooter {

using dynsys::State;
using odeint::EventRecord;
using odeint::Trajectory;

// One member of the unstable-manifold family: the orbit launched from the
// tangent-plane point (delta, delta (1-C)/N, C delta).
struct LaunchSpec {
    double C = 1.0;       // shooting parameter, > 0; C fixes f(0)
    double delta = 1e-7;  // manifold offset, in [1e-8, 1e-4]
    ParamTriple params{2.0, 20.0, 10.0};
};

State launch_state(const LaunchSpec& spec);

enum class SetLabel {
    SetA,        // crossed Y = -2/(p-m) downward before any upcrossing of Y = 0
    SetC,        // upcrossed Y = 0 first; oscillates
    ConnectsQ1,  // held the band to the far-field threshold (connecting orbit)
    EntersQ3,    // dropped below Y = -(N-2)/m after at least one oscillation
    Undetermined,
};

std::string to_string(SetLabel s);

// Maximal excursion into {Y > 0} bounded by two zeros of Y.
struct Oscillation {
    double eta_enter = 0.0;
    double eta_exit = 0.0;  // NaN while still open at termination
    double peak = 0.0;
    bool complete = false;
};

struct ShotOutcome {
    SetLabel classification = SetLabel::Undetermined;
    int oscillations = 0;  // excursions started (hysteresis-filtered when closed)
    std::optional<EventRecord> first_event;  // the set-deciding crossing
    std::optional<double> z_limit;           // far-field Z for ConnectsQ1
    double z_drift = std::numeric_limits<double>::quiet_NaN();
    double cmf_residual_mid = std::numeric_limits<double>::quiet_NaN();
    double cmf_residual_end = std::numeric_limits<double>::quiet_NaN();
    std::vector<Oscillation> excursions;
    bool reached_q3 = false;  // Y fell below -(N-2)/m somewhere
    Trajectory trajectory;
};

struct ShooterOptions {
    // Tighter than the general integrator defaults: the class boundaries are
    // located to tol_C, and the integration bias enters them amplified.
    odeint::Tolerances tol{1e-12, 1e-14};
    double tol_C = 1e-10;
    double delta = 1e-7;  // manifold offset used by the search routines
    double eta_span = 80.0;
    double x_big = 0.0;      // far-field threshold; 0 selects the default
    double x_growth = 4.0;   // required X growth inside the band past the
                             // final oscillation (far-field certificate)
    double x_cap = 0.0;      // hard classification cap on X; 0 selects default
    double drift_tol = std::numeric_limits<double>::infinity();  // recorded always
    double overflow_bound = 1e8;
    double osc_hysteresis = 1e-7;
    int max_zero_crossings = 0;  // 0: unlimited; n: stop at the n-th Y=0 crossing
    int target_oscillations = -1;  // >= 0: confirmation mode with far-field monitor
    bool continue_past_q3 = false;  // keep integrating into the plunge (dead core)
};

// Effective far-field threshold: a safety multiple of the extremum-free
// X-threshold 2(N-2)/(p-1), at least 10.
double default_x_big(const ParamTriple& q);

// Event names used on launched trajectories.
inline constexpr const char* kEventYZero = "y_zero";
inline constexpr const char* kEventYLower = "y_lower";
inline constexpr const char* kEventYQ3 = "y_q3";
inline constexpr const char* kEventQ1 = "q1_entry";
inline constexpr const char* kEventXCap = "x_cap";

// Forward integration of the family member with the full event set.
Trajectory launch(const LaunchSpec& spec, const ShooterOptions& opts = {});

// Launch and classify by the event rules.
ShotOutcome classify(const LaunchSpec& spec, const ShooterOptions& opts = {});

struct BisectResult {
    double C0 = 0.0;
    ShotOutcome outcome;
    int iterations = 0;
    bool converged = false;
};

// Bisection for the boundary orbit between the oscillation classes at the
// given level (level 0: monotone case). Requires classify(C_lo) on the
// oscillating side and classify(C_hi) on the plunging side.
BisectResult bisect_boundary(const ParamTriple& q, double C_lo, double C_hi, double tol_C,
                             const ShooterOptions& opts = {}, int level = 0);

struct Solution {
    double C = 0.0;
    ShotOutcome outcome;
};

struct FindReport {
    std::vector<Solution> solutions;
    std::vector<std::string> failures;  // per-level reasons, never silently dropped
};

// Iterates the class splitting: for k = 0.. finds the boundary orbit with k
// oscillations, until K_max solutions are found, the reaction exponent leaves
// the predicted range, or no bracket can be established.
FindReport find_solutions(const ParamTriple& q, int K_max, const ShooterOptions& opts = {});

// --------------------------------------------------------------------------
// Linearized far-field oscillation oracle: integrates
//   h'' + A h' + B h - C e^(eta/beta) h' = 0
// backward from an asymptotic initialization and counts the sign changes of
// h, including the one crossing that can fall below the window (resolved
// analytically from the characteristic-mode split at the bottom).
struct LepinOptions {
    double c_scale = 1.0;     // multiplies the linearization constant C
    double lambda_cap = 1e3;  // largest stiff coefficient integrated explicitly
    double h_bound = std::numeric_limits<double>::infinity();  // extra magnitude cap
};

int lepin_zero_count(const ParamTriple& q, double eta_end, double eta_start,
                     const LepinOptions& opts = {});

// Coefficients A = N-2-4m/(p-m), B = 2(N-2-2m/(p-m)) of the linearization.
std::pair<double, double> lepin_coefficients(const ParamTriple& q);

// --------------------------------------------------------------------------
// Trajectory property checks used by the verification suites.

// Discrete local maxima of Y inside {X >= 2(N-2)/(p-1), -2/(p-m) < Y < 0} or
// local minima inside {X >= 2(N-2)/(p-1), Y < -2/(p-m)} (3-point stencil).
int region_extremum_violations(const Trajectory& traj, const ParamTriple& q,
                               double tol = 1e-9);

// Samples below the parabolic cylinder Z = -(N-2)Y - mY^2 on the band
// -2/(p-m) <= Y <= 0 before the first downward crossing of the lower plane.
int cylinder_violations(const Trajectory& traj, const ParamTriple& q, double slack = 1e-8);

// Samples after the first crossing of Y = -(N-2)/m where the flow is not
// strictly monotone (dX > 0, dY < 0, dZ < 0).
int monotone_escape_violations(const Trajectory& traj, const ParamTriple& q);

}  // namespace ssp::shooter

#endif
