#ifndef SSP_PROFILE_HPP
#define SSP_PROFILE_HPP

#include <functional>
#include <vector>

#include "ssp/params.hpp"
#include "ssp/shooter.hpp"

namespace ssp::profile {

using dynsys::State;

struct ProfilePoint {
    double xi = 0.0;  // self-similar radius
    double f = 0.0;   // profile value
};

// Algebraic inversion of the phase-space change of variables on {X>0, Z>0}:
//   f  = [Z/((p-1)X)]^(1/(p-1))
//   xi = sqrt(m) [(p-1)X]^beta Z^((m-1)/(2(p-1))),  beta = (p-m)/(2(p-1))
ProfilePoint state_to_profile(const ParamTriple& q, const State& s);

// Forward change of variables (X, Z components; Y requires f').
std::pair<double, double> profile_to_XZ(const ParamTriple& q, const ProfilePoint& pt);

enum class ExactKind {
    ConstantStar,        // flat profile k_* = (1/(p-1))^(1/(p-1))
    StationarySingular,  // c_s xi^(-2/(p-m))
    SobolevFamily,       // stationary bubble family, only at p = p_s
};

double flat_constant(const ParamTriple& q);  // k_*

// Closed-form profiles; SobolevFamily takes the family constant Cfam and
// requires p = p_s (within 1e-12 relative). StationarySingular requires xi > 0.
double exact_profile(ExactKind kind, const ParamTriple& q, double xi, double Cfam = 1.0);
double exact_profile_deriv(ExactKind kind, const ParamTriple& q, double xi,
                           double Cfam = 1.0);
double exact_profile_deriv2(ExactKind kind, const ParamTriple& q, double xi,
                            double Cfam = 1.0);

// A twice-differentiable radial profile.
struct ProfileFn {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> d2f;
};

ProfileFn exact_profile_fn(ExactKind kind, const ParamTriple& q, double Cfam = 1.0);

// Left-hand side of the self-similar profile equation at xi:
//   (f^m)'' + (N-1)/xi (f^m)' - f/(p-1) - beta xi f' + f^p
double ode_residual(const ParamTriple& q, const ProfileFn& fn, double xi);

// Stationary part only: (f^m)'' + (N-1)/xi (f^m)' + f^p. Zero on the
// stationary solutions; used as the calibration oracle for SobolevFamily.
double stationary_residual(const ParamTriple& q, const ProfileFn& fn, double xi);

// Residuals of a sampled profile on a uniform log-xi grid via 5-point
// centered stencils. Returns one residual per interior grid point.
std::vector<double> sampled_residuals(const ParamTriple& q,
                                      const std::vector<ProfilePoint>& samples);

// Reconstructed solution profile for a classified shot.
struct SolutionProfile {
    double C_shoot = 0.0;
    std::vector<ProfilePoint> samples;  // xi strictly increasing
    int oscillations = 0;
    bool monotone = false;
    double decay_C = 0.0;  // far-field constant; > c_s on connecting orbits
    double f0 = 0.0;       // value at xi -> 0
};

// Algebraic reconstruction from the trajectory (no re-integration).
SolutionProfile reconstruct(const ParamTriple& q, const shooter::ShotOutcome& outcome,
                            double C_shoot);

// Far-field constant and fit quality for a connecting outcome:
//   decay_C = (m Z_limit)^(1/(p-m));
//   fit_quality = max relative deviation of f xi^(2/(p-m)) from decay_C over
//   the last decade of xi.
std::pair<double, double> extract_decay(const ParamTriple& q,
                                        const shooter::ShotOutcome& outcome);

struct DeadCoreReport {
    double xi0_estimate = 0.0;  // radius where f drops below the floor
    double flux = 0.0;          // (f^m)'(xi0_estimate); negative on Q3 tails
    double f_floor = 1e-3;
};

// Interface diagnostics of a plunging trajectory (requires a tail that fell
// below Y = -(N-2)/m, i.e. a Q3-type escape).
DeadCoreReport dead_core_diagnostic(const ParamTriple& q,
                                    const shooter::ShotOutcome& outcome,
                                    double f_floor = 1e-3);

// Local interface shape [(p-m)(m-1)(xi^2 - xi0^2)/(4m(p-1))]_+^(1/(m-1)).
double dead_core_local_profile(const ParamTriple& q, double xi, double xi0);

// Near-origin expansion carrying the shooting parameter C:
//   [ (C/(p-1))^((m-1)/(p-1)) + (1-C)(m-1) xi^2 / (2mN(p-1)) ]^(1/(m-1))
double near_origin_profile(const ParamTriple& q, double C, double xi);

// Number of interior local maxima of the sampled profile (humps that rise and
// fall by at least rel_prominence of the profile's peak value).
int interior_local_maxima(const std::vector<ProfilePoint>& samples,
                          double rel_prominence = 1e-6);

}  // namespace ssp::profile

#endif
