#ifndef SSP_DYNSYS_HPP
#define SSP_DYNSYS_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "ssp/params.hpp"

namespace ssp::dynsys {

// Chart states are stored in a fixed 3-slot array; planar charts use the
// first two slots and leave the third at zero.
using State = std::array<double, 3>;

struct Mat3 {
    // row-major; planar charts fill the upper-left 2x2 block
    std::array<double, 9> a{};
    double operator()(int r, int c) const { return a[static_cast<std::size_t>(3 * r + c)]; }
    double& operator()(int r, int c) { return a[static_cast<std::size_t>(3 * r + c)]; }
};

// Charts of the phase space.
//   Main:    (X, Y, Z), independent variable eta = log xi
//   InfX:    x = 1/X, y = Y/X, z = Z/X, chart time d(eta1) = X d(eta)
//   InfYQ2:  x = X/Y, z = Z/Y, w = 1/Y near Y -> +inf, chart time |Y| d(eta)
//   InfYQ3:  same projection near Y -> -inf
//   PlaneX0: (Y, Z) flow inside the invariant plane {X = 0}
//   PlaneW0: (y, w = x z) flow inside the invariant plane {x = 0} of InfX
enum class Chart { Main, InfX, InfYQ2, InfYQ3, PlaneX0, PlaneW0 };

std::size_t chart_dim(Chart chart);
std::string to_string(Chart chart);

// True when the state lies in the chart's admissible region (the closed
// quadrant X >= 0, Z >= 0 for Main; w >= 0 for PlaneW0; everywhere else free).
bool admissible(Chart chart, const State& s);

// Right-hand side of the chart's autonomous field, exactly as printed forms.
// Throws std::domain_error on inadmissible states.
State vector_field(Chart chart, const ParamTriple& q, const State& s);

namespace detail {
// Same polynomial right-hand side without the admissibility/parameter checks.
// Integrator stages may probe marginally outside the closed quadrant.
State rhs_raw(Chart chart, const ParamTriple& q, const State& s);
}  // namespace detail

// Analytic Jacobian of vector_field.
Mat3 jacobian(Chart chart, const ParamTriple& q, const State& s);

// ---------------------------------------------------------------------------
// Critical points

enum class PointLabel { P0, P1, P2, P3, Q1, Q2, Q3, Q4, Q5, Qgamma };

enum class Stability {
    Saddle,
    SaddleFocus,
    UnstableNode,
    StableNode,
    CenterUnstable,  // zero eigenvalues plus an unstable direction
    Nonhyperbolic,
};

struct CriticalPointInfo {
    PointLabel label = PointLabel::P0;
    Chart chart = Chart::Main;     // chart in which location/eigen-data live
    bool has_chart = true;         // Q4 carries only sphere coordinates
    State location{};              // chart coordinates
    std::array<double, 4> sphere{};  // (Xbar, Ybar, Zbar, W) for points at infinity
    bool at_infinity = false;
    double kappa = 0.0;            // Qgamma family parameter z = kappa; else 0
    std::size_t dim = 3;
    std::array<std::complex<double>, 3> eigenvalues{};
    std::array<State, 3> eigenvectors{};
    std::array<bool, 3> eigenvector_real{};  // false when the pair is complex
    Stability stability = Stability::Saddle;
    bool no_admissible_connection = false;  // Qgamma with kappa != 1
    bool no_incoming_profiles = false;      // Q4
};

// Pure function of the eigenvalue signs/realness.
Stability stability_from_eigenvalues(const std::array<std::complex<double>, 3>& ev,
                                     std::size_t dim);

// P0..P3 with analytic eigen-data, plus the points at infinity Q1..Q5 and the
// Qgamma family (recorded at kappa = 1, the only admissible connection).
// Requires p > p_s: below it the stability taxonomy would be wrong.
std::vector<CriticalPointInfo> critical_points(const ParamTriple& q);

// Locations of the finite points in the Main chart.
State location_P0(const ParamTriple& q);
State location_P1(const ParamTriple& q);
State location_P2(const ParamTriple& q);
State location_P3(const ParamTriple& q);

// Discriminant deciding the focus/node character of the linearization at the
// singular stationary state:
//   F = ((N-2)(N-10) p^2 - 2 m (N^2 - 8N + 4) p + m^2 (N-2)^2) / (p-m)^2.
// F(m,N,p_s) = -4(N-2), F(m,N,p_JL) = 0.
double discriminant_F(const ParamTriple& q);

// Z-coordinate of the line orbit of the singular stationary profile,
// 2[p(N-2) - mN]/(p-m)^2; equals the Z-coordinate of P2.
double stationary_Z0(const ParamTriple& q);

// Far-field decay constant c_s = (m * Z0)^(1/(p-m)).
double singular_constant(const ParamTriple& q);

// ---------------------------------------------------------------------------
// Exact invariant orbits

enum class ExactOrbit {
    ConstOrbit,  // X = Z, Y = 0 (space-homogeneous profile)
    StatOrbit,   // Y = -2/(p-m), Z = Z0, X free (singular stationary profile)
};

// State at chart-time eta, normalized so that X(0) = 1.
// StatOrbit requires p > p_s.
State exact_orbit_state(ExactOrbit which, const ParamTriple& q, double eta);

// ---------------------------------------------------------------------------
// Sign checks backing the invariant-region arguments. Each check takes a sample
// that must lie on the referenced manifold (validated to 1e-12 relative) and
// returns the raw signed value for test assertions.

// Z-value of the connecting curve N/(N-2) Y (mY + N-2) + Z = 0 in {X = 0}.
double separating_curve_Z(const ParamTriple& q, double Y);
// Flow across that curve; < 0 for p > p_s. Sample (Y, Z) with Z on the curve.
double separating_curve_flow(const ParamTriple& q, double Y, double Z);

// Dulac divergence (4m/(p-m) - N + 2) Z^a, a = (3m-p)/(p-m); < 0 for p > p_s.
double dulac_divergence(const ParamTriple& q, double Z);

// Z-value of the parabolic cylinder Z = -(N-2)Y - mY^2.
double cylinder_Z(const ParamTriple& q, double Y);
// Flow across the cylinder; >= 0 on the band -2/(p-m) <= Y <= 0, X >= 0.
// Sample (X, Y, Z) with Z on the cylinder.
double cylinder_flow(const ParamTriple& q, double X, double Y, double Z);

// Flow across the plane {Y = -(N-2)/m}: (mN - p(N-2))/(2m) X - Z, < 0 for
// p > p_s whenever (X, Z) != (0, 0). Sample is the full state on the plane.
double escape_plane_flow(const ParamTriple& q, const State& s);

// Residual of the quadratic center-manifold form at the far-field point,
// evaluated on a Main-chart state with X > 0:
//   (p-m)/2 * y + x - (-Z0 x^2 + x z),  x = 1/X, y = Y/X, z = Z/X.
// Decays along tails that connect to the far-field point.
double center_manifold_residual(const ParamTriple& q, const State& s);

}  // namespace ssp::dynsys

#endif
