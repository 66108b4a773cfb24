#include "ssp/dynsys.hpp"

#include <cmath>
#include <stdexcept>

#include "ssp/exponents.hpp"

namespace ssp::dynsys {

namespace {

[[noreturn]] void bad_state(Chart chart, const State& s) {
    throw std::domain_error("vector_field: state (" + std::to_string(s[0]) + ", " +
                            std::to_string(s[1]) + ", " + std::to_string(s[2]) +
                            ") inadmissible in chart " + to_string(chart));
}

void check_on_manifold(const char* who, double value, double target) {
    const double scale = std::max({1.0, std::abs(value), std::abs(target)});
    if (std::abs(value - target) > 1e-12 * scale)
        throw std::domain_error(std::string(who) + ": sample off the referenced manifold");
}

}  // namespace

std::size_t chart_dim(Chart chart) {
    switch (chart) {
        case Chart::Main:
        case Chart::InfX:
        case Chart::InfYQ2:
        case Chart::InfYQ3: return 3;
        case Chart::PlaneX0:
        case Chart::PlaneW0: return 2;
    }
    return 3;
}

std::string to_string(Chart chart) {
    switch (chart) {
        case Chart::Main: return "Main";
        case Chart::InfX: return "InfX";
        case Chart::InfYQ2: return "InfYQ2";
        case Chart::InfYQ3: return "InfYQ3";
        case Chart::PlaneX0: return "PlaneX0";
        case Chart::PlaneW0: return "PlaneW0";
    }
    return "?";
}

bool admissible(Chart chart, const State& s) {
    switch (chart) {
        case Chart::Main: return s[0] >= 0.0 && s[2] >= 0.0;
        case Chart::PlaneW0: return s[1] >= 0.0;
        default: return true;
    }
}

State vector_field(Chart chart, const ParamTriple& q, const State& s) {
    validate(q);
    if (!admissible(chart, s)) bad_state(chart, s);
    return detail::rhs_raw(chart, q, s);
}

State detail::rhs_raw(Chart chart, const ParamTriple& q, const State& s) {
    const double m = q.m, N = q.N, p = q.p;
    switch (chart) {
        case Chart::Main: {
            const double X = s[0], Y = s[1], Z = s[2];
            // The Y-equation is grouped as X(1 + (p-m)Y/2) - ((N-2)Y + mY^2 + Z)
            // so that both explicit orbits stay invariant to the last bit in
            // floating point whenever the parameters make them dyadic.
            return State{X * (2.0 - (m - 1.0) * Y),
                         X * (1.0 + 0.5 * (p - m) * Y) - ((N - 2.0) * Y + m * Y * Y + Z),
                         Z * (2.0 + (p - m) * Y)};
        }
        case Chart::InfX: {
            const double x = s[0], y = s[1], z = s[2];
            return State{x * ((m - 1.0) * y - 2.0 * x),
                         -y * y + 0.5 * (p - m) * y + x - N * x * y - x * z,
                         (p - 1.0) * y * z};
        }
        case Chart::InfYQ2:
        case Chart::InfYQ3: {
            const double x = s[0], z = s[1], w = s[2];
            const double sign = (chart == Chart::InfYQ3) ? 1.0 : -1.0;
            return State{
                sign * (-x - N * x * w + 0.5 * (p - m) * x * x + x * x * w - x * z * w),
                sign * (-p * z - N * z * w + 0.5 * (p - m) * x * z + x * z * w - z * z * w),
                sign * (-m * w - (N - 2.0) * w * w + 0.5 * (p - m) * x * w + x * w * w -
                        z * w * w)};
        }
        case Chart::PlaneX0: {
            const double Y = s[0], Z = s[1];
            return State{-(N - 2.0) * Y - Z - m * Y * Y, Z * (2.0 + (p - m) * Y), 0.0};
        }
        case Chart::PlaneW0: {
            const double y = s[0], w = s[1];
            return State{-y * y + 0.5 * (p - m) * y - w, (m + p - 2.0) * y * w, 0.0};
        }
    }
    bad_state(chart, s);
}

Mat3 jacobian(Chart chart, const ParamTriple& q, const State& s) {
    validate(q);
    if (!admissible(chart, s)) bad_state(chart, s);
    const double m = q.m, N = q.N, p = q.p;
    Mat3 J;
    switch (chart) {
        case Chart::Main: {
            const double X = s[0], Y = s[1], Z = s[2];
            J(0, 0) = 2.0 - (m - 1.0) * Y;
            J(0, 1) = -(m - 1.0) * X;
            J(0, 2) = 0.0;
            J(1, 0) = 1.0 + 0.5 * (p - m) * Y;
            J(1, 1) = -(N - 2.0) - 2.0 * m * Y + 0.5 * (p - m) * X;
            J(1, 2) = -1.0;
            J(2, 0) = 0.0;
            J(2, 1) = (p - m) * Z;
            J(2, 2) = 2.0 + (p - m) * Y;
            break;
        }
        case Chart::InfX: {
            const double x = s[0], y = s[1], z = s[2];
            J(0, 0) = (m - 1.0) * y - 4.0 * x;
            J(0, 1) = (m - 1.0) * x;
            J(0, 2) = 0.0;
            J(1, 0) = 1.0 - N * y - z;
            J(1, 1) = -2.0 * y + 0.5 * (p - m) - N * x;
            J(1, 2) = -x;
            J(2, 0) = 0.0;
            J(2, 1) = (p - 1.0) * z;
            J(2, 2) = (p - 1.0) * y;
            break;
        }
        case Chart::InfYQ2:
        case Chart::InfYQ3: {
            const double x = s[0], z = s[1], w = s[2];
            const double sg = (chart == Chart::InfYQ3) ? 1.0 : -1.0;
            J(0, 0) = sg * (-1.0 - N * w + (p - m) * x + 2.0 * x * w - z * w);
            J(0, 1) = sg * (-x * w);
            J(0, 2) = sg * (-N * x + x * x - x * z);
            J(1, 0) = sg * (0.5 * (p - m) * z + z * w);
            J(1, 1) = sg * (-p - N * w + 0.5 * (p - m) * x + x * w - 2.0 * z * w);
            J(1, 2) = sg * (-N * z + x * z - z * z);
            J(2, 0) = sg * (0.5 * (p - m) * w + w * w);
            J(2, 1) = sg * (-w * w);
            J(2, 2) = sg * (-m - 2.0 * (N - 2.0) * w + 0.5 * (p - m) * x + 2.0 * x * w -
                            2.0 * z * w);
            break;
        }
        case Chart::PlaneX0: {
            const double Y = s[0], Z = s[1];
            J(0, 0) = -(N - 2.0) - 2.0 * m * Y;
            J(0, 1) = -1.0;
            J(1, 0) = (p - m) * Z;
            J(1, 1) = 2.0 + (p - m) * Y;
            break;
        }
        case Chart::PlaneW0: {
            const double y = s[0], w = s[1];
            J(0, 0) = -2.0 * y + 0.5 * (p - m);
            J(0, 1) = -1.0;
            J(1, 0) = (m + p - 2.0) * w;
            J(1, 1) = (m + p - 2.0) * y;
            break;
        }
    }
    return J;
}

// ---------------------------------------------------------------------------

State location_P0(const ParamTriple&) { return State{0.0, 0.0, 0.0}; }

State location_P1(const ParamTriple& q) { return State{0.0, -(q.N - 2.0) / q.m, 0.0}; }

State location_P2(const ParamTriple& q) {
    return State{0.0, -2.0 / (q.p - q.m), stationary_Z0(q)};
}

State location_P3(const ParamTriple& q) {
    return State{2.0 * (q.m * q.N - q.N + 2.0) / ((q.m - 1.0) * (q.p - 1.0)),
                 2.0 / (q.m - 1.0), 0.0};
}

double discriminant_F(const ParamTriple& q) {
    validate(q);
    const double m = q.m, N = q.N, p = q.p;
    const double num = (N - 2.0) * (N - 10.0) * p * p -
                       2.0 * m * (N * N - 8.0 * N + 4.0) * p +
                       m * m * (N - 2.0) * (N - 2.0);
    return num / ((p - m) * (p - m));
}

double stationary_Z0(const ParamTriple& q) {
    return 2.0 * (q.p * (q.N - 2.0) - q.m * q.N) / ((q.p - q.m) * (q.p - q.m));
}

double singular_constant(const ParamTriple& q) {
    return std::pow(q.m * stationary_Z0(q), 1.0 / (q.p - q.m));
}

Stability stability_from_eigenvalues(const std::array<std::complex<double>, 3>& ev,
                                     std::size_t dim) {
    int pos = 0, neg = 0, zero = 0;
    bool complex_pair = false;
    for (std::size_t i = 0; i < dim; ++i) {
        if (ev[i].imag() != 0.0) complex_pair = true;
        if (ev[i].real() > 0.0)
            ++pos;
        else if (ev[i].real() < 0.0)
            ++neg;
        else
            ++zero;
    }
    if (zero > 0) return pos > 0 ? Stability::CenterUnstable : Stability::Nonhyperbolic;
    if (pos == static_cast<int>(dim)) return Stability::UnstableNode;
    if (neg == static_cast<int>(dim)) return Stability::StableNode;
    return complex_pair ? Stability::SaddleFocus : Stability::Saddle;
}

namespace {

CriticalPointInfo finite_point(PointLabel label, const State& loc) {
    CriticalPointInfo info;
    info.label = label;
    info.chart = Chart::Main;
    info.location = loc;
    return info;
}

void finish(CriticalPointInfo& info) {
    info.stability = stability_from_eigenvalues(info.eigenvalues, info.dim);
}

// Real quadratic roots, or a conjugate pair, from sum and product.
std::array<std::complex<double>, 2> quadratic_pair(double sum, double prod) {
    const double disc = sum * sum - 4.0 * prod;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        return {std::complex<double>(0.5 * (sum + r), 0.0),
                std::complex<double>(0.5 * (sum - r), 0.0)};
    }
    const double im = 0.5 * std::sqrt(-disc);
    return {std::complex<double>(0.5 * sum, im), std::complex<double>(0.5 * sum, -im)};
}

}  // namespace

std::vector<CriticalPointInfo> critical_points(const ParamTriple& q) {
    require_supercritical(q, "critical_points");
    const double m = q.m, N = q.N, p = q.p;
    std::vector<CriticalPointInfo> pts;
    pts.reserve(10);

    {  // P0: saddle, 2D unstable manifold carrying the profile family
        CriticalPointInfo i = finite_point(PointLabel::P0, location_P0(q));
        i.eigenvalues = {2.0, -(N - 2.0), 2.0};
        i.eigenvectors = {State{N, 1.0, 0.0}, State{0.0, 1.0, 0.0}, State{0.0, 1.0, -N}};
        i.eigenvector_real = {true, true, true};
        finish(i);
        pts.push_back(i);
    }
    {  // P1
        CriticalPointInfo i = finite_point(PointLabel::P1, location_P1(q));
        const double a = (m * N - N + 2.0) / m;
        const double b = (m * N - p * (N - 2.0)) / (2.0 * m);
        const double c = N - 2.0;
        const double d = (m * N - p * (N - 2.0)) / m;
        i.eigenvalues = {a, c, d};
        i.eigenvectors = {State{a - c, b, 0.0}, State{0.0, 1.0, 0.0}, State{0.0, 1.0, c - d}};
        i.eigenvector_real = {true, true, true};
        finish(i);
        pts.push_back(i);
    }
    {  // P2: saddle-focus below the Joseph-Lundgren exponent, saddle above
        CriticalPointInfo i = finite_point(PointLabel::P2, location_P2(q));
        const double l1 = 2.0 * (p - 1.0) / (p - m);
        const double sum = -(p * (N - 2.0) - m * (N + 2.0)) / (p - m);
        const double prod = 2.0 * (p * (N - 2.0) - m * N) / (p - m);
        const auto pair = quadratic_pair(sum, prod);
        i.eigenvalues = {l1, pair[0], pair[1]};
        i.eigenvectors[0] = State{1.0, 0.0, 0.0};
        i.eigenvector_real = {true, false, false};
        if (pair[0].imag() == 0.0) {
            // (M - lambda I) e = 0 with e = (0, 1, lambda_other)
            i.eigenvectors[1] = State{0.0, 1.0, pair[1].real()};
            i.eigenvectors[2] = State{0.0, 1.0, pair[0].real()};
            i.eigenvector_real = {true, true, true};
        }
        finish(i);
        pts.push_back(i);
    }
    {  // P3
        CriticalPointInfo i = finite_point(PointLabel::P3, location_P3(q));
        const double l3 = 2.0 * (p - 1.0) / (m - 1.0);
        const double g = -2.0 * (m * N - N + 2.0) / (p - 1.0);
        const double u = (p - 1.0) / (m - 1.0);
        const double v = -(N * (m - 1.0) * (m - 1.0) + 2.0 * (m * p - 1.0)) /
                         ((m - 1.0) * (p - 1.0));
        const auto pair = quadratic_pair(v, -g * u);
        i.eigenvalues = {pair[0], pair[1], l3};
        i.eigenvectors[2] = State{g, l3, u * g + (v - l3) * l3};
        i.eigenvector_real = {false, false, true};
        if (pair[0].imag() == 0.0) {
            i.eigenvectors[0] = State{g, pair[0].real(), 0.0};
            i.eigenvectors[1] = State{g, pair[1].real(), 0.0};
            i.eigenvector_real = {true, true, true};
        }
        finish(i);
        pts.push_back(i);
    }

    const double pm = p - m;
    {  // Q1: far field, 2D center manifold attracting the connecting tails
        CriticalPointInfo i;
        i.label = PointLabel::Q1;
        i.chart = Chart::InfX;
        i.location = State{0.0, 0.0, 0.0};
        i.at_infinity = true;
        i.sphere = {1.0, 0.0, 0.0, 0.0};
        i.eigenvalues = {0.0, 0.5 * pm, 0.0};
        i.eigenvectors = {State{pm, -2.0, 0.0}, State{0.0, 1.0, 0.0}, State{0.0, 0.0, 1.0}};
        i.eigenvector_real = {true, true, true};
        finish(i);
        pts.push_back(i);
    }
    {  // Q2 / Q3: nodes governing the interface behaviors
        const double norm = 1.0;
        for (int sgn : {+1, -1}) {
            CriticalPointInfo i;
            i.label = (sgn > 0) ? PointLabel::Q2 : PointLabel::Q3;
            i.chart = (sgn > 0) ? Chart::InfYQ2 : Chart::InfYQ3;
            i.location = State{0.0, 0.0, 0.0};
            i.at_infinity = true;
            i.sphere = {0.0, sgn * norm, 0.0, 0.0};
            const double flip = (sgn > 0) ? -1.0 : 1.0;  // field sign of the chart
            i.eigenvalues = {flip * -1.0, flip * -p, flip * -m};
            i.eigenvectors = {State{1.0, 0.0, 0.0}, State{0.0, 1.0, 0.0},
                              State{0.0, 0.0, 1.0}};
            i.eigenvector_real = {true, true, true};
            finish(i);
            pts.push_back(i);
        }
    }
    {  // Q4: nonhyperbolic; excluded as a profile endpoint
        CriticalPointInfo i;
        i.label = PointLabel::Q4;
        i.has_chart = false;
        i.at_infinity = true;
        i.sphere = {0.0, 0.0, 1.0, 0.0};
        i.dim = 0;
        i.stability = Stability::Nonhyperbolic;
        i.no_incoming_profiles = true;
        pts.push_back(i);
    }
    {  // Q5: dead-core saddle
        CriticalPointInfo i;
        i.label = PointLabel::Q5;
        i.chart = Chart::InfX;
        i.location = State{0.0, 0.5 * pm, 0.0};
        i.at_infinity = true;
        const double r = std::sqrt(4.0 + pm * pm);
        i.sphere = {2.0 / r, pm / r, 0.0, 0.0};
        const double la = 0.5 * (m - 1.0) * pm;
        const double lb = -0.5 * pm;
        const double lc = 0.5 * pm * (p - 1.0);
        i.eigenvalues = {la, lb, lc};
        i.eigenvectors = {State{la - lb, 1.0 - 0.5 * N * pm, 0.0}, State{0.0, 1.0, 0.0},
                          State{0.0, 0.0, 1.0}};
        i.eigenvector_real = {true, true, true};
        finish(i);
        pts.push_back(i);
    }
    {  // Qgamma family, recorded at kappa = 1 (gamma = sqrt(2)/2); the only
        // member reached from the open quadrant. Connections with kappa != 1
        // are inadmissible.
        CriticalPointInfo i;
        i.label = PointLabel::Qgamma;
        i.chart = Chart::InfX;
        i.kappa = 1.0;
        i.location = State{0.0, 0.0, 1.0};
        i.at_infinity = true;
        const double gamma = 1.0 / std::sqrt(2.0);
        i.sphere = {gamma, 0.0, gamma, 0.0};
        i.eigenvalues = {0.0, 0.5 * pm, 0.0};
        i.eigenvectors = {State{1.0, 0.0, 0.0},
                          State{0.0, 1.0, 2.0 * i.kappa * (p - 1.0) / pm},
                          State{0.0, 0.0, 1.0}};
        i.eigenvector_real = {true, true, true};
        finish(i);
        i.no_admissible_connection = false;  // kappa == 1 carries the flat profile
        pts.push_back(i);
        CriticalPointInfo other = i;  // representative of the kappa != 1 members
        other.kappa = 2.0;
        other.location = State{0.0, 0.0, other.kappa};
        // away from kappa = 1 the zero eigenvalue is defective: the kernel is
        // the z-axis only
        other.eigenvectors[0] = State{0.0, 0.0, 1.0};
        other.eigenvectors[1] = State{0.0, 1.0, 2.0 * other.kappa * (p - 1.0) / pm};
        other.eigenvectors[2] = State{0.0, 0.0, 1.0};
        other.eigenvector_real = {true, true, false};
        const double g2 = 1.0 / std::sqrt(1.0 + other.kappa * other.kappa);
        other.sphere = {g2, 0.0, other.kappa * g2, 0.0};
        other.no_admissible_connection = true;
        pts.push_back(other);
    }
    return pts;
}

State exact_orbit_state(ExactOrbit which, const ParamTriple& q, double eta) {
    validate(q);
    switch (which) {
        case ExactOrbit::ConstOrbit: {
            const double X = std::exp(2.0 * eta);
            return State{X, 0.0, X};
        }
        case ExactOrbit::StatOrbit: {
            require_supercritical(q, "exact_orbit_state(StatOrbit)");
            const double rate = 2.0 * (q.p - 1.0) / (q.p - q.m);
            return State{std::exp(rate * eta), -2.0 / (q.p - q.m), stationary_Z0(q)};
        }
    }
    throw std::domain_error("exact_orbit_state: unknown orbit");
}

// ---------------------------------------------------------------------------

double separating_curve_Z(const ParamTriple& q, double Y) {
    return -q.N / (q.N - 2.0) * Y * (q.m * Y + q.N - 2.0);
}

double separating_curve_flow(const ParamTriple& q, double Y, double Z) {
    require_supercritical(q, "separating_curve_flow");
    check_on_manifold("separating_curve_flow", Z, separating_curve_Z(q, Y));
    const double ps = sobolev_exponent(q.m, q.N);
    return q.N * (ps - q.p) / (q.N - 2.0) * Y * Y * (q.m * Y + q.N - 2.0);
}

double dulac_divergence(const ParamTriple& q, double Z) {
    require_supercritical(q, "dulac_divergence");
    if (!(Z > 0.0)) throw std::domain_error("dulac_divergence: requires Z > 0");
    const double a = (3.0 * q.m - q.p) / (q.p - q.m);
    return (4.0 * q.m / (q.p - q.m) - q.N + 2.0) * std::pow(Z, a);
}

double cylinder_Z(const ParamTriple& q, double Y) {
    return -(q.N - 2.0) * Y - q.m * Y * Y;
}

double cylinder_flow(const ParamTriple& q, double X, double Y, double Z) {
    require_supercritical(q, "cylinder_flow");
    check_on_manifold("cylinder_flow", Z, cylinder_Z(q, Y));
    return 0.5 * (2.0 + (q.p - q.m) * Y) *
           (X * (2.0 * q.m * Y + q.N - 2.0) - 2.0 * Y * (q.m * Y + q.N - 2.0));
}

double escape_plane_flow(const ParamTriple& q, const State& s) {
    require_supercritical(q, "escape_plane_flow");
    check_on_manifold("escape_plane_flow", s[1], -(q.N - 2.0) / q.m);
    return (q.m * q.N - q.p * (q.N - 2.0)) / (2.0 * q.m) * s[0] - s[2];
}

double center_manifold_residual(const ParamTriple& q, const State& s) {
    validate(q);
    if (!(s[0] > 0.0)) throw std::domain_error("center_manifold_residual: requires X > 0");
    const double x = 1.0 / s[0], y = s[1] / s[0], z = s[2] / s[0];
    return 0.5 * (q.p - q.m) * y + x - (-stationary_Z0(q) * x * x + x * z);
}

}  // namespace ssp::dynsys
