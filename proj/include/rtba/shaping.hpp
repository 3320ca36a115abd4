#pragma once

#include "rtba/core.hpp"
#include "rtba/ephemeris.hpp"
#include "rtba/frames.hpp"

#include <array>
#include <span>
#include <vector>

namespace rtba {

enum class Axis { Radial, Normal, Axial };

/// One velocity function of normalized time s = t / tof:
///   Power: s^power
///   Cos:   s^power cos(freq s)
///   Sin:   s^power sin(freq s)
/// Derivatives and antiderivatives are with respect to s.
struct ShapeTerm {
    enum class Kind { Power, Cos, Sin };

    Kind kind = Kind::Power;
    int power = 0;
    double freq = 0.0;

    double value(double s) const;
    double derivative(double s) const;
    /// Integral from 0 to s.
    double integral(double s) const;
};

using FunctionSet = std::vector<ShapeTerm>;

/// Three boundary-condition functions per axis. Radial and normal use
/// {1, s, s^2}; axial uses {cos(ws), s^3 cos(ws), s^3 sin(ws)} with
/// w = 2 pi (N + 0.5).
FunctionSet base_functions(Axis axis, int n_rev);

/// Free-coefficient functions. count = 1 gives the printed pair per axis
/// ({s sin(pi s/2), s cos(pi s/2)} or {s^4 cos(ws), s^4 sin(ws)});
/// count = 2 appends one more term per axis. Throws DomainError otherwise.
FunctionSet additional_functions(Axis axis, int n_rev, int count);

/// Number of free coefficients per axis for a given free-parameter count.
int free_coeffs_per_axis(int count);

/// Velocity along one cylindrical axis: v(t) = sum c_k f_k(t / tof).
struct VelocityShape {
    Axis axis = Axis::Radial;
    int n_rev = 0;
    double tof = 0.0;  // s
    std::array<double, 3> base_coeffs{};
    std::vector<double> free_coeffs;
    FunctionSet base;
    FunctionSet extra;

    double velocity(double t) const;
    double acceleration(double t) const;
    /// Integral of velocity from 0 to t.
    double displacement(double t) const;
};

struct ShapedLeg {
    HelioState departure;
    HelioState arrival;
    double tof = 0.0;  // s
    int n_rev = 0;
    double sun_mu = kSunMu;
    CylState start;              // cylindrical departure state
    double total_angle = 0.0;    // polar angle swept, including 2 pi N
    std::array<VelocityShape, 3> shapes;  // radial, normal, axial
    double delta_v = 0.0;           // m/s
    double max_thrust_accel = 0.0;  // m/s^2

    const VelocityShape& radial() const { return shapes[0]; }
    const VelocityShape& normal() const { return shapes[1]; }
    const VelocityShape& axial() const { return shapes[2]; }
};

/// Polar angle the leg must sweep: the prograde angle from departure to
/// arrival in [0, 2 pi) plus 2 pi N.
double required_transfer_angle(const HelioState& dep, const HelioState& arr, int n_rev);

/// Fixes the base coefficients of all three axes so that the boundary
/// velocities, the radial and axial displacements and the swept polar angle
/// match. `free_coeffs` is ordered radial, normal, axial with
/// free_coeffs_per_axis(count) entries per axis (size 0, 6 or 9).
/// Throws ShapingError for singular systems or radii below 0.05 AU.
ShapedLeg solve_coefficients(const HelioState& dep, const HelioState& arr, double tof,
                             int n_rev, std::span<const double> free_coeffs,
                             double sun_mu = kSunMu);

/// Cylindrical state at time t in [0, tof].
CylState evaluate_state(const ShapedLeg& leg, double t);

/// Thrust acceleration at time t in cylindrical components (f_r, f_theta, f_z).
Vec3 thrust_acceleration(const ShapedLeg& leg, double t);

/// Integrates |f| with 64-node Gauss-Legendre, storing delta_v and
/// max_thrust_accel on the leg. Returns delta_v.
double compute_delta_v(ShapedLeg& leg);

/// solve_coefficients followed by compute_delta_v.
ShapedLeg shape_leg(const HelioState& dep, const HelioState& arr, double tof, int n_rev,
                    std::span<const double> free_coeffs, double sun_mu = kSunMu);

struct ThrustSample {
    double t = 0.0;
    CylState state;
    Vec3 thrust = Vec3::Zero();
};

/// Thrust profile at the 64 quadrature nodes.
std::vector<ThrustSample> thrust_profile(const ShapedLeg& leg);

}  // namespace rtba
