#pragma once

#include "rtba/core.hpp"
#include "rtba/ephemeris.hpp"
#include "rtba/frames.hpp"

namespace rtba {

/// Unpowered gravity-assist parameters for one flyby.
struct FlybyParams {
    double v_inf = 0.0;    // m/s, incoming excess speed
    double theta_g = 0.0;  // rad, in-plane angle in the TNW frame
    double phi_g = 0.0;    // rad, out-of-plane angle in the TNW frame
    double h_p = 2e5;      // m, periapsis altitude above the surface
    double beta = 0.0;     // rad, orientation of the flyby plane
};

/// Incoming excess velocity built in the planet's TNW frame:
/// v_inf (cos(phi) cos(theta) u + cos(phi) sin(theta) v + sin(phi) w).
Vec3 v_inf_in(const FlybyParams& params, const HelioState& planet_state);

/// Hyperbolic deflection 2 asin(1 / (1 + r_p v_inf^2 / mu)), r_p = radius + h_p.
double deflection_angle(double v_inf, double h_p, const Body& body);

/// Outgoing excess direction cos(d) i + cos(b) sin(d) j + sin(b) sin(d) k
/// in the local frame, scaled by |v_in| and added to the planet velocity.
Vec3 v_out_heliocentric(const Vec3& v_in, const HelioState& planet_state, double delta,
                        double beta);

/// Outgoing excess velocity (planet-relative) for the same construction.
Vec3 v_inf_out(const Vec3& v_in, const Vec3& planet_velocity, double delta, double beta);

}  // namespace rtba
