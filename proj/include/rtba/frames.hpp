#pragma once

#include "rtba/core.hpp"
#include "rtba/ephemeris.hpp"

namespace rtba {

/// Cylindrical state about the ecliptic z-axis. `theta` is measured from +x
/// and is not wrapped.
struct CylState {
    double r = 0.0;
    double theta = 0.0;
    double z = 0.0;
    double vr = 0.0;
    double vtheta = 0.0;
    double vz = 0.0;
};

/// u along the planet velocity, v along its orbital angular momentum and
/// w along h x V. Note that (u, v, w) is left-handed with this ordering.
struct TnwFrame {
    Vec3 u_hat;
    Vec3 v_hat;
    Vec3 w_hat;
};

/// i along the incoming excess velocity, j = i x V_pl (normalized), k = i x j.
struct LocalFrame {
    Vec3 i_hat;
    Vec3 j_hat;
    Vec3 k_hat;
};

TnwFrame tnw_from_planet_state(const HelioState& state);
LocalFrame local_frame(const Vec3& v_inf_in, const Vec3& planet_velocity);

CylState cart_to_cyl(const HelioState& state);
HelioState cyl_to_cart(const CylState& c, double epoch);

/// Cartesian components of a vector given in the (r, theta, z) basis at angle theta.
Vec3 cyl_vector_to_cart(double theta, const Vec3& cyl);

}  // namespace rtba
