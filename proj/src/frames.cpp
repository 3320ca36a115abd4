#include "rtba/frames.hpp"

#include <cmath>

namespace rtba {

TnwFrame tnw_from_planet_state(const HelioState& state) {
    const Vec3& V = state.velocity;
    const Vec3 h = state.position.cross(V);
    const double vn = V.norm();
    const double hn = h.norm();
    if (!(vn > 0.0) || !(hn > 1e-12 * vn * state.position.norm()))
        throw FrameError("TNW frame undefined for a rectilinear or zero-velocity state");
    TnwFrame f;
    f.u_hat = V / vn;
    f.v_hat = h / hn;
    f.w_hat = f.v_hat.cross(f.u_hat);
    return f;
}

LocalFrame local_frame(const Vec3& v_inf_in, const Vec3& planet_velocity) {
    const double n = v_inf_in.norm();
    if (!(n > 0.0)) throw FrameError("local flyby frame needs a non-zero incoming excess velocity");
    LocalFrame f;
    f.i_hat = v_inf_in / n;
    const Vec3 j = f.i_hat.cross(planet_velocity);
    const double jn = j.norm();
    if (!(jn > 1e-12 * planet_velocity.norm()))
        throw FrameError("incoming excess velocity is parallel to the planet velocity");
    f.j_hat = j / jn;
    f.k_hat = f.i_hat.cross(f.j_hat);
    return f;
}

CylState cart_to_cyl(const HelioState& state) {
    const Vec3& p = state.position;
    const Vec3& v = state.velocity;
    CylState c;
    c.r = std::hypot(p.x(), p.y());
    c.theta = std::atan2(p.y(), p.x());
    c.z = p.z();
    if (c.r > 0.0) {
        const double ct = p.x() / c.r;
        const double st = p.y() / c.r;
        c.vr = ct * v.x() + st * v.y();
        c.vtheta = -st * v.x() + ct * v.y();
    } else {
        c.vr = std::hypot(v.x(), v.y());
        c.vtheta = 0.0;
    }
    c.vz = v.z();
    return c;
}

Vec3 cyl_vector_to_cart(double theta, const Vec3& cyl) {
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    return {ct * cyl.x() - st * cyl.y(), st * cyl.x() + ct * cyl.y(), cyl.z()};
}

HelioState cyl_to_cart(const CylState& c, double epoch) {
    if (!(c.r > 0.0)) throw DomainError("cylindrical state with non-positive radius");
    HelioState s;
    s.position = Vec3(c.r * std::cos(c.theta), c.r * std::sin(c.theta), c.z);
    s.velocity = cyl_vector_to_cart(c.theta, Vec3(c.vr, c.vtheta, c.vz));
    s.epoch = epoch;
    return s;
}

}  // namespace rtba
