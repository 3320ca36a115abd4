#include "rtba/flyby.hpp"

#include <cmath>

namespace rtba {

Vec3 v_inf_in(const FlybyParams& params, const HelioState& planet_state) {
    const TnwFrame f = tnw_from_planet_state(planet_state);
    const double cp = std::cos(params.phi_g);
    return params.v_inf * (cp * std::cos(params.theta_g) * f.u_hat +
                           cp * std::sin(params.theta_g) * f.v_hat +
                           std::sin(params.phi_g) * f.w_hat);
}

double deflection_angle(double v_inf, double h_p, const Body& body) {
    if (!(v_inf > 0.0)) throw DomainError("deflection angle undefined for zero excess speed");
    if (!(h_p >= 0.0)) throw DomainError("negative flyby altitude");
    const double rp = body.radius + h_p;
    return 2.0 * std::asin(1.0 / (1.0 + rp * v_inf * v_inf / body.mu));
}

Vec3 v_inf_out(const Vec3& v_in, const Vec3& planet_velocity, double delta, double beta) {
    const LocalFrame f = local_frame(v_in, planet_velocity);
    const double sd = std::sin(delta);
    const Vec3 dir = std::cos(delta) * f.i_hat + std::cos(beta) * sd * f.j_hat +
                     std::sin(beta) * sd * f.k_hat;
    return v_in.norm() * dir;
}

Vec3 v_out_heliocentric(const Vec3& v_in, const HelioState& planet_state, double delta,
                        double beta) {
    return planet_state.velocity + v_inf_out(v_in, planet_state.velocity, delta, beta);
}

}  // namespace rtba
