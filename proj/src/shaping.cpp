#include "rtba/shaping.hpp"

#include "rtba/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace rtba {

namespace {

constexpr std::size_t kNodes = 64;

const QuadratureRule& node_rule() {
    static const QuadratureRule& rule = gauss_legendre(kNodes);
    return rule;
}

double ipow(double x, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}

// Integrals from 0 to x of x^n cos(a x) and x^n sin(a x).
void trig_moments(int n, double a, double x, double& c_out, double& s_out) {
    const double ca = std::cos(a * x);
    const double sa = std::sin(a * x);
    double c = sa / a;
    double s = (1.0 - ca) / a;
    double xk = 1.0;
    for (int k = 1; k <= n; ++k) {
        xk *= x;
        const double cn = xk * sa / a - (k / a) * s;
        const double sn = -xk * ca / a + (k / a) * c;
        c = cn;
        s = sn;
    }
    c_out = c;
    s_out = s;
}

double axial_frequency(int n_rev) { return kTwoPi * (n_rev + 0.5); }

double sum_terms(const FunctionSet& set, std::span<const double> coeffs, double s,
                 double (ShapeTerm::*fn)(double) const) {
    double acc = 0.0;
    for (std::size_t k = 0; k < set.size(); ++k) acc += coeffs[k] * (set[k].*fn)(s);
    return acc;
}

VelocityShape make_shape(Axis axis, int n_rev, double tof, int count,
                         std::span<const double> free_coeffs) {
    VelocityShape shape;
    shape.axis = axis;
    shape.n_rev = n_rev;
    shape.tof = tof;
    shape.base = base_functions(axis, n_rev);
    shape.extra = additional_functions(axis, n_rev, count);
    shape.free_coeffs.assign(free_coeffs.begin(), free_coeffs.end());
    return shape;
}

// Row-equilibrated 3x3 solve with a condition-number guard.
Eigen::Vector3d solve_axis_system(Eigen::Matrix3d A, Eigen::Vector3d b, const char* axis) {
    for (int row = 0; row < 3; ++row) {
        const double scale = A.row(row).cwiseAbs().maxCoeff();
        if (!(scale > 0.0) || !std::isfinite(scale))
            throw ShapingError(std::string("singular ") + axis + " shaping system");
        A.row(row) /= scale;
        b(row) /= scale;
    }
    const Eigen::Vector3d sv = Eigen::JacobiSVD<Eigen::Matrix3d, Eigen::NoQRPreconditioner>(A).singularValues();
    if (!(sv(2) > 0.0) || sv(0) / sv(2) > 1e12)
        throw ShapingError(std::string("singular ") + axis + " shaping system");
    Eigen::Vector3d x = A.partialPivLu().solve(b);
    if (!x.allFinite()) throw ShapingError(std::string("non-finite ") + axis + " coefficients");
    return x;
}

double node_time(const QuadratureRule& rule, std::size_t k) { return 0.5 * (rule.nodes[k] + 1.0); }

}  // namespace

double ShapeTerm::value(double s) const {
    const double p = ipow(s, power);
    switch (kind) {
        case Kind::Power: return p;
        case Kind::Cos: return p * std::cos(freq * s);
        case Kind::Sin: return p * std::sin(freq * s);
    }
    return 0.0;
}

double ShapeTerm::derivative(double s) const {
    const double dp = power == 0 ? 0.0 : power * ipow(s, power - 1);
    const double p = ipow(s, power);
    switch (kind) {
        case Kind::Power: return dp;
        case Kind::Cos: return dp * std::cos(freq * s) - freq * p * std::sin(freq * s);
        case Kind::Sin: return dp * std::sin(freq * s) + freq * p * std::cos(freq * s);
    }
    return 0.0;
}

double ShapeTerm::integral(double s) const {
    if (kind == Kind::Power) return ipow(s, power + 1) / (power + 1);
    double c = 0.0;
    double sn = 0.0;
    trig_moments(power, freq, s, c, sn);
    return kind == Kind::Cos ? c : sn;
}

FunctionSet base_functions(Axis axis, int n_rev) {
    using K = ShapeTerm::Kind;
    if (n_rev < 0) throw DomainError("number of revolutions must be non-negative");
    if (axis == Axis::Axial) {
        const double w = axial_frequency(n_rev);
        return {{K::Cos, 0, w}, {K::Cos, 3, w}, {K::Sin, 3, w}};
    }
    return {{K::Power, 0, 0.0}, {K::Power, 1, 0.0}, {K::Power, 2, 0.0}};
}

FunctionSet additional_functions(Axis axis, int n_rev, int count) {
    using K = ShapeTerm::Kind;
    if (count < 0 || count > 2)
        throw DomainError("free parameter count " + std::to_string(count) + " not in {0, 1, 2}");
    if (n_rev < 0) throw DomainError("number of revolutions must be non-negative");
    FunctionSet set;
    if (count == 0) return set;
    if (axis == Axis::Axial) {
        const double w = axial_frequency(n_rev);
        set = {{K::Cos, 4, w}, {K::Sin, 4, w}};
        if (count == 2) set.push_back({K::Cos, 5, w});
    } else {
        const double w = 0.5 * kPi;
        set = {{K::Sin, 1, w}, {K::Cos, 1, w}};
        if (count == 2) set.push_back({K::Sin, 2, w});
    }
    return set;
}

int free_coeffs_per_axis(int count) {
    if (count < 0 || count > 2)
        throw DomainError("free parameter count " + std::to_string(count) + " not in {0, 1, 2}");
    return count == 0 ? 0 : count + 1;
}

double VelocityShape::velocity(double t) const {
    const double s = t / tof;
    return sum_terms(base, base_coeffs, s, &ShapeTerm::value) +
           sum_terms(extra, free_coeffs, s, &ShapeTerm::value);
}

double VelocityShape::acceleration(double t) const {
    const double s = t / tof;
    return (sum_terms(base, base_coeffs, s, &ShapeTerm::derivative) +
            sum_terms(extra, free_coeffs, s, &ShapeTerm::derivative)) /
           tof;
}

double VelocityShape::displacement(double t) const {
    const double s = t / tof;
    return tof * (sum_terms(base, base_coeffs, s, &ShapeTerm::integral) +
                  sum_terms(extra, free_coeffs, s, &ShapeTerm::integral));
}

double required_transfer_angle(const HelioState& dep, const HelioState& arr, int n_rev) {
    const double th0 = std::atan2(dep.position.y(), dep.position.x());
    const double th1 = std::atan2(arr.position.y(), arr.position.x());
    double d = std::fmod(th1 - th0, kTwoPi);
    if (d < 0.0) d += kTwoPi;
    if (d >= kTwoPi) d -= kTwoPi;
    return d + kTwoPi * n_rev;
}

ShapedLeg solve_coefficients(const HelioState& dep, const HelioState& arr, double tof,
                             int n_rev, std::span<const double> free_coeffs, double sun_mu) {
    if (!(tof > 0.0) || !std::isfinite(tof)) throw DomainError("time of flight must be positive");
    if (n_rev < 0) throw DomainError("number of revolutions must be non-negative");
    if (!dep.position.allFinite() || !dep.velocity.allFinite() || !arr.position.allFinite() ||
        !arr.velocity.allFinite())
        throw DomainError("non-finite boundary state");

    int count = 0;
    switch (free_coeffs.size()) {
        case 0: count = 0; break;
        case 6: count = 1; break;
        case 9: count = 2; break;
        default:
            throw DomainError("free coefficient vector must hold 0, 6 or 9 entries, got " +
                              std::to_string(free_coeffs.size()));
    }
    const auto per_axis = static_cast<std::size_t>(free_coeffs_per_axis(count));

    ShapedLeg leg;
    leg.departure = dep;
    leg.arrival = arr;
    leg.tof = tof;
    leg.n_rev = n_rev;
    leg.sun_mu = sun_mu;
    leg.start = cart_to_cyl(dep);
    const CylState end = cart_to_cyl(arr);
    leg.total_angle = required_transfer_angle(dep, arr, n_rev);

    if (!(leg.start.r >= kMinLegRadius) || !(end.r >= kMinLegRadius))
        throw ShapingError("boundary radius below 0.05 AU");

    const Axis axes[3] = {Axis::Radial, Axis::Normal, Axis::Axial};
    for (int a = 0; a < 3; ++a)
        leg.shapes[a] = make_shape(axes[a], n_rev, tof, count,
                                   free_coeffs.subspan(a * per_axis, per_axis));

    // Radial and axial: velocity at both ends plus the total displacement.
    auto solve_linear = [&](VelocityShape& shape, double v0, double v1, double displacement,
                            const char* name) {
        Eigen::Matrix3d A;
        Eigen::Vector3d b;
        for (int k = 0; k < 3; ++k) {
            A(0, k) = shape.base[k].value(0.0);
            A(1, k) = shape.base[k].value(1.0);
            A(2, k) = tof * shape.base[k].integral(1.0);
        }
        double e0 = 0.0, e1 = 0.0, ei = 0.0;
        for (std::size_t k = 0; k < shape.extra.size(); ++k) {
            e0 += shape.free_coeffs[k] * shape.extra[k].value(0.0);
            e1 += shape.free_coeffs[k] * shape.extra[k].value(1.0);
            ei += shape.free_coeffs[k] * shape.extra[k].integral(1.0);
        }
        b << v0 - e0, v1 - e1, displacement - tof * ei;
        const Eigen::Vector3d c = solve_axis_system(A, b, name);
        shape.base_coeffs = {c(0), c(1), c(2)};
    };

    solve_linear(leg.shapes[0], leg.start.vr, end.vr, end.r - leg.start.r, "radial");
    solve_linear(leg.shapes[2], leg.start.vz, end.vz, end.z - leg.start.z, "axial");

    // Normal: the swept angle integral of v_theta / r is linear in the
    // normal coefficients because r depends only on the radial shape.
    const auto& rule = node_rule();
    const VelocityShape& radial = leg.shapes[0];
    VelocityShape& normal = leg.shapes[1];
    Eigen::Vector3d angle_row = Eigen::Vector3d::Zero();
    double angle_free = 0.0;
    for (std::size_t n = 0; n < kNodes; ++n) {
        const double s = node_time(rule, n);
        const double r = leg.start.r + radial.displacement(s * tof);
        if (!(r >= kMinLegRadius)) throw ShapingError("shaped radius drops below 0.05 AU");
        const double w = 0.5 * rule.weights[n] * tof / r;
        for (int k = 0; k < 3; ++k) angle_row(k) += w * normal.base[k].value(s);
        for (std::size_t k = 0; k < normal.extra.size(); ++k)
            angle_free += w * normal.free_coeffs[k] * normal.extra[k].value(s);
    }
    Eigen::Matrix3d A;
    Eigen::Vector3d b;
    double e0 = 0.0, e1 = 0.0;
    for (std::size_t k = 0; k < normal.extra.size(); ++k) {
        e0 += normal.free_coeffs[k] * normal.extra[k].value(0.0);
        e1 += normal.free_coeffs[k] * normal.extra[k].value(1.0);
    }
    for (int k = 0; k < 3; ++k) {
        A(0, k) = normal.base[k].value(0.0);
        A(1, k) = normal.base[k].value(1.0);
        A(2, k) = angle_row(k);
    }
    b << leg.start.vtheta - e0, end.vtheta - e1, leg.total_angle - angle_free;
    const Eigen::Vector3d c = solve_axis_system(A, b, "normal");
    normal.base_coeffs = {c(0), c(1), c(2)};
    return leg;
}

CylState evaluate_state(const ShapedLeg& leg, double t) {
    const double slack = 1e-9 * leg.tof;
    if (!(t >= -slack && t <= leg.tof + slack))
        throw DomainError("time " + std::to_string(t) + " s outside the leg");
    t = std::clamp(t, 0.0, leg.tof);

    CylState c;
    c.r = leg.start.r + leg.radial().displacement(t);
    c.z = leg.start.z + leg.axial().displacement(t);
    c.vr = leg.radial().velocity(t);
    c.vtheta = leg.normal().velocity(t);
    c.vz = leg.axial().velocity(t);
    double swept = 0.0;
    if (t > 0.0) {
        swept = integrate_gl(
            [&](double tau) {
                const double r = leg.start.r + leg.radial().displacement(tau);
                return leg.normal().velocity(tau) / r;
            },
            0.0, t, kNodes);
    }
    c.theta = leg.start.theta + swept;
    return c;
}

Vec3 thrust_acceleration(const ShapedLeg& leg, double t) {
    const double slack = 1e-9 * leg.tof;
    if (!(t >= -slack && t <= leg.tof + slack))
        throw DomainError("time " + std::to_string(t) + " s outside the leg");
    t = std::clamp(t, 0.0, leg.tof);

    const double r = leg.start.r + leg.radial().displacement(t);
    const double z = leg.start.z + leg.axial().displacement(t);
    if (!(r >= kMinLegRadius)) throw ShapingError("shaped radius drops below 0.05 AU");

    const double vr = leg.radial().velocity(t);
    const double vt = leg.normal().velocity(t);
    const double rho = std::hypot(r, z);
    const double g = leg.sun_mu / (rho * rho * rho);

    Vec3 f;
    f.x() = leg.radial().acceleration(t) - vt * vt / r + g * r;
    f.y() = leg.normal().acceleration(t) + vr * vt / r;
    f.z() = leg.axial().acceleration(t) + g * z;
    return f;
}

double compute_delta_v(ShapedLeg& leg) {
    const auto& rule = node_rule();
    double sum = 0.0;
    double peak = 0.0;
    for (std::size_t n = 0; n < kNodes; ++n) {
        const double t = node_time(rule, n) * leg.tof;
        const double mag = thrust_acceleration(leg, t).norm();
        sum += rule.weights[n] * mag;
        peak = std::max(peak, mag);
    }
    const double dv = 0.5 * leg.tof * sum;
    if (!std::isfinite(dv)) throw ShapingError("non-finite delta-v");
    leg.delta_v = dv;
    leg.max_thrust_accel = peak;
    return dv;
}

ShapedLeg shape_leg(const HelioState& dep, const HelioState& arr, double tof, int n_rev,
                    std::span<const double> free_coeffs, double sun_mu) {
    ShapedLeg leg = solve_coefficients(dep, arr, tof, n_rev, free_coeffs, sun_mu);
    compute_delta_v(leg);
    return leg;
}

std::vector<ThrustSample> thrust_profile(const ShapedLeg& leg) {
    const auto& rule = node_rule();
    std::vector<ThrustSample> out;
    out.reserve(kNodes);
    for (std::size_t n = 0; n < kNodes; ++n) {
        ThrustSample s;
        s.t = node_time(rule, n) * leg.tof;
        s.state = evaluate_state(leg, s.t);
        s.thrust = thrust_acceleration(leg, s.t);
        out.push_back(s);
    }
    return out;
}

}  // namespace rtba
