#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

#include <random>

using namespace rtba;
using rtba::testing::rel_err;

namespace {

double stumpff_c(double z) {
    if (z > 1e-8) return (1.0 - std::cos(std::sqrt(z))) / z;
    if (z < -1e-8) return (std::cosh(std::sqrt(-z)) - 1.0) / (-z);
    return 0.5 - z / 24.0;
}

double stumpff_s(double z) {
    if (z > 1e-8) {
        const double s = std::sqrt(z);
        return (s - std::sin(s)) / (s * s * s);
    }
    if (z < -1e-8) {
        const double s = std::sqrt(-z);
        return (std::sinh(s) - s) / (s * s * s);
    }
    return 1.0 / 6.0 - z / 120.0;
}

// Universal-variable propagation of a two-body state over dt seconds.
std::pair<Vec3, Vec3> propagate(const Vec3& r0, const Vec3& v0, double dt, double mu) {
    const double r0n = r0.norm();
    const double vr0 = r0.dot(v0) / r0n;
    const double alpha = 2.0 / r0n - v0.squaredNorm() / mu;
    const double sq = std::sqrt(mu);
    double chi = sq * std::abs(alpha) * dt;
    for (int it = 0; it < 200; ++it) {
        const double z = alpha * chi * chi;
        const double C = stumpff_c(z), S = stumpff_s(z);
        const double F = r0n * vr0 / sq * chi * chi * C + (1.0 - alpha * r0n) * chi * chi * chi * S +
                         r0n * chi - sq * dt;
        const double dF = r0n * vr0 / sq * chi * (1.0 - z * S) + (1.0 - alpha * r0n) * chi * chi * C + r0n;
        const double step = F / dF;
        chi -= step;
        if (std::abs(step) < 1e-12 * std::max(1.0, std::abs(chi))) break;
    }
    const double z = alpha * chi * chi;
    const double C = stumpff_c(z), S = stumpff_s(z);
    const double f = 1.0 - chi * chi / r0n * C;
    const double g = dt - chi * chi * chi / sq * S;
    const Vec3 r = f * r0 + g * v0;
    const double rn = r.norm();
    const double fdot = sq / (rn * r0n) * (alpha * chi * chi * chi * S - chi);
    const double gdot = 1.0 - chi * chi / rn * C;
    return {r, fdot * r0 + gdot * v0};
}

}  // namespace

TEST_CASE("circular body stays at its radius") {
    const Body b = rtba::testing::circular_body(Planet::Earth, 1.0, 0.4, 1e12, 1e6, kSunMu);
    for (double t : {0.0, 1234.5, 61400.0, 199999.0})
        CHECK(rel_err(state_at(b, t).position.norm(), kAstronomicalUnit) < 1e-9);
}

TEST_CASE("state repeats after one period") {
    for (Planet p : kAllPlanets) {
        const Body b = builtin_body(p);
        const double T = period(b) / kSecondsPerDay;
        const auto s0 = state_at(b, 60000.0);
        const auto s1 = state_at(b, 60000.0 + T);
        CHECK((s0.position - s1.position).norm() / s0.position.norm() < 1e-9);
        CHECK((s0.velocity - s1.velocity).norm() / s0.velocity.norm() < 1e-9);
    }
}

TEST_CASE("Earth matches a universal-variable propagator") {
    const Body earth = builtin_body(Planet::Earth);
    const double t0 = 61000.0;
    const auto s0 = state_at(earth, t0);
    const auto s1 = state_at(earth, t0 + 100.0);
    const auto [r, v] = propagate(s0.position, s0.velocity, 100.0 * kSecondsPerDay, earth.sun_mu);
    CHECK((r - s1.position).norm() / r.norm() < 1e-8);
    CHECK((v - s1.velocity).norm() / v.norm() < 1e-8);

    const Body mercury = builtin_body(Planet::Mercury);
    const auto m0 = state_at(mercury, t0);
    const auto m1 = state_at(mercury, t0 + 37.0);
    const auto [rm, vm] = propagate(m0.position, m0.velocity, 37.0 * kSecondsPerDay, mercury.sun_mu);
    CHECK((rm - m1.position).norm() / rm.norm() < 1e-8);
    CHECK((vm - m1.velocity).norm() / vm.norm() < 1e-8);
}

TEST_CASE("energy and angular momentum are conserved") {
    for (Planet p : kAllPlanets) {
        const Body b = builtin_body(p);
        auto energy = [&](const HelioState& s) {
            return 0.5 * s.velocity.squaredNorm() - b.sun_mu / s.position.norm();
        };
        const auto s0 = state_at(b, 51544.5);
        const Vec3 h0 = s0.position.cross(s0.velocity);
        for (double dt : {17.0, 500.0, 9000.0}) {
            const auto s = state_at(b, 51544.5 + dt);
            CHECK(rel_err(energy(s), energy(s0), 0.0) < 1e-10);
            CHECK((s.position.cross(s.velocity) - h0).norm() / h0.norm() < 1e-10);
        }
    }
}

TEST_CASE("period follows Kepler's third law") {
    Body b = rtba::testing::circular_body(Planet::Earth, 1.0, 0.0, 0.0, 1.0, 1.32712440018e20);
    const double T1 = period(b);
    CHECK(T1 == doctest::Approx(3.1558e7).epsilon(1e-4));
    CHECK(T1 == doctest::Approx(2.0 * kPi * std::sqrt(std::pow(kAstronomicalUnit, 3) / kSunMu)).epsilon(1e-14));
    b.elements.a *= 2.0;
    CHECK(period(b) == doctest::Approx(T1 * std::pow(2.0, 1.5)).epsilon(1e-14));
    b.elements.a *= 2.0;
    CHECK(period(b) == doctest::Approx(T1 * 8.0).epsilon(1e-14));
}

TEST_CASE("Kepler solver") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> M(-10.0, 10.0), E(0.0, 0.95);
    for (int i = 0; i < 2000; ++i) {
        const double m = M(rng), e = E(rng);
        const double ea = solve_kepler(m, e);
        CHECK(std::abs(ea - e * std::sin(ea) - m) < 1e-12);
    }
}

TEST_CASE("epoch outside the supported range is rejected") {
    CHECK_THROWS_AS(state_at(builtin_body(Planet::Earth), -1.0), DomainError);
    CHECK_THROWS_AS(state_at(builtin_body(Planet::Earth), 200001.0), DomainError);
}

TEST_CASE("planet codes") {
    CHECK(planet_code(Planet::Mercury) == 'Y');
    CHECK(planet_from_code('Y') == Planet::Mercury);
    CHECK(planet_from_code('J') == Planet::Jupiter);
    CHECK_FALSE(planet_from_code('Q').has_value());
    CHECK(planet_from_name("jupiter") == Planet::Jupiter);
    CHECK(planet_from_name("E") == Planet::Earth);
}

TEST_CASE("elements CSV round trip") {
    const PlanetSystem sys = rtba::testing::toy_system();
    const auto back = PlanetSystem::from_csv_text(sys.to_csv(), kSunMu / 100.0);
    REQUIRE(back.bodies().size() == 3);
    CHECK_FALSE(back.contains(Planet::Venus));
    const auto a = state_at(sys.body(Planet::Mars), 61500.0);
    const auto b = state_at(back.body(Planet::Mars), 61500.0);
    CHECK((a.position - b.position).norm() / a.position.norm() < 1e-14);
    CHECK_THROWS_AS(PlanetSystem::from_csv_text("body,a_m\nE,1\n"), ConfigError);
}

TEST_CASE("built-in semi-major axes are ordered") {
    double prev = 0.0;
    for (Planet p : kAllPlanets) {
        CHECK(builtin_body(p).elements.a > prev);
        prev = builtin_body(p).elements.a;
    }
    CHECK(builtin_body(Planet::Earth).elements.a == doctest::Approx(kAstronomicalUnit).epsilon(1e-4));
}
