#pragma once

#include "rtba/search.hpp"

#include <cmath>
#include <random>

namespace rtba::testing {

inline double rel_err(double a, double b, double floor = 1.0) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline Body circular_body(Planet id, double a_au, double phase, double mu, double radius,
                          double sun_mu, double inclination = 0.0) {
    Body b;
    b.id = id;
    b.mu = mu;
    b.radius = radius;
    b.sun_mu = sun_mu;
    b.elements.a = a_au * kAstronomicalUnit;
    b.elements.i = inclination;
    b.elements.M0 = phase;
    b.elements.t0_mjd = 61400.0;
    return b;
}

// Three coplanar bodies around a light star. The transfer time cap makes the
// direct hop expensive while a massive body halfway out offers a cheap relay.
inline PlanetSystem toy_system() {
    const double smu = kSunMu / 100.0;
    return PlanetSystem({circular_body(Planet::Earth, 1.0, 0.0, 1e12, 3e6, smu),
                         circular_body(Planet::Mars, 2.2, 0.3, 1e17, 7e7, smu),
                         circular_body(Planet::Jupiter, 3.5, 0.6, 1e12, 3e6, smu)});
}

inline RtbaConfig toy_config(std::uint64_t seed = 1, int workers = 1) {
    RtbaConfig c;
    c.max_gas = 1;
    c.q = 1.0;
    c.p = 4;
    c.cpu_count = 16;
    c.max_recursions = 1;
    c.workers = workers;
    c.seed = seed;
    c.sga.seed = seed;
    c.sga.population_size = 40;
    c.sga.generations = 60;
    c.window_start = 61400.0;
    c.window_end = 61640.0;
    c.ltto.tof_max_days = 400.0;
    return c;
}

struct RandomLeg {
    HelioState dep;
    HelioState arr;
    double tof = 0.0;
    int n_rev = 0;
    std::vector<double> free;
};

// Planet-to-planet leg with random epoch, time of flight, revolutions and
// small free coefficients.
inline RandomLeg random_leg(std::mt19937_64& rng, const PlanetSystem& sys = PlanetSystem()) {
    std::uniform_real_distribution<double> epoch(58000.0, 64000.0);
    std::uniform_real_distribution<double> tof_days(200.0, 1500.0);
    std::uniform_int_distribution<int> planet(1, 3);
    std::uniform_int_distribution<int> revs(0, 2);
    std::uniform_int_distribution<int> count(0, 2);
    std::uniform_real_distribution<double> coeff(-300.0, 300.0);
    RandomLeg leg;
    const Planet a = kAllPlanets[static_cast<std::size_t>(planet(rng))];
    const Planet b = kAllPlanets[static_cast<std::size_t>(planet(rng))];
    const double t0 = epoch(rng);
    leg.tof = days_to_seconds(tof_days(rng));
    leg.n_rev = revs(rng);
    leg.dep = state_at(sys.body(a), t0);
    leg.arr = state_at(sys.body(b), t0 + leg.tof / kSecondsPerDay);
    const int n = 3 * free_coeffs_per_axis(count(rng));
    for (int i = 0; i < n; ++i) leg.free.push_back(coeff(rng));
    return leg;
}

}  // namespace rtba::testing
