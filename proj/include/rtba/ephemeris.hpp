#pragma once

#include "rtba/core.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rtba {

enum class Planet { Mercury, Venus, Earth, Mars, Jupiter, Saturn, Uranus, Neptune };

inline constexpr std::array<Planet, 8> kAllPlanets = {
    Planet::Mercury, Planet::Venus,  Planet::Earth,  Planet::Mars,
    Planet::Jupiter, Planet::Saturn, Planet::Uranus, Planet::Neptune};

/// Single-letter code used in sequence strings. Mercury is 'Y'.
char planet_code(Planet p);
std::optional<Planet> planet_from_code(char c);
std::string_view planet_name(Planet p);
/// Accepts full names (case-insensitive) or the single-letter code.
std::optional<Planet> planet_from_name(std::string_view name);

struct KeplerElements {
    double a = 0.0;         // m
    double e = 0.0;
    double i = 0.0;         // rad
    double raan = 0.0;      // rad
    double argp = 0.0;      // rad
    double M0 = 0.0;        // rad, mean anomaly at t0
    double t0_mjd = kJ2000Mjd;
};

struct Body {
    Planet id = Planet::Earth;
    double mu = 0.0;      // m^3/s^2
    double radius = 0.0;  // m
    KeplerElements elements;
    double sun_mu = kSunMu;

    char code() const { return planet_code(id); }
};

struct HelioState {
    Vec3 position = Vec3::Zero();  // m
    Vec3 velocity = Vec3::Zero();  // m/s
    double epoch = 0.0;            // MJD
};

/// Solves E - e sin E = M for elliptic orbits. Throws NumericalError after
/// 100 iterations without reaching |residual| < 1e-12.
double solve_kepler(double mean_anomaly, double e);

/// Two-body state of `body` at `epoch` (MJD), valid for epochs in [0, 200000].
HelioState state_at(const Body& body, double epoch);

/// Orbital period in seconds.
double period(const Body& body);

/// Built-in table of J2000 mean elements (see README for the source).
Body builtin_body(Planet p);

/// The set of bodies available to a run. Defaults to the eight planets.
class PlanetSystem {
public:
    PlanetSystem();
    explicit PlanetSystem(std::vector<Body> bodies);

    /// Loads a CSV with header
    /// `body,a_m,e,i_rad,raan_rad,argp_rad,M0_rad,t0_mjd,mu,radius_m`.
    /// The file replaces the built-in table entirely; sun_mu is kept at the
    /// default unless `sun_mu` is passed.
    static PlanetSystem from_csv(const std::string& path, double sun_mu = kSunMu);
    static PlanetSystem from_csv_text(std::string_view text, double sun_mu = kSunMu);

    const Body& body(Planet p) const;
    bool contains(Planet p) const;
    const std::vector<Body>& bodies() const { return bodies_; }

    std::string to_csv() const;

private:
    std::vector<Body> bodies_;
};

}  // namespace rtba
