#include "rtba/ephemeris.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace rtba {

namespace {

constexpr double kDeg = kPi / 180.0;

struct PlanetRow {
    Planet id;
    char code;
    std::string_view name;
    double a_au;
    double e;
    double i_deg;
    double mean_longitude_deg;
    double long_perihelion_deg;
    double long_node_deg;
    double mu;
    double radius;
};

// Mean elements at J2000 from E. M. Standish, "Keplerian Elements for
// Approximate Positions of the Major Planets" (JPL SSD, Table 1, 1800-2050 AD).
// Earth row is the Earth-Moon barycenter. Gravitational parameters and
// equatorial radii from the IAU/JPL planetary constants.
constexpr std::array<PlanetRow, 8> kTable = {{
    {Planet::Mercury, 'Y', "Mercury", 0.38709927, 0.20563593, 7.00497902, 252.25032350,
     77.45779628, 48.33076593, 2.2031868551e13, 2.4397e6},
    {Planet::Venus, 'V', "Venus", 0.72333566, 0.00677672, 3.39467605, 181.97909950,
     131.60246718, 76.67984255, 3.24858592e14, 6.0518e6},
    {Planet::Earth, 'E', "Earth", 1.00000261, 0.01671123, -0.00001531, 100.46457166,
     102.93768193, 0.0, 3.986004418e14, 6.3781366e6},
    {Planet::Mars, 'M', "Mars", 1.52371034, 0.09339410, 1.84969142, -4.55343205,
     -23.94362959, 49.55953891, 4.282837362e13, 3.3962e6},
    {Planet::Jupiter, 'J', "Jupiter", 5.20288700, 0.04838624, 1.30439695, 34.39644051,
     14.72847983, 100.47390909, 1.26686534e17, 7.1492e7},
    {Planet::Saturn, 'S', "Saturn", 9.53667594, 0.05386179, 2.48599187, 49.95424423,
     92.59887831, 113.66242448, 3.7931187e16, 6.0268e7},
    {Planet::Uranus, 'U', "Uranus", 19.18916464, 0.04725744, 0.77263783, 313.23810451,
     170.95427630, 74.01692503, 5.793939e15, 2.5559e7},
    {Planet::Neptune, 'N', "Neptune", 30.06992276, 0.00859048, 1.77004347, -55.12002969,
     44.96476227, 131.78422574, 6.836529e15, 2.4764e7},
}};

const PlanetRow& row(Planet p) { return kTable[static_cast<std::size_t>(p)]; }

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        auto b = field.find_first_not_of(" \t\r");
        auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("elements file: cannot parse " + what + " value '" + s + "'");
    }
    if (used != s.size()) throw ConfigError("elements file: trailing characters in " + what);
    return v;
}

}  // namespace

char planet_code(Planet p) { return row(p).code; }

std::optional<Planet> planet_from_code(char c) {
    for (const auto& r : kTable)
        if (r.code == c) return r.id;
    return std::nullopt;
}

std::string_view planet_name(Planet p) { return row(p).name; }

std::optional<Planet> planet_from_name(std::string_view name) {
    if (name.size() == 1) return planet_from_code(name[0]);
    for (const auto& r : kTable) {
        if (r.name.size() != name.size()) continue;
        bool same = std::equal(name.begin(), name.end(), r.name.begin(), [](char a, char b) {
            return std::tolower(static_cast<unsigned char>(a)) ==
                   std::tolower(static_cast<unsigned char>(b));
        });
        if (same) return r.id;
    }
    return std::nullopt;
}

double solve_kepler(double mean_anomaly, double e) {
    double M = std::remainder(mean_anomaly, kTwoPi);
    double E = e < 0.8 ? M : (M >= 0.0 ? kPi : -kPi);
    for (int iter = 0; iter < 100; ++iter) {
        double f = E - e * std::sin(E) - M;
        if (std::abs(f) < 1e-12) return E + (mean_anomaly - M);
        E -= f / (1.0 - e * std::cos(E));
    }
    if (std::abs(E - e * std::sin(E) - M) < 1e-12) return E + (mean_anomaly - M);
    throw NumericalError("Kepler solver did not converge (M=" + std::to_string(mean_anomaly) +
                         ", e=" + std::to_string(e) + ")");
}

HelioState state_at(const Body& body, double epoch) {
    if (!(epoch >= 0.0 && epoch <= 200000.0))
        throw DomainError("epoch " + std::to_string(epoch) + " MJD outside [0, 200000]");

    const auto& el = body.elements;
    const double n = std::sqrt(body.sun_mu / (el.a * el.a * el.a));
    const double M = el.M0 + n * (epoch - el.t0_mjd) * kSecondsPerDay;

    double E = 0.0;
    try {
        E = solve_kepler(M, el.e);
    } catch (const NumericalError&) {
        throw NumericalError("Kepler solver did not converge for body " +
                             std::string(planet_name(body.id)) + " at epoch " +
                             std::to_string(epoch) + " MJD");
    }

    const double cosE = std::cos(E);
    const double sinE = std::sin(E);
    const double root = std::sqrt(1.0 - el.e * el.e);
    const double r = el.a * (1.0 - el.e * cosE);

    // Perifocal position and velocity.
    const double xp = el.a * (cosE - el.e);
    const double yp = el.a * root * sinE;
    const double vfac = std::sqrt(body.sun_mu * el.a) / r;
    const double vxp = -vfac * sinE;
    const double vyp = vfac * root * cosE;

    const Eigen::Matrix3d rot = (Eigen::AngleAxisd(el.raan, Vec3::UnitZ()) *
                                 Eigen::AngleAxisd(el.i, Vec3::UnitX()) *
                                 Eigen::AngleAxisd(el.argp, Vec3::UnitZ()))
                                    .toRotationMatrix();

    HelioState s;
    s.position = rot * Vec3(xp, yp, 0.0);
    s.velocity = rot * Vec3(vxp, vyp, 0.0);
    s.epoch = epoch;
    return s;
}

double period(const Body& body) {
    const double a = body.elements.a;
    return kTwoPi * std::sqrt(a * a * a / body.sun_mu);
}

Body builtin_body(Planet p) {
    const auto& r = row(p);
    Body b;
    b.id = p;
    b.mu = r.mu;
    b.radius = r.radius;
    b.sun_mu = kSunMu;
    b.elements.a = r.a_au * kAstronomicalUnit;
    b.elements.e = r.e;
    b.elements.i = r.i_deg * kDeg;
    b.elements.raan = r.long_node_deg * kDeg;
    b.elements.argp = (r.long_perihelion_deg - r.long_node_deg) * kDeg;
    b.elements.M0 = (r.mean_longitude_deg - r.long_perihelion_deg) * kDeg;
    b.elements.t0_mjd = kJ2000Mjd;
    return b;
}

PlanetSystem::PlanetSystem() {
    for (Planet p : kAllPlanets) bodies_.push_back(builtin_body(p));
}

PlanetSystem::PlanetSystem(std::vector<Body> bodies) : bodies_(std::move(bodies)) {
    if (bodies_.empty()) throw ConfigError("planet system has no bodies");
    for (std::size_t i = 0; i < bodies_.size(); ++i) {
        const auto& b = bodies_[i];
        if (!(b.elements.a > 0.0) || !(b.radius > 0.0) || !(b.mu > 0.0) || !(b.sun_mu >= 0.0))
            throw ConfigError("body " + std::string(planet_name(b.id)) +
                              ": a, radius and mu must be positive");
        if (!(b.elements.e >= 0.0 && b.elements.e < 1.0))
            throw ConfigError("body " + std::string(planet_name(b.id)) +
                              ": eccentricity must lie in [0, 1)");
        for (std::size_t j = 0; j < i; ++j)
            if (bodies_[j].id == b.id)
                throw ConfigError("body " + std::string(planet_name(b.id)) + " listed twice");
    }
}

PlanetSystem PlanetSystem::from_csv(const std::string& path, double sun_mu) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open elements file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_csv_text(buf.str(), sun_mu);
}

PlanetSystem PlanetSystem::from_csv_text(std::string_view text, double sun_mu) {
    static const std::vector<std::string> kHeader = {"body",     "a_m",    "e",
                                                     "i_rad",    "raan_rad", "argp_rad",
                                                     "M0_rad",   "t0_mjd", "mu",
                                                     "radius_m"};
    std::istringstream in{std::string(text)};
    std::string line;
    bool have_header = false;
    std::vector<Body> bodies;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split_csv_line(line);
        if (!have_header) {
            if (fields != kHeader)
                throw ConfigError("elements file: unexpected header on line " +
                                  std::to_string(line_no));
            have_header = true;
            continue;
        }
        if (fields.size() != kHeader.size())
            throw ConfigError("elements file: line " + std::to_string(line_no) + " has " +
                              std::to_string(fields.size()) + " fields, expected 10");
        auto id = planet_from_name(fields[0]);
        if (!id) throw ConfigError("elements file: unknown body '" + fields[0] + "'");
        Body b;
        b.id = *id;
        b.elements.a = parse_double(fields[1], "a_m");
        b.elements.e = parse_double(fields[2], "e");
        b.elements.i = parse_double(fields[3], "i_rad");
        b.elements.raan = parse_double(fields[4], "raan_rad");
        b.elements.argp = parse_double(fields[5], "argp_rad");
        b.elements.M0 = parse_double(fields[6], "M0_rad");
        b.elements.t0_mjd = parse_double(fields[7], "t0_mjd");
        b.mu = parse_double(fields[8], "mu");
        b.radius = parse_double(fields[9], "radius_m");
        b.sun_mu = sun_mu;
        bodies.push_back(b);
    }
    if (!have_header) throw ConfigError("elements file is empty");
    return PlanetSystem(std::move(bodies));
}

const Body& PlanetSystem::body(Planet p) const {
    for (const auto& b : bodies_)
        if (b.id == p) return b;
    throw ConfigError("body " + std::string(planet_name(p)) + " is not part of the planet system");
}

bool PlanetSystem::contains(Planet p) const {
    return std::any_of(bodies_.begin(), bodies_.end(), [p](const Body& b) { return b.id == p; });
}

std::string PlanetSystem::to_csv() const {
    std::ostringstream out;
    out << "body,a_m,e,i_rad,raan_rad,argp_rad,M0_rad,t0_mjd,mu,radius_m\n";
    out << std::setprecision(17);
    for (const auto& b : bodies_) {
        const auto& el = b.elements;
        out << planet_name(b.id) << ',' << el.a << ',' << el.e << ',' << el.i << ',' << el.raan
            << ',' << el.argp << ',' << el.M0 << ',' << el.t0_mjd << ',' << b.mu << ','
            << b.radius << '\n';
    }
    return out.str();
}

}  // namespace rtba
