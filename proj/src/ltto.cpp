#include "rtba/ltto.hpp"

#include <algorithm>
#include <cmath>

namespace rtba {

namespace {

constexpr std::size_t kFlybyGenes = 5;

// Revolution genes are continuous in [0, max + 1) and floored on decode.
double revolution_upper(const LttoSettings& s) {
    return std::nextafter(static_cast<double>(s.max_revolutions + 1), 0.0);
}

std::size_t coeffs_per_leg(const LttoSettings& s) {
    return 3 * static_cast<std::size_t>(free_coeffs_per_axis(s.free_parameter_count));
}

}  // namespace

std::string Sequence::str() const {
    std::string s;
    for (Planet p : bodies) s.push_back(planet_code(p));
    return s;
}

Sequence Sequence::parse(std::string_view text) {
    Sequence seq;
    for (char c : text) {
        auto p = planet_from_code(c);
        if (!p) throw ConfigError(std::string("unknown body letter '") + c + "' in sequence '" +
                                  std::string(text) + "'");
        seq.bodies.push_back(*p);
    }
    if (seq.bodies.size() < 2)
        throw ConfigError("sequence '" + std::string(text) + "' needs at least two bodies");
    return seq;
}

std::size_t gene_count(const Sequence& seq, const LttoSettings& settings) {
    const std::size_t L = seq.legs();
    return 1 + 2 * L + L * coeffs_per_leg(settings) + seq.gas() * kFlybyGenes;
}

Bounds vector_bounds(const Sequence& seq, double window_start, const LttoSettings& s) {
    const std::size_t L = seq.legs();
    const std::size_t C = coeffs_per_leg(s);
    Bounds b;
    auto push = [&](double lo, double hi) {
        b.lower.push_back(lo);
        b.upper.push_back(hi);
    };
    push(window_start, window_start + s.window_days);
    for (std::size_t i = 0; i < L; ++i) push(s.tof_min_days, s.tof_max_days);
    for (std::size_t i = 0; i < L; ++i) push(0.0, revolution_upper(s));
    for (std::size_t i = 0; i < L * C; ++i) push(-s.coeff_bound, s.coeff_bound);
    for (std::size_t g = 0; g < seq.gas(); ++g) {
        push(0.0, s.v_inf_max);
        push(s.hp_min, s.hp_max);
        push(0.0, kTwoPi);
        push(0.0, kTwoPi);
        push(-0.5 * kPi, 0.5 * kPi);
    }
    return b;
}

std::vector<bool> integer_genes(const Sequence& seq, const LttoSettings& settings) {
    std::vector<bool> mask(gene_count(seq, settings), false);
    for (std::size_t i = 0; i < seq.legs(); ++i) mask[1 + seq.legs() + i] = true;
    return mask;
}

DecisionVector DecisionVector::decode(const Sequence& seq, std::span<const double> genes,
                                      const LttoSettings& s) {
    if (genes.size() != gene_count(seq, s))
        throw DomainError("decision vector has " + std::to_string(genes.size()) +
                          " genes, expected " + std::to_string(gene_count(seq, s)));
    const std::size_t L = seq.legs();
    const std::size_t C = coeffs_per_leg(s);
    DecisionVector x;
    std::size_t k = 0;
    x.departure_date = genes[k++];
    for (std::size_t i = 0; i < L; ++i) x.tofs.push_back(genes[k++]);
    for (std::size_t i = 0; i < L; ++i) {
        const int rev = static_cast<int>(std::floor(genes[k++]));
        x.n_revs.push_back(std::clamp(rev, 0, s.max_revolutions));
    }
    for (std::size_t i = 0; i < L; ++i) {
        x.free_coeffs.emplace_back(genes.begin() + static_cast<std::ptrdiff_t>(k),
                                   genes.begin() + static_cast<std::ptrdiff_t>(k + C));
        k += C;
    }
    for (std::size_t g = 0; g < seq.gas(); ++g) {
        FlybyParams f;
        f.v_inf = genes[k++];
        f.h_p = genes[k++];
        f.beta = genes[k++];
        f.theta_g = genes[k++];
        f.phi_g = genes[k++];
        x.flybys.push_back(f);
    }
    return x;
}

std::vector<double> DecisionVector::encode() const {
    std::vector<double> g;
    g.push_back(departure_date);
    g.insert(g.end(), tofs.begin(), tofs.end());
    for (int r : n_revs) g.push_back(static_cast<double>(r));
    for (const auto& c : free_coeffs) g.insert(g.end(), c.begin(), c.end());
    for (const auto& f : flybys) {
        g.push_back(f.v_inf);
        g.push_back(f.h_p);
        g.push_back(f.beta);
        g.push_back(f.theta_g);
        g.push_back(f.phi_g);
    }
    return g;
}

TrajectorySolution evaluate(const PlanetSystem& system, const Sequence& seq,
                            const DecisionVector& x, const LttoSettings& settings) {
    TrajectorySolution sol;
    sol.decision = x;
    const std::size_t L = seq.legs();
    if (x.tofs.size() != L || x.n_revs.size() != L || x.free_coeffs.size() != L ||
        x.flybys.size() != seq.gas())
        throw DomainError("decision vector does not match sequence " + seq.str());

    try {
        double epoch = x.departure_date;
        HelioState dep = state_at(system.body(seq.bodies[0]), epoch);
        double total = 0.0;
        for (std::size_t k = 0; k < L; ++k) {
            const Body& target = system.body(seq.bodies[k + 1]);
            const double arrival_epoch = epoch + x.tofs[k];
            const HelioState planet = state_at(target, arrival_epoch);
            HelioState arr = planet;

            Vec3 v_in = Vec3::Zero();
            const bool flyby = k + 1 < L;
            if (flyby) {
                v_in = v_inf_in(x.flybys[k], planet);
                arr.velocity = planet.velocity + v_in;
            }

            ShapedLeg leg = shape_leg(dep, arr, days_to_seconds(x.tofs[k]), x.n_revs[k],
                                      x.free_coeffs[k], target.sun_mu);
            if (settings.thrust_accel_cap > 0.0 && leg.max_thrust_accel > settings.thrust_accel_cap)
                throw ShapingError("thrust acceleration cap exceeded on leg " + std::to_string(k + 1));
            total += leg.delta_v;
            sol.leg_delta_v.push_back(leg.delta_v);
            sol.legs.push_back(std::move(leg));

            if (flyby) {
                // Unpowered flyby: the next leg leaves with the rotated excess velocity.
                HelioState next = planet;
                if (x.flybys[k].v_inf > 0.0) {
                    const double delta = deflection_angle(x.flybys[k].v_inf, x.flybys[k].h_p, target);
                    next.velocity = v_out_heliocentric(v_in, planet, delta, x.flybys[k].beta);
                }
                dep = next;
            }
            epoch = arrival_epoch;
        }
        sol.total_delta_v = total;
        sol.feasible = std::isfinite(total);
        if (!sol.feasible) sol.total_delta_v = kInfeasibleDeltaV;
    } catch (const Error& e) {
        sol.feasible = false;
        sol.failure = e.what();
        sol.total_delta_v = kInfeasibleDeltaV;
        sol.leg_delta_v.resize(L, kInfeasibleDeltaV);
    }
    return sol;
}

LttoProblem::LttoProblem(const PlanetSystem& system, Sequence seq, LttoSettings settings)
    : system_(&system), seq_(std::move(seq)), settings_(settings),
      dimension_(gene_count(seq_, settings_)) {
    for (Planet p : seq_.bodies) (void)system_->body(p);
}

Bounds LttoProblem::bounds(double window_start) const {
    return vector_bounds(seq_, window_start, settings_);
}

TrajectorySolution LttoProblem::solve(std::span<const double> genes) const {
    return evaluate(*system_, seq_, DecisionVector::decode(seq_, genes, settings_), settings_);
}

double LttoProblem::fitness(std::span<const double> genes) const {
    return solve(genes).total_delta_v;
}

}  // namespace rtba
