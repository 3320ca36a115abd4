#pragma once

#include "rtba/ephemeris.hpp"
#include "rtba/flyby.hpp"
#include "rtba/shaping.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rtba {

/// An ordered flyby sequence: departure, gravity-assist bodies, arrival.
struct Sequence {
    std::vector<Planet> bodies;

    std::size_t legs() const { return bodies.size() - 1; }
    std::size_t gas() const { return bodies.size() - 2; }
    /// Sequence string such as "EMJ" (Mercury is 'Y').
    std::string str() const;

    /// Throws ConfigError on unknown letters or fewer than two bodies.
    static Sequence parse(std::string_view text);

    friend bool operator==(const Sequence&, const Sequence&) = default;
};

/// Bounds of the leg- and flyby-specific variables.
struct LttoSettings {
    double window_days = 60.0;
    double tof_min_days = 100.0;
    double tof_max_days = 4500.0;
    int max_revolutions = 2;
    double coeff_bound = 3e4;
    double v_inf_max = 5000.0;
    double hp_min = 2e5;
    double hp_max = 5e10;
    int free_parameter_count = 1;
    /// Marks solutions infeasible when the peak thrust acceleration exceeds
    /// this value (m/s^2). Zero disables the cap.
    double thrust_accel_cap = 0.0;
};

struct Bounds {
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t size() const { return lower.size(); }
};

/// Decoded decision vector. The flat gene layout is
/// [departure_date, tof_1..tof_L, rev_1..rev_L, coeffs_1..coeffs_L,
///  (v_inf, h_p, beta, theta, phi)_1..(...)_G]
/// with coeffs_i ordered radial, normal, axial.
struct DecisionVector {
    double departure_date = 0.0;  // MJD
    std::vector<double> tofs;     // days
    std::vector<int> n_revs;
    std::vector<std::vector<double>> free_coeffs;
    std::vector<FlybyParams> flybys;

    static DecisionVector decode(const Sequence& seq, std::span<const double> genes,
                                 const LttoSettings& settings);
    std::vector<double> encode() const;
};

std::size_t gene_count(const Sequence& seq, const LttoSettings& settings);

Bounds vector_bounds(const Sequence& seq, double window_start, const LttoSettings& settings);

/// true for genes that are floored at decode (revolution counts).
std::vector<bool> integer_genes(const Sequence& seq, const LttoSettings& settings);

struct TrajectorySolution {
    std::vector<ShapedLeg> legs;
    std::vector<double> leg_delta_v;
    double total_delta_v = kInfeasibleDeltaV;
    DecisionVector decision;
    bool feasible = false;
    std::string failure;
};

TrajectorySolution evaluate(const PlanetSystem& system, const Sequence& seq,
                            const DecisionVector& x, const LttoSettings& settings);

/// A fixed sequence bound to its planet system, usable as an objective.
class LttoProblem {
public:
    LttoProblem(const PlanetSystem& system, Sequence seq, LttoSettings settings);

    std::size_t dimension() const { return dimension_; }
    const Sequence& sequence() const { return seq_; }
    const LttoSettings& settings() const { return settings_; }

    Bounds bounds(double window_start) const;
    TrajectorySolution solve(std::span<const double> genes) const;
    /// Total delta-v, or the infeasibility sentinel.
    double fitness(std::span<const double> genes) const;

private:
    const PlanetSystem* system_;
    Sequence seq_;
    LttoSettings settings_;
    std::size_t dimension_;
};

}  // namespace rtba
