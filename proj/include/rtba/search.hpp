#pragma once

#include "rtba/evolve.hpp"
#include "rtba/ltto.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace rtba {

struct RtbaConfig {
    Planet departure_body = Planet::Earth;
    Planet arrival_body = Planet::Jupiter;
    int max_gas = 3;
    double q = 0.5;
    int p = 14;             // islands per sequence
    int cpu_count = 42;     // sets the number of concurrently evaluated sequences
    int max_recursions = 2;
    double xi = 0.7;        // min/mean blend at target-body level
    double chi = 0.7;       // min/mean blend at sequence level
    double window_start = 61400.0;
    double window_end = 63400.0;
    double topology_probability = 0.01;
    std::uint64_t seed = 0;
    int workers = 1;        // threads
    SgaConfig sga;
    LttoSettings ltto;

    void validate() const;
    /// floor(cpu_count / p), at least 1.
    int concurrent_sequences() const;
};

/// weight * min + (1 - weight) * mean.
double blend_min_mean(std::span<const double> values, double weight);

struct SequenceRecord {
    Sequence sequence;
    std::vector<double> island_dvs;  // m/s
    double f_s = kInfeasibleDeltaV;
    int recursion_found = 0;         // 1-based
    bool feasible = false;
    std::vector<double> best_genes;  // best individual over all islands

    double min_dv() const;
    double mean_dv() const;
};

/// Fills f_s (chi-blend of island_dvs) and feasibility.
void score_record(SequenceRecord& record, double chi);

struct TbCandidate {
    Planet body = Planet::Earth;
    std::vector<SequenceRecord> member_records;
    double f_tb = kInfeasibleDeltaV;
};

/// f_tb = xi * min(member f_s) + (1 - xi) * mean(member f_s). Candidates
/// without members are dropped.
std::vector<TbCandidate> tb_fitness(std::vector<TbCandidate> candidates, double xi);

/// Number of sequences with up to n flybys over m candidates: sum m^i.
/// Throws DomainError on overflow of 64-bit arithmetic.
std::uint64_t complexity(std::uint64_t m, std::uint64_t n);

/// Flyby candidates: bodies whose semi-major axis does not exceed the
/// arrival body's (arrival included), in ascending semi-major-axis order.
std::vector<Planet> candidate_bodies(const PlanetSystem& system, const RtbaConfig& cfg);

/// Round-robin split of `count` samples over `buckets` groups; the
/// remainder goes to the first groups.
std::vector<std::size_t> round_robin_allocation(std::size_t buckets, std::size_t count);

struct SearchState {
    std::vector<Planet> pseudo_sequence;  // fixed flybys after the departure body
    std::set<std::string> evaluated_set;
    int recursion_index = 0;              // completed recursions
    bool exhausted = false;
    std::vector<SequenceRecord> records;  // evaluation order
};

/// All sequences of the sub-tree below the pseudo-sequence.
std::vector<Sequence> subtree(const SearchState& state, const RtbaConfig& cfg,
                              std::span<const Planet> candidates);

struct SampleResult {
    std::vector<Sequence> sequences;
    bool exhausted = false;  // fewer than `count` unevaluated sequences remained
};

/// Draws up to `count` unevaluated sequences of the sub-tree. The bare
/// pseudo-sequence leaf is taken first when unevaluated; the rest is spread
/// round-robin over the target bodies and drawn uniformly within each.
SampleResult sample_sequences(const SearchState& state, const RtbaConfig& cfg,
                              std::span<const Planet> candidates, std::size_t count, Rng& rng);

/// Island best delta-v values for each sequence of a batch.
using BatchEvaluator =
    std::function<std::vector<SequenceRecord>(std::span<const Sequence>)>;

/// p islands per sequence with same-target-body migration, evaluated with
/// the hodographic-shaping objective.
BatchEvaluator ltto_evaluator(const PlanetSystem& system, const RtbaConfig& cfg);

/// Evaluates a single sequence with the LTTO archipelago.
SequenceRecord evaluate_sequence(const PlanetSystem& system, const Sequence& seq,
                                 const RtbaConfig& cfg);

/// Departure-window start of island `i` out of `p`.
double island_window_start(const RtbaConfig& cfg, int i);

/// Target-body key used by the migration topology.
std::string target_body_key(const Sequence& seq, std::size_t fixed_flybys);

/// Argmin f_tb with ties broken by semi-major axis.
std::optional<Planet> select_target_body(const std::vector<TbCandidate>& scored,
                                         const PlanetSystem& system);

/// Candidate records for each possible next target body.
std::vector<TbCandidate> gather_candidates(const SearchState& state,
                                           std::span<const Planet> candidates);

SearchState run_recursion(SearchState state, const RtbaConfig& cfg, const PlanetSystem& system,
                          const BatchEvaluator& evaluator);

struct RtbaResult {
    SearchState state;
    std::vector<SequenceRecord> ranking;
    std::vector<SequenceRecord> optimal_group;
    double evaluated_fraction = 0.0;
};

RtbaResult run_rtba(const RtbaConfig& cfg, const PlanetSystem& system,
                    const BatchEvaluator& evaluator);
RtbaResult run_rtba(const RtbaConfig& cfg, const PlanetSystem& system);

/// Records sorted by f_s; ties by semi-major axes of the bodies, then by string.
std::vector<SequenceRecord> rank_records(std::vector<SequenceRecord> records,
                                         const PlanetSystem& system);

/// Records with f_s <= 1.3 min or f_s <= min + 5 km/s.
std::vector<SequenceRecord> extract_optimal_group(std::span<const SequenceRecord> ranking);
bool in_optimal_group(const SequenceRecord& record, double min_f_s);

/// |evaluated| / complexity of the full initial tree.
double evaluated_fraction(const SearchState& state, const RtbaConfig& cfg,
                          const PlanetSystem& system);

}  // namespace rtba
