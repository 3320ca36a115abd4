#include "rtba/search.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <memory>
#include <numeric>

namespace rtba {

namespace {

constexpr std::uint64_t kMaxSubtree = 5'000'000;

double semi_major_axis(const PlanetSystem& system, Planet p) { return system.body(p).elements.a; }

}  // namespace

void RtbaConfig::validate() const {
    if (max_gas < 0) throw ConfigError("max_gas must be non-negative");
    if (!(q > 0.0 && q <= 1.0)) throw ConfigError("q must lie in (0, 1]");
    if (p < 1) throw ConfigError("p must be at least 1");
    if (cpu_count < 1) throw ConfigError("cpu_count must be at least 1");
    if (max_recursions < 1) throw ConfigError("max_recursions must be at least 1");
    if (!(xi >= 0.0 && xi <= 1.0)) throw ConfigError("xi must lie in [0, 1]");
    if (!(chi >= 0.0 && chi <= 1.0)) throw ConfigError("chi must lie in [0, 1]");
    if (!(window_end > window_start)) throw ConfigError("departure window is empty");
    if (!(window_start >= 0.0 && window_end <= 200000.0))
        throw ConfigError("departure window must lie within [0, 200000] MJD");
    if (!(topology_probability >= 0.0 && topology_probability <= 1.0))
        throw ConfigError("topology_probability must lie in [0, 1]");
    if (workers < 1) throw ConfigError("workers must be at least 1");
    sga.validate();
}

int RtbaConfig::concurrent_sequences() const { return std::max(1, cpu_count / p); }

double blend_min_mean(std::span<const double> values, double weight) {
    if (values.empty()) throw DomainError("cannot blend an empty set");
    const double mn = *std::min_element(values.begin(), values.end());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                        static_cast<double>(values.size());
    // Clamp against rounding so that min <= result <= mean always holds.
    return std::clamp(weight * mn + (1.0 - weight) * mean, mn, std::max(mn, mean));
}

double SequenceRecord::min_dv() const {
    return island_dvs.empty() ? kInfeasibleDeltaV
                              : *std::min_element(island_dvs.begin(), island_dvs.end());
}

double SequenceRecord::mean_dv() const {
    return island_dvs.empty() ? kInfeasibleDeltaV
                              : std::accumulate(island_dvs.begin(), island_dvs.end(), 0.0) /
                                    static_cast<double>(island_dvs.size());
}

void score_record(SequenceRecord& record, double chi) {
    record.feasible = std::any_of(record.island_dvs.begin(), record.island_dvs.end(),
                                  [](double v) { return v < kInfeasibleDeltaV; });
    record.f_s = record.feasible ? blend_min_mean(record.island_dvs, chi) : kInfeasibleDeltaV;
}

std::vector<TbCandidate> tb_fitness(std::vector<TbCandidate> candidates, double xi) {
    std::vector<TbCandidate> out;
    for (auto& c : candidates) {
        if (c.member_records.empty()) {
            std::cerr << "warning: target body " << planet_code(c.body)
                      << " has no evaluated sequences and is skipped\n";
            continue;
        }
        std::vector<double> fs;
        for (const auto& r : c.member_records) fs.push_back(r.f_s);
        c.f_tb = blend_min_mean(fs, xi);
        out.push_back(std::move(c));
    }
    return out;
}

std::uint64_t complexity(std::uint64_t m, std::uint64_t n) {
    if (m < 1) throw DomainError("complexity needs at least one candidate");
    std::uint64_t sum = 0;
    std::uint64_t term = 1;
    for (std::uint64_t i = 0; i <= n; ++i) {
        if (sum > std::numeric_limits<std::uint64_t>::max() - term)
            throw DomainError("sequence-tree complexity overflows 64 bits");
        sum += term;
        if (i < n) {
            if (term > std::numeric_limits<std::uint64_t>::max() / m)
                throw DomainError("sequence-tree complexity overflows 64 bits");
            term *= m;
        }
    }
    return sum;
}

std::vector<Planet> candidate_bodies(const PlanetSystem& system, const RtbaConfig& cfg) {
    const double limit = semi_major_axis(system, cfg.arrival_body);
    std::vector<Planet> out;
    for (const auto& b : system.bodies())
        if (b.elements.a <= limit) out.push_back(b.id);
    std::stable_sort(out.begin(), out.end(), [&](Planet a, Planet b) {
        return semi_major_axis(system, a) < semi_major_axis(system, b);
    });
    return out;
}

std::vector<std::size_t> round_robin_allocation(std::size_t buckets, std::size_t count) {
    std::vector<std::size_t> out(buckets, 0);
    if (buckets == 0) return out;
    for (std::size_t k = 0; k < buckets; ++k) out[k] = count / buckets + (k < count % buckets ? 1 : 0);
    return out;
}

std::vector<Sequence> subtree(const SearchState& state, const RtbaConfig& cfg,
                              std::span<const Planet> candidates) {
    const auto fixed = state.pseudo_sequence.size();
    const int remaining = cfg.max_gas - static_cast<int>(fixed);
    if (remaining < 0) return {};
    if (complexity(std::max<std::size_t>(candidates.size(), 1), static_cast<std::uint64_t>(remaining)) >
        kMaxSubtree)
        throw ConfigError("sequence tree too large to enumerate");

    std::vector<Sequence> out;
    std::vector<std::size_t> digits;
    for (int len = 0; len <= remaining; ++len) {
        if (len > 0 && candidates.empty()) break;
        digits.assign(static_cast<std::size_t>(len), 0);
        while (true) {
            Sequence s;
            s.bodies.push_back(cfg.departure_body);
            s.bodies.insert(s.bodies.end(), state.pseudo_sequence.begin(), state.pseudo_sequence.end());
            for (std::size_t d : digits) s.bodies.push_back(candidates[d]);
            s.bodies.push_back(cfg.arrival_body);
            out.push_back(std::move(s));
            // Odometer increment over the candidate list.
            int pos = len - 1;
            while (pos >= 0 && ++digits[static_cast<std::size_t>(pos)] == candidates.size()) {
                digits[static_cast<std::size_t>(pos)] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
    }
    return out;
}

SampleResult sample_sequences(const SearchState& state, const RtbaConfig& cfg,
                              std::span<const Planet> candidates, std::size_t count, Rng& rng) {
    if (count < 1) throw DomainError("sample count must be at least 1");
    const auto fixed = state.pseudo_sequence.size();
    const auto tree = subtree(state, cfg, candidates);

    std::optional<Sequence> leaf;
    std::vector<std::vector<Sequence>> pools(candidates.size());
    for (const auto& s : tree) {
        if (state.evaluated_set.count(s.str())) continue;
        if (s.bodies.size() == fixed + 2) {
            leaf = s;
            continue;
        }
        const Planet tb = s.bodies[fixed + 1];
        const auto k = static_cast<std::size_t>(
            std::find(candidates.begin(), candidates.end(), tb) - candidates.begin());
        pools[k].push_back(s);
    }

    SampleResult result;
    std::size_t available = leaf ? 1 : 0;
    for (const auto& p : pools) available += p.size();
    result.exhausted = available < count;
    std::size_t want = std::min(count, available);

    if (leaf && want > 0) {
        result.sequences.push_back(*leaf);
        --want;
    }

    // One at a time in candidate order, skipping buckets that ran dry; this
    // equals round_robin_allocation whenever no bucket runs out.
    std::vector<std::size_t> take(pools.size(), 0);
    while (want > 0) {
        for (std::size_t k = 0; k < pools.size() && want > 0; ++k) {
            if (take[k] < pools[k].size()) {
                ++take[k];
                --want;
            }
        }
    }

    for (std::size_t k = 0; k < pools.size(); ++k) {
        auto& pool = pools[k];
        for (std::size_t i = 0; i < take[k]; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
            std::swap(pool[i], pool[pick(rng)]);
            result.sequences.push_back(pool[i]);
        }
    }
    return result;
}

std::string target_body_key(const Sequence& seq, std::size_t fixed_flybys) {
    if (seq.bodies.size() < fixed_flybys + 3) return "-";
    return std::string(1, planet_code(seq.bodies[fixed_flybys + 1]));
}

double island_window_start(const RtbaConfig& cfg, int i) {
    const double span = cfg.window_end - cfg.window_start;
    const int tiles = std::max(1, static_cast<int>(std::ceil(span / cfg.ltto.window_days - 1e-9)));
    const int tile = cfg.p <= tiles ? static_cast<int>((static_cast<long long>(i) * tiles) / cfg.p)
                                    : i % tiles;
    return cfg.window_start + tile * cfg.ltto.window_days;
}

namespace {

struct SequenceRun {
    std::unique_ptr<LttoProblem> problem;
    Archipelago arch;
};

SequenceRun prepare_run(const PlanetSystem& system, const Sequence& seq, const RtbaConfig& cfg) {
    SequenceRun run;
    run.problem = std::make_unique<LttoProblem>(system, seq, cfg.ltto);
    const LttoProblem* problem = run.problem.get();
    const std::string label = seq.str();
    run.arch.topology_probability = cfg.topology_probability;
    run.arch.rng.seed(derive_seed(cfg.seed, label, 0xA5C1));
    Objective objective = [problem](std::span<const double> x) { return problem->fitness(x); };
    for (int i = 0; i < cfg.p; ++i) {
        const double start = island_window_start(cfg, i);
        Island isl = make_island(i, problem->bounds(start), objective, cfg.sga,
                                 derive_seed(cfg.seed, label, static_cast<std::uint64_t>(i)));
        isl.sequence = label;
        isl.target_body = target_body_key(seq, 0);
        isl.window_start = start;
        run.arch.islands.push_back(std::move(isl));
    }
    return run;
}

SequenceRecord collect(const Sequence& seq, const Archipelago& arch, double chi) {
    SequenceRecord rec;
    rec.sequence = seq;
    const Individual* best = nullptr;
    for (const auto& isl : arch.islands) {
        rec.island_dvs.push_back(isl.best.fitness);
        if (!best || isl.best.fitness < best->fitness) best = &isl.best;
    }
    if (best) rec.best_genes = best->genes;
    score_record(rec, chi);
    return rec;
}

}  // namespace

BatchEvaluator ltto_evaluator(const PlanetSystem& system, const RtbaConfig& cfg) {
    return [&system, cfg](std::span<const Sequence> batch) {
        std::vector<SequenceRun> runs;
        runs.reserve(batch.size());
        for (const auto& seq : batch) runs.push_back(prepare_run(system, seq, cfg));
        std::vector<Archipelago> archs;
        archs.reserve(runs.size());
        for (auto& r : runs) archs.push_back(std::move(r.arch));
        evolve_archipelagos(archs, cfg.sga, cfg.workers);
        std::vector<SequenceRecord> out;
        for (std::size_t i = 0; i < batch.size(); ++i) out.push_back(collect(batch[i], archs[i], cfg.chi));
        return out;
    };
}

SequenceRecord evaluate_sequence(const PlanetSystem& system, const Sequence& seq,
                                 const RtbaConfig& cfg) {
    auto records = ltto_evaluator(system, cfg)(std::span<const Sequence>(&seq, 1));
    return records.front();
}

std::vector<TbCandidate> gather_candidates(const SearchState& state,
                                           std::span<const Planet> candidates) {
    std::vector<TbCandidate> out;
    const auto fixed = state.pseudo_sequence.size();
    for (Planet tb : candidates) {
        TbCandidate c;
        c.body = tb;
        for (const auto& r : state.records) {
            const auto& b = r.sequence.bodies;
            if (b.size() < fixed + 3) continue;
            if (!std::equal(state.pseudo_sequence.begin(), state.pseudo_sequence.end(), b.begin() + 1))
                continue;
            if (b[fixed + 1] == tb) c.member_records.push_back(r);
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::optional<Planet> select_target_body(const std::vector<TbCandidate>& scored,
                                         const PlanetSystem& system) {
    const TbCandidate* best = nullptr;
    for (const auto& c : scored) {
        if (!best || c.f_tb < best->f_tb ||
            (c.f_tb == best->f_tb &&
             semi_major_axis(system, c.body) < semi_major_axis(system, best->body)))
            best = &c;
    }
    if (!best) return std::nullopt;
    return best->body;
}

SearchState run_recursion(SearchState state, const RtbaConfig& cfg, const PlanetSystem& system,
                          const BatchEvaluator& evaluator) {
    if (state.exhausted || state.recursion_index >= cfg.max_recursions) return state;

    const auto candidates = candidate_bodies(system, cfg);
    const int remaining = cfg.max_gas - static_cast<int>(state.pseudo_sequence.size());
    const std::uint64_t C = complexity(std::max<std::size_t>(candidates.size(), 1),
                                       static_cast<std::uint64_t>(std::max(remaining, 0)));
    const auto want = static_cast<std::size_t>(std::ceil(cfg.q * static_cast<double>(C) - 1e-9));

    Rng rng(derive_seed(cfg.seed, "sample", static_cast<std::uint64_t>(state.recursion_index)));
    const auto sample = sample_sequences(state, cfg, candidates, std::max<std::size_t>(want, 1), rng);
    if (sample.sequences.empty()) {
        state.exhausted = true;
        return state;
    }

    const auto batch = static_cast<std::size_t>(cfg.concurrent_sequences());
    for (std::size_t first = 0; first < sample.sequences.size(); first += batch) {
        const std::size_t n = std::min(batch, sample.sequences.size() - first);
        auto records = evaluator(std::span<const Sequence>(sample.sequences).subspan(first, n));
        for (auto& r : records) {
            r.recursion_found = state.recursion_index + 1;
            if (!state.evaluated_set.insert(r.sequence.str()).second)
                throw Error("sequence " + r.sequence.str() + " evaluated twice");
            state.records.push_back(std::move(r));
        }
    }
    ++state.recursion_index;

    if (remaining <= 0) {
        state.exhausted = true;
        return state;
    }
    const auto scored = tb_fitness(gather_candidates(state, candidates), cfg.xi);
    const auto tb = select_target_body(scored, system);
    if (!tb) {
        state.exhausted = true;
        return state;
    }
    state.pseudo_sequence.push_back(*tb);
    return state;
}

std::vector<SequenceRecord> rank_records(std::vector<SequenceRecord> records,
                                         const PlanetSystem& system) {
    auto axes = [&](const SequenceRecord& r) {
        std::vector<double> a;
        for (Planet p : r.sequence.bodies) a.push_back(semi_major_axis(system, p));
        return a;
    };
    std::stable_sort(records.begin(), records.end(), [&](const SequenceRecord& a, const SequenceRecord& b) {
        if (a.f_s != b.f_s) return a.f_s < b.f_s;
        const auto aa = axes(a);
        const auto ab = axes(b);
        if (aa != ab) return aa < ab;
        return a.sequence.str() < b.sequence.str();
    });
    return records;
}

bool in_optimal_group(const SequenceRecord& record, double min_f_s) {
    return record.f_s <= min_f_s * 1.3 || record.f_s <= min_f_s + 5000.0;
}

std::vector<SequenceRecord> extract_optimal_group(std::span<const SequenceRecord> ranking) {
    if (ranking.empty()) return {};
    double mn = ranking.front().f_s;
    for (const auto& r : ranking) mn = std::min(mn, r.f_s);
    std::vector<SequenceRecord> out;
    for (const auto& r : ranking)
        if (in_optimal_group(r, mn)) out.push_back(r);
    return out;
}

double evaluated_fraction(const SearchState& state, const RtbaConfig& cfg,
                          const PlanetSystem& system) {
    const auto m = candidate_bodies(system, cfg).size();
    const auto total = complexity(std::max<std::size_t>(m, 1), static_cast<std::uint64_t>(cfg.max_gas));
    return static_cast<double>(state.evaluated_set.size()) / static_cast<double>(total);
}

RtbaResult run_rtba(const RtbaConfig& cfg, const PlanetSystem& system,
                    const BatchEvaluator& evaluator) {
    cfg.validate();
    if (cfg.cpu_count % cfg.p != 0)
        std::cerr << "warning: cpu_count " << cfg.cpu_count << " is not a multiple of p " << cfg.p
                  << "; " << cfg.concurrent_sequences() << " sequences run concurrently\n";
    RtbaResult result;
    while (!result.state.exhausted && result.state.recursion_index < cfg.max_recursions)
        result.state = run_recursion(std::move(result.state), cfg, system, evaluator);
    result.ranking = rank_records(result.state.records, system);
    result.optimal_group = extract_optimal_group(result.ranking);
    result.evaluated_fraction = evaluated_fraction(result.state, cfg, system);
    return result;
}

RtbaResult run_rtba(const RtbaConfig& cfg, const PlanetSystem& system) {
    return run_rtba(cfg, system, ltto_evaluator(system, cfg));
}

}  // namespace rtba
