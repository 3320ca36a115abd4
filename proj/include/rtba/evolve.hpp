#pragma once

#include "rtba/ltto.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rtba {

using Objective = std::function<double(std::span<const double>)>;
using Rng = std::mt19937_64;

struct SgaConfig {
    int population_size = 1200;
    int generations = 300;
    double crossover_rate = 0.9;
    /// Per-gene mutation probability; values <= 0 select 1 / dimension.
    double mutation_rate = 0.0;
    /// Gaussian mutation width as a fraction of each gene's range.
    double mutation_sigma = 0.1;
    int tournament_size = 2;
    int elitism_count = 2;
    std::uint64_t seed = 0;

    /// Throws ConfigError when the configuration is unusable.
    void validate() const;
};

struct Individual {
    std::vector<double> genes;
    double fitness = kInfeasibleDeltaV;
};

struct Island {
    int id = 0;
    std::string sequence;     // label of the problem the island optimizes
    std::string target_body;  // migration group
    double window_start = 0.0;
    Bounds bounds;
    Objective objective;
    std::vector<Individual> population;
    Individual best;  // best ever
    Rng rng;
};

/// Derives a stream seed from a master seed and a label; stable across runs.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index = 0);

/// Creates an island with a uniformly random population within `bounds`.
Island make_island(int id, Bounds bounds, Objective objective, const SgaConfig& config,
                   std::uint64_t seed);

/// Evaluates an objective, mapping exceptions and non-finite values to the sentinel.
double safe_fitness(const Objective& objective, std::span<const double> genes);

/// One generation: tournament selection, uniform crossover, Gaussian mutation
/// clipped to bounds, elitism.
void sga_step(Island& island, const SgaConfig& config);

/// Runs `config.generations` steps on the island.
Island sga_evolve(Island island, const SgaConfig& config);

struct Archipelago {
    std::vector<Island> islands;
    double topology_probability = 0.01;
    Rng rng;
};

/// True when the two islands are linked by the migration topology.
bool connected(const Island& a, const Island& b);

/// Synchronous migration: for each directed edge between connected islands,
/// with probability topology_probability the source's pre-migration best
/// replaces the destination's worst (projected into the destination bounds).
void migrate(Archipelago& arch);

/// Runs `fn(i)` for i in [0, n) over up to `workers` threads.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

/// Evolves all archipelagos for config.generations generations. Islands
/// evolve concurrently; migration runs at each generation boundary.
void evolve_archipelagos(std::span<Archipelago> archs, const SgaConfig& config, int workers);

struct NelderMeadOptions {
    double tol = 1e-8;
    int max_iter = 2000;
    double initial_step = 0.05;  // fraction of each gene's range
    std::vector<bool> frozen;    // genes held fixed (integers)
};

struct NelderMeadResult {
    std::vector<double> x;
    double fitness = kInfeasibleDeltaV;
    int iterations = 0;
};

/// Bounded Nelder-Mead; trial points are projected onto the bounds.
/// Never returns a point worse than x0.
NelderMeadResult nelder_mead(const Objective& objective, std::span<const double> x0,
                             const Bounds& bounds, const NelderMeadOptions& options = {});

/// A problem with a moving departure window.
struct WindowedProblem {
    std::function<Bounds(double window_start)> bounds;
    Objective objective;
    std::vector<bool> integer_genes;
    std::size_t departure_gene = 0;
    std::string label = "grid";
};

WindowedProblem windowed(const LttoProblem& problem);

struct GridRow {
    double window_start = 0.0;
    double best_dv = kInfeasibleDeltaV;
    double refined_dv = kInfeasibleDeltaV;
    double departure_date = 0.0;
    std::vector<double> best_genes;
    std::vector<double> refined_genes;
};

/// Partitions [begin, end] into 60-day intervals (the last one may extend
/// past `end`), evolves `islands_per_window` islands per interval and refines
/// the best individual of each interval with Nelder-Mead.
std::vector<GridRow> grid_search(const WindowedProblem& problem, double begin, double end,
                                 int islands_per_window, const SgaConfig& config,
                                 double topology_probability, const NelderMeadOptions& nm,
                                 int workers, double interval_days = 60.0);

}  // namespace rtba
