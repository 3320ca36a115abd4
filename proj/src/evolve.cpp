#include "rtba/evolve.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace rtba {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double clip(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

void clip_to(std::vector<double>& x, const Bounds& b) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = clip(x[i], b.lower[i], b.upper[i]);
}

std::size_t tournament(const std::vector<Individual>& pop, int size, Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
    std::size_t winner = pick(rng);
    for (int k = 1; k < size; ++k) {
        const std::size_t c = pick(rng);
        if (pop[c].fitness < pop[winner].fitness) winner = c;
    }
    return winner;
}

std::vector<std::size_t> ranked(const std::vector<Individual>& pop) {
    std::vector<std::size_t> idx(pop.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return pop[a].fitness < pop[b].fitness; });
    return idx;
}

void update_best(Island& island) {
    for (const auto& ind : island.population)
        if (ind.fitness < island.best.fitness || island.best.genes.empty()) island.best = ind;
}

}  // namespace

void SgaConfig::validate() const {
    if (population_size < 4 || population_size % 2 != 0)
        throw ConfigError("population_size must be even and at least 4");
    if (generations < 1) throw ConfigError("generations must be at least 1");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
        throw ConfigError("crossover_rate must lie in [0, 1]");
    if (!(mutation_rate <= 1.0)) throw ConfigError("mutation_rate must not exceed 1");
    if (!(mutation_sigma > 0.0)) throw ConfigError("mutation_sigma must be positive");
    if (tournament_size < 1) throw ConfigError("tournament_size must be at least 1");
    if (elitism_count < 0 || elitism_count >= population_size)
        throw ConfigError("elitism_count must lie in [0, population_size)");
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return splitmix64(splitmix64(master) ^ splitmix64(h + 0x51ed270b27a3f1c5ULL * (index + 1)));
}

double safe_fitness(const Objective& objective, std::span<const double> genes) {
    double f = kInfeasibleDeltaV;
    try {
        f = objective(genes);
    } catch (const std::exception&) {
        return kInfeasibleDeltaV;
    }
    return std::isfinite(f) ? f : kInfeasibleDeltaV;
}

Island make_island(int id, Bounds bounds, Objective objective, const SgaConfig& config,
                   std::uint64_t seed) {
    config.validate();
    Island island;
    island.id = id;
    island.bounds = std::move(bounds);
    island.objective = std::move(objective);
    island.rng.seed(seed);
    const std::size_t dim = island.bounds.size();
    island.population.resize(static_cast<std::size_t>(config.population_size));
    for (auto& ind : island.population) {
        ind.genes.resize(dim);
        for (std::size_t g = 0; g < dim; ++g) {
            std::uniform_real_distribution<double> u(island.bounds.lower[g], island.bounds.upper[g]);
            ind.genes[g] = island.bounds.lower[g] == island.bounds.upper[g] ? island.bounds.lower[g]
                                                                            : u(island.rng);
        }
        ind.fitness = safe_fitness(island.objective, ind.genes);
    }
    update_best(island);
    return island;
}

void sga_step(Island& island, const SgaConfig& config) {
    auto& pop = island.population;
    const std::size_t n = pop.size();
    const std::size_t dim = island.bounds.size();
    const double pm = config.mutation_rate > 0.0 ? config.mutation_rate
                                                 : 1.0 / static_cast<double>(std::max<std::size_t>(dim, 1));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const auto order = ranked(pop);
    std::vector<Individual> next;
    next.reserve(n);
    const auto elites = std::min<std::size_t>(static_cast<std::size_t>(config.elitism_count), n);
    for (std::size_t e = 0; e < elites; ++e) next.push_back(pop[order[e]]);
    const std::size_t first_child = next.size();

    while (next.size() < n) {
        Individual a = pop[tournament(pop, config.tournament_size, island.rng)];
        Individual b = pop[tournament(pop, config.tournament_size, island.rng)];
        if (unit(island.rng) < config.crossover_rate) {
            for (std::size_t g = 0; g < dim; ++g)
                if (unit(island.rng) < 0.5) std::swap(a.genes[g], b.genes[g]);
        }
        for (Individual* child : {&a, &b}) {
            for (std::size_t g = 0; g < dim; ++g) {
                if (unit(island.rng) >= pm) continue;
                const double range = island.bounds.upper[g] - island.bounds.lower[g];
                child->genes[g] = clip(child->genes[g] + config.mutation_sigma * range * gauss(island.rng),
                                       island.bounds.lower[g], island.bounds.upper[g]);
            }
        }
        next.push_back(std::move(a));
        if (next.size() < n) next.push_back(std::move(b));
    }
    for (std::size_t i = first_child; i < n; ++i)
        next[i].fitness = safe_fitness(island.objective, next[i].genes);
    pop = std::move(next);
    update_best(island);
}

Island sga_evolve(Island island, const SgaConfig& config) {
    config.validate();
    for (int g = 0; g < config.generations; ++g) sga_step(island, config);
    return island;
}

bool connected(const Island& a, const Island& b) {
    return a.target_body == b.target_body && a.bounds.size() == b.bounds.size();
}

void migrate(Archipelago& arch) {
    auto& islands = arch.islands;
    std::vector<Individual> snapshot;
    snapshot.reserve(islands.size());
    for (const auto& isl : islands) {
        const auto order = ranked(isl.population);
        snapshot.push_back(isl.population[order.front()]);
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t dst = 0; dst < islands.size(); ++dst) {
        for (std::size_t src = 0; src < islands.size(); ++src) {
            if (src == dst || !connected(islands[src], islands[dst])) continue;
            if (!(unit(arch.rng) < arch.topology_probability)) continue;
            Island& d = islands[dst];
            Individual migrant = snapshot[src];
            const auto before = migrant.genes;
            clip_to(migrant.genes, d.bounds);
            if (migrant.genes != before) migrant.fitness = safe_fitness(d.objective, migrant.genes);
            auto worst = std::max_element(
                d.population.begin(), d.population.end(),
                [](const Individual& x, const Individual& y) { return x.fitness < y.fitness; });
            *worst = migrant;
            if (migrant.fitness < d.best.fitness) d.best = migrant;
        }
    }
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (error) std::rethrow_exception(error);
}

void evolve_archipelagos(std::span<Archipelago> archs, const SgaConfig& config, int workers) {
    config.validate();
    std::vector<Island*> all;
    for (auto& a : archs)
        for (auto& isl : a.islands) all.push_back(&isl);
    for (int g = 0; g < config.generations; ++g) {
        parallel_for(all.size(), workers, [&](std::size_t i) { sga_step(*all[i], config); });
        for (auto& a : archs) migrate(a);
    }
}

NelderMeadResult nelder_mead(const Objective& objective, std::span<const double> x0,
                             const Bounds& bounds, const NelderMeadOptions& options) {
    const std::size_t dim = x0.size();
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < dim; ++i) {
        const bool frozen = i < options.frozen.size() && options.frozen[i];
        if (!frozen && bounds.upper[i] > bounds.lower[i]) free.push_back(i);
    }

    std::vector<double> start(x0.begin(), x0.end());
    NelderMeadResult result;
    result.x = start;
    result.fitness = safe_fitness(objective, start);
    if (free.empty()) return result;

    const std::size_t d = free.size();
    std::vector<std::vector<double>> simplex(d + 1, start);
    std::vector<double> f(d + 1, result.fitness);
    for (std::size_t k = 0; k < d; ++k) {
        const std::size_t g = free[k];
        const double step = options.initial_step * (bounds.upper[g] - bounds.lower[g]);
        auto& v = simplex[k + 1];
        v[g] = start[g] + step <= bounds.upper[g] ? start[g] + step : start[g] - step;
        v[g] = clip(v[g], bounds.lower[g], bounds.upper[g]);
        f[k + 1] = safe_fitness(objective, v);
    }

    auto eval = [&](std::vector<double>& x) {
        clip_to(x, bounds);
        return safe_fitness(objective, x);
    };
    auto affine = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
        // a + t (b - a)
        std::vector<double> out(a);
        for (std::size_t g : free) out[g] = a[g] + t * (b[g] - a[g]);
        return out;
    };

    std::vector<std::size_t> idx(d + 1);
    int iter = 0;
    for (; iter < options.max_iter; ++iter) {
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
        const std::size_t best = idx.front();
        const std::size_t worst = idx.back();
        const std::size_t second = idx[d - 1];
        if (f[worst] - f[best] < options.tol) break;

        std::vector<double> centroid = simplex[best];
        for (std::size_t g : free) {
            double s = 0.0;
            for (std::size_t k = 0; k < d; ++k) s += simplex[idx[k]][g];
            centroid[g] = s / static_cast<double>(d);
        }

        auto xr = affine(centroid, simplex[worst], -1.0);
        const double fr = eval(xr);
        if (fr < f[best]) {
            auto xe = affine(centroid, simplex[worst], -2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = std::move(xe);
                f[worst] = fe;
            } else {
                simplex[worst] = std::move(xr);
                f[worst] = fr;
            }
            continue;
        }
        if (fr < f[second]) {
            simplex[worst] = std::move(xr);
            f[worst] = fr;
            continue;
        }
        if (fr < f[worst]) {
            auto xc = affine(centroid, xr, 0.5);
            const double fc = eval(xc);
            if (fc <= fr) {
                simplex[worst] = std::move(xc);
                f[worst] = fc;
                continue;
            }
        } else {
            auto xc = affine(centroid, simplex[worst], 0.5);
            const double fc = eval(xc);
            if (fc < f[worst]) {
                simplex[worst] = std::move(xc);
                f[worst] = fc;
                continue;
            }
        }
        for (std::size_t k = 0; k <= d; ++k) {
            if (k == best) continue;
            simplex[k] = affine(simplex[best], simplex[k], 0.5);
            f[k] = eval(simplex[k]);
        }
    }

    const auto best = static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
    if (f[best] < result.fitness) {
        result.x = simplex[best];
        result.fitness = f[best];
    }
    result.iterations = iter;
    return result;
}

WindowedProblem windowed(const LttoProblem& problem) {
    WindowedProblem w;
    w.bounds = [&problem](double start) { return problem.bounds(start); };
    w.objective = [&problem](std::span<const double> x) { return problem.fitness(x); };
    w.integer_genes = integer_genes(problem.sequence(), problem.settings());
    w.departure_gene = 0;
    w.label = problem.sequence().str();
    return w;
}

std::vector<GridRow> grid_search(const WindowedProblem& problem, double begin, double end,
                                 int islands_per_window, const SgaConfig& config,
                                 double topology_probability, const NelderMeadOptions& nm,
                                 int workers, double interval_days) {
    if (!(end > begin)) throw DomainError("empty departure window");
    if (islands_per_window < 1) throw DomainError("islands_per_window must be at least 1");
    config.validate();
    const auto intervals =
        static_cast<std::size_t>(std::ceil((end - begin) / interval_days - 1e-9));

    Archipelago arch;
    arch.topology_probability = topology_probability;
    arch.rng.seed(derive_seed(config.seed, problem.label, 0xA5C1));
    for (std::size_t w = 0; w < intervals; ++w) {
        const double start = begin + static_cast<double>(w) * interval_days;
        for (int j = 0; j < islands_per_window; ++j) {
            const int id = static_cast<int>(w) * islands_per_window + j;
            Island isl = make_island(id, problem.bounds(start), problem.objective, config,
                                     derive_seed(config.seed, problem.label, static_cast<std::uint64_t>(id)));
            isl.sequence = problem.label;
            isl.target_body = problem.label;
            isl.window_start = start;
            arch.islands.push_back(std::move(isl));
        }
    }
    std::span<Archipelago> one(&arch, 1);
    evolve_archipelagos(one, config, workers);

    std::vector<GridRow> rows(intervals);
    NelderMeadOptions opts = nm;
    if (opts.frozen.empty()) opts.frozen = problem.integer_genes;
    parallel_for(intervals, workers, [&](std::size_t w) {
        GridRow& row = rows[w];
        row.window_start = begin + static_cast<double>(w) * interval_days;
        const Individual* best = nullptr;
        for (int j = 0; j < islands_per_window; ++j) {
            const auto& isl = arch.islands[w * static_cast<std::size_t>(islands_per_window) + static_cast<std::size_t>(j)];
            if (!best || isl.best.fitness < best->fitness) best = &isl.best;
        }
        row.best_dv = best->fitness;
        row.best_genes = best->genes;
        const auto refined = nelder_mead(problem.objective, best->genes,
                                         arch.islands[w * static_cast<std::size_t>(islands_per_window)].bounds, opts);
        row.refined_dv = refined.fitness;
        row.refined_genes = refined.x;
        row.departure_date = refined.x[problem.departure_gene];
    });
    return rows;
}

}  // namespace rtba
