#include "rtba/app.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace rtba {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string stem(const Sequence& seq) { return seq.str(); }

void write_solution(const fs::path& dir, const Sequence& seq, const TrajectorySolution& sol) {
    write_atomic((dir / ("solution_" + stem(seq) + ".json")).string(),
                 solution_json(seq, sol).dump(2) + "\n");
    for (std::size_t k = 0; k < sol.legs.size(); ++k)
        write_atomic((dir / ("thrust_" + stem(seq) + "_leg" + std::to_string(k + 1) + ".csv")).string(),
                     thrust_csv(sol.legs[k]));
}

json metadata(const RunConfig& cfg, int workers, double wall) {
    json m;
    m["config"] = cfg.to_json();
    m["mode"] = std::string(mode_name(cfg.mode));
    m["seed"] = cfg.seed;
    m["workers"] = workers;
    m["peak_workers"] = workers;
    m["wall_time_s"] = wall;
    m["warnings"] = cfg.warnings;
    return m;
}

}  // namespace

std::string ranking_csv(const std::vector<SequenceRecord>& ranking) {
    std::ostringstream os;
    os << "rank,sequence,f_s_ms,min_dv_ms,mean_dv_ms,recursion_found,in_optimal_group\n";
    const double best = ranking.empty() ? kInfeasibleDeltaV : ranking.front().f_s;
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        const auto& r = ranking[i];
        os << i + 1 << ',' << r.sequence.str() << ',' << num(r.f_s) << ',' << num(r.min_dv()) << ','
           << num(r.mean_dv()) << ',' << r.recursion_found << ','
           << (in_optimal_group(r, best) ? 1 : 0) << '\n';
    }
    return os.str();
}

json record_json(const SequenceRecord& r) {
    json j;
    j["sequence"] = r.sequence.str();
    j["island_dvs"] = r.island_dvs;
    j["f_s"] = r.f_s;
    j["min_dv"] = r.min_dv();
    j["mean_dv"] = r.mean_dv();
    j["recursion_found"] = r.recursion_found;
    j["feasible"] = r.feasible;
    j["best_genes"] = r.best_genes;
    return j;
}

std::string journal_jsonl(const std::vector<SequenceRecord>& records) {
    std::string out;
    for (const auto& r : records) out += record_json(r).dump() + "\n";
    return out;
}

json solution_json(const Sequence& seq, const TrajectorySolution& sol) {
    json j;
    const auto& d = sol.decision;
    j["sequence"] = seq.str();
    j["departure_date_mjd"] = d.departure_date;
    j["tofs_days"] = d.tofs;
    j["n_revs"] = d.n_revs;
    j["free_coeffs"] = d.free_coeffs;
    json fb = json::array();
    for (const auto& f : d.flybys)
        fb.push_back({{"v_inf", f.v_inf}, {"theta_g", f.theta_g}, {"phi_g", f.phi_g},
                      {"h_p", f.h_p}, {"beta", f.beta}});
    j["flybys"] = fb;
    j["genes"] = d.encode();
    j["leg_delta_v_ms"] = sol.leg_delta_v;
    j["total_delta_v_ms"] = sol.total_delta_v;
    j["feasible"] = sol.feasible;
    if (!sol.failure.empty()) j["failure"] = sol.failure;
    return j;
}

std::string thrust_csv(const ShapedLeg& leg) {
    std::ostringstream os;
    os << "t_s,r_m,theta_rad,z_m,f_r,f_theta,f_z,f_mag\n";
    for (const auto& s : thrust_profile(leg)) {
        os << num(s.t) << ',' << num(s.state.r) << ',' << num(s.state.theta) << ',' << num(s.state.z)
           << ',' << num(s.thrust.x()) << ',' << num(s.thrust.y()) << ',' << num(s.thrust.z()) << ','
           << num(s.thrust.norm()) << '\n';
    }
    return os.str();
}

std::string grid_csv(const std::vector<GridRow>& rows) {
    std::ostringstream os;
    os << "window_start_mjd,best_dv_ms,refined_dv_ms,departure_date_mjd\n";
    for (const auto& r : rows)
        os << num(r.window_start) << ',' << num(r.best_dv) << ',' << num(r.refined_dv) << ','
           << num(r.departure_date) << '\n';
    return os.str();
}

void write_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) throw Error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

int run(const RunConfig& input, std::ostream& log) {
    RunConfig cfg = input;
    int workers = 1;
    try {
        workers = resolve_workers(cfg, std::getenv(kWorkersEnv));
        cfg.rtba.workers = workers;
        for (const auto& w : cfg.warnings) log << "warning: " << w << '\n';
        cfg.rtba.validate();
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return 2;
    }

    const fs::path dir(cfg.output_dir);
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    std::vector<SequenceRecord> journal;

    try {
        fs::create_directories(dir);
        const PlanetSystem system = load_system(cfg);
        json meta_extra;

        if (cfg.mode == Mode::Ltto) {
            const Sequence seq = Sequence::parse(cfg.sequence);
            SequenceRecord rec = evaluate_sequence(system, seq, cfg.rtba);
            rec.recursion_found = 0;
            journal.push_back(rec);
            LttoProblem problem(system, seq, cfg.rtba.ltto);
            const auto sol = problem.solve(rec.best_genes);
            write_solution(dir, seq, sol);
            log << seq.str() << ": best " << num(rec.min_dv()) << " m/s, f_s " << num(rec.f_s) << " m/s\n";
            meta_extra["best_dv_ms"] = rec.min_dv();
        } else if (cfg.mode == Mode::Grid) {
            const Sequence seq = Sequence::parse(cfg.sequence);
            LttoProblem problem(system, seq, cfg.rtba.ltto);
            NelderMeadOptions nm;
            nm.tol = cfg.nm_tol;
            nm.max_iter = cfg.nm_max_iter;
            const auto rows = grid_search(windowed(problem), cfg.rtba.window_start, cfg.rtba.window_end,
                                          cfg.islands_per_window, cfg.rtba.sga,
                                          cfg.rtba.topology_probability, nm, workers,
                                          cfg.rtba.ltto.window_days);
            write_atomic((dir / "grid.csv").string(), grid_csv(rows));
            const GridRow* best = nullptr;
            for (const auto& r : rows)
                if (!best || r.refined_dv < best->refined_dv) best = &r;
            if (best) {
                write_solution(dir, seq, problem.solve(best->refined_genes));
                log << seq.str() << ": best refined " << num(best->refined_dv) << " m/s at MJD "
                    << num(best->departure_date) << '\n';
                meta_extra["best_dv_ms"] = best->refined_dv;
            }
            meta_extra["windows"] = rows.size();
        } else {
            const auto base = ltto_evaluator(system, cfg.rtba);
            BatchEvaluator journaled = [&](std::span<const Sequence> batch) {
                auto out = base(batch);
                journal.insert(journal.end(), out.begin(), out.end());
                write_atomic((dir / "journal.jsonl").string(), journal_jsonl(journal));
                return out;
            };
            const auto result = run_rtba(cfg.rtba, system, journaled);
            journal = result.state.records;
            write_atomic((dir / "journal.jsonl").string(), journal_jsonl(journal));
            write_atomic((dir / "ranking.csv").string(), ranking_csv(result.ranking));
            for (const auto& r : result.optimal_group) {
                if (!r.feasible || r.best_genes.empty()) continue;
                LttoProblem problem(system, r.sequence, cfg.rtba.ltto);
                write_solution(dir, r.sequence, problem.solve(r.best_genes));
            }
            std::string ps;
            for (Planet p : result.state.pseudo_sequence) ps += planet_code(p);
            meta_extra["pseudo_sequence"] = ps;
            meta_extra["evaluated"] = result.state.evaluated_set.size();
            meta_extra["evaluated_fraction"] = result.evaluated_fraction;
            meta_extra["recursions"] = result.state.recursion_index;
            meta_extra["exhausted"] = result.state.exhausted;
            if (!result.ranking.empty())
                log << "best sequence " << result.ranking.front().sequence.str() << " f_s "
                    << num(result.ranking.front().f_s) << " m/s\n";
            log << "evaluated fraction " << num(result.evaluated_fraction) << '\n';
        }

        json meta = metadata(cfg, workers, elapsed());
        meta.update(meta_extra);
        write_atomic((dir / "metadata.json").string(), meta.dump(2) + "\n");
        return 0;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        log << "run failed: " << e.what() << '\n';
        try {
            if (!journal.empty()) write_atomic((dir / "journal.jsonl").string(), journal_jsonl(journal));
            json meta = metadata(cfg, workers, elapsed());
            meta["failure"] = e.what();
            write_atomic((dir / "metadata.json").string(), meta.dump(2) + "\n");
        } catch (const std::exception&) {
        }
        return 3;
    }
}

}  // namespace rtba
