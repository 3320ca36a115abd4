#pragma once

#include "rtba/search.hpp"

#include "json.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rtba {

enum class Mode { Ltto, Grid, Rtba };

std::string_view mode_name(Mode m);

/// Environment variable that overrides the worker count.
inline constexpr const char* kWorkersEnv = "RTBA_WORKERS";

struct RunConfig {
    Mode mode = Mode::Rtba;
    RtbaConfig rtba;  // carries the SGA and LTTO settings
    std::string sequence = "EJ";
    std::string output_dir = "rtba_out";
    std::uint64_t seed = 0;
    std::optional<int> workers;        // from the document or --workers
    bool cpu_count_explicit = false;
    std::string elements_file;
    double sun_mu = kSunMu;
    int islands_per_window = 1;
    double nm_tol = 1e-8;
    int nm_max_iter = 2000;
    // Accepted for forward compatibility; the objective is delta-v only.
    double initial_mass = 0.0;
    double isp = 0.0;

    std::vector<std::string> warnings;

    /// Flat key-value form; parse_config(to_json()) reproduces the config.
    nlohmann::json to_json() const;
};

/// Parses a flat JSON object (`{"key": value, ...}`) and then applies the
/// string overrides. Absent keys keep their defaults. Throws ConfigError on
/// unknown keys, malformed values and out-of-range settings; soft bound
/// widenings are accepted and reported in `warnings`.
RunConfig parse_config(const std::string& document,
                       const std::map<std::string, std::string>& overrides = {});
RunConfig parse_config_file(const std::string& path,
                            const std::map<std::string, std::string>& overrides = {});

/// CLI flag > environment variable > cpu_count given in the config >
/// hardware concurrency.
int resolve_workers(const RunConfig& cfg, const char* env_value);

PlanetSystem load_system(const RunConfig& cfg);

// Artifact formats.
std::string ranking_csv(const std::vector<SequenceRecord>& ranking);
nlohmann::json record_json(const SequenceRecord& record);
std::string journal_jsonl(const std::vector<SequenceRecord>& records);
nlohmann::json solution_json(const Sequence& seq, const TrajectorySolution& sol);
std::string thrust_csv(const ShapedLeg& leg);
std::string grid_csv(const std::vector<GridRow>& rows);

/// Writes via a temporary file in the same directory followed by a rename.
void write_atomic(const std::string& path, const std::string& content);

/// Runs the configured mode and writes its artifacts. Returns the process
/// exit code: 0 success, 2 configuration error, 3 runtime failure.
int run(const RunConfig& cfg, std::ostream& log);

}  // namespace rtba
