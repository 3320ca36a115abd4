#include "rtba/app.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <map>
#include <optional>

int main(int argc, char** argv) {
    CLI::App app{"Low-thrust multiple gravity-assist trajectory search"};
    std::string config_path;
    std::map<std::string, std::string> overrides;
    std::optional<std::string> mode, sequence, seed, workers, output_dir, q, xi, chi, elements;

    app.add_option("--config", config_path, "Flat JSON configuration file");
    app.add_option("--mode", mode, "ltto, grid or rtba");
    app.add_option("--sequence", sequence, "Fixed sequence for ltto and grid modes, e.g. EMJ");
    app.add_option("--seed", seed, "Master random seed");
    app.add_option("--workers", workers, "Worker threads");
    app.add_option("--output-dir", output_dir, "Artifact directory");
    app.add_option("--q", q, "Fraction of the sub-tree sampled per recursion");
    app.add_option("--xi", xi, "Min/mean weight of the target-body fitness");
    app.add_option("--chi", chi, "Min/mean weight of the sequence fitness");
    app.add_option("--elements-file", elements, "CSV of orbital elements replacing the built-in table");
    CLI11_PARSE(app, argc, argv);

    auto put = [&](const char* key, const std::optional<std::string>& v) {
        if (v) overrides[key] = *v;
    };
    put("mode", mode);
    put("sequence", sequence);
    put("seed", seed);
    put("workers", workers);
    put("output_dir", output_dir);
    put("q", q);
    put("xi", xi);
    put("chi", chi);
    put("elements_file", elements);

    rtba::RunConfig cfg;
    try {
        cfg = config_path.empty() ? rtba::parse_config("", overrides)
                                  : rtba::parse_config_file(config_path, overrides);
    } catch (const rtba::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    return rtba::run(cfg, std::cerr);
}
