// hotelml command-line front end.
//
//   hotelml synthesize --config cfg.json [--seed N] [--out DIR]
//   hotelml analyze    --config cfg.json [--seed N] [--out DIR] [--workers N]
//   hotelml experiment --config cfg.json [--seed N] [--out DIR] [--workers N]
//
// Exit codes: 0 success, 2 config validation error, 3 pipeline failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hotelml/cli.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::int64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> workers;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON run configuration")->required();
    cmd->add_option("--seed", flags.seed, "override the global seed");
    cmd->add_option("--out", flags.out_dir, "override the output directory");
    cmd->add_option("--workers", flags.workers, "override the worker count");
}

int run(hotelml::Command command, const CommonFlags& flags) {
    std::vector<std::string> violations;
    nlohmann::json parsed;
    {
        std::ifstream in(flags.config_path);
        if (!in) {
            std::cerr << "config: cannot open '" << flags.config_path << "'\n";
            return hotelml::kExitValidation;
        }
        try {
            in >> parsed;
        } catch (const nlohmann::json::exception& e) {
            std::cerr << "config: invalid JSON: " << e.what() << '\n';
            return hotelml::kExitValidation;
        }
    }

    hotelml::RunConfig cfg = hotelml::parse_run_config(parsed, violations);
    if (flags.seed) cfg.seed = static_cast<std::uint64_t>(*flags.seed);
    if (flags.out_dir) cfg.out_dir = *flags.out_dir;
    if (flags.workers) cfg.workers = *flags.workers;

    for (const std::string& problem : hotelml::validate_run_config(cfg, command))
        violations.push_back(problem);
    if (!violations.empty()) {
        std::cerr << "invalid configuration (" << violations.size() << " problem"
                  << (violations.size() == 1 ? "" : "s") << "):\n";
        for (const std::string& problem : violations) std::cerr << "  - " << problem << '\n';
        return hotelml::kExitValidation;
    }

    try {
        switch (command) {
            case hotelml::Command::Synthesize:
                hotelml::cmd_synthesize(cfg);
                std::cout << "wrote " << cfg.out_dir << "/events.csv and " << cfg.out_dir
                          << "/destinations.csv\n";
                break;
            case hotelml::Command::Analyze:
                hotelml::cmd_analyze(cfg);
                std::cout << "wrote analysis artifacts to " << cfg.out_dir << "/\n";
                break;
            case hotelml::Command::Experiment: {
                const hotelml::MetricsReport report = hotelml::cmd_experiment(cfg);
                std::size_t failed = 0;
                for (const auto& row : report.rows)
                    if (row.failed()) ++failed;
                std::cout << "wrote " << report.rows.size() << "-row report to " << cfg.out_dir
                          << "/report.csv";
                if (failed) std::cout << " (" << failed << " failed cells)";
                std::cout << '\n';
                break;
            }
        }
    } catch (const hotelml::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return hotelml::kExitPipeline;
    }
    return hotelml::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hotelml: tabular multi-class learning toolkit and experiment harness"};
    app.require_subcommand(1);

    CommonFlags synth_flags, analyze_flags, experiment_flags;
    CLI::App* synth = app.add_subcommand("synthesize", "generate synthetic event/destination CSVs");
    add_common(synth, synth_flags);
    CLI::App* analyze =
        app.add_subcommand("analyze", "correlation matrix, class histogram and crosstab plot data");
    add_common(analyze, analyze_flags);
    CLI::App* experiment =
        app.add_subcommand("experiment", "run the experiment grid and write accuracy reports");
    add_common(experiment, experiment_flags);

    CLI11_PARSE(app, argc, argv);

    if (synth->parsed()) return run(hotelml::Command::Synthesize, synth_flags);
    if (analyze->parsed()) return run(hotelml::Command::Analyze, analyze_flags);
    return run(hotelml::Command::Experiment, experiment_flags);
}
