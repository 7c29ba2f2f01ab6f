#include <CLI11.hpp>

#include "safeaci/cli.hpp"

// safeaci <command> [flags]
//
// Commands:
//   run      integrate one episode, write trajectory.csv + manifest.txt
//   compare  run the same seed in safe and baseline mode, write paired CSVs
//   verify   sampled barrier-construction check + safety certificate
//   sweep    per-seed compare over consecutive seeds, write a results table
//
// Resolution order: built-in defaults, then --config file, then SAFEACI_*
// environment variables, then --set/--seed/--decimate flags.

int main(int argc, char** argv) {
    CLI::App app{"Safe actor-critic-identifier controller simulator"};
    app.require_subcommand(1);

    safeaci::CliOptions opt;
    std::uint64_t seed = 0;
    int decimate = 0;

    auto add_common = [&](CLI::App* cmd, bool with_out) {
        cmd->add_option("--config", opt.config_path, "Config file path")
            ->check(CLI::ExistingFile);
        cmd->add_option("--set", opt.sets, "Override key=value (repeatable)");
        cmd->add_option("--seed", seed, "Override episode.seed");
        cmd->add_option("--decimate", decimate, "Override episode.decimate");
        if (with_out) cmd->add_option("--out", opt.out_dir, "Output directory");
    };

    add_common(app.add_subcommand("run", "Integrate one episode"), true);
    add_common(app.add_subcommand("compare", "Safe vs baseline, same seed"), true);
    add_common(app.add_subcommand("verify", "Construction check + certificate"),
               false);
    CLI::App* sweep = app.add_subcommand("sweep", "Per-seed compare sweep");
    add_common(sweep, true);
    sweep->add_option("--jobs", opt.jobs, "Parallel runs")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help lands here too and must stay exit 0; real parse errors
        // all map to the documented usage/config exit code.
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    CLI::App* active = app.get_subcommands().front();
    opt.command = active->get_name();
    if (active->count("--seed")) opt.seed = seed;
    if (active->count("--decimate")) opt.decimate = decimate;
    return safeaci::cli_main(opt);
}
