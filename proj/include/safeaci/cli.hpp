#ifndef SAFEACI_CLI_HPP
#define SAFEACI_CLI_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "safeaci/config.hpp"

// Command layer. Each cmd_* returns the process exit code:
//   0  success
//   2  configuration error (message names the offending key)
//   3  safety violation during the run
//   4  numeric failure
//   5  barrier construction check failed on samples
// Run summaries printed to stdout use only numbers recomputable from the
// emitted CSV rows; certificate values and run metadata go to the manifest.

namespace safeaci {

struct CliOptions {
    std::string command;  // run | compare | verify | sweep
    std::string config_path;
    std::vector<std::string> sets;  // raw "key=value" pairs
    std::optional<std::uint64_t> seed;
    std::optional<int> decimate;
    int jobs = 1;
    std::string out_dir = "out";
};

// defaults < config file < environment < --set/--seed/--decimate.
Config resolve_config(const CliOptions& opt);

int cmd_run(const Config& cfg, const std::string& out_dir);
int cmd_compare(const Config& cfg, const std::string& out_dir);
int cmd_verify(const Config& cfg);
int cmd_sweep(const Config& cfg, const std::string& out_dir, int jobs);

// Dispatches on opt.command and maps exceptions to exit codes.
int cli_main(const CliOptions& opt);

}  // namespace safeaci

#endif
