#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

namespace fairicp::cli {

// Optional command-line overrides applied on top of the config document.
struct Overrides {
  std::string out;
  long long seed = -1;
  int threads = 0;
};

// Executes one subcommand against a parsed config document. Every command
// validates the document, expands defaults, writes its outputs plus a
// `<command>.resolved.json` echo of the fully-resolved config into the
// output directory, and returns the list of files written. Output bytes are
// a pure function of (config, input files).
std::vector<std::string> run_command(const std::string& command,
                                     const nlohmann::json& config,
                                     const Overrides& overrides = {});

nlohmann::json load_config_file(const std::string& path);

}  // namespace fairicp::cli
