#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gacl::cli {

struct CliConfig {
  std::string command;  // simulate | train | experiment | bench | plot | all
  std::string experiment_name;
  std::uint64_t seed = 42;
  std::string out_dir;   // resolved: --out > $GACL_OUT > ./out
  std::string data_dir;  // empty = library default
  int replicates = 0;    // 0 = experiment default
  std::map<std::string, double> overrides;

  std::string task;  // simulate: site tier; train: boundary family

  // plot
  std::string plot_input;
  std::string plot_output;
  std::string plot_x = "step";
  std::vector<std::string> plot_y;
  std::string plot_pivot_metric;  // pivot long-format CSV on this metric
  bool plot_bands = false;
  bool plot_log_x = false;
  bool plot_log_y = false;
  std::string plot_title;
};

// Total: every argv yields either a runnable config, a clean help exit (0),
// or a usage error (2) with the message already on stderr.
struct ParseOutcome {
  bool should_run = false;
  int exit_code = 0;
  CliConfig cfg;
};

ParseOutcome parse_args(const std::vector<std::string>& args);

// Executes a parsed config. Returns 0 on success, 1 on any runtime error
// (message on stderr).
int run(const CliConfig& cfg);

int main_from(const std::vector<std::string>& args);

}  // namespace gacl::cli
