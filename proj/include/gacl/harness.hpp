#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace gacl::harness {

using json = nlohmann::json;

// One experiment request. `replicates == 0` means "use this experiment's
// default" (20 for curve/benchmark experiments, 15 for sweeps). Overrides
// are flat dotted keys (see known_override_keys()) applied on top of the
// experiment's baseline configuration.
struct ExperimentSpec {
  std::string name;
  int replicates = 0;
  std::uint64_t master_seed = 42;
  std::map<std::string, double> overrides;
  // Dataset directory for the benchmark; empty = $GACL_DATA or the
  // compiled-in default.
  std::string data_dir;
};

// One output record in the long table
//   experiment,condition,system,replicate,step,metric,value.
// `replicate` is a string so aggregate rows ("mean"/"sd"/"se") share the
// schema with per-replicate rows ("0", "1", ...).
struct Row {
  std::string condition;
  std::string system;
  std::string replicate;
  double step = 0.0;
  std::string metric;
  double value = 0.0;
};

struct ExperimentResult {
  std::string name;
  std::vector<Row> rows;
  // Config echo, replicate counts, fits, derived statistics, and a
  // "verdicts" object of named pass/fail booleans.
  json meta;
  // Stdout-only; never serialized, so outputs stay byte-identical across
  // machines.
  double wall_seconds = 0.0;
};

std::vector<std::string> experiment_names();

// Every override key any experiment understands; the CLI rejects keys not
// in this list.
std::vector<std::string> known_override_keys();

ExperimentResult run_experiment(const ExperimentSpec& spec);

// Writes <out_dir>/<name>.csv (atomic, LF, 9-significant-digit floats);
// returns the path.
std::string write_csv(const ExperimentResult& res, const std::string& out_dir);

void write_summary(const std::vector<ExperimentResult>& results,
                   std::uint64_t seed, const std::string& path);

bool all_verdicts_pass(const ExperimentResult& res);

}  // namespace gacl::harness
