#pragma once

// Experiment orchestration: named presets or JSON-configured scenarios, the
// encode -> transmit -> decode -> measure pipeline swept over block lengths
// and seeds, and deterministic CSV emission.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coordsim/construction.hpp"
#include "coordsim/probmodel.hpp"

namespace coordsim {

struct Scenario {
    std::string name;
    CoordinationSpec spec;
    std::vector<int> n_list;
    int k = 4;
    std::optional<double> delta;  // explicit threshold; otherwise shaped from beta
    double beta = 0.25;
    std::vector<std::uint64_t> seeds;
    long samples = 10000;  // Monte Carlo sample count for constructions
    int source_offset = 0;
    bool trace = false;
    int workers = 1;
    std::uint64_t construction_seed = 0x5eedc0de;  // independent of run seeds
    bool force = false;
};

std::vector<std::string> preset_names();
Scenario scenario_preset(const std::string& name);
Scenario scenario_from_json_text(const std::string& text);
Scenario scenario_from_file(const std::string& path);

// Threshold for one block length: the explicit delta if set, otherwise
// 2^(-n^beta) clamped into [0.05, 0.45].
double delta_for(const Scenario& scenario, int n);

struct RunResult {
    std::string scenario;
    int n = 0;
    int k = 0;
    double delta = 0.0;
    std::uint64_t seed = 0;
    double v_total = 0.0;       // V(pooled type over all k+1 blocks, target)
    double v_block_mean = 0.0;  // mean per-block V over the k coordinated blocks
    double d_proxy = 0.0;       // KL(pooled type || target), bits; may be inf
    double cr_rate = 0.0;
    int block_err_count = 0;    // blocks whose (z, v) estimates are not exact
    bool extra_block_fail = false;
    double wall_ms = 0.0;
};

struct ExperimentResult {
    std::vector<std::string> preamble;  // '#'-prefixed comment lines
    std::vector<RunResult> rows;
};

struct RunOptions {
    std::optional<std::string> layout_path;   // load instead of constructing (single n)
    std::optional<std::string> trace_prefix;  // write per-run traces when scenario.trace
};

ExperimentResult run_experiment(const Scenario& scenario, const RunOptions& options = {});

// wall_ms varies between runs; exclude it to get byte-reproducible output.
std::string to_csv(const ExperimentResult& result, bool include_wall_ms = true);
std::string csv_header(bool include_wall_ms = true);

}  // namespace coordsim
