#pragma once

#include "fairmap/distance.hpp"
#include "fairmap/embedding.hpp"
#include "fairmap/features.hpp"
#include "fairmap/io.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fairmap {

struct PipelineConfig {
    /// Built-in preset name; used when `inputs` is empty.
    std::string preset = "3x6";
    /// Files passed through ingest() and concatenated.
    std::vector<std::string> inputs;
    IngestOptions ingest;

    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out_dir = ".";

    Metric metric = Metric::Demand;
    std::size_t agent_cap = kDefaultExactAgentCap;
    bool embedding = true;
    bool explicit_map = true;
    /// Starts for SMACOF; seed, thread count are taken from above.
    std::size_t restarts = 1;
    std::size_t max_iters = 10000;
    double tol = 1e-9;
    FeatureCaps caps;
    /// One SVG per map and color entry ("" = plain, "source" = category, else a feature).
    std::vector<std::string> colors{"source", "max_demand"};
};

/// A stage failure: keeps the kind and code of the underlying error, prefixes the stage.
struct StageError : Error {
    StageError(std::string stage, const Error& cause);
    std::string stage;
};

struct PipelineResult {
    std::vector<std::string> files;
};

/// Generates or ingests the dataset, then writes dataset.json, distances_<metric>.csv,
/// embedding.csv, explicit.csv, features.csv, features_reasons.csv and the SVG renders
/// into out_dir. On failure every file written so far is removed.
PipelineResult run_pipeline(const PipelineConfig& config);

} // namespace fairmap
