#pragma once

#include "fairmap/core.hpp"
#include "fairmap/distance.hpp"
#include "fairmap/embedding.hpp"
#include "fairmap/features.hpp"
#include "fairmap/spectral.hpp"

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fairmap {

struct ParseError : IoError {
    ParseError(const std::string& source, std::size_t line, const std::string& message);
    std::size_t line; // 1-based; 0 when unknown
};

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Labels must be non-empty, unique and free of commas, quotes and line breaks.
void check_labels(const std::vector<std::string>& labels);

// Single instance: "n m" on the first line, then n rows of m numbers separated by
// whitespace or commas. Blank lines and lines starting with '#' are skipped.

Matrix parse_instance_text(std::istream& in, const std::string& source_name);
std::string instance_text(const UtilityMatrix& u);

// Dataset container: a JSON document
//   {"format": "fairmap-dataset", "version": 1,
//    "instances": [{"label", "source", "params", "seed", "matrix"}, ...]}

std::string dataset_text(const std::vector<InstanceRecord>& records);
std::vector<InstanceRecord> parse_dataset(const std::string& text, const std::string& source_name,
                                          bool normalize = false);
void write_dataset(const std::string& path, const std::vector<InstanceRecord>& records);
std::vector<InstanceRecord> read_dataset(const std::string& path, bool normalize = false);

struct Subsample {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t count = 0;
    std::uint64_t seed = 0;
};

struct IngestOptions {
    bool normalize = false;
    std::optional<Subsample> subsample;
};

/// Reads a dataset container or a single-instance table. A table yields one record
/// labeled by the file stem, or with `subsample` set, `count` instances built from
/// random agent and good subsets (sampled without replacement) with rows rescaled to 1.
std::vector<InstanceRecord> ingest(const std::string& path, const IngestOptions& options = {});

/// Subsampling on an already parsed table; instance t uses child stream t of `seed`.
std::vector<InstanceRecord> subsample_table(const Matrix& table, const std::string& name,
                                            const Subsample& spec);

// CSV artifacts.

std::string distance_csv(const DistanceMatrix& d);
DistanceMatrix parse_distance_csv(const std::string& text, const std::string& source_name);

struct PlanarPoint {
    std::string label;
    double x = 0.0;
    double y = 0.0;
};

std::string embedding_csv(const Embedding& e);
std::vector<PlanarPoint> parse_embedding_csv(const std::string& text,
                                             const std::string& source_name);

std::string explicit_csv(const std::vector<LabeledPoint>& points);
/// Returns x = sigma2, y = sigma1 (map orientation).
std::vector<PlanarPoint> parse_explicit_csv(const std::string& text,
                                            const std::string& source_name);

std::string features_csv(const std::vector<FeatureRecord>& rows);
/// Sidecar listing every absent cell: label,feature,reason.
std::string feature_reasons_csv(const std::vector<FeatureRecord>& rows);

struct FeatureTable {
    std::vector<std::string> names;
    std::vector<std::string> labels;
    std::vector<std::vector<std::optional<double>>> values; // [row][column]

    bool has(const std::string& name) const;
    /// nullopt when the label is missing or the cell is empty. Throws UnknownFeature.
    std::optional<double> get(const std::string& label, const std::string& name) const;
};

FeatureTable parse_features_csv(const std::string& text, const std::string& source_name);
FeatureTable to_table(const std::vector<FeatureRecord>& rows);

} // namespace fairmap
