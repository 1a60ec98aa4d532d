#pragma once

#include "fairmap/core.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fairmap {

/// Limits on exact allocation enumeration.
struct FeatureCaps {
    /// Maximum n^m for the enumeration-based features.
    std::uint64_t enumeration = 20'000'000;
    /// Maximum n^m for the quadratic Pareto phase of efpo_exists.
    std::uint64_t efpo = 10'000;
};

inline constexpr double kFeatureTolerance = 1e-9;

/// n^m, saturating at UINT64_MAX.
std::uint64_t allocation_count(std::size_t n, std::size_t m);

/// Visits every complete allocation owner[0..m) with owner[j] in [0, n), in base-n
/// counter order (owner[m-1] is the fastest-moving digit). Throws CapExceeded when
/// n^m > cap.
void enumerate_allocations(std::size_t n, std::size_t m, std::uint64_t cap,
                           const std::function<void(std::span<const std::size_t>)>& visit);

/// Allocation-based features, all from exact enumeration.
struct AllocationFeatures {
    double minimax_envy = 0.0;
    double max_nash = 0.0;       // max product of bundle utilities
    double prop_fraction = 0.0;  // n * max egalitarian welfare
    double sum_max_envies = 0.0; // minimized over allocations
    bool ef_exists = false;
    bool mms_ok = false;
    /// Absent when n^m exceeds caps.efpo.
    std::optional<bool> efpo_exists;
    /// Max utilitarian welfare over enumerated allocations (cross-check of max_util).
    double max_util_enumerated = 0.0;
};

AllocationFeatures allocation_features(const UtilityMatrix& u, const FeatureCaps& caps = {});

double minimax_envy(const UtilityMatrix& u, const FeatureCaps& caps = {});
double max_nash(const UtilityMatrix& u, const FeatureCaps& caps = {});
double prop_fraction(const UtilityMatrix& u, const FeatureCaps& caps = {});
double sum_max_envies(const UtilityMatrix& u, const FeatureCaps& caps = {});
bool mms_ok(const UtilityMatrix& u, const FeatureCaps& caps = {});
/// Throws CapExceeded when n^m exceeds caps.efpo.
bool efpo_exists(const UtilityMatrix& u, const FeatureCaps& caps = {});

/// Sum over goods of the column maximum.
double max_util(const UtilityMatrix& u);

/// Relative mean absolute difference: sum_{a,b} |x_a - x_b| / (2 k^2 mean(x)); 0 if mean is 0.
double gini(std::span<const double> x);

struct MatrixFeatures {
    double max_demand = 0.0;
    double preference_diversity = 0.0;
    double demand_gini = 0.0;
    double pickiness = 0.0;
    double frac_single_minded = 0.0;
};

MatrixFeatures matrix_features(const UtilityMatrix& u);

/// Every feature of one instance. Allocation features that could not be computed are
/// absent and carry a reason.
struct FeatureRecord {
    std::string label;
    std::optional<double> minimax_envy, max_nash, prop_fraction, sum_max_envies;
    double max_util = 0.0;
    std::optional<bool> mms_ok, ef_exists, efpo_exists;
    MatrixFeatures matrix;
    std::map<std::string, std::string> absent_reasons;

    /// Numeric value of a named feature (booleans as 0/1); nullopt when absent.
    std::optional<double> value(const std::string& name) const;
};

/// Column order of the feature CSV.
const std::vector<std::string>& feature_names();
bool is_boolean_feature(const std::string& name);

FeatureRecord compute_features(const InstanceRecord& record, const FeatureCaps& caps = {});

std::vector<FeatureRecord> feature_table(const std::vector<InstanceRecord>& records,
                                         const FeatureCaps& caps = {}, unsigned threads = 0);

} // namespace fairmap
