#pragma once

#include "fairmap/core.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fairmap {

struct Assignment {
    /// permutation[row] = column matched to row.
    std::vector<std::size_t> permutation;
    double cost = 0.0;
};

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method with
/// potentials, O(k^3)). The reported cost is sum_j cost[j][permutation[j]].
Assignment hungarian_min_cost(const Matrix& cost);

/// Column j of `u` sorted in descending order.
std::vector<double> demand_vector(const Matrix& u, std::size_t good);

/// Min-cost matching of goods under l1 distance between demand vectors.
double demand_distance(const UtilityMatrix& a, const UtilityMatrix& b);

/// Best goods matching for the fixed agent matching a_i -> b_{agents[i]}.
double valuation_distance_fixed_agents(const UtilityMatrix& a, const UtilityMatrix& b,
                                       std::span<const std::size_t> agents);

inline constexpr std::size_t kDefaultExactAgentCap = 8;

/// Exact valuation distance: minimum entrywise l1 difference over all agent and good
/// permutations. Branch and bound over agent matchings; the goods matching at every node
/// is an assignment problem. Throws ExactSearchCapExceeded when n > agent_cap.
double valuation_distance(const UtilityMatrix& a, const UtilityMatrix& b,
                          std::size_t agent_cap = kDefaultExactAgentCap);

namespace detail {
// Raw-matrix versions without the row-stochastic / m >= n requirements. Shapes must match.
double demand_distance(const Matrix& a, const Matrix& b);
double valuation_distance_fixed_agents(const Matrix& a, const Matrix& b,
                                       std::span<const std::size_t> agents);
double valuation_distance(const Matrix& a, const Matrix& b, std::size_t agent_cap);
} // namespace detail

enum class Metric { Valuation, Demand };
std::string to_string(Metric metric);
Metric parse_metric(const std::string& name);

struct DistanceMatrix {
    std::vector<std::string> labels;
    Matrix d;
};

/// Upper bound 2n - 2n/m shared by both metrics.
double distance_upper_bound(std::size_t n, std::size_t m);

struct DistanceOptions {
    std::size_t agent_cap = kDefaultExactAgentCap;
    unsigned threads = 0;
};

/// All pairwise distances; entries are computed independently (parallel over pairs).
DistanceMatrix pairwise_distances(const std::vector<InstanceRecord>& instances, Metric metric,
                                  const DistanceOptions& options = {});

} // namespace fairmap
