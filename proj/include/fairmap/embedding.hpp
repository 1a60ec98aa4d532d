#pragma once

#include "fairmap/distance.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fairmap {

using Point2 = std::array<double, 2>;

struct Embedding {
    std::vector<std::string> labels;
    std::vector<Point2> points;
    /// Raw stress sum_{i<j} (d_ij - |x_i - x_j|)^2 of `points`.
    double stress = 0.0;
    std::size_t iterations = 0;
    /// Stress of the initial layout followed by the stress after every iteration.
    std::vector<double> stress_trace;
    /// Set when every target distance is zero; all points sit at the origin.
    bool degenerate = false;
};

struct MdsOptions {
    std::uint64_t seed = 0;
    std::size_t max_iters = 10000;
    /// Stop once the relative stress improvement of an iteration falls below this.
    double tol = 1e-9;
    /// Independent starts; the lowest final stress wins. Start r uses child_seed(seed, r)
    /// when restarts > 1.
    std::size_t restarts = 1;
    unsigned threads = 0;
};

double stress(const Matrix& d, std::span<const Point2> points);

/// Metric MDS by SMACOF majorization (unit weights, Guttman transform) from a seeded
/// uniform start in [-1,1]^2. Output is centred and rotated so the point of largest
/// norm lies on the positive x axis.
Embedding mds_embed(const DistanceMatrix& d, const MdsOptions& options = {});

} // namespace fairmap
