#include "fairmap/embedding.hpp"

#include "fairmap/parallel.hpp"
#include "fairmap/rng.hpp"

#include <cmath>

namespace fairmap {

namespace {

double dist(const Point2& a, const Point2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

void validate_distances(const DistanceMatrix& d) {
    const std::size_t k = d.d.rows();
    if (d.d.cols() != k || d.labels.size() != k)
        throw ValidationError("ShapeMismatch", "distance matrix must be square with one label per row");
    if (k < 2) throw ValidationError("BadDimensions", "embedding needs at least two instances");
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const double v = d.d(i, j);
            if (!std::isfinite(v) || v < 0.0)
                throw ValidationError("BadDistance", "distances must be finite and nonnegative");
            if (v != d.d(j, i)) throw ValidationError("BadDistance", "distance matrix is not symmetric");
        }
}

void canonicalize(std::vector<Point2>& x) {
    Point2 c{0.0, 0.0};
    for (const auto& p : x) {
        c[0] += p[0];
        c[1] += p[1];
    }
    c[0] /= static_cast<double>(x.size());
    c[1] /= static_cast<double>(x.size());
    std::size_t far = 0;
    double far_norm = -1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i][0] -= c[0];
        x[i][1] -= c[1];
        const double r = std::hypot(x[i][0], x[i][1]);
        if (r > far_norm) {
            far_norm = r;
            far = i;
        }
    }
    if (far_norm <= 0.0) return;
    const double angle = std::atan2(x[far][1], x[far][0]);
    const double cs = std::cos(-angle), sn = std::sin(-angle);
    for (auto& p : x) p = {cs * p[0] - sn * p[1], sn * p[0] + cs * p[1]};
    x[far][1] = 0.0;
}

Embedding smacof(const DistanceMatrix& d, std::uint64_t seed, std::size_t max_iters, double tol) {
    const std::size_t k = d.d.rows();
    Embedding out;
    out.labels = d.labels;

    bool all_zero = true;
    for (double v : d.d.data()) all_zero = all_zero && v == 0.0;
    if (all_zero) {
        out.points.assign(k, Point2{0.0, 0.0});
        out.degenerate = true;
        out.stress_trace = {0.0};
        return out;
    }

    Rng rng(seed);
    std::vector<Point2> x(k);
    for (auto& p : x) p = {2.0 * rng.uniform01() - 1.0, 2.0 * rng.uniform01() - 1.0};

    double current = stress(d.d, x);
    out.stress_trace.push_back(current);
    std::vector<Point2> next(k);
    for (std::size_t it = 0; it < max_iters && current > 0.0; ++it) {
        // Guttman transform: x <- B(x) x / k.
        for (std::size_t i = 0; i < k; ++i) {
            Point2 acc{0.0, 0.0};
            for (std::size_t j = 0; j < k; ++j) {
                if (j == i) continue;
                const double dij = dist(x[i], x[j]);
                if (dij <= 0.0) continue;
                const double w = d.d(i, j) / dij;
                acc[0] += w * (x[i][0] - x[j][0]);
                acc[1] += w * (x[i][1] - x[j][1]);
            }
            next[i] = {acc[0] / static_cast<double>(k), acc[1] / static_cast<double>(k)};
        }
        // Centroid of x is preserved up to round-off; B(x) x is centred by construction.
        x.swap(next);
        const double updated = stress(d.d, x);
        out.stress_trace.push_back(updated);
        out.iterations = it + 1;
        const double improvement = (current - updated) / current;
        current = updated;
        if (improvement < tol) break;
    }
    canonicalize(x);
    out.points = std::move(x);
    out.stress = stress(d.d, out.points);
    return out;
}

} // namespace

double stress(const Matrix& d, std::span<const Point2> points) {
    if (d.rows() != points.size() || d.cols() != points.size())
        throw ValidationError("ShapeMismatch", "stress: distance matrix and point count differ");
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const double r = d(i, j) - dist(points[i], points[j]);
            s += r * r;
        }
    return s;
}

Embedding mds_embed(const DistanceMatrix& d, const MdsOptions& options) {
    validate_distances(d);
    if (options.max_iters < 1) throw ValidationError("BadParameter", "max_iters must be >= 1");
    if (!(options.tol > 0.0)) throw ValidationError("BadParameter", "tol must be positive");
    if (options.restarts < 1) throw ValidationError("BadParameter", "restarts must be >= 1");
    if (options.restarts == 1) return smacof(d, options.seed, options.max_iters, options.tol);

    std::vector<Embedding> runs(options.restarts);
    parallel_for(options.restarts, options.threads, [&](std::size_t r) {
        runs[r] = smacof(d, child_seed(options.seed, r), options.max_iters, options.tol);
    });
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].stress < runs[best].stress) best = r;
    return std::move(runs[best]);
}

} // namespace fairmap
