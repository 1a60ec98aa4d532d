#include "fairmap/spectral.hpp"

#include "fairmap/distance.hpp"
#include "fairmap/generators.hpp"
#include "fairmap/parallel.hpp"
#include "fairmap/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <cstdint>
#include <numeric>

namespace fairmap {

std::vector<double> jacobi_eigenvalues(Matrix a, double off_tol) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw ValidationError("NonSquare", "Jacobi needs a square matrix");
    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q)
                if (p != q) s += a(p, q) * a(p, q);
        return std::sqrt(s);
    };
    for (int sweep = 0; sweep < 100 && off_norm() >= off_tol; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end(), std::greater<>());
    return eig;
}

std::vector<double> singular_values(const Matrix& a) {
    // One-sided Jacobi: rotating pairs of rows of the short side is the cyclic Jacobi
    // sweep on the Gram matrix, applied implicitly. Singular values come out as row
    // norms, so zero singular values are not lost to the square root of round-off.
    Matrix w = a.rows() <= a.cols() ? a : a.transposed();
    const std::size_t k = w.rows(), len = w.cols();
    auto dot = [&](std::size_t p, std::size_t q) {
        double s = 0.0;
        for (std::size_t t = 0; t < len; ++t) s += w(p, t) * w(q, t);
        return s;
    };
    constexpr double rel_tol = 1e-15;
    for (int sweep = 0; sweep < 100; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < k; ++p) {
            for (std::size_t q = p + 1; q < k; ++q) {
                const double alpha = dot(p, p), beta = dot(q, q), gamma = dot(p, q);
                if (gamma == 0.0 || std::abs(gamma) <= rel_tol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t j = 0; j < len; ++j) {
                    const double wp = w(p, j), wq = w(q, j);
                    w(p, j) = c * wp - s * wq;
                    w(q, j) = s * wp + c * wq;
                }
            }
        }
        if (!rotated) break;
    }
    std::vector<double> sv(k);
    for (std::size_t i = 0; i < k; ++i) sv[i] = std::sqrt(dot(i, i));
    std::sort(sv.begin(), sv.end(), std::greater<>());
    return sv;
}

SpectralPoint top_singular_values(const UtilityMatrix& u) {
    const auto sv = singular_values(u.values());
    return {sv.at(0), sv.size() > 1 ? sv[1] : 0.0};
}

std::vector<LabeledPoint> explicit_coords(const std::vector<InstanceRecord>& records,
                                          unsigned threads) {
    std::vector<LabeledPoint> out(records.size());
    parallel_for(records.size(), threads, [&](std::size_t i) {
        out[i] = {records[i].label, top_singular_values(records[i].matrix)};
    });
    return out;
}

namespace {

bool identical_rows(const Matrix& u, double tol) {
    for (std::size_t i = 1; i < u.rows(); ++i)
        for (std::size_t j = 0; j < u.cols(); ++j)
            if (std::abs(u(i, j) - u(0, j)) > tol) return false;
    return true;
}

bool equal_column_sums(const Matrix& u, double tol) {
    const double target = static_cast<double>(u.rows()) / static_cast<double>(u.cols());
    for (std::size_t j = 0; j < u.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < u.rows(); ++i) s += u(i, j);
        if (std::abs(s - target) > tol) return false;
    }
    return true;
}

bool single_minded_on_two_goods(const Matrix& u, double tol) {
    std::vector<char> valued(u.cols(), 0);
    for (std::size_t i = 0; i < u.rows(); ++i) {
        const auto r = u.row(i);
        const auto top = std::max_element(r.begin(), r.end());
        if (*top < 1.0 - tol) return false;
        valued[static_cast<std::size_t>(top - r.begin())] = 1;
    }
    return std::count(valued.begin(), valued.end(), 1) <= 2;
}

struct Component {
    std::vector<std::size_t> agents;
    std::vector<std::size_t> goods;
    Matrix block;
    double sigma1 = 0.0;
};

// Connected components of the agent-good support graph; worthless goods are dropped.
std::vector<Component> support_components(const Matrix& u, double tol) {
    const std::size_t n = u.rows(), m = u.cols();
    std::vector<std::size_t> parent(n + m);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<char> good_used(m, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (u(i, j) > tol) {
                parent[find(i)] = find(n + j);
                good_used[j] = 1;
            }
    std::vector<Component> comps;
    std::vector<std::size_t> comp_of(n + m, SIZE_MAX);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = find(i);
        if (comp_of[root] == SIZE_MAX) {
            comp_of[root] = comps.size();
            comps.emplace_back();
        }
        comps[comp_of[root]].agents.push_back(i);
    }
    for (std::size_t j = 0; j < m; ++j)
        if (good_used[j]) comps[comp_of[find(n + j)]].goods.push_back(j);
    for (auto& c : comps) {
        c.block = Matrix(c.agents.size(), c.goods.size());
        for (std::size_t a = 0; a < c.agents.size(); ++a)
            for (std::size_t g = 0; g < c.goods.size(); ++g) c.block(a, g) = u(c.agents[a], c.goods[g]);
        c.sigma1 = singular_values(c.block).at(0);
    }
    return comps;
}

// Block form diag(A, A, B) with sigma1(A) >= sigma1(B): two isomorphic support
// components whose top singular value dominates every other component.
std::optional<bool> east_block_certificate(const Matrix& u, double tol) {
    const auto comps = support_components(u, tol);
    double top = 0.0;
    for (const auto& c : comps) top = std::max(top, c.sigma1);
    bool undecided = false;
    for (std::size_t x = 0; x < comps.size(); ++x) {
        if (comps[x].sigma1 < top - tol) continue;
        for (std::size_t y = x + 1; y < comps.size(); ++y) {
            const auto& a = comps[x].block;
            const auto& b = comps[y].block;
            if (a.rows() != b.rows() || a.cols() != b.cols()) continue;
            if (a.rows() > kDefaultExactAgentCap) {
                undecided = true;
                continue;
            }
            if (detail::valuation_distance(a, b, kDefaultExactAgentCap) <= tol) return true;
        }
    }
    if (undecided) return std::nullopt;
    return false;
}

} // namespace

BoundaryReport boundary_report(const UtilityMatrix& u, double tol) {
    BoundaryReport r;
    r.point = top_singular_values(u);
    const double n = static_cast<double>(u.n());
    const double m = static_cast<double>(u.m());
    const double s1 = r.point.sigma1, s2 = r.point.sigma2;

    auto fill = [tol](BoundarySide& side, double residual, std::optional<bool> cert, bool iff) {
        side.residual = residual;
        side.tight = residual <= tol;
        side.certificate = cert;
        if (cert) side.agrees = iff ? *cert == side.tight : (!*cert || side.tight);
    };
    fill(r.west, s2, identical_rows(u.values(), tol), true);
    fill(r.south, std::abs(s1 - std::sqrt(n / m)), equal_column_sums(u.values(), tol), true);
    fill(r.north, std::abs(s1 * s1 + s2 * s2 - n), single_minded_on_two_goods(u.values(), tol), true);
    fill(r.east, s1 - s2, east_block_certificate(u.values(), tol), false);
    return r;
}

std::vector<NamedPoint> corner_coordinates(std::size_t n, std::size_t m) {
    if (n < 2 || m < n) throw BadDimensions(n, m);
    const double nn = static_cast<double>(n), mm = static_cast<double>(m);
    const double ell = static_cast<double>(m / n);
    const double half = static_cast<double>(n / 2);
    return {
        {"IND", {std::sqrt(nn / mm), 0.0}},
        {"CON", {std::sqrt(nn), 0.0}},
        {"WSEP", {std::sqrt(1.0 / ell), std::sqrt(1.0 / ell)}},
        {"WSEPf", {std::sqrt(nn / mm), std::sqrt(ell) * nn / mm}},
        {"BIC", {std::sqrt(half), std::sqrt(half)}},
    };
}

std::string to_string(Boundary side) {
    switch (side) {
        case Boundary::West: return "west";
        case Boundary::South: return "south";
        case Boundary::North: return "north";
        case Boundary::East: return "east";
    }
    return "?";
}

Boundary parse_boundary(const std::string& name) {
    for (auto b : {Boundary::West, Boundary::South, Boundary::North, Boundary::East})
        if (to_string(b) == name) return b;
    throw ValidationError("UnknownBoundary", "unknown boundary '" + name + "'");
}

namespace {

Matrix mix(const Matrix& a, const Matrix& b, double theta) {
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = (1.0 - theta) * a(i, j) + theta * b(i, j);
    return out;
}

double step(std::size_t k, std::size_t resolution) {
    return static_cast<double>(k) / static_cast<double>(resolution - 1);
}

void convex_path(std::vector<UtilityMatrix>& out, const Matrix& from, const Matrix& to,
                 std::size_t resolution, bool skip_first) {
    for (std::size_t k = skip_first ? 1 : 0; k < resolution; ++k)
        out.push_back(validate(mix(from, to, step(k, resolution))));
}

// East path layout: agent k's private good is k*l. At merge stage r the even agents
// 0, 2, .., 2r-2 are single-minded on good 0 and the odd agents 1, .., 2r-1 on good l;
// agents k >= 2r keep their private good. Stage 1 is SEP (up to column order) and stage
// floor(n/2) is BIC.
Matrix merge_stage(std::size_t n, std::size_t m, std::size_t r, double theta) {
    const std::size_t ell = m / n;
    Matrix u(n, m);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t own = k * ell;
        const std::size_t shared = (k % 2 == 0) ? 0 : ell;
        if (k < 2 * r) {
            u(k, shared) = 1.0;
        } else if (k < 2 * r + 2 && theta > 0.0) {
            // Moving agents split between the shared good and their own.
            u(k, shared) += theta;
            u(k, own) += 1.0 - theta;
        } else {
            u(k, own) = 1.0;
        }
    }
    return u;
}

} // namespace

std::vector<UtilityMatrix> boundary_interpolation(Boundary side, std::size_t n, std::size_t m,
                                                  std::size_t resolution) {
    if (n < 2 || m < n) throw ValidationError("UnsupportedShape", "boundary paths need m >= n >= 2");
    if (resolution < 2) throw ValidationError("BadParameter", "resolution must be >= 2");
    std::vector<UtilityMatrix> out;
    switch (side) {
        case Boundary::West:
            convex_path(out, gen_characteristic(CharacteristicKind::IND, n, m).values(),
                        gen_characteristic(CharacteristicKind::CON, n, m).values(), resolution, false);
            break;
        case Boundary::South:
            convex_path(out, gen_characteristic(CharacteristicKind::IND, n, m).values(),
                        gen_characteristic(CharacteristicKind::WSEPf, n, m).values(), resolution,
                        false);
            break;
        case Boundary::North:
            for (std::size_t t = 1; t < n; ++t) {
                Matrix u(n, m);
                for (std::size_t i = 0; i < n; ++i) u(i, i < t ? 0 : 1) = 1.0;
                out.push_back(validate(std::move(u)));
            }
            break;
        case Boundary::East: {
            const Matrix wsep = gen_characteristic(CharacteristicKind::WSEP, n, m).values();
            convex_path(out, wsep, merge_stage(n, m, 1, 0.0), resolution, false);
            for (std::size_t r = 1; r < n / 2; ++r)
                for (std::size_t k = 1; k < resolution; ++k) {
                    const double theta = step(k, resolution);
                    out.push_back(validate(theta == 1.0 ? merge_stage(n, m, r + 1, 0.0)
                                                        : merge_stage(n, m, r, theta)));
                }
            break;
        }
    }
    return out;
}

DirichletSample dirichlet_duplicated_sample(std::size_t n, std::size_t m, std::size_t count,
                                            std::uint64_t seed, unsigned threads) {
    if (n < 2 || m < n) throw BadDimensions(n, m);
    if (count < 1) throw ValidationError("BadParameter", "count must be >= 1");
    std::vector<double> s1sq(count), s2(count);
    parallel_for(count, threads, [&](std::size_t t) {
        Rng rng = Rng::child(seed, t);
        std::vector<double> x(m);
        double sum = 0.0;
        while (sum <= 0.0) {
            sum = 0.0;
            for (auto& v : x) sum += (v = rng.exponential());
        }
        Matrix u(n, m);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) u(i, j) = x[j];
        const auto p = top_singular_values(normalize_rows(std::move(u)));
        s1sq[t] = p.sigma1 * p.sigma1;
        s2[t] = p.sigma2;
    });
    DirichletSample out;
    out.count = count;
    double sum = 0.0;
    for (double v : s1sq) sum += v;
    out.mean_sigma1_sq = sum / static_cast<double>(count);
    if (count > 1) {
        double ss = 0.0;
        for (double v : s1sq) ss += (v - out.mean_sigma1_sq) * (v - out.mean_sigma1_sq);
        out.std_error = std::sqrt(ss / static_cast<double>(count - 1) / static_cast<double>(count));
    }
    out.max_sigma2 = *std::max_element(s2.begin(), s2.end());
    return out;
}

} // namespace fairmap
