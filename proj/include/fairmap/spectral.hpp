#pragma once

#include "fairmap/core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fairmap {

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted descending.
/// Iterates until the off-diagonal Frobenius norm drops below `off_tol`.
std::vector<double> jacobi_eigenvalues(Matrix sym, double off_tol = 1e-12);

/// All singular values of `a` (min(rows, cols) of them), descending, by one-sided
/// Jacobi rotations on the short side (cyclic Jacobi on the smaller Gram matrix).
std::vector<double> singular_values(const Matrix& a);

/// Position of an instance on the explicit map.
struct SpectralPoint {
    double sigma1 = 0.0;
    double sigma2 = 0.0;
};

SpectralPoint top_singular_values(const UtilityMatrix& u);

struct LabeledPoint {
    std::string label;
    SpectralPoint point;
};

std::vector<LabeledPoint> explicit_coords(const std::vector<InstanceRecord>& records,
                                          unsigned threads = 0);

/// One side of the map. `certificate` is the structural test (absent where none is
/// computed); `agrees` compares it with the spectral test: equality for the iff
/// characterizations (west, south, north), implication for east.
struct BoundarySide {
    bool tight = false;
    double residual = 0.0;
    std::optional<bool> certificate;
    bool agrees = true;
};

struct BoundaryReport {
    SpectralPoint point;
    BoundarySide west;  // sigma2 = 0          <=> identical rows
    BoundarySide south; // sigma1 = sqrt(n/m)  <=> all column sums n/m
    BoundarySide north; // s1^2 + s2^2 = n     <=> single-minded agents on <= 2 goods
    BoundarySide east;  // sigma1 = sigma2     <=  two isomorphic dominant blocks
};

BoundaryReport boundary_report(const UtilityMatrix& u, double tol = 1e-7);

/// Closed-form map positions of the characteristic corner instances
/// (IND, CON, WSEP, WSEPf, BIC) for shape n x m.
struct NamedPoint {
    std::string name;
    SpectralPoint point;
};
std::vector<NamedPoint> corner_coordinates(std::size_t n, std::size_t m);

enum class Boundary { West, South, North, East };
std::string to_string(Boundary side);
Boundary parse_boundary(const std::string& name);

/// Instances tracing one side of the map.
///  - west: convex combinations of IND and CON (`resolution` points)
///  - south: convex combinations of IND and WSEPf
///  - north: t agents single-minded on good 0 and n - t on good 1, t = 1..n-1
///    (resolution is not used; intermediate mixtures leave the boundary)
///  - east: WSEP -> SEP convex path, then r-step merges towards BIC with
///    `resolution` points per step
std::vector<UtilityMatrix> boundary_interpolation(Boundary side, std::size_t n, std::size_t m,
                                                  std::size_t resolution);

struct DirichletSample {
    double mean_sigma1_sq = 0.0;
    double std_error = 0.0;
    double max_sigma2 = 0.0;
    std::size_t count = 0;
};

/// Draws `count` flat-Dirichlet utility vectors of length m (normalized i.i.d.
/// exponentials, sample t from child stream t of `seed`), copies each to all n rows
/// and averages sigma1^2.
DirichletSample dirichlet_duplicated_sample(std::size_t n, std::size_t m, std::size_t count,
                                            std::uint64_t seed, unsigned threads = 0);

} // namespace fairmap
