#pragma once

#include "fairmap/errors.hpp"

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace fairmap {

/// Dense row-major matrix of doubles. Plain storage, no invariants.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::span<const double> data() const noexcept { return data_; }

    Matrix transposed() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Structured validation failures raised by validate / normalize_rows.

struct BadDimensions : ValidationError {
    BadDimensions(std::size_t n, std::size_t m);
    std::size_t n, m;
};

struct NegativeEntry : ValidationError {
    NegativeEntry(std::size_t row, std::size_t col, double value);
    std::size_t row, col;
};

struct RowSumViolation : ValidationError {
    RowSumViolation(std::size_t row, double actual);
    std::size_t row;
    double actual;
};

struct ZeroRow : ValidationError {
    explicit ZeroRow(std::size_t row);
    std::size_t row;
};

inline constexpr double kRowSumTolerance = 1e-9;

/// An n x m row-stochastic matrix with m >= n >= 2. Only constructible through
/// validate() or normalize_rows(), so every instance satisfies the invariants.
class UtilityMatrix {
public:
    std::size_t n() const noexcept { return values_.rows(); }
    std::size_t m() const noexcept { return values_.cols(); }

    double operator()(std::size_t agent, std::size_t good) const { return values_(agent, good); }
    std::span<const double> row(std::size_t agent) const { return values_.row(agent); }
    const Matrix& values() const noexcept { return values_; }

    friend bool operator==(const UtilityMatrix&, const UtilityMatrix&) = default;

private:
    explicit UtilityMatrix(Matrix values) : values_(std::move(values)) {}
    Matrix values_;

    friend UtilityMatrix validate(Matrix raw);
    friend UtilityMatrix normalize_rows(Matrix raw);
};

/// Checks shape, sign and row sums. Rows within kRowSumTolerance of 1 are divided by
/// their sum unless they already sum to 1 up to m * machine epsilon.
UtilityMatrix validate(Matrix raw);

/// Divides every row by its sum. Throws ZeroRow for rows summing to 0.
UtilityMatrix normalize_rows(Matrix raw);

// Instance provenance.

enum class CharacteristicKind { IND, SEP, CON, WSEP, WSEPf, BIC };
enum class IidDist { Uniform01, Exponential };

std::string to_string(CharacteristicKind kind);
std::optional<CharacteristicKind> parse_characteristic(const std::string& name);
std::string to_string(IidDist dist);
std::optional<IidDist> parse_iid_dist(const std::string& name);

struct CharacteristicSource {
    CharacteristicKind kind;
    friend bool operator==(const CharacteristicSource&, const CharacteristicSource&) = default;
};
struct IidSource {
    IidDist dist;
    friend bool operator==(const IidSource&, const IidSource&) = default;
};
struct AttributesSource {
    int d;
    friend bool operator==(const AttributesSource&, const AttributesSource&) = default;
};
struct ResamplingSource {
    double p;
    double phi;
    friend bool operator==(const ResamplingSource&, const ResamplingSource&) = default;
};
struct IngestedSource {
    std::string name;
    friend bool operator==(const IngestedSource&, const IngestedSource&) = default;
};

using Source = std::variant<CharacteristicSource, IidSource, AttributesSource, ResamplingSource,
                            IngestedSource>;

/// Short category name: "characteristic", "iid", "attributes", "resampling", "ingested".
std::string source_category(const Source& source);
/// Category plus parameters, e.g. "resampling(p=0.2,phi=0.8)".
std::string describe(const Source& source);
/// Throws ValidationError if the source parameters are out of range.
void check_source(const Source& source);

struct InstanceRecord {
    std::string label;
    UtilityMatrix matrix;
    Source source;
    std::optional<std::uint64_t> seed;
};

InstanceRecord make_record(std::string label, UtilityMatrix matrix, Source source,
                           std::optional<std::uint64_t> seed = std::nullopt);

} // namespace fairmap
