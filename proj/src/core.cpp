#include "fairmap/core.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace fairmap {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw BadDimensions(rows_, r.size());
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix out(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != out.cols()) throw BadDimensions(rows.size(), rows[i].size());
        for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = rows[i][j];
    }
    return out;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

namespace {

std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void check_shape(const Matrix& raw) {
    const auto n = raw.rows();
    const auto m = raw.cols();
    if (n < 2 || m < n) throw BadDimensions(n, m);
}

void check_entries(const Matrix& raw) {
    for (std::size_t i = 0; i < raw.rows(); ++i)
        for (std::size_t j = 0; j < raw.cols(); ++j) {
            const double v = raw(i, j);
            if (!std::isfinite(v))
                throw ValidationError("NonFinite", "entry (" + std::to_string(i) + "," +
                                                       std::to_string(j) + ") is not finite");
            if (v < 0.0) throw NegativeEntry(i, j, v);
        }
}

double row_sum(const Matrix& raw, std::size_t i) {
    double s = 0.0;
    for (double v : raw.row(i)) s += v;
    return s;
}

} // namespace

BadDimensions::BadDimensions(std::size_t n_, std::size_t m_)
    : ValidationError("BadDimensions", "bad dimensions " + std::to_string(n_) + "x" +
                                           std::to_string(m_) + " (need m >= n >= 2)"),
      n(n_), m(m_) {}

NegativeEntry::NegativeEntry(std::size_t row_, std::size_t col_, double value)
    : ValidationError("NegativeEntry", "negative entry " + fmt_num(value) + " at (" +
                                           std::to_string(row_) + "," + std::to_string(col_) + ")"),
      row(row_), col(col_) {}

RowSumViolation::RowSumViolation(std::size_t row_, double actual_)
    : ValidationError("RowSumViolation",
                      "row " + std::to_string(row_) + " sums to " + fmt_num(actual_)),
      row(row_), actual(actual_) {}

ZeroRow::ZeroRow(std::size_t row_)
    : ValidationError("ZeroRow", "row " + std::to_string(row_) + " sums to zero"), row(row_) {}

UtilityMatrix validate(Matrix raw) {
    check_shape(raw);
    check_entries(raw);
    for (std::size_t i = 0; i < raw.rows(); ++i) {
        const double s = row_sum(raw, i);
        if (std::abs(s - 1.0) > kRowSumTolerance) throw RowSumViolation(i, s);
        // Rows already normalized to working precision are kept bit-for-bit.
        const double noise = static_cast<double>(raw.cols()) * std::numeric_limits<double>::epsilon();
        if (std::abs(s - 1.0) > noise)
            for (double& v : raw.row(i)) v /= s;
    }
    return UtilityMatrix(std::move(raw));
}

UtilityMatrix normalize_rows(Matrix raw) {
    check_shape(raw);
    check_entries(raw);
    for (std::size_t i = 0; i < raw.rows(); ++i) {
        const double s = row_sum(raw, i);
        if (s <= 0.0) throw ZeroRow(i);
        if (s != 1.0)
            for (double& v : raw.row(i)) v /= s;
    }
    return UtilityMatrix(std::move(raw));
}

std::string to_string(CharacteristicKind kind) {
    switch (kind) {
        case CharacteristicKind::IND: return "IND";
        case CharacteristicKind::SEP: return "SEP";
        case CharacteristicKind::CON: return "CON";
        case CharacteristicKind::WSEP: return "WSEP";
        case CharacteristicKind::WSEPf: return "WSEPf";
        case CharacteristicKind::BIC: return "BIC";
    }
    return "?";
}

std::optional<CharacteristicKind> parse_characteristic(const std::string& name) {
    for (auto k : {CharacteristicKind::IND, CharacteristicKind::SEP, CharacteristicKind::CON,
                   CharacteristicKind::WSEP, CharacteristicKind::WSEPf, CharacteristicKind::BIC})
        if (to_string(k) == name) return k;
    return std::nullopt;
}

std::string to_string(IidDist dist) {
    return dist == IidDist::Uniform01 ? "uniform" : "exponential";
}

std::optional<IidDist> parse_iid_dist(const std::string& name) {
    if (name == "uniform") return IidDist::Uniform01;
    if (name == "exponential") return IidDist::Exponential;
    return std::nullopt;
}

std::string source_category(const Source& source) {
    struct {
        std::string operator()(const CharacteristicSource&) const { return "characteristic"; }
        std::string operator()(const IidSource&) const { return "iid"; }
        std::string operator()(const AttributesSource&) const { return "attributes"; }
        std::string operator()(const ResamplingSource&) const { return "resampling"; }
        std::string operator()(const IngestedSource&) const { return "ingested"; }
    } visitor;
    return std::visit(visitor, source);
}

std::string describe(const Source& source) {
    struct {
        std::string operator()(const CharacteristicSource& s) const {
            return "characteristic(" + to_string(s.kind) + ")";
        }
        std::string operator()(const IidSource& s) const { return "iid(" + to_string(s.dist) + ")"; }
        std::string operator()(const AttributesSource& s) const {
            return "attributes(d=" + std::to_string(s.d) + ")";
        }
        std::string operator()(const ResamplingSource& s) const {
            std::ostringstream os;
            os << "resampling(p=" << s.p << ",phi=" << s.phi << ")";
            return os.str();
        }
        std::string operator()(const IngestedSource& s) const { return "ingested(" + s.name + ")"; }
    } visitor;
    return std::visit(visitor, source);
}

void check_source(const Source& source) {
    if (const auto* a = std::get_if<AttributesSource>(&source); a && a->d < 1)
        throw ValidationError("BadParameter", "attributes model needs d >= 1");
    if (const auto* r = std::get_if<ResamplingSource>(&source)) {
        auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
        if (!in_unit(r->p) || !in_unit(r->phi))
            throw ValidationError("BadParameter", "resampling p and phi must lie in [0,1]");
    }
}

InstanceRecord make_record(std::string label, UtilityMatrix matrix, Source source,
                           std::optional<std::uint64_t> seed) {
    check_source(source);
    return InstanceRecord{std::move(label), std::move(matrix), std::move(source), seed};
}

} // namespace fairmap
