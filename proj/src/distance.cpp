#include "fairmap/distance.hpp"

#include "fairmap/numeric.hpp"
#include "fairmap/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace fairmap {

namespace {

// Utilities in [0, 1] as integers in units of 2^-100. Every comparison made while
// searching for an optimal matching is then exact; only the bits of an entry below
// 2^-100 are lost, so two matchings whose real costs differ by less than
// (terms) * 2^-100 may be ranked as equal.
using Fixed = __int128;
constexpr int kFixedBits = 100;
constexpr Fixed kFixedInf = Fixed(1) << 125;

Fixed to_fixed(double x) { return static_cast<Fixed>(std::ldexp(x, kFixedBits)); }

Fixed fixed_abs(Fixed x) { return x < 0 ? -x : x; }

class FixedMatrix {
public:
    FixedMatrix() = default;
    FixedMatrix(std::size_t r, std::size_t c) : rows_(r), cols_(c), data_(r * c, 0) {}
    explicit FixedMatrix(const Matrix& m) : FixedMatrix(m.rows(), m.cols()) {
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = to_fixed(m(i, j));
    }
    Fixed& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    Fixed operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Fixed> data_;
};

// Hungarian method with potentials; returns permutation[row] = column.
template <class Cost, class At>
std::vector<std::size_t> hungarian(std::size_t k, Cost inf, At cost) {
    std::vector<std::size_t> perm(k, 0);
    if (k == 0) return perm;
    // 1-based potentials; column 0 is a virtual source.
    std::vector<Cost> row_pot(k + 1, 0), col_pot(k + 1, 0), min_slack(k + 1);
    std::vector<std::size_t> match(k + 1, 0), way(k + 1, 0);
    std::vector<char> used(k + 1);
    for (std::size_t i = 1; i <= k; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::fill(min_slack.begin(), min_slack.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            Cost delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= k; ++j) {
                if (used[j]) continue;
                const Cost cur = cost(i0 - 1, j - 1) - row_pot[i0] - col_pot[j];
                if (cur < min_slack[j]) {
                    min_slack[j] = cur;
                    way[j] = j0;
                }
                if (min_slack[j] < delta) {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= k; ++j) {
                if (used[j]) {
                    row_pot[match[j]] += delta;
                    col_pot[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    for (std::size_t j = 1; j <= k; ++j) perm[match[j] - 1] = j - 1;
    return perm;
}

Fixed fixed_assignment(const FixedMatrix& cost, std::vector<std::size_t>* perm_out = nullptr) {
    auto perm = hungarian(cost.rows(), kFixedInf, [&](std::size_t i, std::size_t j) { return cost(i, j); });
    Fixed total = 0;
    for (std::size_t r = 0; r < perm.size(); ++r) total += cost(r, perm[r]);
    if (perm_out) *perm_out = std::move(perm);
    return total;
}

// Correctly rounded sum of |x - y| over the given pairs: each difference enters as
// its two exact addends.
class AbsDiffSum {
public:
    void add(double x, double y) {
        if (x < y) std::swap(x, y);
        sum_.add(x);
        sum_.add(-y);
    }
    double value() const { return sum_.value(); }

private:
    ExactSum sum_;
};

} // namespace

Assignment hungarian_min_cost(const Matrix& cost) {
    const std::size_t k = cost.rows();
    if (cost.cols() != k)
        throw ValidationError("NonSquare", "cost matrix is " + std::to_string(cost.rows()) + "x" +
                                               std::to_string(cost.cols()));
    for (double c : cost.data())
        if (!std::isfinite(c)) throw ValidationError("NonFinite", "cost matrix has a non-finite entry");

    Assignment out;
    out.permutation = hungarian(k, std::numeric_limits<double>::infinity(),
                                [&](std::size_t i, std::size_t j) { return cost(i, j); });
    ExactSum total;
    for (std::size_t r = 0; r < k; ++r) total.add(cost(r, out.permutation[r]));
    out.cost = total.value();
    return out;
}

std::vector<double> demand_vector(const Matrix& u, std::size_t good) {
    std::vector<double> v(u.rows());
    for (std::size_t i = 0; i < u.rows(); ++i) v[i] = u(i, good);
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ValidationError("ShapeMismatch", "instances have shapes " + std::to_string(a.rows()) +
                                                   "x" + std::to_string(a.cols()) + " and " +
                                                   std::to_string(b.rows()) + "x" +
                                                   std::to_string(b.cols()));
}

Fixed fixed_l1(std::span<const Fixed> x, std::span<const Fixed> y) {
    Fixed s = 0;
    for (std::size_t t = 0; t < x.size(); ++t) s += fixed_abs(x[t] - y[t]);
    return s;
}

// Both metrics are symmetric in their arguments; evaluating them on a canonical
// argument order makes the floating-point result symmetric too.
bool swap_arguments(const Matrix& a, const Matrix& b) {
    const auto da = a.data();
    const auto db = b.data();
    return std::lexicographical_compare(db.begin(), db.end(), da.begin(), da.end());
}

void check_permutation(std::span<const std::size_t> perm, std::size_t n) {
    if (perm.size() != n) throw ValidationError("BadPermutation", "agent matching has wrong length");
    std::vector<char> seen(n, 0);
    for (std::size_t p : perm) {
        if (p >= n || seen[p]) throw ValidationError("BadPermutation", "agent matching is not a permutation");
        seen[p] = 1;
    }
}

// Best goods matching for a fixed agent matching.
Fixed match_goods(const FixedMatrix& a, const FixedMatrix& b, std::span<const std::size_t> agents,
                  std::vector<std::size_t>* goods) {
    const std::size_t m = a.cols();
    FixedMatrix cost(m, m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t jj = 0; jj < m; ++jj) {
            Fixed s = 0;
            for (std::size_t i = 0; i < a.rows(); ++i) s += fixed_abs(a(i, j) - b(agents[i], jj));
            cost(j, jj) = s;
        }
    return fixed_assignment(cost, goods);
}

double matched_l1(const Matrix& a, const Matrix& b, std::span<const std::size_t> agents,
                  std::span<const std::size_t> goods) {
    AbsDiffSum total;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) total.add(a(i, j), b(agents[i], goods[j]));
    return total.value();
}

double fixed_agents_unchecked(const Matrix& a, const Matrix& b, std::span<const std::size_t> agents) {
    std::vector<std::size_t> goods;
    match_goods(FixedMatrix(a), FixedMatrix(b), agents, &goods);
    return matched_l1(a, b, agents, goods);
}

// Depth-first branch and bound over agent matchings. Agents of `a` are committed in a
// fixed order; a node's bound is the assignment problem over goods whose cost adds the
// committed rows' l1 differences to the sorted-column l1 difference of the remaining
// rows (the demand distance restricted to uncommitted agents). Both parts can only
// grow under any completion, so the bound is admissible, and in fixed point it is
// exactly so.
class ValuationSearch {
public:
    ValuationSearch(const Matrix& a, const Matrix& b) : a_(a), b_(b), n_(a.rows()), m_(a.cols()) {
        order_.resize(n_);
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::vector<double> spread(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            const auto r = a.row(i);
            const double mu = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(m_);
            double var = 0.0;
            for (double x : r) var += (x - mu) * (x - mu);
            spread[i] = var;
        }
        std::stable_sort(order_.begin(), order_.end(),
                         [&](std::size_t x, std::size_t y) { return spread[x] > spread[y]; });

        // Sorted columns of `a` over agents order_[k..n).
        sorted_a_.resize(n_ + 1);
        for (std::size_t k = 0; k <= n_; ++k) {
            sorted_a_[k].resize(m_);
            for (std::size_t j = 0; j < m_; ++j) {
                auto& col = sorted_a_[k][j];
                for (std::size_t t = k; t < n_; ++t) col.push_back(fa_(order_[t], j));
                std::sort(col.begin(), col.end(), std::greater<>());
            }
        }
        committed_.assign(n_ + 1, FixedMatrix(m_, m_));
        used_.assign(n_, 0);
        assigned_.assign(n_, 0);
    }

    double run() {
        root_bound_ = bound(0, committed_[0]);
        dfs(0);
        std::vector<std::size_t> goods;
        match_goods(fa_, fb_, best_agents_, &goods);
        return matched_l1(a_, b_, best_agents_, goods);
    }

private:
    Fixed bound(std::size_t depth, const FixedMatrix& committed, std::size_t extra_used = SIZE_MAX) const {
        // Sorted columns of `b` over agents still free after this node.
        std::vector<std::vector<Fixed>> free_cols(m_);
        for (std::size_t jj = 0; jj < m_; ++jj) {
            auto& col = free_cols[jj];
            for (std::size_t c = 0; c < n_; ++c)
                if (!used_[c] && c != extra_used) col.push_back(fb_(c, jj));
            std::sort(col.begin(), col.end(), std::greater<>());
        }
        FixedMatrix cost(m_, m_);
        for (std::size_t j = 0; j < m_; ++j)
            for (std::size_t jj = 0; jj < m_; ++jj)
                cost(j, jj) = committed(j, jj) + fixed_l1(sorted_a_[depth][j], free_cols[jj]);
        return fixed_assignment(cost);
    }

    void dfs(std::size_t depth) {
        if (done_) return;
        if (depth == n_) {
            const Fixed value = match_goods(fa_, fb_, assigned_, nullptr);
            if (value < best_) {
                best_ = value;
                best_agents_ = assigned_;
            }
            if (best_ == root_bound_) done_ = true;
            return;
        }
        const std::size_t agent = order_[depth];
        struct Child {
            Fixed lb;
            std::size_t target;
        };
        std::vector<Child> children;
        std::vector<FixedMatrix> child_committed;
        for (std::size_t c = 0; c < n_; ++c) {
            if (used_[c]) continue;
            FixedMatrix next = committed_[depth];
            for (std::size_t j = 0; j < m_; ++j)
                for (std::size_t jj = 0; jj < m_; ++jj) next(j, jj) += fixed_abs(fa_(agent, j) - fb_(c, jj));
            const Fixed lb = depth + 1 == n_ ? 0 : bound(depth + 1, next, c);
            children.push_back({lb, c});
            child_committed.push_back(std::move(next));
        }
        std::vector<std::size_t> idx(children.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t x, std::size_t y) { return children[x].lb < children[y].lb; });
        for (std::size_t k : idx) {
            if (done_) return;
            if (children[k].lb >= best_) continue;
            const std::size_t c = children[k].target;
            used_[c] = 1;
            assigned_[agent] = c;
            committed_[depth + 1] = child_committed[k];
            dfs(depth + 1);
            used_[c] = 0;
        }
    }

    const Matrix& a_;
    const Matrix& b_;
    std::size_t n_, m_;
    FixedMatrix fa_{a_}, fb_{b_};
    std::vector<std::size_t> order_;
    std::vector<std::vector<std::vector<Fixed>>> sorted_a_;
    std::vector<FixedMatrix> committed_;
    std::vector<char> used_;
    std::vector<std::size_t> assigned_, best_agents_;
    Fixed best_ = kFixedInf;
    Fixed root_bound_ = 0;
    bool done_ = false;
};

} // namespace

namespace detail {

double demand_distance(const Matrix& a_in, const Matrix& b_in) {
    require_same_shape(a_in, b_in);
    const bool swap = swap_arguments(a_in, b_in);
    const Matrix& a = swap ? b_in : a_in;
    const Matrix& b = swap ? a_in : b_in;
    const std::size_t m = a.cols();
    std::vector<std::vector<double>> da(m), db(m);
    std::vector<std::vector<Fixed>> fa(m), fb(m);
    for (std::size_t j = 0; j < m; ++j) {
        da[j] = demand_vector(a, j);
        db[j] = demand_vector(b, j);
        for (double x : da[j]) fa[j].push_back(to_fixed(x));
        for (double x : db[j]) fb[j].push_back(to_fixed(x));
    }
    FixedMatrix cost(m, m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t jj = 0; jj < m; ++jj) cost(j, jj) = fixed_l1(fa[j], fb[jj]);
    std::vector<std::size_t> perm;
    fixed_assignment(cost, &perm);
    AbsDiffSum total;
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < a.rows(); ++i) total.add(da[j][i], db[perm[j]][i]);
    return total.value();
}

double valuation_distance_fixed_agents(const Matrix& a, const Matrix& b,
                                       std::span<const std::size_t> agents) {
    require_same_shape(a, b);
    check_permutation(agents, a.rows());
    return fixed_agents_unchecked(a, b, agents);
}

double valuation_distance(const Matrix& a_in, const Matrix& b_in, std::size_t agent_cap) {
    require_same_shape(a_in, b_in);
    if (a_in.rows() > agent_cap)
        throw CapExceededError("ExactSearchCapExceeded",
                               "exact valuation distance needs n <= " + std::to_string(agent_cap) +
                                   ", got n = " + std::to_string(a_in.rows()) +
                                   " (use the demand metric)");
    if (a_in.rows() == 0 || a_in.cols() == 0) return 0.0;
    const bool swap = swap_arguments(a_in, b_in);
    return ValuationSearch(swap ? b_in : a_in, swap ? a_in : b_in).run();
}

} // namespace detail


double demand_distance(const UtilityMatrix& a, const UtilityMatrix& b) {
    return detail::demand_distance(a.values(), b.values());
}

double valuation_distance_fixed_agents(const UtilityMatrix& a, const UtilityMatrix& b,
                                       std::span<const std::size_t> agents) {
    return detail::valuation_distance_fixed_agents(a.values(), b.values(), agents);
}

double valuation_distance(const UtilityMatrix& a, const UtilityMatrix& b, std::size_t agent_cap) {
    return detail::valuation_distance(a.values(), b.values(), agent_cap);
}

std::string to_string(Metric metric) { return metric == Metric::Valuation ? "valuation" : "demand"; }

Metric parse_metric(const std::string& name) {
    if (name == "valuation") return Metric::Valuation;
    if (name == "demand") return Metric::Demand;
    throw ValidationError("UnknownMetric", "unknown metric '" + name + "'");
}

double distance_upper_bound(std::size_t n, std::size_t m) {
    const double nn = static_cast<double>(n);
    return 2.0 * nn - 2.0 * nn / static_cast<double>(m);
}

DistanceMatrix pairwise_distances(const std::vector<InstanceRecord>& instances, Metric metric,
                                  const DistanceOptions& options) {
    const std::size_t k = instances.size();
    DistanceMatrix out;
    out.d = Matrix(k, k);
    for (const auto& r : instances) out.labels.push_back(r.label);
    if (k == 0) return out;

    const std::size_t n = instances.front().matrix.n();
    const std::size_t m = instances.front().matrix.m();
    for (const auto& r : instances)
        if (r.matrix.n() != n || r.matrix.m() != m)
            throw ValidationError("ShapeMismatch", "instance '" + r.label + "' is " +
                                                       std::to_string(r.matrix.n()) + "x" +
                                                       std::to_string(r.matrix.m()) + ", expected " +
                                                       std::to_string(n) + "x" + std::to_string(m));
    if (metric == Metric::Valuation && n > options.agent_cap)
        throw CapExceededError("ExactSearchCapExceeded",
                               "exact valuation distance needs n <= " +
                                   std::to_string(options.agent_cap) + ", got n = " +
                                   std::to_string(n) + " (use the demand metric)");

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(k * (k - 1) / 2);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
    std::vector<double> values(pairs.size());
    parallel_for(pairs.size(), options.threads, [&](std::size_t p) {
        const auto& a = instances[pairs[p].first].matrix;
        const auto& b = instances[pairs[p].second].matrix;
        values[p] = metric == Metric::Valuation ? valuation_distance(a, b, options.agent_cap)
                                                : demand_distance(a, b);
    });
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        out.d(pairs[p].first, pairs[p].second) = values[p];
        out.d(pairs[p].second, pairs[p].first) = values[p];
    }
    return out;
}

} // namespace fairmap
