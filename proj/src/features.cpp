#include "fairmap/features.hpp"

#include "fairmap/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fairmap {

std::uint64_t allocation_count(std::size_t n, std::size_t m) {
    std::uint64_t count = 1;
    for (std::size_t j = 0; j < m; ++j) {
        if (n != 0 && count > std::numeric_limits<std::uint64_t>::max() / n)
            return std::numeric_limits<std::uint64_t>::max();
        count *= n;
    }
    return count;
}

namespace {

void check_cap(std::size_t n, std::size_t m, std::uint64_t cap, const char* what) {
    if (allocation_count(n, m) > cap)
        throw CapExceededError("CapExceeded", std::string(what) + ": " + std::to_string(n) + "^" +
                                                  std::to_string(m) + " allocations exceed cap " +
                                                  std::to_string(cap));
}

// Depth-first enumeration that carries the bundle table t(i, k) = u_i(S_k). Level j+1
// differs from level j only in the column of good j's owner; sums therefore accumulate
// in ascending good order, exactly like a fresh left-to-right bundle sum.
template <class Visit>
class BundleWalker {
public:
    BundleWalker(const UtilityMatrix& u, Visit& visit)
        : u_(u), visit_(visit), n_(u.n()), m_(u.m()), owner_(m_), tables_(m_ + 1, std::vector<double>(n_ * n_, 0.0)) {}

    void run() { descend(0); }

private:
    void descend(std::size_t j) {
        if (j == m_) {
            visit_(std::span<const std::size_t>(owner_), std::span<const double>(tables_[m_]));
            return;
        }
        for (std::size_t o = 0; o < n_; ++o) {
            owner_[j] = o;
            auto& next = tables_[j + 1];
            next = tables_[j];
            for (std::size_t i = 0; i < n_; ++i) next[i * n_ + o] += u_(i, j);
            descend(j + 1);
        }
    }

    const UtilityMatrix& u_;
    Visit& visit_;
    std::size_t n_, m_;
    std::vector<std::size_t> owner_;
    std::vector<std::vector<double>> tables_;
};

template <class Visit>
void walk_bundles(const UtilityMatrix& u, Visit&& visit) {
    BundleWalker<std::remove_reference_t<Visit>> walker(u, visit);
    walker.run();
}

bool pareto_dominated(std::span<const double> x, const std::vector<double>& all, std::size_t n) {
    const std::size_t count = all.size() / n;
    for (std::size_t a = 0; a < count; ++a) {
        const double* y = all.data() + a * n;
        bool weak = true, strict = false;
        for (std::size_t i = 0; i < n && weak; ++i) {
            weak = y[i] >= x[i] - kFeatureTolerance;
            strict = strict || y[i] > x[i] + kFeatureTolerance;
        }
        if (weak && strict) return true;
    }
    return false;
}

} // namespace

void enumerate_allocations(std::size_t n, std::size_t m, std::uint64_t cap,
                           const std::function<void(std::span<const std::size_t>)>& visit) {
    check_cap(n, m, cap, "enumerate_allocations");
    std::vector<std::size_t> owner(m, 0);
    if (n == 0) return;
    for (;;) {
        visit(owner);
        std::size_t j = m;
        while (j > 0) {
            --j;
            if (++owner[j] < n) break;
            owner[j] = 0;
            if (j == 0) return;
        }
        if (m == 0) return;
    }
}

AllocationFeatures allocation_features(const UtilityMatrix& u, const FeatureCaps& caps) {
    const std::size_t n = u.n();
    check_cap(n, u.m(), caps.enumeration, "allocation features");
    const bool keep_for_pareto = allocation_count(n, u.m()) <= caps.efpo;

    constexpr double inf = std::numeric_limits<double>::infinity();
    AllocationFeatures f;
    f.minimax_envy = inf;
    f.sum_max_envies = inf;
    f.max_nash = -inf;
    f.max_util_enumerated = -inf;
    double max_egal = -inf;
    std::vector<double> mms_share(n, -inf);
    std::vector<double> diagonals; // bundle utility vectors of every allocation
    std::vector<std::size_t> envy_free;  // indices into diagonals

    std::size_t index = 0;
    walk_bundles(u, [&](std::span<const std::size_t>, std::span<const double> t) {
        double worst_envy = -inf, envy_sum = 0.0, nash = 1.0, egal = inf, welfare = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double own = t[i * n + i];
            double agent_envy = -inf, worst_part = inf;
            for (std::size_t k = 0; k < n; ++k) {
                worst_part = std::min(worst_part, t[i * n + k]);
                if (k != i) agent_envy = std::max(agent_envy, t[i * n + k] - own);
            }
            worst_envy = std::max(worst_envy, agent_envy);
            envy_sum += agent_envy;
            nash *= own;
            egal = std::min(egal, own);
            welfare += own;
            mms_share[i] = std::max(mms_share[i], worst_part);
        }
        f.minimax_envy = std::min(f.minimax_envy, worst_envy);
        f.sum_max_envies = std::min(f.sum_max_envies, envy_sum);
        f.max_nash = std::max(f.max_nash, nash);
        f.max_util_enumerated = std::max(f.max_util_enumerated, welfare);
        max_egal = std::max(max_egal, egal);
        if (keep_for_pareto) {
            for (std::size_t i = 0; i < n; ++i) diagonals.push_back(t[i * n + i]);
            if (worst_envy <= kFeatureTolerance) envy_free.push_back(index);
        }
        ++index;
    });
    f.prop_fraction = static_cast<double>(n) * max_egal;
    f.ef_exists = f.minimax_envy <= kFeatureTolerance;

    // Second pass: is some allocation MMS for everyone at once?
    walk_bundles(u, [&](std::span<const std::size_t>, std::span<const double> t) {
        if (f.mms_ok) return;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) ok = t[i * n + i] >= mms_share[i] - kFeatureTolerance;
        f.mms_ok = ok;
    });

    if (keep_for_pareto) {
        bool found = false;
        for (std::size_t a : envy_free) {
            std::span<const double> x(diagonals.data() + a * n, n);
            if (!pareto_dominated(x, diagonals, n)) {
                found = true;
                break;
            }
        }
        f.efpo_exists = found;
    }
    return f;
}

double minimax_envy(const UtilityMatrix& u, const FeatureCaps& caps) {
    return allocation_features(u, caps).minimax_envy;
}
double max_nash(const UtilityMatrix& u, const FeatureCaps& caps) {
    return allocation_features(u, caps).max_nash;
}
double prop_fraction(const UtilityMatrix& u, const FeatureCaps& caps) {
    return allocation_features(u, caps).prop_fraction;
}
double sum_max_envies(const UtilityMatrix& u, const FeatureCaps& caps) {
    return allocation_features(u, caps).sum_max_envies;
}
bool mms_ok(const UtilityMatrix& u, const FeatureCaps& caps) {
    return allocation_features(u, caps).mms_ok;
}
bool efpo_exists(const UtilityMatrix& u, const FeatureCaps& caps) {
    check_cap(u.n(), u.m(), caps.efpo, "efpo_exists");
    return *allocation_features(u, caps).efpo_exists;
}

double max_util(const UtilityMatrix& u) {
    double total = 0.0;
    for (std::size_t j = 0; j < u.m(); ++j) {
        double best = 0.0;
        for (std::size_t i = 0; i < u.n(); ++i) best = std::max(best, u(i, j));
        total += best;
    }
    return total;
}

double gini(std::span<const double> x) {
    if (x.empty()) return 0.0;
    double sum = 0.0;
    for (double v : x) sum += v;
    const double k = static_cast<double>(x.size());
    const double mu = sum / k;
    if (mu == 0.0) return 0.0;
    double diff = 0.0;
    for (double a : x)
        for (double b : x) diff += std::abs(a - b);
    return diff / (2.0 * k * k * mu);
}

MatrixFeatures matrix_features(const UtilityMatrix& u) {
    const std::size_t n = u.n(), m = u.m();
    MatrixFeatures f;
    std::vector<double> demand(m, 0.0);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < n; ++i) demand[j] += u(i, j);
    f.max_demand = *std::max_element(demand.begin(), demand.end());
    f.demand_gini = gini(demand);

    double dist_sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += (u(a, j) - u(b, j)) * (u(a, j) - u(b, j));
            dist_sum += std::sqrt(s);
            ++pairs;
        }
    f.preference_diversity = pairs == 0 ? 0.0 : dist_sum / static_cast<double>(pairs);

    double pick = 0.0;
    std::size_t single = 0;
    for (std::size_t i = 0; i < n; ++i) {
        pick += gini(u.row(i));
        const auto r = u.row(i);
        if (std::count_if(r.begin(), r.end(), [](double v) { return v > kFeatureTolerance; }) == 1)
            ++single;
    }
    f.pickiness = pick / static_cast<double>(n);
    f.frac_single_minded = static_cast<double>(single) / static_cast<double>(n);
    return f;
}

const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = {
        "minimax_envy", "max_nash",   "max_util",   "prop_fraction",        "sum_max_envies",
        "mms_ok",       "ef_exists",  "efpo_exists", "max_demand",          "preference_diversity",
        "demand_gini",  "pickiness",  "frac_single_minded"};
    return names;
}

bool is_boolean_feature(const std::string& name) {
    return name == "mms_ok" || name == "ef_exists" || name == "efpo_exists";
}

std::optional<double> FeatureRecord::value(const std::string& name) const {
    auto flag = [](const std::optional<bool>& b) -> std::optional<double> {
        if (!b) return std::nullopt;
        return *b ? 1.0 : 0.0;
    };
    if (name == "minimax_envy") return minimax_envy;
    if (name == "max_nash") return max_nash;
    if (name == "max_util") return max_util;
    if (name == "prop_fraction") return prop_fraction;
    if (name == "sum_max_envies") return sum_max_envies;
    if (name == "mms_ok") return flag(mms_ok);
    if (name == "ef_exists") return flag(ef_exists);
    if (name == "efpo_exists") return flag(efpo_exists);
    if (name == "max_demand") return matrix.max_demand;
    if (name == "preference_diversity") return matrix.preference_diversity;
    if (name == "demand_gini") return matrix.demand_gini;
    if (name == "pickiness") return matrix.pickiness;
    if (name == "frac_single_minded") return matrix.frac_single_minded;
    throw ValidationError("UnknownFeature", "unknown feature '" + name + "'");
}

FeatureRecord compute_features(const InstanceRecord& record, const FeatureCaps& caps) {
    FeatureRecord r;
    r.label = record.label;
    r.max_util = max_util(record.matrix);
    r.matrix = matrix_features(record.matrix);
    try {
        const auto f = allocation_features(record.matrix, caps);
        r.minimax_envy = f.minimax_envy;
        r.max_nash = f.max_nash;
        r.prop_fraction = f.prop_fraction;
        r.sum_max_envies = f.sum_max_envies;
        r.mms_ok = f.mms_ok;
        r.ef_exists = f.ef_exists;
        r.efpo_exists = f.efpo_exists;
        if (!f.efpo_exists)
            r.absent_reasons["efpo_exists"] = "CapExceeded: " + std::to_string(record.matrix.n()) + "^" +
                                              std::to_string(record.matrix.m()) +
                                              " allocations exceed the Pareto cap " +
                                              std::to_string(caps.efpo);
    } catch (const CapExceededError& e) {
        for (const char* name : {"minimax_envy", "max_nash", "prop_fraction", "sum_max_envies",
                                 "mms_ok", "ef_exists", "efpo_exists"})
            r.absent_reasons[name] = "CapExceeded: " + std::string(e.what());
    }
    return r;
}

std::vector<FeatureRecord> feature_table(const std::vector<InstanceRecord>& records,
                                         const FeatureCaps& caps, unsigned threads) {
    std::vector<FeatureRecord> out(records.size());
    parallel_for(records.size(), threads, [&](std::size_t i) { out[i] = compute_features(records[i], caps); });
    return out;
}

} // namespace fairmap
