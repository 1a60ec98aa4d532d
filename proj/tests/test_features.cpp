#include "fairmap/features.hpp"
#include "fairmap/generators.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace fairmap;
using testing::grid;

namespace {

UtilityMatrix ch(CharacteristicKind k, std::size_t n, std::size_t m) { return gen_characteristic(k, n, m); }

} // namespace

TEST_SUITE("features") {

TEST_CASE("enumeration order and count") {
    std::vector<std::vector<std::size_t>> seen;
    enumerate_allocations(2, 2, 100, [&](std::span<const std::size_t> o) { seen.emplace_back(o.begin(), o.end()); });
    CHECK(seen == std::vector<std::vector<std::size_t>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    for (auto [n, m, count] : {std::tuple<std::size_t, std::size_t, std::size_t>{3, 6, 729}, {5, 5, 3125}}) {
        std::set<std::vector<std::size_t>> distinct;
        enumerate_allocations(n, m, 20'000'000, [&](std::span<const std::size_t> o) { distinct.emplace(o.begin(), o.end()); });
        CHECK(distinct.size() == count);
    }
    CHECK_THROWS_AS(enumerate_allocations(3, 6, 700, [](auto) {}), CapExceededError);
    CHECK(allocation_count(10, 20) == UINT64_MAX); // 10^20 saturates
    CHECK(allocation_count(3, 4) == 81);
}

TEST_CASE("closed-form values for SEP, CON, IND") {
    using K = CharacteristicKind;
    auto sep = allocation_features(ch(K::SEP, 3, 3));
    CHECK(sep.minimax_envy == -1.0);
    CHECK(sep.max_nash == 1.0);
    CHECK(sep.prop_fraction == 3.0);
    CHECK(sep.sum_max_envies == -3.0);
    CHECK(sep.mms_ok);
    CHECK(sep.efpo_exists == true);
    CHECK(max_util(ch(K::SEP, 4, 4)) == 4.0);

    auto con = allocation_features(ch(K::CON, 3, 3));
    CHECK(con.minimax_envy == 1.0);
    CHECK(con.max_nash == 0.0);
    CHECK(con.sum_max_envies == 1.0); // two agents envy by 1, the owner's max envy is -1
    CHECK(con.mms_ok);
    CHECK(!con.ef_exists);
    CHECK(max_util(ch(K::CON, 3, 5)) == 1.0);
    CHECK(prop_fraction(ch(K::CON, 2, 2)) == 0.0);
    CHECK(efpo_exists(ch(K::CON, 2, 2)) == false);
    CHECK(max_nash(ch(K::CON, 4, 4)) == 0.0);

    auto ind = allocation_features(ch(K::IND, 3, 6));
    CHECK(std::abs(ind.minimax_envy) <= 1e-15);
    CHECK(ind.ef_exists);
    CHECK(ind.max_nash == doctest::Approx(1.0 / 27).epsilon(1e-14));
    CHECK(ind.prop_fraction == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(ind.sum_max_envies) <= 1e-15);
    CHECK(ind.efpo_exists == true);
    CHECK(max_util(ch(K::IND, 3, 6)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("allocation features match the recursive oracle") {
    for (auto [n, m] : {std::pair<std::size_t, std::size_t>{3, 4}, {2, 5}, {3, 3}, {4, 4}}) {
        for (std::uint64_t t = 0; t < 40; ++t) {
            auto u = testing::mixed_instance(n, m, 400 + n * 10 + m, t);
            auto f = allocation_features(u);
            auto o = oracle::allocation_features(grid(u));
            CHECK(f.minimax_envy == o.minimax_envy);
            CHECK(f.max_nash == o.max_nash);
            CHECK(f.prop_fraction == o.prop_fraction);
            CHECK(f.sum_max_envies == o.sum_max_envies);
            CHECK(f.mms_ok == o.mms_ok);
            CHECK(f.efpo_exists == o.efpo_exists);
            CHECK(f.max_util_enumerated == o.max_welfare);
            CHECK(std::abs(max_util(u) - f.max_util_enumerated) <= 1e-9);
            CHECK(f.ef_exists == (f.minimax_envy <= 1e-9));
            if (*f.efpo_exists) CHECK(f.ef_exists);
        }
    }
}

TEST_CASE("allocation features are invariant under permutations") {
    Rng rng(13);
    for (std::uint64_t t = 0; t < 40; ++t) {
        auto u = testing::mixed_instance(3, 5, 71, t);
        auto v = testing::random_permuted(u, rng);
        auto a = allocation_features(u), b = allocation_features(v);
        CHECK(std::abs(a.minimax_envy - b.minimax_envy) <= 1e-9);
        CHECK(std::abs(a.max_nash - b.max_nash) <= 1e-9);
        CHECK(std::abs(a.prop_fraction - b.prop_fraction) <= 1e-9);
        CHECK(std::abs(a.sum_max_envies - b.sum_max_envies) <= 1e-9);
        CHECK(a.mms_ok == b.mms_ok);
        CHECK(a.efpo_exists == b.efpo_exists);
    }
}

TEST_CASE("MMS holds on sampled resampling instances") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        const double p = 0.2 + 0.2 * (s % 4), phi = s % 2 ? 0.8 : 0.2;
        CHECK(mms_ok(gen_resampling(3, 6, p, phi, s)));
    }
}

TEST_CASE("Gini and matrix features") {
    std::vector<double> x{1, 0, 0, 0};
    CHECK(gini(x) == 0.75);
    std::vector<double> z{0, 0};
    CHECK(gini(z) == 0.0);
    auto con = matrix_features(ch(CharacteristicKind::CON, 4, 6));
    CHECK(con.max_demand == 4.0);
    CHECK(con.preference_diversity == 0.0);
    CHECK(con.frac_single_minded == 1.0);
    auto ind = matrix_features(ch(CharacteristicKind::IND, 3, 6));
    CHECK(ind.demand_gini == 0.0);
    CHECK(ind.pickiness == 0.0);
    CHECK(ind.frac_single_minded == 0.0);
    auto sep = matrix_features(ch(CharacteristicKind::SEP, 2, 2));
    CHECK(sep.preference_diversity == doctest::Approx(std::sqrt(2.0)));
    CHECK(sep.pickiness == 0.5);
    for (std::uint64_t s = 0; s < 50; ++s) {
        auto f = matrix_features(gen_iid(4, 7, IidDist::Exponential, s));
        CHECK(f.frac_single_minded >= 0.0);
        CHECK(f.frac_single_minded <= 1.0);
        CHECK(f.demand_gini <= 6.0 / 7 + 1e-12);
    }
}

TEST_CASE("feature table records absences with reasons") {
    CHECK(feature_table({}).empty());
    auto small = gen_preset("3x6", 1);
    small.erase(small.begin() + 12, small.end());
    for (const auto& r : feature_table(small)) {
        CHECK(r.absent_reasons.empty());
        for (const auto& name : feature_names()) CHECK(r.value(name).has_value());
    }
    auto wide = gen_preset("10x20", 1);
    wide.erase(wide.begin() + 3, wide.end());
    for (const auto& r : feature_table(wide, {}, 2)) {
        CHECK(!r.minimax_envy);
        CHECK(!r.ef_exists);
        CHECK(r.absent_reasons.count("max_nash") == 1);
        CHECK(r.absent_reasons.at("max_nash").find("CapExceeded") == 0);
        CHECK(r.value("max_demand").has_value());
        CHECK(r.value("max_util").has_value());
    }
    auto mid = gen_preset("5x5", 1);
    mid.erase(mid.begin() + 2, mid.end());
    auto rows = feature_table(mid); // 5^5 = 3125 <= Pareto cap
    CHECK(rows[0].efpo_exists.has_value());
    FeatureCaps tight;
    tight.efpo = 100;
    auto capped = compute_features(mid[0], tight);
    CHECK(!capped.efpo_exists);
    CHECK(capped.absent_reasons.count("efpo_exists") == 1);
    CHECK(capped.minimax_envy.has_value());
    CHECK_THROWS_AS(efpo_exists(mid[0].matrix, tight), CapExceededError);
    CHECK_THROWS_AS(rows[0].value("bogus"), ValidationError);
}

} // TEST_SUITE
