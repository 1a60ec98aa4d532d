#pragma once

#include "fairmap/core.hpp"
#include "fairmap/generators.hpp"
#include "fairmap/rng.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace testing {

inline std::vector<std::vector<double>> grid(const fairmap::UtilityMatrix& u) {
    std::vector<std::vector<double>> g(u.n(), std::vector<double>(u.m()));
    for (std::size_t i = 0; i < u.n(); ++i)
        for (std::size_t j = 0; j < u.m(); ++j) g[i][j] = u(i, j);
    return g;
}

inline std::vector<std::size_t> shuffled(std::size_t k, fairmap::Rng& rng) {
    std::vector<std::size_t> p(k);
    std::iota(p.begin(), p.end(), std::size_t{0});
    for (std::size_t i = k; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
    return p;
}

// Rows and columns of u reordered: out(i, j) = u(rows[i], cols[j]).
inline fairmap::UtilityMatrix permuted(const fairmap::UtilityMatrix& u, const std::vector<std::size_t>& rows,
                                       const std::vector<std::size_t>& cols) {
    fairmap::Matrix out(u.n(), u.m());
    for (std::size_t i = 0; i < u.n(); ++i)
        for (std::size_t j = 0; j < u.m(); ++j) out(i, j) = u(rows[i], cols[j]);
    return fairmap::validate(std::move(out));
}

inline fairmap::UtilityMatrix random_permuted(const fairmap::UtilityMatrix& u, fairmap::Rng& rng) {
    return permuted(u, shuffled(u.n(), rng), shuffled(u.m(), rng));
}

// Mixed-model instance: stream t of `seed` picks the model and draws from it.
inline fairmap::UtilityMatrix mixed_instance(std::size_t n, std::size_t m, std::uint64_t seed, std::uint64_t t) {
    using namespace fairmap;
    Rng pick = Rng::child(seed, 2 * t);
    const auto s = child_seed(seed, 2 * t + 1);
    switch (pick.below(5)) {
        case 0: return gen_iid(n, m, IidDist::Uniform01, s);
        case 1: return gen_iid(n, m, IidDist::Exponential, s);
        case 2: return gen_attributes(n, m, 1 + static_cast<int>(pick.below(5)), s);
        case 3: return gen_resampling(n, m, 0.1 + 0.8 * pick.uniform01(), pick.uniform01(), s);
        default: {
            const CharacteristicKind kinds[] = {CharacteristicKind::IND, CharacteristicKind::SEP, CharacteristicKind::CON,
                                                CharacteristicKind::WSEP, CharacteristicKind::WSEPf, CharacteristicKind::BIC};
            return gen_characteristic(kinds[pick.below(6)], n, m);
        }
    }
}

} // namespace testing
