#pragma once

#include "fairmap/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fairmap {

/// Characteristic instances. With l = floor(m/n):
///  - IND: every entry 1/m
///  - SEP: identity block, then zero columns
///  - CON: column 0 all ones
///  - WSEP: agent i values goods [i*l, (i+1)*l) at 1/l, the last m mod n goods are worthless
///  - WSEPf: agent i values the same private goods at n/m, every agent values each of the
///    last m mod n goods at (1 - l*n/m) / (m mod n)
///  - BIC: agents [0, n/2) single-minded on good 0, the next n/2 on good 1, and for odd n
///    the last agent on good 2
UtilityMatrix gen_characteristic(CharacteristicKind kind, std::size_t n, std::size_t m);

/// Each row: m i.i.d. draws from `dist`, then normalized.
UtilityMatrix gen_iid(std::size_t n, std::size_t m, IidDist dist, std::uint64_t seed);

/// Attribute model: u[i][j] proportional to <a_i, g_j> with a_i, g_j uniform in [0,1]^d.
UtilityMatrix gen_attributes(std::size_t n, std::size_t m, int d, std::uint64_t seed);

/// Resampling (approval) model with central set size floor(p*m) and noise phi.
UtilityMatrix gen_resampling(std::size_t n, std::size_t m, double p, double phi,
                             std::uint64_t seed);

/// Draws one instance from the model described by `source`. Ingested sources are rejected.
UtilityMatrix sample(const Source& source, std::size_t n, std::size_t m, std::uint64_t seed);

struct SyntheticSpec {
    Source model;
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t count = 1;
    std::uint64_t seed = 0;
    /// Prefix for generated labels; derived from the model when empty.
    std::string label_prefix;
};

/// Instance t of a spec is drawn with child_seed(spec.seed, t). Characteristic specs
/// ignore the seed and emit `count` copies (normally one) labeled by kind.
std::vector<InstanceRecord> gen_dataset(const std::vector<SyntheticSpec>& specs);

/// Built-in compositions: "3x6", "5x5", "10x20". Spec k receives seed child_seed(seed, k).
std::vector<SyntheticSpec> preset_specs(const std::string& name, std::uint64_t seed);
std::vector<std::string> preset_names();

inline std::vector<InstanceRecord> gen_preset(const std::string& name, std::uint64_t seed) {
    return gen_dataset(preset_specs(name, seed));
}

} // namespace fairmap
