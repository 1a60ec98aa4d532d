#include "fairmap/generators.hpp"

#include "fairmap/rng.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

namespace fairmap {

namespace {

void check_shape(std::size_t n, std::size_t m) {
    if (n < 2 || m < n) throw BadDimensions(n, m);
}

std::string fmt_param(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string default_prefix(const Source& model) {
    if (const auto* s = std::get_if<CharacteristicSource>(&model)) return to_string(s->kind);
    if (const auto* s = std::get_if<IidSource>(&model)) return "iid_" + to_string(s->dist);
    if (const auto* s = std::get_if<AttributesSource>(&model))
        return "attributes_d" + std::to_string(s->d);
    if (const auto* s = std::get_if<ResamplingSource>(&model))
        return "resampling_p" + fmt_param(s->p) + "_phi" + fmt_param(s->phi);
    return "ingested";
}

std::string indexed_label(const std::string& prefix, std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "_%03zu", index);
    return prefix + buf;
}

} // namespace

UtilityMatrix gen_characteristic(CharacteristicKind kind, std::size_t n, std::size_t m) {
    check_shape(n, m);
    Matrix u(n, m);
    const std::size_t ell = m / n;
    const std::size_t rest = m % n;
    switch (kind) {
        case CharacteristicKind::IND:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < m; ++j) u(i, j) = 1.0 / static_cast<double>(m);
            break;
        case CharacteristicKind::SEP:
            for (std::size_t i = 0; i < n; ++i) u(i, i) = 1.0;
            break;
        case CharacteristicKind::CON:
            for (std::size_t i = 0; i < n; ++i) u(i, 0) = 1.0;
            break;
        case CharacteristicKind::WSEP:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i * ell; j < (i + 1) * ell; ++j)
                    u(i, j) = 1.0 / static_cast<double>(ell);
            break;
        case CharacteristicKind::WSEPf: {
            const double share = static_cast<double>(n) / static_cast<double>(m);
            if (rest == 0) {
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = i * ell; j < (i + 1) * ell; ++j)
                        u(i, j) = 1.0 / static_cast<double>(ell);
                break;
            }
            const double shared =
                (1.0 - static_cast<double>(ell) * share) / static_cast<double>(rest);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i * ell; j < (i + 1) * ell; ++j) u(i, j) = share;
                for (std::size_t j = n * ell; j < m; ++j) u(i, j) = shared;
            }
            break;
        }
        case CharacteristicKind::BIC: {
            if (n % 2 == 1 && m < 3)
                throw ValidationError("UnsupportedShape", "BIC with odd n needs m >= 3");
            const std::size_t half = n / 2;
            for (std::size_t i = 0; i < half; ++i) u(i, 0) = 1.0;
            for (std::size_t i = half; i < 2 * half; ++i) u(i, 1) = 1.0;
            if (n % 2 == 1) u(n - 1, 2) = 1.0;
            break;
        }
    }
    return validate(std::move(u));
}

UtilityMatrix gen_iid(std::size_t n, std::size_t m, IidDist dist, std::uint64_t seed) {
    check_shape(n, m);
    Rng rng(seed);
    Matrix u(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        while (sum <= 0.0) {
            sum = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                u(i, j) = dist == IidDist::Uniform01 ? rng.uniform01() : rng.exponential();
                sum += u(i, j);
            }
        }
    }
    return normalize_rows(std::move(u));
}

UtilityMatrix gen_attributes(std::size_t n, std::size_t m, int d, std::uint64_t seed) {
    check_shape(n, m);
    if (d < 1) throw ValidationError("BadParameter", "attributes model needs d >= 1");
    const auto dims = static_cast<std::size_t>(d);
    Rng rng(seed);
    Matrix goods(m, dims);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < dims; ++k) goods(j, k) = rng.uniform01();

    Matrix u(n, m);
    std::vector<double> priority(dims);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        while (sum <= 0.0) {
            for (auto& a : priority) a = rng.uniform01();
            sum = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                double dot = 0.0;
                for (std::size_t k = 0; k < dims; ++k) dot += priority[k] * goods(j, k);
                u(i, j) = dot;
                sum += dot;
            }
        }
    }
    return normalize_rows(std::move(u));
}

UtilityMatrix gen_resampling(std::size_t n, std::size_t m, double p, double phi,
                             std::uint64_t seed) {
    check_shape(n, m);
    check_source(ResamplingSource{p, phi});
    Rng rng(seed);

    // Central approval set: first floor(p*m) entries of a partial Fisher-Yates shuffle.
    const auto central_size =
        static_cast<std::size_t>(std::floor(p * static_cast<double>(m) + 1e-9));
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t k = 0; k < central_size; ++k)
        std::swap(order[k], order[k + rng.below(m - k)]);
    std::vector<bool> central(m, false);
    for (std::size_t k = 0; k < central_size; ++k) central[order[k]] = true;

    Matrix u(n, m);
    std::vector<bool> approved(m);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t count = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const bool resample = rng.bernoulli(phi);
            approved[j] = resample ? rng.bernoulli(p) : static_cast<bool>(central[j]);
            count += approved[j] ? 1 : 0;
        }
        if (count == 0) {
            approved[rng.below(m)] = true;
            count = 1;
        }
        for (std::size_t j = 0; j < m; ++j)
            u(i, j) = approved[j] ? 1.0 / static_cast<double>(count) : 0.0;
    }
    return validate(std::move(u));
}

UtilityMatrix sample(const Source& source, std::size_t n, std::size_t m, std::uint64_t seed) {
    if (const auto* s = std::get_if<CharacteristicSource>(&source))
        return gen_characteristic(s->kind, n, m);
    if (const auto* s = std::get_if<IidSource>(&source)) return gen_iid(n, m, s->dist, seed);
    if (const auto* s = std::get_if<AttributesSource>(&source))
        return gen_attributes(n, m, s->d, seed);
    if (const auto* s = std::get_if<ResamplingSource>(&source))
        return gen_resampling(n, m, s->p, s->phi, seed);
    throw ValidationError("BadParameter", "ingested sources cannot be sampled");
}

std::vector<InstanceRecord> gen_dataset(const std::vector<SyntheticSpec>& specs) {
    std::vector<InstanceRecord> out;
    for (const auto& spec : specs) {
        check_source(spec.model);
        if (spec.count < 1) throw ValidationError("BadParameter", "spec count must be >= 1");
        const std::string prefix =
            spec.label_prefix.empty() ? default_prefix(spec.model) : spec.label_prefix;
        const bool characteristic = std::holds_alternative<CharacteristicSource>(spec.model);
        for (std::size_t t = 0; t < spec.count; ++t) {
            const std::uint64_t seed = child_seed(spec.seed, t);
            std::string label =
                characteristic && spec.count == 1 ? prefix : indexed_label(prefix, t);
            std::optional<std::uint64_t> record_seed;
            if (!characteristic) record_seed = seed;
            out.push_back(make_record(std::move(label), sample(spec.model, spec.n, spec.m, seed),
                                      spec.model, record_seed));
        }
    }
    return out;
}

namespace {

std::vector<SyntheticSpec> canonical_composition(std::size_t n, std::size_t m) {
    std::vector<SyntheticSpec> specs;
    specs.push_back({AttributesSource{2}, n, m, 20, 0, {}});
    specs.push_back({AttributesSource{5}, n, m, 20, 0, {}});
    const double ps[] = {0.2, 0.4, 0.6, 0.8};
    const double phis[] = {0.2, 0.8};
    const std::size_t per_cell = 40 / (std::size(ps) * std::size(phis));
    for (double p : ps)
        for (double phi : phis) specs.push_back({ResamplingSource{p, phi}, n, m, per_cell, 0, {}});
    specs.push_back({IidSource{IidDist::Uniform01}, n, m, 40, 0, {}});
    specs.push_back({IidSource{IidDist::Exponential}, n, m, 40, 0, {}});
    for (auto k : {CharacteristicKind::CON, CharacteristicKind::IND, CharacteristicKind::SEP,
                   CharacteristicKind::WSEP, CharacteristicKind::BIC})
        specs.push_back({CharacteristicSource{k}, n, m, 1, 0, {}});
    return specs;
}

std::vector<SyntheticSpec> wide_composition() {
    std::vector<SyntheticSpec> specs;
    for (double p : {0.05, 0.1, 0.2, 0.4, 0.6, 0.8})
        for (double phi : {0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95})
            specs.push_back({ResamplingSource{p, phi}, 10, 20, 4, 0, {}});
    for (auto k : {CharacteristicKind::CON, CharacteristicKind::IND, CharacteristicKind::SEP})
        specs.push_back({CharacteristicSource{k}, 10, 20, 1, 0, {}});
    return specs;
}

} // namespace

std::vector<std::string> preset_names() { return {"3x6", "5x5", "10x20"}; }

std::vector<SyntheticSpec> preset_specs(const std::string& name, std::uint64_t seed) {
    std::vector<SyntheticSpec> specs;
    if (name == "3x6")
        specs = canonical_composition(3, 6);
    else if (name == "5x5")
        specs = canonical_composition(5, 5);
    else if (name == "10x20")
        specs = wide_composition();
    else
        throw ValidationError("UnknownPreset", "unknown preset '" + name + "'");
    for (std::size_t k = 0; k < specs.size(); ++k) specs[k].seed = child_seed(seed, k);
    return specs;
}

} // namespace fairmap
