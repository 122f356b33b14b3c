#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "elastirank/core.hpp"
#include "elastirank/dataset.hpp"

namespace test_support {

/// Deterministic test-side randomness, independent of the library's Rng.
class TestRng {
public:
    explicit TestRng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

    /// Random point on the simplex with every share >= min_share.
    std::vector<double> simplex(std::size_t n, double min_share = 0.0) {
        std::vector<double> out(n);
        for (int attempt = 0; attempt < 1000; ++attempt) {
            double total = 0.0;
            for (auto& x : out) {
                x = -std::log(1.0 - uniform());
                total += x;
            }
            double lowest = 1.0;
            for (auto& x : out) {
                x /= total;
                lowest = std::min(lowest, x);
            }
            if (lowest >= min_share) return out;
        }
        // practically unreachable for sane min_share; fall back to uniform
        for (auto& x : out) x = 1.0 / static_cast<double>(n);
        return out;
    }

private:
    std::mt19937_64 engine_;
};

inline elastirank::UtilityVector uv(std::vector<double> values) {
    return elastirank::UtilityVector::from_values(std::move(values));
}

/// Catalog from (item id, group id) pairs; groups indexed by first mention.
inline elastirank::GroupCatalog make_catalog(
    const std::vector<std::pair<std::string, std::string>>& item_groups) {
    elastirank::GroupCatalog catalog;
    for (const auto& [item, group] : item_groups) {
        auto g = catalog.find_group(group);
        catalog.add_item(item, g ? *g : catalog.add_group(group));
    }
    return catalog;
}

using UserSpec = std::pair<std::string, std::vector<std::pair<std::string, double>>>;

inline elastirank::ScoreTable make_table(const elastirank::GroupCatalog& catalog,
                                         const std::vector<UserSpec>& users) {
    elastirank::ScoreTable table;
    for (const auto& [user, candidates] : users) {
        const auto u = table.add_user(user);
        for (const auto& [item, score] : candidates) {
            table.add_candidate(u, *catalog.find_item(item), score);
        }
    }
    return table;
}

/// The bundled skewed fixture: two equal-sized groups, the first drawing
/// systematically higher scores, so the accuracy-only ranking gives it
/// roughly 80% of the utility mass. Scores are small so per-group utilities
/// stay near their starting value across the whole stream, keeping the
/// fairness pressure alive for every tax base in the sweep range.
inline elastirank::SynthSpec skewed_two_group_spec() {
    elastirank::SynthSpec spec;
    spec.seed = 90210;
    spec.n_users = 1000;
    spec.n_items = 200;
    spec.n_groups = 2;
    spec.group_size_skew = 0.0;
    spec.score_scale = 0.0065;
    spec.group_bias = 0.30;
    spec.candidates_per_user = 30;
    return spec;
}

}  // namespace test_support
