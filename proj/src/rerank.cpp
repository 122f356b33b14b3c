#include "elastirank/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "elastirank/fairness.hpp"

namespace elastirank {

namespace {

void validate_elastic_config(const ElasticRankConfig& cfg) {
    if (cfg.top_k < 1) throw ContractViolation("top_k must be >= 1");
    if (!(cfg.initial_utility > 0.0) || !std::isfinite(cfg.initial_utility)) {
        throw ContractViolation("initial_utility must be positive and finite");
    }
    if (!(cfg.anchor_percent >= 0.0 && cfg.anchor_percent < 100.0)) {
        throw ContractViolation("anchor_percent must lie in [0, 100)");
    }
    if (!std::isfinite(cfg.tax_base)) throw ContractViolation("tax_base must be finite");
}

bool scored_before(const ScoredItem& a, const ScoredItem& b) {
    if (a.adjusted != b.adjusted) return a.adjusted > b.adjusted;
    return a.item < b.item;
}

RankedList rerank_with_offsets(UserIndex user, std::span<const Candidate> candidates,
                               const std::vector<double>& group_offset,
                               const GroupCatalog& catalog, std::uint32_t top_k) {
    if (candidates.empty()) {
        throw ContractViolation("cannot re-rank an empty candidate list");
    }
    std::vector<ScoredItem> scored;
    scored.reserve(candidates.size());
    for (const auto& c : candidates) {
        scored.push_back({c.item, c.score, c.score + group_offset[catalog.group_of(c.item)]});
    }
    const bool under_filled = scored.size() < top_k;
    if (scored.size() > top_k) {
        std::partial_sort(scored.begin(), scored.begin() + top_k, scored.end(), scored_before);
        scored.resize(top_k);
    }
    return make_ranked_list(user, std::move(scored), under_filled);
}

void add_selected_scores(UtilityVector& utilities, const RankedList& list,
                         const GroupCatalog& catalog) {
    for (std::size_t r = 0; r < list.items.size(); ++r) {
        utilities.add(catalog.group_of(list.items[r]), list.original_scores[r]);
    }
}

}  // namespace

double curve_distance(double group_utility, double anchor_utility, double tax_base) {
    if (!(group_utility > 0.0) || !(anchor_utility > 0.0) ||
        !std::isfinite(group_utility) || !std::isfinite(anchor_utility)) {
        throw ContractViolation("curve_distance requires positive finite utilities");
    }
    if (!std::isfinite(tax_base)) throw ContractViolation("tax_base must be finite");
    return (1.0 - tax_base) * std::pow(group_utility, -tax_base) *
           (std::pow(anchor_utility, 1.0 - tax_base) - std::pow(group_utility, 1.0 - tax_base));
}

GroupIndex select_anchor(const UtilityVector& utilities, double anchor_percent) {
    if (utilities.size() == 0) throw ContractViolation("select_anchor: no groups");
    if (!(anchor_percent >= 0.0 && anchor_percent < 100.0)) {
        throw ContractViolation("select_anchor: anchor_percent must lie in [0, 100)");
    }
    std::vector<GroupIndex> order(utilities.size());
    std::iota(order.begin(), order.end(), GroupIndex{0});
    std::sort(order.begin(), order.end(), [&](GroupIndex a, GroupIndex b) {
        if (utilities[a] != utilities[b]) return utilities[a] < utilities[b];
        return a < b;
    });
    auto slot = static_cast<std::size_t>(
        std::floor(anchor_percent / 100.0 * static_cast<double>(utilities.size())));
    slot = std::min(slot, utilities.size() - 1);
    return order[slot];
}

std::vector<double> curve_distances_to_anchor(const UtilityVector& utilities, GroupIndex anchor,
                                              double tax_base) {
    if (anchor >= utilities.size()) {
        throw ContractViolation("curve_distances_to_anchor: anchor out of range");
    }
    const double anchor_utility = utilities[anchor];
    std::vector<double> out(utilities.size());
    for (std::size_t g = 0; g < utilities.size(); ++g) {
        out[g] = curve_distance(utilities[g], anchor_utility, tax_base);
    }
    return out;
}

RankedList elastic_rerank_user(UserIndex user, std::span<const Candidate> candidates,
                               const UtilityVector& utilities, const GroupCatalog& catalog,
                               const ElasticRankConfig& cfg) {
    validate_elastic_config(cfg);
    const GroupIndex anchor = select_anchor(utilities, cfg.anchor_percent);
    const auto offsets = curve_distances_to_anchor(utilities, anchor, cfg.tax_base);
    return rerank_with_offsets(user, candidates, offsets, catalog, cfg.top_k);
}

StreamResult elastic_rerank_stream(const ScoreTable& table, const GroupCatalog& catalog,
                                   const ElasticRankConfig& cfg) {
    validate_elastic_config(cfg);
    StreamResult out;
    UtilityVector utilities(catalog.group_count(), cfg.initial_utility);
    out.lists.reserve(table.user_count());
    for (UserIndex u = 0; u < table.user_count(); ++u) {
        const GroupIndex anchor = select_anchor(utilities, cfg.anchor_percent);
        const auto offsets = curve_distances_to_anchor(utilities, anchor, cfg.tax_base);
        if (cfg.record_trace) {
            for (std::size_t g = 0; g < utilities.size(); ++g) {
                out.trace.push_back({u + 1, static_cast<GroupIndex>(g), utilities[g], offsets[g]});
            }
        }
        auto list = rerank_with_offsets(u, table.candidates(u), offsets, catalog, cfg.top_k);
        if (cfg.update_scope == UpdateScope::selected_items) {
            add_selected_scores(utilities, list, catalog);
        } else {
            for (const auto& c : table.candidates(u)) {
                utilities.add(catalog.group_of(c.item), c.score);
            }
        }
        out.lists.push_back(std::move(list));
    }
    out.final_utilities = std::move(utilities);
    return out;
}

std::vector<RankedList> vanilla_topk(const ScoreTable& table, const GroupCatalog& catalog,
                                     std::uint32_t top_k) {
    if (top_k < 1) throw ContractViolation("top_k must be >= 1");
    const std::vector<double> zero_offsets(catalog.group_count(), 0.0);
    std::vector<RankedList> lists;
    lists.reserve(table.user_count());
    for (UserIndex u = 0; u < table.user_count(); ++u) {
        lists.push_back(rerank_with_offsets(u, table.candidates(u), zero_offsets, catalog, top_k));
    }
    return lists;
}

StreamResult greedy_regularized(const ScoreTable& table, const GroupCatalog& catalog,
                                const BaselineConfig& cfg, std::uint32_t top_k) {
    if (cfg.kind != BaselineConfig::Kind::greedy_regularized) {
        throw ContractViolation("greedy_regularized called with a different baseline kind");
    }
    if (top_k < 1) throw ContractViolation("top_k must be >= 1");
    if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda)) {
        throw ContractViolation("lambda must be finite and >= 0");
    }
    if (!(cfg.initial_utility > 0.0)) {
        throw ContractViolation("initial_utility must be positive");
    }

    constexpr double kEpsilon = 1e-12;
    StreamResult out;
    std::vector<double> work(catalog.group_count(), cfg.initial_utility);
    out.lists.reserve(table.user_count());

    for (UserIndex u = 0; u < table.user_count(); ++u) {
        const auto candidates = table.candidates(u);
        if (candidates.empty()) throw ContractViolation("cannot re-rank an empty candidate list");
        std::vector<bool> used(candidates.size(), false);
        std::vector<ScoredItem> picks;
        const std::size_t wanted = std::min<std::size_t>(top_k, candidates.size());
        picks.reserve(wanted);

        for (std::size_t round = 0; round < wanted; ++round) {
            const double base = fairness_of_values(work, cfg.tax_base, kEpsilon);
            std::size_t best = candidates.size();
            double best_gain = 0.0;
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                if (used[i]) continue;
                const GroupIndex g = catalog.group_of(candidates[i].item);
                const double saved = work[g];
                work[g] = saved + candidates[i].score;
                const double gain =
                    candidates[i].score +
                    cfg.lambda * (fairness_of_values(work, cfg.tax_base, kEpsilon) - base);
                work[g] = saved;
                const bool better =
                    best == candidates.size() || gain > best_gain ||
                    (gain == best_gain && candidates[i].item < candidates[best].item);
                if (better) {
                    best = i;
                    best_gain = gain;
                }
            }
            used[best] = true;
            picks.push_back({candidates[best].item, candidates[best].score, best_gain});
            work[catalog.group_of(candidates[best].item)] += candidates[best].score;
        }
        out.lists.push_back(make_ranked_list(u, std::move(picks), wanted < top_k));
    }
    out.final_utilities = UtilityVector::from_values(std::move(work));
    return out;
}

}  // namespace elastirank
