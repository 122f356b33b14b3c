#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "elastirank/core.hpp"

namespace elastirank {

/// Which items feed the per-user utility update of the streaming re-ranker.
enum class UpdateScope {
    selected_items,  ///< only the items that made the top-K list
    all_candidates,  ///< every candidate the user arrived with
};

struct ElasticRankConfig {
    double tax_base = 1.5;         ///< t; 1 switches the fairness term off
    double anchor_percent = 90.0;  ///< eta, in [0, 100)
    std::uint32_t top_k = 10;
    double initial_utility = 1.0;  ///< per-group utility at stream start, > 0
    UpdateScope update_scope = UpdateScope::selected_items;
    bool record_trace = false;
};

struct BaselineConfig {
    enum class Kind { vanilla_topk, greedy_regularized };

    Kind kind = Kind::vanilla_topk;
    double lambda = 0.0;          ///< trade-off coefficient, >= 0
    double tax_base = 1.5;        ///< fairness family parameter of the regularizer
    double initial_utility = 1.0;
};

/// Additive score offset between a group and the anchor in the
/// elasticity-curved space:
///   d(g, a) = (1-t) * v_g^(-t) * (v_a^(1-t) - v_g^(1-t)).
/// Positive when the group is poorer than the anchor, negative when richer,
/// exactly 0 at tax base 1. Utilities must be positive.
double curve_distance(double group_utility, double anchor_utility, double tax_base);

/// Anchor group at the given utility quantile: groups sorted by ascending
/// utility (ties by ascending group id), index floor(percent/100 * |G|),
/// clamped to the richest group.
GroupIndex select_anchor(const UtilityVector& utilities, double anchor_percent);

/// Curve distances from every group to the anchor.
std::vector<double> curve_distances_to_anchor(const UtilityVector& utilities, GroupIndex anchor,
                                              double tax_base);

/// Re-ranks one user's candidates by score + curve distance and keeps the
/// top K. Utilities must be strictly positive; candidates non-empty.
RankedList elastic_rerank_user(UserIndex user, std::span<const Candidate> candidates,
                               const UtilityVector& utilities, const GroupCatalog& catalog,
                               const ElasticRankConfig& cfg);

/// One trace record: state observed when the given user arrived.
struct TraceRow {
    std::uint32_t step = 0;  ///< 1-based user arrival index
    GroupIndex group = 0;
    double utility = 0.0;    ///< group utility before this user's update
    double distance = 0.0;   ///< curve distance to the anchor used for this user
};

struct StreamResult {
    std::vector<RankedList> lists;
    UtilityVector final_utilities;
    std::vector<TraceRow> trace;
};

/// Streams users in arrival order: per user, pick the anchor, re-rank, then
/// add the user's original scores to the group utilities. State starts at
/// `initial_utility` for every group.
StreamResult elastic_rerank_stream(const ScoreTable& table, const GroupCatalog& catalog,
                                   const ElasticRankConfig& cfg);

/// Accuracy-only reference: per-user top-K by raw score, same tie rule.
std::vector<RankedList> vanilla_topk(const ScoreTable& table, const GroupCatalog& catalog,
                                     std::uint32_t top_k);

/// Streaming greedy baseline: selects items one at a time by marginal gain
/// score + lambda * (fairness after adding the item - fairness before),
/// carrying utilities across users like the streaming re-ranker.
StreamResult greedy_regularized(const ScoreTable& table, const GroupCatalog& catalog,
                                const BaselineConfig& cfg, std::uint32_t top_k);

}  // namespace elastirank
