#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "elastirank/errors.hpp"

namespace elastirank {

using UserIndex = std::uint32_t;
using ItemIndex = std::uint32_t;
using GroupIndex = std::uint32_t;

struct Candidate {
    ItemIndex item = 0;
    double score = 0.0;
};

/// Item -> group mapping plus the item and group registries.
///
/// Indices are dense and assigned in insertion order; the original string ids
/// are retained for output. Every item belongs to exactly one group.
class GroupCatalog {
public:
    GroupIndex add_group(std::string group_id);
    ItemIndex add_item(std::string item_id, GroupIndex group);

    std::size_t group_count() const { return group_ids_.size(); }
    std::size_t item_count() const { return item_ids_.size(); }

    GroupIndex group_of(ItemIndex item) const;
    const std::string& group_id(GroupIndex g) const { return group_ids_.at(g); }
    const std::string& item_id(ItemIndex i) const { return item_ids_.at(i); }

    /// Items of one group, in insertion order.
    const std::vector<ItemIndex>& roster(GroupIndex g) const { return rosters_.at(g); }

    std::optional<ItemIndex> find_item(const std::string& item_id) const;
    std::optional<GroupIndex> find_group(const std::string& group_id) const;

private:
    std::vector<std::string> group_ids_;
    std::vector<std::string> item_ids_;
    std::vector<GroupIndex> item_group_;
    std::vector<std::vector<ItemIndex>> rosters_;
    std::unordered_map<std::string, ItemIndex> item_lookup_;
    std::unordered_map<std::string, GroupIndex> group_lookup_;
};

/// Per-user candidate items with ranking scores, kept in user arrival order.
/// Scores are click-probability-like values: finite and >= 0.
class ScoreTable {
public:
    UserIndex add_user(std::string user_id);
    void add_candidate(UserIndex user, ItemIndex item, double score);
    void replace_score(UserIndex user, std::size_t position, double score);

    std::size_t user_count() const { return user_ids_.size(); }
    const std::string& user_id(UserIndex u) const { return user_ids_.at(u); }
    std::span<const Candidate> candidates(UserIndex u) const;
    std::optional<UserIndex> find_user(const std::string& user_id) const;
    std::size_t interaction_count() const;

    /// Users whose candidate list is shorter than k (they get flagged
    /// under-filled by the re-rankers).
    std::vector<UserIndex> under_filled_users(std::uint32_t k) const;

    /// Every candidate item must exist in the catalog.
    void validate_against(const GroupCatalog& catalog) const;

private:
    std::vector<std::string> user_ids_;
    std::vector<std::vector<Candidate>> candidates_;
    std::unordered_map<std::string, UserIndex> user_lookup_;
};

/// Per-group accumulated utility. Mutable under a single-writer contract;
/// everything else in this header is immutable after construction.
class UtilityVector {
public:
    UtilityVector() = default;
    explicit UtilityVector(std::size_t group_count, double initial = 0.0);
    static UtilityVector from_values(std::vector<double> values);

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t g) const { return values_.at(g); }
    const std::vector<double>& values() const { return values_; }
    double total() const;

    void add(std::size_t g, double amount);
    UtilityVector& operator+=(const UtilityVector& other);

    /// Normalized copy summing to 1. Throws DegenerateUtilityError when the
    /// vector carries no mass.
    UtilityVector normalized() const;

private:
    std::vector<double> values_;
};

/// An ordered top-K selection for one user. Position in `items` is the rank
/// (starting at 1). `original_scores` are the raw ranking scores,
/// `adjusted_scores` the scores actually used for ordering.
struct RankedList {
    UserIndex user = 0;
    std::vector<ItemIndex> items;
    std::vector<double> original_scores;
    std::vector<double> adjusted_scores;
    bool under_filled = false;
};

struct ScoredItem {
    ItemIndex item = 0;
    double original = 0.0;
    double adjusted = 0.0;
};

/// Builds a RankedList with the canonical order: non-increasing adjusted
/// score, ties broken by ascending item id. Items must be distinct.
RankedList make_ranked_list(UserIndex user, std::vector<ScoredItem> selection, bool under_filled);

/// Sums original scores of the selected items into per-group utilities.
UtilityVector accumulate_utilities(std::span<const RankedList> lists, const GroupCatalog& catalog);

/// Sum of the original scores of one selected list.
double user_utility(const RankedList& list);

}  // namespace elastirank
