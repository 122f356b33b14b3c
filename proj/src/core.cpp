#include "elastirank/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace elastirank {

GroupIndex GroupCatalog::add_group(std::string group_id) {
    if (group_lookup_.contains(group_id)) {
        throw IngestionError("duplicate group id '" + group_id + "'");
    }
    const auto g = static_cast<GroupIndex>(group_ids_.size());
    group_lookup_.emplace(group_id, g);
    group_ids_.push_back(std::move(group_id));
    rosters_.emplace_back();
    return g;
}

ItemIndex GroupCatalog::add_item(std::string item_id, GroupIndex group) {
    if (group >= group_ids_.size()) {
        throw ContractViolation("add_item: group index out of range");
    }
    if (item_lookup_.contains(item_id)) {
        throw IngestionError("item '" + item_id + "' mapped to more than one group");
    }
    const auto i = static_cast<ItemIndex>(item_ids_.size());
    item_lookup_.emplace(item_id, i);
    item_ids_.push_back(std::move(item_id));
    item_group_.push_back(group);
    rosters_[group].push_back(i);
    return i;
}

GroupIndex GroupCatalog::group_of(ItemIndex item) const {
    if (item >= item_group_.size()) {
        throw IngestionError("unknown item index " + std::to_string(item));
    }
    return item_group_[item];
}

std::optional<ItemIndex> GroupCatalog::find_item(const std::string& item_id) const {
    auto it = item_lookup_.find(item_id);
    if (it == item_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<GroupIndex> GroupCatalog::find_group(const std::string& group_id) const {
    auto it = group_lookup_.find(group_id);
    if (it == group_lookup_.end()) return std::nullopt;
    return it->second;
}

UserIndex ScoreTable::add_user(std::string user_id) {
    if (user_lookup_.contains(user_id)) {
        throw IngestionError("duplicate user id '" + user_id + "'");
    }
    const auto u = static_cast<UserIndex>(user_ids_.size());
    user_lookup_.emplace(user_id, u);
    user_ids_.push_back(std::move(user_id));
    candidates_.emplace_back();
    return u;
}

void ScoreTable::add_candidate(UserIndex user, ItemIndex item, double score) {
    if (user >= candidates_.size()) {
        throw ContractViolation("add_candidate: user index out of range");
    }
    if (!std::isfinite(score) || score < 0.0) {
        throw IngestionError("score for user '" + user_ids_[user] + "' must be finite and >= 0");
    }
    candidates_[user].push_back(Candidate{item, score});
}

void ScoreTable::replace_score(UserIndex user, std::size_t position, double score) {
    if (user >= candidates_.size() || position >= candidates_[user].size()) {
        throw ContractViolation("replace_score: position out of range");
    }
    if (!std::isfinite(score) || score < 0.0) {
        throw IngestionError("score for user '" + user_ids_[user] + "' must be finite and >= 0");
    }
    candidates_[user][position].score = score;
}

std::span<const Candidate> ScoreTable::candidates(UserIndex u) const {
    return candidates_.at(u);
}

std::optional<UserIndex> ScoreTable::find_user(const std::string& user_id) const {
    auto it = user_lookup_.find(user_id);
    if (it == user_lookup_.end()) return std::nullopt;
    return it->second;
}

std::size_t ScoreTable::interaction_count() const {
    std::size_t n = 0;
    for (const auto& c : candidates_) n += c.size();
    return n;
}

std::vector<UserIndex> ScoreTable::under_filled_users(std::uint32_t k) const {
    std::vector<UserIndex> out;
    for (UserIndex u = 0; u < user_count(); ++u) {
        if (candidates_[u].size() < k) out.push_back(u);
    }
    return out;
}

void ScoreTable::validate_against(const GroupCatalog& catalog) const {
    for (UserIndex u = 0; u < user_count(); ++u) {
        for (const auto& c : candidates_[u]) {
            if (c.item >= catalog.item_count()) {
                throw IngestionError("user '" + user_ids_[u] + "' references item index " +
                                     std::to_string(c.item) + " missing from the group catalog");
            }
        }
    }
}

UtilityVector::UtilityVector(std::size_t group_count, double initial) {
    if (!std::isfinite(initial) || initial < 0.0) {
        throw ContractViolation("UtilityVector: initial value must be finite and >= 0");
    }
    values_.assign(group_count, initial);
}

UtilityVector UtilityVector::from_values(std::vector<double> values) {
    for (double x : values) {
        if (!std::isfinite(x) || x < 0.0) {
            throw ContractViolation("UtilityVector: entries must be finite and >= 0");
        }
    }
    UtilityVector v;
    v.values_ = std::move(values);
    return v;
}

double UtilityVector::total() const {
    double t = 0.0;
    for (double x : values_) t += x;
    return t;
}

void UtilityVector::add(std::size_t g, double amount) {
    if (g >= values_.size()) {
        throw ContractViolation("UtilityVector::add: group index out of range");
    }
    if (!std::isfinite(amount) || amount < 0.0) {
        throw ContractViolation("UtilityVector::add: amount must be finite and >= 0");
    }
    values_[g] += amount;
}

UtilityVector& UtilityVector::operator+=(const UtilityVector& other) {
    if (other.size() != size()) {
        throw ContractViolation("UtilityVector::operator+=: size mismatch");
    }
    for (std::size_t g = 0; g < values_.size(); ++g) values_[g] += other.values_[g];
    return *this;
}

UtilityVector UtilityVector::normalized() const {
    const double t = total();
    if (!(t > 0.0)) {
        throw DegenerateUtilityError("cannot normalize a utility vector with no mass");
    }
    std::vector<double> out(values_.size());
    for (std::size_t g = 0; g < values_.size(); ++g) out[g] = values_[g] / t;
    return from_values(std::move(out));
}

RankedList make_ranked_list(UserIndex user, std::vector<ScoredItem> selection, bool under_filled) {
    std::sort(selection.begin(), selection.end(), [](const ScoredItem& a, const ScoredItem& b) {
        if (a.adjusted != b.adjusted) return a.adjusted > b.adjusted;
        return a.item < b.item;
    });
    for (std::size_t i = 1; i < selection.size(); ++i) {
        // sorted by (adjusted, item), so duplicates of an item are not
        // necessarily adjacent; do a full check only when cheap
        for (std::size_t j = 0; j < i; ++j) {
            if (selection[j].item == selection[i].item) {
                throw ContractViolation("ranked list items must be distinct");
            }
        }
    }
    RankedList list;
    list.user = user;
    list.under_filled = under_filled;
    list.items.reserve(selection.size());
    list.original_scores.reserve(selection.size());
    list.adjusted_scores.reserve(selection.size());
    for (const auto& s : selection) {
        list.items.push_back(s.item);
        list.original_scores.push_back(s.original);
        list.adjusted_scores.push_back(s.adjusted);
    }
    return list;
}

UtilityVector accumulate_utilities(std::span<const RankedList> lists, const GroupCatalog& catalog) {
    UtilityVector v(catalog.group_count());
    for (const auto& list : lists) {
        for (std::size_t r = 0; r < list.items.size(); ++r) {
            v.add(catalog.group_of(list.items[r]), list.original_scores[r]);
        }
    }
    return v;
}

double user_utility(const RankedList& list) {
    double w = 0.0;
    for (double s : list.original_scores) w += s;
    return w;
}

}  // namespace elastirank
