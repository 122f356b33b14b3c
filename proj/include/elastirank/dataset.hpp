#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "elastirank/core.hpp"

namespace elastirank {

struct DatasetSpec {
    std::filesystem::path scores_path;
    std::filesystem::path groups_path;
    /// k-core floor: users and items with fewer interactions are removed
    /// iteratively until a fixpoint. 0 disables the filter.
    std::uint32_t min_interactions = 0;
    /// Groups with fewer items than this are merged into a single
    /// "infrequent" group. 0 disables the merge.
    std::uint32_t infrequent_group_threshold = 10;

    enum class UserOrder { file_order, shuffled };
    UserOrder user_order = UserOrder::file_order;
    std::uint64_t shuffle_seed = 0;
};

struct LoadReport {
    std::size_t score_rows = 0;
    std::size_t duplicate_rows = 0;  ///< (user, item) repeats; last value wins
    std::vector<std::string> warnings;
};

struct Dataset {
    ScoreTable table;
    GroupCatalog catalog;
    LoadReport report;
};

/// Parses and validates the scores and groups files. File formats:
///   scores: header `user_id,item_id,score`, one row per (user, item)
///   groups: header `item_id,group_id`
/// `#`-prefixed comment lines are allowed in both. Malformed rows, negative
/// or non-finite scores, and items without a group are hard errors.
Dataset load_dataset(const DatasetSpec& spec);

/// Parses just a groups CSV, for callers that only need the item -> group
/// mapping.
GroupCatalog load_groups_only(const std::filesystem::path& groups_path);

struct PreprocessReport {
    std::size_t users_removed = 0;
    std::size_t items_removed = 0;
    std::size_t groups_merged = 0;
    std::size_t kcore_iterations = 0;
};

struct Preprocessed {
    ScoreTable table;
    GroupCatalog catalog;
    PreprocessReport report;
};

/// k-core filtering to a fixpoint, then the infrequent-group merge, then a
/// dense re-index. Idempotent. Throws IngestionError when nothing survives.
Preprocessed preprocess(const ScoreTable& table, const GroupCatalog& catalog,
                        const DatasetSpec& spec);

struct SynthSpec {
    std::uint64_t seed = 1;
    std::uint32_t n_users = 100;
    std::uint32_t n_items = 50;
    std::uint32_t n_groups = 4;
    /// Zipf exponent for group roster sizes; 0 gives near-equal rosters.
    double group_size_skew = 1.0;
    /// Multiplies every score; keep <= 1 so scores stay click-probability-like.
    double score_scale = 1.0;
    /// 0 = all groups share one score distribution; towards 1, later groups
    /// draw systematically lower item qualities.
    double group_bias = 0.0;
    /// 0 = item qualities uniform in [0.15, 1]; > 0 = log-uniform across this
    /// many decades (heavy-tailed scores, mass concentrated in the head).
    double score_decades = 0.0;
    std::uint32_t candidates_per_user = 20;
};

struct SynthData {
    ScoreTable table;
    GroupCatalog catalog;
};

/// Deterministic synthetic dataset: same spec, same tables, byte for byte.
SynthData generate_synthetic(const SynthSpec& spec);

/// Writes a dataset in the CSV formats accepted by load_dataset. The header
/// lines (already `#`-prefixed) are prepended to both files.
void write_dataset(const ScoreTable& table, const GroupCatalog& catalog,
                   const std::filesystem::path& scores_path,
                   const std::filesystem::path& groups_path,
                   const std::vector<std::string>& header_lines);

}  // namespace elastirank
