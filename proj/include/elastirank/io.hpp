#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "elastirank/core.hpp"

namespace elastirank {

inline constexpr std::string_view kToolName = "elastirank";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// 17-significant-digit formatting; round-trips every double exactly.
std::string format_double(double value);

std::uint64_t fnv1a64(std::string_view bytes);

/// "fnv1a64:<16 hex digits>" digest of a file's bytes.
std::string file_digest(const std::filesystem::path& path);

/// Writes through a temp file in the same directory, then renames.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Key/value pairs echoed into an output file header.
using HeaderEntries = std::vector<std::pair<std::string, std::string>>;

/// Comment header carried by every output file: tool version, the full run
/// config, and input digests. Contains no timestamps, so identical runs
/// produce identical headers.
std::string comment_header(std::string_view file_kind, const HeaderEntries& entries);

/// One serialized ranked list with original string ids.
struct NamedList {
    std::string user_id;
    std::vector<std::string> items;
    std::vector<double> scores;    ///< original ranking scores
    std::vector<double> adjusted;  ///< scores used for ordering
    bool under_filled = false;
};

/// Line-delimited records: `#` header lines, then one JSON object per user
/// in arrival order.
std::string serialize_lists(std::span<const RankedList> lists, const ScoreTable& table,
                            const GroupCatalog& catalog, const std::string& header);

std::vector<NamedList> parse_lists(const std::string& content);
std::vector<NamedList> read_lists(const std::filesystem::path& path);

/// CSV rows `group_id,accumulated,final_v`: utilities accumulated from the
/// emitted lists, and the re-ranker's final internal state.
std::string serialize_utilities(const UtilityVector& accumulated, const UtilityVector& final_state,
                                const GroupCatalog& catalog, const std::string& header);

struct UtilityRows {
    std::vector<std::string> group_ids;
    std::vector<double> accumulated;
    std::vector<double> final_state;
};

UtilityRows read_utilities(const std::filesystem::path& path);

}  // namespace elastirank
