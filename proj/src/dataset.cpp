#include "elastirank/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "elastirank/io.hpp"
#include "elastirank/rng.hpp"

namespace elastirank {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

struct CsvReader {
    std::ifstream in;
    std::string path;
    std::size_t line_no = 0;

    explicit CsvReader(const std::filesystem::path& p) : in(p), path(p.string()) {
        if (!in) throw IngestionError("cannot open '" + path + "'");
    }

    /// Next data line (comments and blanks skipped); false at end of file.
    bool next(std::string& line) {
        while (std::getline(in, line)) {
            ++line_no;
            const std::string t = trim(line);
            if (t.empty() || t.front() == '#') continue;
            line = t;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw IngestionError(path + ":" + std::to_string(line_no) + ": " + what);
    }
};

double parse_score(const std::string& field, CsvReader& reader) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) reader.fail("malformed score '" + field + "'");
    if (!std::isfinite(value) || value < 0.0) {
        reader.fail("score must be finite and >= 0, got '" + field + "'");
    }
    return value;
}

GroupCatalog load_groups(const std::filesystem::path& path) {
    CsvReader reader(path);
    std::string line;
    if (!reader.next(line)) reader.fail("missing header row");
    if (split_fields(line) != std::vector<std::string>{"item_id", "group_id"}) {
        reader.fail("expected header 'item_id,group_id'");
    }
    GroupCatalog catalog;
    while (reader.next(line)) {
        const auto fields = split_fields(line);
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
            reader.fail("expected 'item_id,group_id'");
        }
        GroupIndex g;
        if (auto existing = catalog.find_group(fields[1])) {
            g = *existing;
        } else {
            g = catalog.add_group(fields[1]);
        }
        if (catalog.find_item(fields[0])) {
            reader.fail("item '" + fields[0] + "' mapped to more than one group");
        }
        catalog.add_item(fields[0], g);
    }
    return catalog;
}

ScoreTable reorder_users(const ScoreTable& table, const std::vector<UserIndex>& order) {
    ScoreTable out;
    for (UserIndex u : order) {
        const auto nu = out.add_user(table.user_id(u));
        for (const auto& c : table.candidates(u)) out.add_candidate(nu, c.item, c.score);
    }
    return out;
}

}  // namespace

GroupCatalog load_groups_only(const std::filesystem::path& groups_path) {
    return load_groups(groups_path);
}

Dataset load_dataset(const DatasetSpec& spec) {
    Dataset out;
    out.catalog = load_groups(spec.groups_path);

    CsvReader reader(spec.scores_path);
    std::string line;
    if (!reader.next(line)) reader.fail("missing header row");
    if (split_fields(line) != std::vector<std::string>{"user_id", "item_id", "score"}) {
        reader.fail("expected header 'user_id,item_id,score'");
    }

    // per-user positions for last-wins duplicate handling
    std::vector<std::unordered_map<ItemIndex, std::size_t>> seen;
    while (reader.next(line)) {
        const auto fields = split_fields(line);
        if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
            reader.fail("expected 'user_id,item_id,score'");
        }
        const auto item = out.catalog.find_item(fields[1]);
        if (!item) reader.fail("item '" + fields[1] + "' has no group mapping");
        const double score = parse_score(fields[2], reader);

        UserIndex u;
        if (auto existing = out.table.find_user(fields[0])) {
            u = *existing;
        } else {
            u = out.table.add_user(fields[0]);
            seen.emplace_back();
        }
        ++out.report.score_rows;
        auto& positions = seen[u];
        if (auto it = positions.find(*item); it != positions.end()) {
            out.table.replace_score(u, it->second, score);
            ++out.report.duplicate_rows;
            if (out.report.warnings.size() < 20) {
                out.report.warnings.push_back("duplicate (user '" + fields[0] + "', item '" +
                                              fields[1] + "') at line " +
                                              std::to_string(reader.line_no) + "; last value kept");
            }
        } else {
            positions.emplace(*item, out.table.candidates(u).size());
            out.table.add_candidate(u, *item, score);
        }
    }

    out.table.validate_against(out.catalog);

    if (spec.user_order == DatasetSpec::UserOrder::shuffled) {
        std::vector<UserIndex> order(out.table.user_count());
        std::iota(order.begin(), order.end(), UserIndex{0});
        Rng rng(spec.shuffle_seed);
        rng.shuffle(order);
        out.table = reorder_users(out.table, order);
    }
    return out;
}

Preprocessed preprocess(const ScoreTable& table, const GroupCatalog& catalog,
                        const DatasetSpec& spec) {
    const std::size_t n_users = table.user_count();
    const std::size_t n_items = catalog.item_count();
    std::vector<bool> user_alive(n_users, true);
    std::vector<bool> item_alive(n_items, true);

    Preprocessed out;
    const std::uint32_t floor = spec.min_interactions;
    if (floor > 0) {
        bool changed = true;
        while (changed) {
            changed = false;
            ++out.report.kcore_iterations;
            std::vector<std::size_t> item_degree(n_items, 0);
            for (UserIndex u = 0; u < n_users; ++u) {
                if (!user_alive[u]) continue;
                std::size_t degree = 0;
                for (const auto& c : table.candidates(u)) {
                    if (item_alive[c.item]) ++degree;
                }
                if (degree < floor) {
                    user_alive[u] = false;
                    ++out.report.users_removed;
                    changed = true;
                } else {
                    for (const auto& c : table.candidates(u)) {
                        if (item_alive[c.item]) ++item_degree[c.item];
                    }
                }
            }
            for (ItemIndex i = 0; i < n_items; ++i) {
                if (item_alive[i] && item_degree[i] < floor) {
                    item_alive[i] = false;
                    ++out.report.items_removed;
                    changed = true;
                }
            }
        }
    }

    // roster sizes of surviving items decide the infrequent-group merge
    std::vector<std::size_t> roster_size(catalog.group_count(), 0);
    for (ItemIndex i = 0; i < n_items; ++i) {
        if (item_alive[i]) ++roster_size[catalog.group_of(i)];
    }
    std::vector<bool> merged(catalog.group_count(), false);
    std::size_t survivors = 0;
    for (GroupIndex g = 0; g < catalog.group_count(); ++g) {
        if (roster_size[g] == 0) continue;
        if (spec.infrequent_group_threshold > 0 &&
            roster_size[g] < spec.infrequent_group_threshold) {
            merged[g] = true;
            ++out.report.groups_merged;
        } else {
            ++survivors;
        }
    }

    // dense re-index: surviving groups keep their relative order, the merged
    // infrequent group goes last
    std::vector<GroupIndex> group_map(catalog.group_count(), 0);
    {
        GroupIndex next = 0;
        for (GroupIndex g = 0; g < catalog.group_count(); ++g) {
            if (roster_size[g] > 0 && !merged[g]) group_map[g] = next++;
        }
        for (GroupIndex g = 0; g < catalog.group_count(); ++g) {
            if (roster_size[g] > 0 && merged[g]) group_map[g] = next;
        }
        for (GroupIndex g = 0; g < catalog.group_count(); ++g) {
            if (!merged[g] && roster_size[g] > 0) {
                out.catalog.add_group(catalog.group_id(g));
            }
        }
        if (out.report.groups_merged > 0) {
            // reuse the original name when exactly one group fell below the
            // threshold, otherwise introduce the merged group
            if (out.report.groups_merged == 1) {
                for (GroupIndex g = 0; g < catalog.group_count(); ++g) {
                    if (merged[g]) out.catalog.add_group(catalog.group_id(g));
                }
            } else {
                out.catalog.add_group("infrequent");
            }
        }
    }

    for (ItemIndex i = 0; i < n_items; ++i) {
        if (item_alive[i]) {
            out.catalog.add_item(catalog.item_id(i), group_map[catalog.group_of(i)]);
        }
    }
    if (out.catalog.item_count() == 0) {
        throw IngestionError("preprocessing removed every item");
    }

    for (UserIndex u = 0; u < n_users; ++u) {
        if (!user_alive[u]) continue;
        const auto nu = out.table.add_user(table.user_id(u));
        for (const auto& c : table.candidates(u)) {
            if (!item_alive[c.item]) continue;
            const auto item = out.catalog.find_item(catalog.item_id(c.item));
            out.table.add_candidate(nu, *item, c.score);
        }
    }
    if (out.table.user_count() == 0) {
        throw IngestionError("preprocessing removed every user");
    }
    return out;
}

SynthData generate_synthetic(const SynthSpec& spec) {
    if (spec.n_users < 1 || spec.n_items < 1 || spec.n_groups < 1 ||
        spec.candidates_per_user < 1) {
        throw ContractViolation("generate_synthetic: counts must be >= 1");
    }
    if (spec.n_groups > spec.n_items) {
        throw ContractViolation("generate_synthetic: need at least one item per group");
    }
    if (spec.candidates_per_user > spec.n_items) {
        throw ContractViolation("generate_synthetic: candidates_per_user exceeds item count");
    }
    if (!(spec.score_scale > 0.0) || spec.score_scale > 1.0) {
        throw ContractViolation("generate_synthetic: score_scale must lie in (0, 1]");
    }
    if (spec.group_bias < 0.0 || spec.group_bias > 1.0) {
        throw ContractViolation("generate_synthetic: group_bias must lie in [0, 1]");
    }
    if (spec.score_decades < 0.0 || spec.score_decades > 8.0) {
        throw ContractViolation("generate_synthetic: score_decades must lie in [0, 8]");
    }

    Rng rng(spec.seed);
    const std::size_t groups = spec.n_groups;

    // Zipf-weighted roster sizes with one item guaranteed per group;
    // remainders distributed by largest fractional part
    std::vector<std::size_t> sizes(groups, 1);
    {
        std::size_t spare = spec.n_items - groups;
        std::vector<double> weight(groups);
        double total = 0.0;
        for (std::size_t g = 0; g < groups; ++g) {
            weight[g] = std::pow(static_cast<double>(g + 1), -spec.group_size_skew);
            total += weight[g];
        }
        std::vector<double> quota(groups);
        std::size_t assigned = 0;
        for (std::size_t g = 0; g < groups; ++g) {
            quota[g] = static_cast<double>(spare) * weight[g] / total;
            sizes[g] += static_cast<std::size_t>(std::floor(quota[g]));
            assigned += static_cast<std::size_t>(std::floor(quota[g]));
        }
        std::vector<std::size_t> order(groups);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double fa = quota[a] - std::floor(quota[a]);
            const double fb = quota[b] - std::floor(quota[b]);
            if (fa != fb) return fa > fb;
            return a < b;
        });
        for (std::size_t r = 0; r < spare - assigned; ++r) ++sizes[order[r]];
    }

    SynthData out;
    const int group_digits = static_cast<int>(std::to_string(groups - 1).size());
    const int item_digits = static_cast<int>(std::to_string(spec.n_items - 1).size());
    const int user_digits = static_cast<int>(std::to_string(spec.n_users - 1).size());
    auto padded = [](const char* prefix, std::size_t value, int width) {
        std::string digits = std::to_string(value);
        return std::string(prefix) +
               std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(digits.size()))), '0') +
               digits;
    };

    std::vector<double> quality(spec.n_items);
    {
        std::size_t next_item = 0;
        for (std::size_t g = 0; g < groups; ++g) {
            const GroupIndex gi = out.catalog.add_group(padded("g", g, group_digits));
            const double level =
                groups == 1 ? 1.0
                            : 1.0 - spec.group_bias * static_cast<double>(g) /
                                        static_cast<double>(groups - 1);
            for (std::size_t n = 0; n < sizes[g]; ++n, ++next_item) {
                out.catalog.add_item(padded("i", next_item, item_digits), gi);
                const double draw = rng.uniform();
                const double base = spec.score_decades > 0.0
                                        ? std::pow(10.0, -spec.score_decades * draw)
                                        : 0.15 + 0.85 * draw;
                quality[next_item] = base * level;
            }
        }
    }

    // Floyd's sampling: candidates_per_user distinct items per user
    for (std::size_t u = 0; u < spec.n_users; ++u) {
        const UserIndex ui = out.table.add_user(padded("u", u, user_digits));
        std::vector<ItemIndex> chosen;
        std::vector<bool> taken(spec.n_items, false);
        chosen.reserve(spec.candidates_per_user);
        for (std::size_t j = spec.n_items - spec.candidates_per_user; j < spec.n_items; ++j) {
            const std::size_t t = rng.below(j + 1);
            const std::size_t pick = taken[t] ? j : t;
            taken[pick] = true;
            chosen.push_back(static_cast<ItemIndex>(pick));
        }
        for (ItemIndex item : chosen) {
            double s = spec.score_scale * quality[item] * rng.uniform(0.7, 1.0);
            s = std::clamp(s, 1e-9, 0.999999);
            out.table.add_candidate(ui, item, s);
        }
    }
    return out;
}

void write_dataset(const ScoreTable& table, const GroupCatalog& catalog,
                   const std::filesystem::path& scores_path,
                   const std::filesystem::path& groups_path,
                   const std::vector<std::string>& header_lines) {
    std::ostringstream groups;
    for (const auto& h : header_lines) groups << h << '\n';
    groups << "item_id,group_id\n";
    for (ItemIndex i = 0; i < catalog.item_count(); ++i) {
        groups << catalog.item_id(i) << ',' << catalog.group_id(catalog.group_of(i)) << '\n';
    }
    atomic_write(groups_path, groups.str());

    std::ostringstream scores;
    for (const auto& h : header_lines) scores << h << '\n';
    scores << "user_id,item_id,score\n";
    for (UserIndex u = 0; u < table.user_count(); ++u) {
        for (const auto& c : table.candidates(u)) {
            scores << table.user_id(u) << ',' << catalog.item_id(c.item) << ','
                   << format_double(c.score) << '\n';
        }
    }
    atomic_write(scores_path, scores.str());
}

}  // namespace elastirank
