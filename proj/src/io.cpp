#include "elastirank/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace elastirank {

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string file_digest(const std::filesystem::path& path) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(read_file(path))));
    return buffer;
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    const auto temp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + temp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("short write to '" + temp.string() + "'");
    }
    std::filesystem::rename(temp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string comment_header(std::string_view file_kind, const HeaderEntries& entries) {
    std::ostringstream out;
    out << "# " << kToolName << ' ' << file_kind << " v1\n";
    out << "# tool_version: " << kToolVersion << '\n';
    for (const auto& [key, value] : entries) {
        out << "# " << key << ": " << value << '\n';
    }
    return out.str();
}

std::string serialize_lists(std::span<const RankedList> lists, const ScoreTable& table,
                            const GroupCatalog& catalog, const std::string& header) {
    std::ostringstream out;
    out << header;
    for (const auto& list : lists) {
        nlohmann::json record;
        record["user"] = table.user_id(list.user);
        auto& items = record["items"] = nlohmann::json::array();
        for (ItemIndex i : list.items) items.push_back(catalog.item_id(i));
        record["scores"] = list.original_scores;
        record["adjusted"] = list.adjusted_scores;
        record["under_filled"] = list.under_filled;
        out << record.dump() << '\n';
    }
    return out.str();
}

std::vector<NamedList> parse_lists(const std::string& content) {
    std::vector<NamedList> out;
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw IngestionError("lists record at line " + std::to_string(line_no) + ": " +
                                 e.what());
        }
        NamedList named;
        try {
            named.user_id = record.at("user").get<std::string>();
            named.items = record.at("items").get<std::vector<std::string>>();
            named.scores = record.at("scores").get<std::vector<double>>();
            named.adjusted = record.at("adjusted").get<std::vector<double>>();
            named.under_filled = record.at("under_filled").get<bool>();
        } catch (const nlohmann::json::exception& e) {
            throw IngestionError("lists record at line " + std::to_string(line_no) + ": " +
                                 e.what());
        }
        if (named.items.size() != named.scores.size() ||
            named.items.size() != named.adjusted.size()) {
            throw IngestionError("lists record at line " + std::to_string(line_no) +
                                 ": item/score arrays differ in length");
        }
        out.push_back(std::move(named));
    }
    return out;
}

std::vector<NamedList> read_lists(const std::filesystem::path& path) {
    return parse_lists(read_file(path));
}

std::string serialize_utilities(const UtilityVector& accumulated, const UtilityVector& final_state,
                                const GroupCatalog& catalog, const std::string& header) {
    if (accumulated.size() != catalog.group_count() || final_state.size() != catalog.group_count()) {
        throw ContractViolation("serialize_utilities: group count mismatch");
    }
    std::ostringstream out;
    out << header;
    out << "group_id,accumulated,final_v\n";
    for (GroupIndex g = 0; g < catalog.group_count(); ++g) {
        out << catalog.group_id(g) << ',' << format_double(accumulated[g]) << ','
            << format_double(final_state[g]) << '\n';
    }
    return out.str();
}

UtilityRows read_utilities(const std::filesystem::path& path) {
    const std::string content = read_file(path);
    std::istringstream in(content);
    std::string line;
    UtilityRows rows;
    bool header_seen = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != "group_id,accumulated,final_v") {
                throw IngestionError(path.string() + ":" + std::to_string(line_no) +
                                     ": expected header 'group_id,accumulated,final_v'");
            }
            header_seen = true;
            continue;
        }
        std::istringstream fields(line);
        std::string id, acc, fin;
        if (!std::getline(fields, id, ',') || !std::getline(fields, acc, ',') ||
            !std::getline(fields, fin)) {
            throw IngestionError(path.string() + ":" + std::to_string(line_no) +
                                 ": malformed utilities row");
        }
        try {
            rows.accumulated.push_back(std::stod(acc));
            rows.final_state.push_back(std::stod(fin));
        } catch (const std::exception&) {
            throw IngestionError(path.string() + ":" + std::to_string(line_no) +
                                 ": malformed utility value");
        }
        rows.group_ids.push_back(id);
    }
    if (!header_seen) throw IngestionError(path.string() + ": missing utilities header");
    return rows;
}

}  // namespace elastirank
