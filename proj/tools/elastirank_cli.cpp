// Command-line surface wiring ingestion, re-ranking, and evaluation into
// reproducible runs. Every output file starts with a comment header carrying
// the tool version, the full config, and input digests; no timestamps, so
// identical runs produce byte-identical outputs.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or validation failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "elastirank/dataset.hpp"
#include "elastirank/fairness.hpp"
#include "elastirank/io.hpp"
#include "elastirank/metrics.hpp"
#include "elastirank/rerank.hpp"

namespace er = elastirank;
namespace fs = std::filesystem;

namespace {

struct UsageError : er::Error {
    using Error::Error;
};

std::string quoted_digest(const fs::path& p) { return er::file_digest(p); }

std::string config_digest(const std::string& config_line) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(er::fnv1a64(config_line)));
    return buffer;
}

er::EFConfig::Method parse_quadrature(const std::string& name) {
    if (name == "simpson") return er::EFConfig::Method::adaptive_simpson;
    if (name == "trapezoid") return er::EFConfig::Method::fixed_trapezoid;
    throw UsageError("--quad must be 'simpson' or 'trapezoid'");
}

// ---------------------------------------------------------------------------
// shared option bundles

struct DatasetOptions {
    std::string scores;
    std::string groups;
    std::uint32_t min_interactions = 0;
    std::uint32_t merge_threshold = 10;
    std::string user_order = "file";
    std::uint64_t seed = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--scores", scores, "scores CSV (user_id,item_id,score)")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--groups", groups, "groups CSV (item_id,group_id)")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--min-interactions", min_interactions,
                        "k-core floor; users/items with fewer interactions are dropped");
        cmd->add_option("--merge-threshold", merge_threshold,
                        "groups with fewer items are merged into one infrequent group");
        cmd->add_option("--user-order", user_order, "user arrival order: file or shuffle")
            ->check(CLI::IsMember({"file", "shuffle"}));
        cmd->add_option("--seed", seed, "seed for --user-order shuffle");
    }

    er::DatasetSpec spec() const {
        er::DatasetSpec out;
        out.scores_path = scores;
        out.groups_path = groups;
        out.min_interactions = min_interactions;
        out.infrequent_group_threshold = merge_threshold;
        out.user_order = user_order == "shuffle" ? er::DatasetSpec::UserOrder::shuffled
                                                 : er::DatasetSpec::UserOrder::file_order;
        out.shuffle_seed = seed;
        return out;
    }

    void describe(std::ostringstream& cfg) const {
        cfg << " min_interactions=" << min_interactions
            << " merge_threshold=" << merge_threshold << " user_order=" << user_order;
        if (user_order == "shuffle") cfg << " seed=" << seed;
    }

    std::pair<er::ScoreTable, er::GroupCatalog> load() const {
        auto dataset = er::load_dataset(spec());
        for (const auto& w : dataset.report.warnings) std::cerr << "warning: " << w << '\n';
        if (min_interactions > 0 || merge_threshold > 0) {
            auto pre = er::preprocess(dataset.table, dataset.catalog, spec());
            return {std::move(pre.table), std::move(pre.catalog)};
        }
        return {std::move(dataset.table), std::move(dataset.catalog)};
    }
};

struct QuadratureOptions {
    double m = 50.0;
    std::string quad = "simpson";
    double quad_tol = 1e-6;

    void attach(CLI::App* cmd) {
        cmd->add_option("--m", m, "integral half-width M");
        cmd->add_option("--quad", quad, "quadrature: simpson or trapezoid")
            ->check(CLI::IsMember({"simpson", "trapezoid"}));
        cmd->add_option("--quad-tol", quad_tol, "adaptive quadrature absolute tolerance");
    }

    er::EFConfig config() const {
        er::EFConfig cfg;
        cfg.half_width = m;
        cfg.method = parse_quadrature(quad);
        cfg.tolerance = quad_tol;
        return cfg;
    }

    void describe(std::ostringstream& cfg) const {
        cfg << " m=" << er::format_double(m) << " quad=" << quad
            << " quad_tol=" << er::format_double(quad_tol);
    }
};

// ---------------------------------------------------------------------------
// synth

struct SynthCmd {
    std::uint64_t seed = 1;
    std::uint32_t users = 100;
    std::uint32_t items = 50;
    std::uint32_t groups_n = 4;
    double skew = 1.0;
    double score_scale = 1.0;
    double group_bias = 0.0;
    double score_decades = 0.0;
    std::uint32_t cands = 20;
    std::string out;

    void attach(CLI::App* cmd) {
        cmd->add_option("--seed", seed, "generator seed");
        cmd->add_option("--users", users, "number of users");
        cmd->add_option("--items", items, "number of items");
        cmd->add_option("--groups-n", groups_n, "number of item groups");
        cmd->add_option("--skew", skew, "Zipf exponent for group roster sizes");
        cmd->add_option("--score-scale", score_scale, "multiplier applied to every score");
        cmd->add_option("--group-bias", group_bias,
                        "0 = identical group score distributions, 1 = strongly ordered");
        cmd->add_option("--score-decades", score_decades,
                        "spread item qualities log-uniformly across this many decades");
        cmd->add_option("--cands", cands, "candidates per user");
        cmd->add_option("--out", out, "output directory")->required();
    }

    int run() const {
        er::SynthSpec spec;
        spec.seed = seed;
        spec.n_users = users;
        spec.n_items = items;
        spec.n_groups = groups_n;
        spec.group_size_skew = skew;
        spec.score_scale = score_scale;
        spec.group_bias = group_bias;
        spec.score_decades = score_decades;
        spec.candidates_per_user = cands;

        std::ostringstream cfg;
        cfg << "command=synth seed=" << seed << " users=" << users << " items=" << items
            << " groups_n=" << groups_n << " skew=" << er::format_double(skew)
            << " score_scale=" << er::format_double(score_scale)
            << " group_bias=" << er::format_double(group_bias)
            << " score_decades=" << er::format_double(score_decades) << " cands=" << cands;

        const auto data = er::generate_synthetic(spec);
        const fs::path dir(out);
        std::vector<std::string> header{
            "# " + std::string(er::kToolName) + " dataset v1",
            "# tool_version: " + std::string(er::kToolVersion),
            "# config: " + cfg.str(),
            "# config_digest: " + config_digest(cfg.str()),
        };
        er::write_dataset(data.table, data.catalog, dir / "scores.csv", dir / "groups.csv", header);
        std::cout << "wrote " << (dir / "scores.csv").string() << " ("
                  << data.table.interaction_count() << " rows) and "
                  << (dir / "groups.csv").string() << " (" << data.catalog.item_count()
                  << " items, " << data.catalog.group_count() << " groups)\n";
        return 0;
    }
};

// ---------------------------------------------------------------------------
// rerank

struct RerankCmd {
    DatasetOptions data;
    std::string algorithm = "elastic";
    double t = 1.5;
    double eta = 90.0;
    double lambda = 0.0;
    std::uint32_t k = 10;
    double initial_utility = 1.0;
    std::string update_scope = "selected";
    std::string trace_out;
    std::string out;

    CLI::Option* opt_t = nullptr;
    CLI::Option* opt_eta = nullptr;
    CLI::Option* opt_lambda = nullptr;
    CLI::Option* opt_scope = nullptr;
    CLI::Option* opt_trace = nullptr;

    void attach(CLI::App* cmd) {
        data.attach(cmd);
        cmd->add_option("--algorithm", algorithm, "vanilla, elastic, or greedy-reg")
            ->check(CLI::IsMember({"vanilla", "elastic", "greedy-reg"}));
        opt_t = cmd->add_option("--t", t, "tax base (1 = fairness off)");
        opt_eta = cmd->add_option("--eta", eta, "anchor utility percentile, in [0, 100)");
        opt_lambda = cmd->add_option("--lambda", lambda, "greedy-reg trade-off coefficient");
        cmd->add_option("--k", k, "ranking cut-off K");
        cmd->add_option("--initial-utility", initial_utility, "per-group utility at stream start");
        opt_scope = cmd->add_option("--update-scope", update_scope,
                                    "utility update source: selected or all-candidates")
                        ->check(CLI::IsMember({"selected", "all-candidates"}));
        opt_trace = cmd->add_option("--trace-out", trace_out,
                                    "write the per-step (step,group,utility,distance) CSV here");
        cmd->add_option("--out", out, "output directory (lists.jsonl, utilities.csv)")->required();
    }

    void validate() const {
        if (algorithm != "greedy-reg" && opt_lambda->count() > 0) {
            throw UsageError("--lambda only applies to --algorithm greedy-reg");
        }
        if (algorithm != "elastic") {
            if (opt_eta->count() > 0) throw UsageError("--eta only applies to --algorithm elastic");
            if (opt_scope->count() > 0) {
                throw UsageError("--update-scope only applies to --algorithm elastic");
            }
            if (opt_trace->count() > 0) {
                throw UsageError("--trace-out only applies to --algorithm elastic");
            }
        }
        if (algorithm == "vanilla" && opt_t->count() > 0) {
            throw UsageError("--t does not apply to --algorithm vanilla");
        }
        if (algorithm == "greedy-reg" && opt_lambda->count() == 0) {
            throw UsageError("--algorithm greedy-reg requires --lambda");
        }
    }

    std::string config_line() const {
        std::ostringstream cfg;
        cfg << "command=rerank algorithm=" << algorithm << " k=" << k;
        if (algorithm != "vanilla") cfg << " t=" << er::format_double(t);
        if (algorithm == "elastic") {
            cfg << " eta=" << er::format_double(eta) << " update_scope=" << update_scope
                << " initial_utility=" << er::format_double(initial_utility);
        }
        if (algorithm == "greedy-reg") {
            cfg << " lambda=" << er::format_double(lambda)
                << " initial_utility=" << er::format_double(initial_utility);
        }
        data.describe(cfg);
        return cfg.str();
    }

    int run() const {
        validate();
        auto [table, catalog] = data.load();

        std::vector<er::RankedList> lists;
        er::UtilityVector final_state;
        std::vector<er::TraceRow> trace;
        if (algorithm == "vanilla") {
            lists = er::vanilla_topk(table, catalog, k);
        } else if (algorithm == "elastic") {
            er::ElasticRankConfig cfg;
            cfg.tax_base = t;
            cfg.anchor_percent = eta;
            cfg.top_k = k;
            cfg.initial_utility = initial_utility;
            cfg.update_scope = update_scope == "selected" ? er::UpdateScope::selected_items
                                                          : er::UpdateScope::all_candidates;
            cfg.record_trace = !trace_out.empty();
            auto result = er::elastic_rerank_stream(table, catalog, cfg);
            lists = std::move(result.lists);
            final_state = std::move(result.final_utilities);
            trace = std::move(result.trace);
        } else {
            er::BaselineConfig cfg;
            cfg.kind = er::BaselineConfig::Kind::greedy_regularized;
            cfg.lambda = lambda;
            cfg.tax_base = t;
            cfg.initial_utility = initial_utility;
            auto result = er::greedy_regularized(table, catalog, cfg, k);
            lists = std::move(result.lists);
            final_state = std::move(result.final_utilities);
        }

        const auto accumulated = er::accumulate_utilities(lists, catalog);
        if (final_state.size() == 0) final_state = accumulated;

        const std::string cfg_line = config_line();
        er::HeaderEntries entries{
            {"config", cfg_line},
            {"config_digest", config_digest(cfg_line)},
            {"input scores", quoted_digest(data.scores)},
            {"input groups", quoted_digest(data.groups)},
        };
        const fs::path dir(out);
        er::atomic_write(dir / "lists.jsonl",
                         er::serialize_lists(lists, table, catalog,
                                             er::comment_header("lists", entries)));
        er::atomic_write(dir / "utilities.csv",
                         er::serialize_utilities(accumulated, final_state, catalog,
                                                 er::comment_header("utilities", entries)));
        if (!trace_out.empty()) {
            std::ostringstream body;
            body << er::comment_header("trace", entries);
            body << "step,group_id,utility,distance\n";
            for (const auto& row : trace) {
                body << row.step << ',' << catalog.group_id(row.group) << ','
                     << er::format_double(row.utility) << ',' << er::format_double(row.distance)
                     << '\n';
            }
            er::atomic_write(trace_out, body.str());
        }
        std::cout << "re-ranked " << lists.size() << " users into " << (dir / "lists.jsonl").string()
                  << '\n';
        return 0;
    }
};

// ---------------------------------------------------------------------------
// ef-curve

struct EfCurveCmd {
    std::string utilities;
    std::string column = "accumulated";
    QuadratureOptions quad;
    std::uint32_t points = 401;
    std::string out;

    void attach(CLI::App* cmd) {
        cmd->add_option("--utilities", utilities, "utilities CSV from a rerank run")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--column", column, "which utilities to plot: accumulated or final")
            ->check(CLI::IsMember({"accumulated", "final"}));
        quad.attach(cmd);
        cmd->add_option("--points", points, "number of grid points");
        cmd->add_option("--out", out, "output CSV path")->required();
    }

    int run() const {
        const auto rows = er::read_utilities(utilities);
        const auto& values = column == "accumulated" ? rows.accumulated : rows.final_state;
        const auto v = er::UtilityVector::from_values(values);

        const auto cfg = quad.config();
        const auto grid = er::ef_curve_grid(cfg.half_width, points);
        const auto samples = er::ef_curve(v, grid, cfg);
        const auto ef = er::ef_metric(v, cfg);

        std::ostringstream cfg_line;
        cfg_line << "command=ef-curve column=" << column << " points=" << points;
        quad.describe(cfg_line);

        er::HeaderEntries entries{
            {"config", cfg_line.str()},
            {"config_digest", config_digest(cfg_line.str())},
            {"input utilities", quoted_digest(utilities)},
            {"groups", std::to_string(v.size())},
            {"ef_integral", er::format_double(ef.value)},
            {"ef_converged", ef.converged ? "true" : "false"},
        };
        std::ostringstream body;
        body << er::comment_header("ef-curve", entries);
        body << "t,f_normalized\n";
        for (const auto& s : samples) {
            body << er::format_double(s.tax_base) << ',' << er::format_double(s.value) << '\n';
        }
        er::atomic_write(out, body.str());
        std::cout << "wrote " << samples.size() << " curve samples to " << out
                  << " (ef_integral = " << er::format_double(ef.value) << ")\n";
        return 0;
    }
};

// ---------------------------------------------------------------------------
// eval

struct EvalCmd {
    std::string original;
    std::string fair;
    std::string groups;
    std::uint32_t k = 10;
    QuadratureOptions quad;
    std::string out;

    void attach(CLI::App* cmd) {
        cmd->add_option("--original", original, "lists.jsonl of the accuracy-only ranking")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--fair", fair, "lists.jsonl of the fairness-aware ranking")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--groups", groups, "groups CSV (item_id,group_id)")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--k", k, "ranking cut-off K");
        quad.attach(cmd);
        cmd->add_option("--out", out, "output directory (report.txt, report.json)")->required();
    }

    static er::RankedList to_ranked(const er::NamedList& named, er::UserIndex user,
                                    const er::GroupCatalog& catalog) {
        er::RankedList list;
        list.user = user;
        list.under_filled = named.under_filled;
        list.items.reserve(named.items.size());
        for (const auto& id : named.items) {
            const auto item = catalog.find_item(id);
            if (!item) throw er::IngestionError("item '" + id + "' has no group mapping");
            list.items.push_back(*item);
        }
        list.original_scores = named.scores;
        list.adjusted_scores = named.adjusted;
        return list;
    }

    int run() const {
        // the groups file defines the item universe; list files are matched
        // against it by string id
        const auto catalog = er::load_groups_only(groups);

        const auto original_named = er::read_lists(original);
        const auto fair_named = er::read_lists(fair);
        if (original_named.size() != fair_named.size()) {
            throw er::IngestionError("original and fair files rank different user sets");
        }

        std::map<std::string, std::size_t> position;
        std::vector<er::RankedList> original_lists;
        original_lists.reserve(original_named.size());
        for (std::size_t i = 0; i < original_named.size(); ++i) {
            if (!position.emplace(original_named[i].user_id, i).second) {
                throw er::IngestionError("duplicate user '" + original_named[i].user_id +
                                         "' in original lists");
            }
            original_lists.push_back(
                to_ranked(original_named[i], static_cast<er::UserIndex>(i), catalog));
        }
        std::vector<er::RankedList> fair_lists(original_named.size());
        std::vector<bool> filled(original_named.size(), false);
        for (const auto& named : fair_named) {
            const auto it = position.find(named.user_id);
            if (it == position.end()) {
                throw er::IngestionError("user '" + named.user_id +
                                         "' appears only in the fair lists");
            }
            if (filled[it->second]) {
                throw er::IngestionError("duplicate user '" + named.user_id + "' in fair lists");
            }
            filled[it->second] = true;
            fair_lists[it->second] =
                to_ranked(named, static_cast<er::UserIndex>(it->second), catalog);
        }

        const auto cfg = quad.config();
        const auto report = er::evaluate(original_lists, fair_lists, catalog, k, cfg);

        std::ostringstream cfg_line;
        cfg_line << "command=eval k=" << k;
        quad.describe(cfg_line);

        er::HeaderEntries entries{
            {"config", cfg_line.str()},
            {"config_digest", config_digest(cfg_line.str())},
            {"input original", quoted_digest(original)},
            {"input fair", quoted_digest(fair)},
            {"input groups", quoted_digest(groups)},
        };

        std::ostringstream text;
        text << er::comment_header("eval", entries);
        text << "ndcg_at_k = " << er::format_double(report.ndcg) << '\n';
        text << "loss_at_k = " << er::format_double(report.loss) << '\n';
        text << "ef_at_k = " << er::format_double(report.ef) << '\n';
        text << "ef_converged = " << (report.ef_converged ? "true" : "false") << '\n';
        text << "users = " << report.users << '\n';
        text << "ndcg_skipped_users = " << report.ndcg_skipped_users << '\n';
        text << "k = " << report.top_k << '\n';
        text << "m = " << er::format_double(report.half_width) << '\n';
        text << "clamped_group_count = " << report.clamped_groups.size() << '\n';
        for (std::size_t g = 0; g < report.group_utilities.size(); ++g) {
            text << "utility." << catalog.group_id(static_cast<er::GroupIndex>(g)) << " = "
                 << er::format_double(report.group_utilities[g]) << '\n';
        }
        const fs::path dir(out);
        er::atomic_write(dir / "report.txt", text.str());

        nlohmann::json doc;
        doc["tool_version"] = std::string(er::kToolVersion);
        doc["config"] = cfg_line.str();
        doc["config_digest"] = config_digest(cfg_line.str());
        doc["inputs"] = {{"original", quoted_digest(original)},
                         {"fair", quoted_digest(fair)},
                         {"groups", quoted_digest(groups)}};
        doc["metrics"] = {{"ndcg_at_k", report.ndcg},
                          {"loss_at_k", report.loss},
                          {"ef_at_k", report.ef},
                          {"ef_converged", report.ef_converged},
                          {"users", report.users},
                          {"ndcg_skipped_users", report.ndcg_skipped_users},
                          {"k", report.top_k},
                          {"m", report.half_width}};
        nlohmann::json utilities = nlohmann::json::object();
        for (std::size_t g = 0; g < report.group_utilities.size(); ++g) {
            utilities[catalog.group_id(static_cast<er::GroupIndex>(g))] =
                report.group_utilities[g];
        }
        doc["group_utilities"] = utilities;
        nlohmann::json clamped = nlohmann::json::array();
        for (auto g : report.clamped_groups) clamped.push_back(catalog.group_id(g));
        doc["clamped_groups"] = clamped;
        er::atomic_write(dir / "report.json", doc.dump(2) + "\n");

        std::cout << "ndcg_at_k=" << er::format_double(report.ndcg)
                  << " loss_at_k=" << er::format_double(report.loss)
                  << " ef_at_k=" << er::format_double(report.ef) << '\n';
        return 0;
    }
};

// ---------------------------------------------------------------------------
// sweep

struct SweepCmd {
    DatasetOptions data;
    std::string algorithm = "elastic";
    std::string grid;
    double t = 1.5;
    double eta = 90.0;
    double lambda = 0.0;
    std::uint32_t k = 10;
    QuadratureOptions quad;
    std::string out;

    void attach(CLI::App* cmd) {
        data.attach(cmd);
        cmd->add_option("--algorithm", algorithm, "vanilla, elastic, or greedy-reg")
            ->check(CLI::IsMember({"vanilla", "elastic", "greedy-reg"}));
        cmd->add_option("--grid", grid,
                        "parameter grid, e.g. 't=1.0:2.0:0.1' or 't=1.0,1.5;eta=50,90'")
            ->required();
        cmd->add_option("--t", t, "base tax base");
        cmd->add_option("--eta", eta, "base anchor percentile");
        cmd->add_option("--lambda", lambda, "base greedy-reg coefficient");
        cmd->add_option("--k", k, "ranking cut-off K");
        quad.attach(cmd);
        cmd->add_option("--out", out, "output CSV path")->required();
    }

    static std::vector<double> parse_values(const std::string& text) {
        std::vector<double> out;
        if (text.find(':') != std::string::npos) {
            double a = 0.0, b = 0.0, step = 0.0;
            char c1 = 0, c2 = 0;
            std::istringstream in(text);
            if (!(in >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0.0)) {
                throw UsageError("bad grid range '" + text + "' (want start:stop:step)");
            }
            for (double x = a; x <= b + 1e-9 * step; x += step) out.push_back(x);
        } else {
            std::istringstream in(text);
            std::string field;
            while (std::getline(in, field, ',')) {
                try {
                    out.push_back(std::stod(field));
                } catch (const std::exception&) {
                    throw UsageError("bad grid value '" + field + "'");
                }
            }
        }
        if (out.empty()) throw UsageError("empty grid values in '" + text + "'");
        return out;
    }

    std::vector<er::SweepConfig> parse_grid() const {
        er::SweepConfig base;
        base.algorithm = algorithm == "vanilla"  ? er::Algorithm::vanilla
                         : algorithm == "elastic" ? er::Algorithm::elastic
                                                  : er::Algorithm::greedy;
        base.tax_base = t;
        base.anchor_percent = eta;
        base.lambda = lambda;

        std::vector<std::pair<std::string, std::vector<double>>> axes;
        std::istringstream in(grid);
        std::string assignment;
        while (std::getline(in, assignment, ';')) {
            const auto eq = assignment.find('=');
            if (eq == std::string::npos) {
                throw UsageError("bad grid assignment '" + assignment + "'");
            }
            const std::string key = assignment.substr(0, eq);
            if (key != "t" && key != "eta" && key != "lambda") {
                throw UsageError("unknown grid key '" + key + "' (want t, eta, or lambda)");
            }
            if (key == "lambda" && base.algorithm != er::Algorithm::greedy) {
                throw UsageError("grid key 'lambda' only applies to --algorithm greedy-reg");
            }
            if (key == "eta" && base.algorithm != er::Algorithm::elastic) {
                throw UsageError("grid key 'eta' only applies to --algorithm elastic");
            }
            axes.emplace_back(key, parse_values(assignment.substr(eq + 1)));
        }
        if (axes.empty()) throw UsageError("--grid has no assignments");

        std::vector<er::SweepConfig> configs{base};
        for (const auto& [key, values] : axes) {
            std::vector<er::SweepConfig> next;
            next.reserve(configs.size() * values.size());
            for (const auto& cfg : configs) {
                for (double v : values) {
                    auto c = cfg;
                    if (key == "t") c.tax_base = v;
                    if (key == "eta") c.anchor_percent = v;
                    if (key == "lambda") c.lambda = v;
                    next.push_back(c);
                }
            }
            configs = std::move(next);
        }
        return configs;
    }

    int run() const {
        auto [table, catalog] = data.load();
        const auto configs = parse_grid();
        const auto points = er::pareto_sweep(table, catalog, configs, k, quad.config());

        std::ostringstream cfg_line;
        cfg_line << "command=sweep algorithm=" << algorithm << " grid=" << grid << " k=" << k
                 << " t=" << er::format_double(t) << " eta=" << er::format_double(eta)
                 << " lambda=" << er::format_double(lambda);
        quad.describe(cfg_line);
        data.describe(cfg_line);

        er::HeaderEntries entries{
            {"config", cfg_line.str()},
            {"config_digest", config_digest(cfg_line.str())},
            {"input scores", quoted_digest(data.scores)},
            {"input groups", quoted_digest(data.groups)},
        };
        std::ostringstream body;
        body << er::comment_header("pareto", entries);
        body << "algorithm,t,eta,lambda,ndcg,ef,dominated,status\n";
        std::size_t failures = 0;
        for (const auto& pt : points) {
            std::string status = "ok";
            if (pt.failed) {
                ++failures;
                status = pt.error;
                for (auto& c : status) {
                    if (c == ',' || c == '\n') c = ';';
                }
            }
            body << er::algorithm_name(pt.config.algorithm) << ','
                 << er::format_double(pt.config.tax_base) << ','
                 << er::format_double(pt.config.anchor_percent) << ','
                 << er::format_double(pt.config.lambda) << ','
                 << (pt.failed ? "" : er::format_double(pt.ndcg)) << ','
                 << (pt.failed ? "" : er::format_double(pt.ef)) << ','
                 << (pt.dominated ? 1 : 0) << ',' << status << '\n';
        }
        er::atomic_write(out, body.str());
        if (failures == points.size()) {
            std::cerr << "error: every grid point failed\n";
            return 1;
        }
        std::cout << "wrote " << points.size() << " sweep points to " << out;
        if (failures > 0) std::cout << " (" << failures << " failed)";
        std::cout << '\n';
        return 0;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"elasticity-based fair re-ranking toolkit"};
    app.set_version_flag("--version", std::string(er::kToolVersion));
    app.require_subcommand(1);

    SynthCmd synth;
    synth.attach(app.add_subcommand("synth", "generate a deterministic synthetic dataset"));
    RerankCmd rerank;
    rerank.attach(app.add_subcommand("rerank", "re-rank a score table and write lists/utilities"));
    EfCurveCmd curve;
    curve.attach(app.add_subcommand("ef-curve", "sample the fairness family across tax bases"));
    EvalCmd eval;
    eval.attach(app.add_subcommand("eval", "compute NDCG@K, Loss@K, and EF@K for two rankings"));
    SweepCmd sweep;
    sweep.attach(app.add_subcommand("sweep", "run a parameter grid and write the Pareto table"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand("synth")) return synth.run();
        if (app.got_subcommand("rerank")) return rerank.run();
        if (app.got_subcommand("ef-curve")) return curve.run();
        if (app.got_subcommand("eval")) return eval.run();
        if (app.got_subcommand("sweep")) return sweep.run();
        std::cerr << "error: no subcommand selected\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const er::IngestionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const er::ContractViolation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
