#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "elastirank/io.hpp"
#include "elastirank/rerank.hpp"
#include "support/oracles.hpp"
#include "support/test_support.hpp"

using namespace elastirank;
using test_support::make_catalog;
using test_support::make_table;
using test_support::TestRng;
using test_support::uv;

TEST_CASE("curve distance on hand-checked inputs") {
    CHECK(curve_distance(2.0, 2.0, 0.5) == 0.0);
    CHECK(curve_distance(2.0, 2.0, 3.0) == 0.0);
    // poor group below the anchor gets a boost
    CHECK(curve_distance(1.0, 3.0, 2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    // rich group above the anchor gets pushed down
    CHECK(curve_distance(3.0, 1.0, 2.0) == doctest::Approx(-2.0 / 27.0).epsilon(1e-12));
    // the (1 - t) factor switches the fairness term off entirely
    CHECK(curve_distance(0.5, 7.0, 1.0) == 0.0);
    CHECK_THROWS_AS(curve_distance(0.0, 1.0, 2.0), ContractViolation);
    CHECK_THROWS_AS(curve_distance(1.0, -2.0, 2.0), ContractViolation);
}

TEST_CASE("curve distance sign follows the utility gap") {
    TestRng rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const double vg = rng.uniform(0.05, 20.0);
        const double va = rng.uniform(0.05, 20.0);
        double t = rng.uniform(-2.0, 3.5);
        if (std::abs(t - 1.0) < 1e-3) t = 1.5;
        const double d = curve_distance(vg, va, t);
        if (vg < va) CHECK(d > 0.0);
        if (vg > va) CHECK(d < 0.0);
    }
}

TEST_CASE("raising a poor group's utility shrinks its boost") {
    TestRng rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const double va = rng.uniform(1.0, 20.0);
        const double vg = rng.uniform(0.05, va * 0.95);
        const double t = rng.uniform(1.05, 3.0);
        const double h = 1e-6 * vg;
        const double slope =
            (curve_distance(vg + h, va, t) - curve_distance(vg - h, va, t)) / (2.0 * h);
        CHECK(slope < 0.0);
    }
}

TEST_CASE("anchor selection walks the ascending utility order") {
    const auto v = uv({5.0, 1.0, 3.0, 2.0});
    // ascending order: g1(1), g3(2), g2(3), g0(5)
    CHECK(select_anchor(v, 50.0) == 2);
    CHECK(select_anchor(v, 0.0) == 1);
    CHECK(select_anchor(v, 95.0) == 0);  // floor(3.8) = 3 -> richest
    // ties broken by ascending group id
    CHECK(select_anchor(uv({2.0, 2.0, 2.0}), 0.0) == 0);
    CHECK_THROWS_AS(select_anchor(v, 100.0), ContractViolation);
    CHECK_THROWS_AS(select_anchor(v, -1.0), ContractViolation);
}

TEST_CASE("single-group candidates reduce to vanilla ordering") {
    const auto catalog = make_catalog({{"A", "g0"}, {"B", "g0"}, {"C", "g0"}});
    const auto table = make_table(catalog, {{"u0", {{"A", 0.2}, {"B", 0.9}, {"C", 0.5}}}});
    ElasticRankConfig cfg;
    cfg.tax_base = 2.0;
    cfg.anchor_percent = 0.0;
    cfg.top_k = 2;
    const auto list = elastic_rerank_user(0, table.candidates(0), uv({4.0}), catalog, cfg);
    CHECK(list.items == std::vector<ItemIndex>{*catalog.find_item("B"), *catalog.find_item("C")});
}

TEST_CASE("a poor group's candidate can overtake a richer one") {
    const auto catalog = make_catalog({{"A", "g0"}, {"B", "g1"}});
    const auto table = make_table(catalog, {{"u0", {{"A", 0.5}, {"B", 1.0}}}});
    ElasticRankConfig cfg;
    cfg.tax_base = 2.0;
    cfg.anchor_percent = 90.0;  // with two groups this anchors at the richer one
    cfg.top_k = 1;
    const auto v = uv({1.0, 3.0});
    CHECK(select_anchor(v, cfg.anchor_percent) == 1);
    const auto list = elastic_rerank_user(0, table.candidates(0), v, catalog, cfg);
    // A gains curve_distance(1, 3, 2) = +2/3: 0.5 + 0.667 > 1.0
    CHECK(list.items == std::vector<ItemIndex>{*catalog.find_item("A")});
    CHECK(list.adjusted_scores[0] == doctest::Approx(0.5 + 2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("tax base 1 reproduces vanilla byte for byte") {
    TestRng rng(43);
    SynthSpec spec;
    spec.seed = 404;
    spec.n_users = 60;
    spec.n_items = 80;
    spec.n_groups = 5;
    spec.candidates_per_user = 25;
    const auto data = generate_synthetic(spec);

    ElasticRankConfig cfg;
    cfg.tax_base = 1.0;
    cfg.anchor_percent = 90.0;
    cfg.top_k = 7;
    const auto stream = elastic_rerank_stream(data.table, data.catalog, cfg);
    const auto vanilla = vanilla_topk(data.table, data.catalog, cfg.top_k);

    const auto a = serialize_lists(stream.lists, data.table, data.catalog, "");
    const auto b = serialize_lists(vanilla, data.table, data.catalog, "");
    CHECK(a == b);
}

TEST_CASE("adding a constant offset to one user's scores keeps the selection") {
    const auto catalog = make_catalog({{"A", "g0"}, {"B", "g1"}, {"C", "g2"}, {"D", "g0"}});
    TestRng rng(44);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::pair<std::string, double>> cands;
        const std::vector<std::string> names{"A", "B", "C", "D"};
        for (const auto& name : names) cands.emplace_back(name, rng.uniform(0.0, 1.0));
        auto shifted = cands;
        const double offset = rng.uniform(0.0, 2.0);
        for (auto& [_, s] : shifted) s += offset;

        const auto t1 = make_table(catalog, {{"u0", cands}});
        const auto t2 = make_table(catalog, {{"u0", shifted}});
        const auto l1 = vanilla_topk(t1, catalog, 2)[0];
        const auto l2 = vanilla_topk(t2, catalog, 2)[0];
        CHECK(l1.items == l2.items);
    }
}

TEST_CASE("stream of one user equals the single-user operation") {
    const auto catalog = make_catalog({{"A", "g0"}, {"B", "g1"}});
    const auto table = make_table(catalog, {{"u0", {{"A", 0.3}, {"B", 0.8}}}});
    ElasticRankConfig cfg;
    cfg.tax_base = 1.8;
    cfg.top_k = 1;
    const auto stream = elastic_rerank_stream(table, catalog, cfg);
    const auto single = elastic_rerank_user(
        0, table.candidates(0), UtilityVector(2, cfg.initial_utility), catalog, cfg);
    CHECK(stream.lists[0].items == single.items);
    CHECK(stream.lists[0].adjusted_scores == single.adjusted_scores);
}

TEST_CASE("stream matches the straight-line oracle on random tiny instances") {
    TestRng rng(45);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t groups = 1 + rng.below(3);
        const std::size_t users = 1 + rng.below(5);
        const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng.below(2));
        double t = rng.uniform(0.4, 2.6);
        if (std::abs(t - 1.0) < 0.01) t = 1.3;
        const double eta = rng.uniform(0.0, 99.9);

        // one item universe, every item in a random group
        const std::size_t items = 2 + rng.below(5);
        GroupCatalog catalog;
        for (std::size_t g = 0; g < groups; ++g) catalog.add_group("g" + std::to_string(g));
        std::vector<std::uint32_t> group_of(items);
        for (std::size_t i = 0; i < items; ++i) {
            group_of[i] = static_cast<std::uint32_t>(rng.below(groups));
            catalog.add_item("i" + std::to_string(i), group_of[i]);
        }
        ScoreTable table;
        test_oracles::OracleInstance inst;
        inst.groups = groups;
        for (std::size_t u = 0; u < users; ++u) {
            const auto ui = table.add_user("u" + std::to_string(u));
            std::vector<test_oracles::OracleCandidate> row;
            const std::size_t n = 1 + rng.below(items);
            std::vector<std::size_t> pool(items);
            for (std::size_t i = 0; i < items; ++i) pool[i] = i;
            for (std::size_t pick = 0; pick < n; ++pick) {
                const std::size_t at = rng.below(pool.size());
                const auto item = static_cast<ItemIndex>(pool[at]);
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(at));
                const double score = rng.uniform(0.01, 1.0);
                table.add_candidate(ui, item, score);
                row.push_back({item, group_of[item], score});
            }
            inst.users.push_back(std::move(row));
        }

        ElasticRankConfig cfg;
        cfg.tax_base = t;
        cfg.anchor_percent = eta;
        cfg.top_k = k;
        const auto got = elastic_rerank_stream(table, catalog, cfg);
        const auto want = test_oracles::oracle_elastic_stream(inst, k, t, eta, cfg.initial_utility);

        REQUIRE(got.lists.size() == want.lists.size());
        for (std::size_t u = 0; u < users; ++u) {
            CHECK(got.lists[u].items == want.lists[u].items);
            CHECK(got.lists[u].under_filled == want.lists[u].under_filled);
            REQUIRE(got.lists[u].adjusted_scores.size() == want.lists[u].adjusted.size());
            for (std::size_t r = 0; r < want.lists[u].adjusted.size(); ++r) {
                CHECK(std::abs(got.lists[u].adjusted_scores[r] - want.lists[u].adjusted[r]) <
                      1e-12);
            }
        }
        for (std::size_t g = 0; g < groups; ++g) {
            CHECK(std::abs(got.final_utilities[g] - want.final_utilities[g]) < 1e-12);
        }
    }
}

TEST_CASE("stream utilities never decrease and respect the update scope") {
    SynthSpec spec;
    spec.seed = 505;
    spec.n_users = 40;
    spec.n_items = 60;
    spec.n_groups = 4;
    spec.candidates_per_user = 15;
    const auto data = generate_synthetic(spec);

    ElasticRankConfig cfg;
    cfg.tax_base = 1.6;
    cfg.top_k = 5;
    cfg.record_trace = true;
    const auto stream = elastic_rerank_stream(data.table, data.catalog, cfg);

    // the trace stores utilities at decision time; they are non-decreasing
    std::vector<double> last(data.catalog.group_count(), 0.0);
    for (const auto& row : stream.trace) {
        CHECK(row.utility >= last[row.group]);
        last[row.group] = row.utility;
    }

    SUBCASE("all-candidates scope accumulates every score") {
        auto wide = cfg;
        wide.update_scope = UpdateScope::all_candidates;
        wide.record_trace = false;
        const auto result = elastic_rerank_stream(data.table, data.catalog, wide);
        UtilityVector expected(data.catalog.group_count(), wide.initial_utility);
        for (UserIndex u = 0; u < data.table.user_count(); ++u) {
            for (const auto& c : data.table.candidates(u)) {
                expected.add(data.catalog.group_of(c.item), c.score);
            }
        }
        for (std::size_t g = 0; g < expected.size(); ++g) {
            CHECK(result.final_utilities[g] == doctest::Approx(expected[g]).epsilon(1e-12));
        }
    }
}

TEST_CASE("under-filled users emit what exists and carry the flag") {
    const auto catalog = make_catalog({{"A", "g0"}, {"B", "g1"}});
    const auto table = make_table(catalog, {{"u0", {{"A", 0.4}}}});
    const auto lists = vanilla_topk(table, catalog, 3);
    CHECK(lists[0].items.size() == 1);
    CHECK(lists[0].under_filled);
}

TEST_CASE("greedy baseline") {
    const auto catalog = make_catalog({{"A", "g0"}, {"B", "g1"}, {"C", "g0"}, {"D", "g1"}});
    const auto table = make_table(catalog, {
        {"u0", {{"A", 0.9}, {"B", 0.2}, {"C", 0.6}, {"D", 0.4}}},
        {"u1", {{"A", 0.7}, {"B", 0.6}, {"C", 0.5}, {"D", 0.1}}},
    });

    SUBCASE("lambda 0 equals vanilla") {
        BaselineConfig cfg;
        cfg.kind = BaselineConfig::Kind::greedy_regularized;
        cfg.lambda = 0.0;
        cfg.tax_base = 2.0;
        const auto greedy = greedy_regularized(table, catalog, cfg, 2);
        const auto vanilla = vanilla_topk(table, catalog, 2);
        REQUIRE(greedy.lists.size() == vanilla.size());
        for (std::size_t u = 0; u < vanilla.size(); ++u) {
            CHECK(greedy.lists[u].items == vanilla[u].items);
            CHECK(greedy.lists[u].adjusted_scores == vanilla[u].adjusted_scores);
        }
    }

    SUBCASE("a large lambda promotes the starving group") {
        // user 0 only carries g0 items and makes that group rich; user 1's
        // regularizer must then take the g1 item over a higher-scored g0 one
        const auto rich_then_choice = make_table(catalog, {
            {"u0", {{"A", 0.9}, {"C", 0.8}}},
            {"u1", {{"C", 0.9}, {"B", 0.2}}},
        });
        BaselineConfig cfg;
        cfg.kind = BaselineConfig::Kind::greedy_regularized;
        cfg.tax_base = 2.0;
        cfg.lambda = 0.0;
        const auto accuracy_only = greedy_regularized(rich_then_choice, catalog, cfg, 1);
        CHECK(accuracy_only.lists[1].items[0] == *catalog.find_item("C"));
        cfg.lambda = 50.0;
        const auto fair = greedy_regularized(rich_then_choice, catalog, cfg, 1);
        CHECK(fair.lists[1].items[0] == *catalog.find_item("B"));
    }

    SUBCASE("final utilities replay through accumulation") {
        BaselineConfig cfg;
        cfg.kind = BaselineConfig::Kind::greedy_regularized;
        cfg.lambda = 1.5;
        cfg.tax_base = 2.0;
        const auto greedy = greedy_regularized(table, catalog, cfg, 2);
        const auto accumulated = accumulate_utilities(greedy.lists, catalog);
        for (std::size_t g = 0; g < accumulated.size(); ++g) {
            CHECK(greedy.final_utilities[g] ==
                  doctest::Approx(cfg.initial_utility + accumulated[g]).epsilon(1e-12));
        }
    }
}

TEST_CASE("re-rankers are deterministic") {
    SynthSpec spec;
    spec.seed = 606;
    spec.n_users = 30;
    spec.n_items = 50;
    spec.n_groups = 3;
    spec.candidates_per_user = 12;
    const auto data = generate_synthetic(spec);
    ElasticRankConfig cfg;
    cfg.tax_base = 1.4;
    cfg.top_k = 4;
    const auto a = elastic_rerank_stream(data.table, data.catalog, cfg);
    const auto b = elastic_rerank_stream(data.table, data.catalog, cfg);
    const auto sa = serialize_lists(a.lists, data.table, data.catalog, "");
    const auto sb = serialize_lists(b.lists, data.table, data.catalog, "");
    CHECK(sa == sb);
}

TEST_CASE("config validation") {
    const auto catalog = make_catalog({{"A", "g0"}});
    const auto table = make_table(catalog, {{"u0", {{"A", 0.5}}}});
    ElasticRankConfig cfg;
    cfg.top_k = 0;
    CHECK_THROWS_AS(elastic_rerank_stream(table, catalog, cfg), ContractViolation);
    cfg.top_k = 1;
    cfg.initial_utility = 0.0;
    CHECK_THROWS_AS(elastic_rerank_stream(table, catalog, cfg), ContractViolation);
    cfg.initial_utility = 1.0;
    cfg.anchor_percent = 100.0;
    CHECK_THROWS_AS(elastic_rerank_stream(table, catalog, cfg), ContractViolation);
}
