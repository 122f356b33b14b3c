#include "elastirank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace elastirank {

namespace {

double position_discounted_mass(const RankedList& list) {
    double acc = 0.0;
    for (std::size_t r = 0; r < list.items.size(); ++r) {
        acc += list.original_scores[r] / std::log2(static_cast<double>(r) + 2.0);
    }
    return acc;
}

void require_aligned(std::span<const RankedList> original, std::span<const RankedList> fair,
                     const char* who) {
    if (original.size() != fair.size()) {
        throw ContractViolation(std::string(who) + ": list collections differ in size");
    }
    for (std::size_t i = 0; i < original.size(); ++i) {
        if (original[i].user != fair[i].user) {
            throw ContractViolation(std::string(who) + ": user mismatch at position " +
                                    std::to_string(i));
        }
    }
}

std::vector<RankedList> run_grid_config(const ScoreTable& table, const GroupCatalog& catalog,
                                        const SweepConfig& cfg, std::uint32_t k) {
    switch (cfg.algorithm) {
        case Algorithm::vanilla:
            return vanilla_topk(table, catalog, k);
        case Algorithm::elastic: {
            ElasticRankConfig ec;
            ec.tax_base = cfg.tax_base;
            ec.anchor_percent = cfg.anchor_percent;
            ec.top_k = k;
            return elastic_rerank_stream(table, catalog, ec).lists;
        }
        case Algorithm::greedy: {
            BaselineConfig bc;
            bc.kind = BaselineConfig::Kind::greedy_regularized;
            bc.lambda = cfg.lambda;
            bc.tax_base = cfg.tax_base;
            return greedy_regularized(table, catalog, bc, k).lists;
        }
    }
    throw ContractViolation("unknown algorithm");
}

}  // namespace

AccuracyResult ndcg_at_k(std::span<const RankedList> original, std::span<const RankedList> fair) {
    require_aligned(original, fair, "ndcg_at_k");
    double sum = 0.0;
    std::size_t used = 0;
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < original.size(); ++i) {
        const double denom = position_discounted_mass(original[i]);
        if (!(denom > 0.0)) {
            ++skipped;
            continue;
        }
        sum += position_discounted_mass(fair[i]) / denom;
        ++used;
    }
    return {used > 0 ? sum / static_cast<double>(used) : 1.0, skipped};
}

double loss_at_k(std::span<const RankedList> original, std::span<const RankedList> fair,
                 std::uint32_t k) {
    if (k < 1) throw ContractViolation("loss_at_k: k must be >= 1");
    require_aligned(original, fair, "loss_at_k");
    if (original.empty()) return 0.0;
    double lost = 0.0;
    for (std::size_t i = 0; i < original.size(); ++i) {
        lost += user_utility(original[i]) - user_utility(fair[i]);
    }
    return lost / (static_cast<double>(original.size()) * static_cast<double>(k));
}

EFResult ef_at_k(std::span<const RankedList> fair, const GroupCatalog& catalog,
                 const EFConfig& cfg) {
    return ef_metric(accumulate_utilities(fair, catalog), cfg);
}

EvalReport evaluate(std::span<const RankedList> original, std::span<const RankedList> fair,
                    const GroupCatalog& catalog, std::uint32_t k, const EFConfig& cfg) {
    EvalReport report;
    const auto accuracy = ndcg_at_k(original, fair);
    report.ndcg = accuracy.value;
    report.ndcg_skipped_users = accuracy.skipped_users;
    report.loss = loss_at_k(original, fair, k);
    const auto utilities = accumulate_utilities(fair, catalog);
    const auto ef = ef_metric(utilities, cfg);
    report.ef = ef.value;
    report.ef_converged = ef.converged;
    report.clamped_groups = ef.clamped;
    report.group_utilities = utilities.values();
    report.top_k = k;
    report.half_width = cfg.half_width;
    report.users = original.size();
    return report;
}

const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::vanilla: return "vanilla";
        case Algorithm::elastic: return "elastic";
        case Algorithm::greedy: return "greedy-reg";
    }
    return "unknown";
}

std::vector<ParetoPoint> pareto_sweep(const ScoreTable& table, const GroupCatalog& catalog,
                                      std::span<const SweepConfig> grid, std::uint32_t k,
                                      const EFConfig& cfg) {
    if (grid.empty()) throw ContractViolation("pareto_sweep: empty grid");
    const auto originals = vanilla_topk(table, catalog, k);
    std::vector<ParetoPoint> points;
    points.reserve(grid.size());
    for (const auto& gc : grid) {
        ParetoPoint pt;
        pt.config = gc;
        try {
            const auto lists = run_grid_config(table, catalog, gc, k);
            pt.ndcg = ndcg_at_k(originals, lists).value;
            pt.ef = ef_at_k(lists, catalog, cfg).value;
        } catch (const Error& e) {
            pt.failed = true;
            pt.error = e.what();
        }
        points.push_back(std::move(pt));
    }
    mark_dominance(points);
    return points;
}

void mark_dominance(std::vector<ParetoPoint>& points) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < points.size(); ++i) {
        points[i].dominated = false;
        if (!points[i].failed) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].ndcg != points[b].ndcg) return points[a].ndcg > points[b].ndcg;
        return points[a].ef > points[b].ef;
    });
    // sweep in descending NDCG; a point is dominated by anything strictly
    // ahead in NDCG with at least its EF, or by an equal-NDCG point with
    // strictly better EF
    double best_ef_strictly_ahead = -std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && points[order[j]].ndcg == points[order[i]].ndcg) ++j;
        const double group_best_ef = points[order[i]].ef;
        for (std::size_t m = i; m < j; ++m) {
            auto& pt = points[order[m]];
            pt.dominated = pt.ef <= best_ef_strictly_ahead || pt.ef < group_best_ef;
        }
        best_ef_strictly_ahead = std::max(best_ef_strictly_ahead, group_best_ef);
        i = j;
    }
}

OperatingPoint find_ndcg_operating_point(const ScoreTable& table, const GroupCatalog& catalog,
                                         const OperatingPointRequest& req, const EFConfig& cfg) {
    if (req.algorithm == Algorithm::vanilla) {
        throw ContractViolation("find_ndcg_operating_point: vanilla has no trade-off parameter");
    }
    if (!(req.ndcg_low < req.ndcg_high)) {
        throw ContractViolation("find_ndcg_operating_point: band must be ordered");
    }
    const auto originals = vanilla_topk(table, catalog, req.top_k);

    OperatingPoint result;
    auto probe = [&](double parameter) {
        SweepConfig sc;
        sc.algorithm = req.algorithm;
        sc.anchor_percent = req.anchor_percent;
        if (req.algorithm == Algorithm::elastic) {
            sc.tax_base = parameter;
        } else {
            sc.tax_base = req.tax_base;
            sc.lambda = parameter;
        }
        const auto lists = run_grid_config(table, catalog, sc, req.top_k);
        ++result.evaluations;
        return std::pair<double, double>{ndcg_at_k(originals, lists).value,
                                         ef_at_k(lists, catalog, cfg).value};
    };

    const double off = req.algorithm == Algorithm::elastic ? 1.0 : 0.0;
    double step = req.algorithm == Algorithm::elastic ? 0.125 : 0.25;
    double above = off;  // fairness off: NDCG is exactly 1, above the band

    // expand until NDCG falls below the band (or give up at the cap)
    double below = off;
    bool bracketed = false;
    while (!bracketed) {
        below = off + step;
        if (below > req.parameter_cap) {
            below = req.parameter_cap;
        }
        const auto [ndcg, ef] = probe(below);
        if (ndcg < req.ndcg_low) {
            bracketed = true;
        } else if (ndcg <= req.ndcg_high) {
            result.parameter = below;
            result.ndcg = ndcg;
            result.ef = ef;
            result.found = true;
            return result;
        } else {
            above = below;
            if (below >= req.parameter_cap) {
                result.parameter = below;
                result.ndcg = ndcg;
                result.ef = ef;
                return result;  // plateau: never left the band's upper side
            }
            step *= 2.0;
        }
    }

    for (std::size_t iter = 0; iter < req.max_iterations; ++iter) {
        const double mid = 0.5 * (above + below);
        const auto [ndcg, ef] = probe(mid);
        result.parameter = mid;
        result.ndcg = ndcg;
        result.ef = ef;
        if (ndcg > req.ndcg_high) {
            above = mid;
        } else if (ndcg < req.ndcg_low) {
            below = mid;
        } else {
            result.found = true;
            return result;
        }
    }
    return result;
}

}  // namespace elastirank
