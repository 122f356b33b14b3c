#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "elastirank/core.hpp"
#include "elastirank/fairness.hpp"
#include "elastirank/rerank.hpp"

namespace elastirank {

struct AccuracyResult {
    double value = 1.0;
    std::size_t skipped_users = 0;  ///< users with an all-zero original list
};

/// Ratio-form NDCG: mean over users of
///   [sum over fair items of s / log2(rank_fair + 1)] /
///   [sum over original items of s / log2(rank_orig + 1)].
/// Ranks start at 1; 1.0 means the re-ranking left quality unchanged.
/// Users whose original list has zero mass are skipped.
AccuracyResult ndcg_at_k(std::span<const RankedList> original, std::span<const RankedList> fair);

/// Mean per-slot score mass given up by the re-ranking:
///   (sum original scores - sum fair scores) / (|U| * K).
double loss_at_k(std::span<const RankedList> original, std::span<const RankedList> fair,
                 std::uint32_t k);

/// EF of the utilities accumulated from the fair lists.
EFResult ef_at_k(std::span<const RankedList> fair, const GroupCatalog& catalog,
                 const EFConfig& cfg);

struct EvalReport {
    double ndcg = 1.0;
    std::size_t ndcg_skipped_users = 0;
    double loss = 0.0;
    double ef = 0.0;
    bool ef_converged = true;
    std::vector<double> group_utilities;    ///< accumulated from the fair lists
    std::vector<GroupIndex> clamped_groups; ///< groups at the clamp floor
    std::uint32_t top_k = 0;
    double half_width = 0.0;
    std::size_t users = 0;
};

EvalReport evaluate(std::span<const RankedList> original, std::span<const RankedList> fair,
                    const GroupCatalog& catalog, std::uint32_t k, const EFConfig& cfg);

enum class Algorithm { vanilla, elastic, greedy };

const char* algorithm_name(Algorithm a);

struct SweepConfig {
    Algorithm algorithm = Algorithm::elastic;
    double tax_base = 1.5;
    double anchor_percent = 90.0;
    double lambda = 0.0;
};

struct ParetoPoint {
    SweepConfig config;
    double ndcg = 0.0;
    double ef = 0.0;
    bool dominated = false;
    bool failed = false;
    std::string error;
};

/// Runs every grid config against the vanilla ranking of the same table and
/// marks dominance: a point is dominated when another valid point is at least
/// as good in both NDCG and EF and strictly better in one. Failed configs are
/// recorded and excluded from dominance.
std::vector<ParetoPoint> pareto_sweep(const ScoreTable& table, const GroupCatalog& catalog,
                                      std::span<const SweepConfig> grid, std::uint32_t k,
                                      const EFConfig& cfg);

/// Dominance marking used by pareto_sweep, exposed separately so callers can
/// re-mark merged point sets.
void mark_dominance(std::vector<ParetoPoint>& points);

struct OperatingPointRequest {
    Algorithm algorithm = Algorithm::elastic;  ///< elastic bisects t, greedy bisects lambda
    double anchor_percent = 90.0;              ///< fixed for elastic runs
    double tax_base = 2.0;                     ///< fixed regularizer t for greedy runs
    double ndcg_low = 0.985;
    double ndcg_high = 0.995;
    std::uint32_t top_k = 10;
    double parameter_cap = 64.0;
    std::size_t max_iterations = 60;
};

struct OperatingPoint {
    double parameter = 0.0;  ///< t for elastic, lambda for greedy
    double ndcg = 1.0;
    double ef = 0.0;
    bool found = false;
    std::size_t evaluations = 0;
};

/// Bisects the trade-off parameter until NDCG lands inside the requested
/// band. The parameter starts at its fairness-off value (t = 1 or lambda = 0)
/// where NDCG is exactly 1, and grows until NDCG falls below the band.
OperatingPoint find_ndcg_operating_point(const ScoreTable& table, const GroupCatalog& catalog,
                                         const OperatingPointRequest& req, const EFConfig& cfg);

}  // namespace elastirank
