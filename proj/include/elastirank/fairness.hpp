#pragma once

#include <span>
#include <vector>

#include "elastirank/core.hpp"

namespace elastirank {

/// Parameters of the generalized fairness family f(v; t).
struct FairnessParams {
    /// Tax base t. Larger |t| weights poorer groups more strongly.
    double tax_base = 1.5;
    /// Clamp floor applied to utilities before normalization, so that groups
    /// with zero accumulated utility stay inside the family's domain.
    double epsilon = 1e-12;
};

/// One-sided limit selector for the jump at tax base 1.
enum class UnitSide {
    none,   ///< plain evaluation; tax base 1 is an error
    below,  ///< limit from t < 1: +|G|
    above,  ///< limit from t > 1: -|G|
};

/// The raw power form sign(1-t) * (sum_g w_g^(1-t))^(1/t) on the given
/// positive weights, with no normalization or clamping. Undefined at
/// tax_base 0; tax_base 1 requires a side.
double fairness_power_form(std::span<const double> weights, double tax_base,
                           UnitSide side = UnitSide::none);

/// Family value on weights that already lie on the simplex. Fills the
/// removable point at tax base 0 with exp(H) and takes one-sided limits at
/// tax base 1 when a side is given.
double fairness_from_shares(std::span<const double> shares, double tax_base,
                            UnitSide side = UnitSide::none);

/// Family value on arbitrary non-negative utilities: clamps entries to
/// >= epsilon, normalizes, then evaluates. Allocation-free.
double fairness_of_values(std::span<const double> values, double tax_base, double epsilon,
                          UnitSide side = UnitSide::none);

double fairness_general(const UtilityVector& v, const FairnessParams& params,
                        UnitSide side = UnitSide::none);

/// Entropy H of the normalized utilities (natural log, 0*log 0 = 0).
double entropy_fairness(const UtilityVector& v);

/// Value the family approaches as the tax base grows without bound:
/// -1 / min(normalized utility). The worst-off group dominates.
double max_min_fairness(const UtilityVector& v, const FairnessParams& params);

/// Partial derivative of the family w.r.t. one normalized utility:
/// (|1-t|/t) * share_g^(-t) * (sum shares^(1-t))^(1/t - 1).
double fairness_partial(const UtilityVector& v, const FairnessParams& params, GroupIndex g);

/// Utility elasticity between a richer and a poorer group:
/// (share_rich / share_poor)^(-|t|). For positive tax bases this equals the
/// ratio fairness_partial(rich) / fairness_partial(poor).
double elasticity(const UtilityVector& v, GroupIndex rich, GroupIndex poor,
                  const FairnessParams& params);

/// Reciprocal of `elasticity`: how strongly the poorer group's marginal
/// utility is up-weighted relative to the richer one.
double support_weight(const UtilityVector& v, GroupIndex rich, GroupIndex poor,
                      const FairnessParams& params);

/// Raw-utility level separating rich from poor groups:
/// theta = (sum v / sum v^(1-t))^(1/t). Increasing a group's raw utility
/// raises the fairness value below theta and lowers it above.
double rich_poor_threshold(const UtilityVector& v, const FairnessParams& params);

/// Groups whose raw utility sits at or below the clamp floor.
std::vector<GroupIndex> clamped_groups(const UtilityVector& v, double epsilon);

/// Clamped, normalized utilities as a plain vector.
std::vector<double> clamped_shares(const UtilityVector& v, double epsilon);

struct EFConfig {
    enum class Method { adaptive_simpson, fixed_trapezoid };

    double half_width = 50.0;  ///< M: integrate over [1-M, 1+M]
    Method method = Method::adaptive_simpson;
    double tolerance = 1e-6;   ///< Simpson absolute tolerance per segment
    int max_depth = 40;        ///< Simpson recursion limit
    int nodes_per_segment = 4001;  ///< trapezoid node count per segment
    double epsilon = 1e-12;    ///< utility clamp floor
};

struct EFResult {
    double value = 0.0;
    /// False when the adaptive quadrature hit its depth limit; `value` then
    /// carries the partial estimate.
    bool converged = true;
    std::vector<GroupIndex> clamped;
};

/// Normalized area under the fairness family over [1-M, 1+M]:
/// integral of f(v;t) / (2*M*|G|) dt. Zero for perfectly uniform utilities,
/// negative otherwise. The domain is split at the removable point t=0 and the
/// jump t=1; the bare point t=1 is never evaluated.
EFResult ef_metric(const UtilityVector& v, const EFConfig& cfg);

struct CurveSample {
    double tax_base = 0.0;
    double value = 0.0;  ///< f(v;t) / |G|
};

/// Samples the normalized family across a tax-base grid. The grid must not
/// contain the bare point t=1.
std::vector<CurveSample> ef_curve(const UtilityVector& v, std::span<const double> grid,
                                  const EFConfig& cfg);

/// Evenly spaced grid over [1-M, 1+M]; points within 1e-6 of the jump at 1
/// are nudged to 1 +/- 1e-6 (exact 1 goes to the upper side).
std::vector<double> ef_curve_grid(double half_width, std::size_t points = 401);

/// Gradient-level diagnostics of the accuracy/fairness trade-off.
struct TradeoffDiagnostics {
    double gamma = 0.0;             ///< transfer ratio, in [0, 1)
    double k_value = 0.0;           ///< elasticity aggregate; gamma = 1 - 1/(1+k)
    double gamma_closed_form = 0.0; ///< independent closed-form evaluation
    std::vector<double> accuracy_direction;  ///< all ones
    std::vector<double> fairness_direction;  ///< 1 - share_g
};

/// Fraction of the fairness pressure passed through as accuracy loss.
/// Requires a nonzero tax base.
TradeoffDiagnostics transfer_ratio(const UtilityVector& v, const FairnessParams& params);

}  // namespace elastirank
