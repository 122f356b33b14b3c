#include "elastirank/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace elastirank {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive_finite(std::span<const double> xs, const char* who) {
    if (xs.empty()) throw ContractViolation(std::string(who) + ": empty vector");
    for (double x : xs) {
        if (!std::isfinite(x) || !(x > 0.0)) {
            throw ContractViolation(std::string(who) + ": entries must be positive and finite");
        }
    }
}

// log(sum_g x_g^e) for positive x, via log-sum-exp; `shift` is subtracted
// from each log(x_g) first, which turns raw values into shares for free.
double log_power_sum(std::span<const double> xs, double e, double shift = 0.0) {
    double mx = -kInf;
    for (double x : xs) mx = std::max(mx, e * (std::log(x) - shift));
    double acc = 0.0;
    for (double x : xs) acc += std::exp(e * (std::log(x) - shift) - mx);
    return mx + std::log(acc);
}

double one_sided_at_unit(std::size_t groups, UnitSide side) {
    switch (side) {
        case UnitSide::below: return static_cast<double>(groups);
        case UnitSide::above: return -static_cast<double>(groups);
        case UnitSide::none: break;
    }
    throw SingularTaxBaseError(
        "the fairness family jumps at tax base 1; request a one-sided limit");
}

double checked_total(std::span<const double> values, const char* who) {
    if (values.empty()) throw ContractViolation(std::string(who) + ": empty vector");
    double total = 0.0;
    for (double x : values) {
        if (!std::isfinite(x) || x < 0.0) {
            throw ContractViolation(std::string(who) + ": entries must be finite and >= 0");
        }
        total += x;
    }
    if (!(total > 0.0)) {
        throw DegenerateUtilityError(std::string(who) + ": utility vector has no mass");
    }
    return total;
}

double clamped_total(std::span<const double> values, double epsilon) {
    double t = 0.0;
    for (double x : values) t += std::max(x, epsilon);
    return t;
}

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw ContractViolation("epsilon must be positive and finite");
    }
}

void require_regular_tax_base(double tax_base) {
    if (!std::isfinite(tax_base)) throw ContractViolation("tax base must be finite");
    if (tax_base == 0.0 || tax_base == 1.0) {
        throw SingularTaxBaseError("operation undefined at tax base " +
                                   std::to_string(tax_base));
    }
}

}  // namespace

double fairness_power_form(std::span<const double> weights, double tax_base, UnitSide side) {
    require_positive_finite(weights, "fairness_power_form");
    if (!std::isfinite(tax_base)) throw ContractViolation("tax base must be finite");
    if (tax_base == 1.0) return one_sided_at_unit(weights.size(), side);
    if (tax_base == 0.0) {
        throw SingularTaxBaseError("the raw power form diverges at tax base 0 off the simplex");
    }
    const double log_sum = log_power_sum(weights, 1.0 - tax_base);
    const double sign = tax_base < 1.0 ? 1.0 : -1.0;
    return sign * std::exp(log_sum / tax_base);
}

double fairness_from_shares(std::span<const double> shares, double tax_base, UnitSide side) {
    require_positive_finite(shares, "fairness_from_shares");
    if (!std::isfinite(tax_base)) throw ContractViolation("tax base must be finite");
    if (tax_base == 1.0) return one_sided_at_unit(shares.size(), side);
    if (tax_base == 0.0) {
        double h = 0.0;
        for (double s : shares) h -= s * std::log(s);
        return std::exp(h);
    }
    const double log_sum = log_power_sum(shares, 1.0 - tax_base);
    const double sign = tax_base < 1.0 ? 1.0 : -1.0;
    return sign * std::exp(log_sum / tax_base);
}

double fairness_of_values(std::span<const double> values, double tax_base, double epsilon,
                          UnitSide side) {
    checked_total(values, "fairness_of_values");
    require_epsilon(epsilon);
    if (!std::isfinite(tax_base)) throw ContractViolation("tax base must be finite");
    if (tax_base == 1.0) return one_sided_at_unit(values.size(), side);

    const double total = clamped_total(values, epsilon);
    const double log_total = std::log(total);
    if (tax_base == 0.0) {
        double h = 0.0;
        for (double x : values) {
            const double s = std::max(x, epsilon) / total;
            h -= s * std::log(s);
        }
        return std::exp(h);
    }
    const double e = 1.0 - tax_base;
    double mx = -kInf;
    for (double x : values) mx = std::max(mx, e * (std::log(std::max(x, epsilon)) - log_total));
    double acc = 0.0;
    for (double x : values) {
        acc += std::exp(e * (std::log(std::max(x, epsilon)) - log_total) - mx);
    }
    const double log_sum = mx + std::log(acc);
    const double sign = tax_base < 1.0 ? 1.0 : -1.0;
    return sign * std::exp(log_sum / tax_base);
}

double fairness_general(const UtilityVector& v, const FairnessParams& params, UnitSide side) {
    return fairness_of_values(v.values(), params.tax_base, params.epsilon, side);
}

double entropy_fairness(const UtilityVector& v) {
    const double total = checked_total(v.values(), "entropy_fairness");
    double h = 0.0;
    for (double x : v.values()) {
        if (x > 0.0) {
            const double s = x / total;
            h -= s * std::log(s);
        }
    }
    return h;
}

double max_min_fairness(const UtilityVector& v, const FairnessParams& params) {
    require_epsilon(params.epsilon);
    checked_total(v.values(), "max_min_fairness");
    const auto shares = clamped_shares(v, params.epsilon);
    return -1.0 / *std::min_element(shares.begin(), shares.end());
}

double fairness_partial(const UtilityVector& v, const FairnessParams& params, GroupIndex g) {
    require_regular_tax_base(params.tax_base);
    if (g >= v.size()) throw ContractViolation("fairness_partial: group index out of range");
    const auto shares = clamped_shares(v, params.epsilon);
    const double t = params.tax_base;
    const double log_sum = log_power_sum(shares, 1.0 - t);
    return (std::abs(1.0 - t) / t) *
           std::exp(-t * std::log(shares[g]) + (1.0 / t - 1.0) * log_sum);
}

double elasticity(const UtilityVector& v, GroupIndex rich, GroupIndex poor,
                  const FairnessParams& params) {
    if (rich >= v.size() || poor >= v.size()) {
        throw ContractViolation("elasticity: group index out of range");
    }
    const auto shares = clamped_shares(v, params.epsilon);
    return std::exp(-std::abs(params.tax_base) *
                    (std::log(shares[rich]) - std::log(shares[poor])));
}

double support_weight(const UtilityVector& v, GroupIndex rich, GroupIndex poor,
                      const FairnessParams& params) {
    return 1.0 / elasticity(v, rich, poor, params);
}

double rich_poor_threshold(const UtilityVector& v, const FairnessParams& params) {
    require_regular_tax_base(params.tax_base);
    require_epsilon(params.epsilon);
    checked_total(v.values(), "rich_poor_threshold");

    std::vector<double> clamped(v.size());
    for (std::size_t g = 0; g < v.size(); ++g) clamped[g] = std::max(v[g], params.epsilon);
    const double t = params.tax_base;
    const double log_total = std::log(clamped_total(clamped, params.epsilon));
    const double log_sum = log_power_sum(clamped, 1.0 - t);
    return std::exp((log_total - log_sum) / t);
}

std::vector<GroupIndex> clamped_groups(const UtilityVector& v, double epsilon) {
    require_epsilon(epsilon);
    std::vector<GroupIndex> out;
    for (std::size_t g = 0; g < v.size(); ++g) {
        if (v[g] < epsilon) out.push_back(static_cast<GroupIndex>(g));
    }
    return out;
}

std::vector<double> clamped_shares(const UtilityVector& v, double epsilon) {
    require_epsilon(epsilon);
    checked_total(v.values(), "clamped_shares");
    std::vector<double> out(v.size());
    double total = 0.0;
    for (std::size_t g = 0; g < v.size(); ++g) {
        out[g] = std::max(v[g], epsilon);
        total += out[g];
    }
    for (double& x : out) x /= total;
    return out;
}

namespace {

struct QuadOutcome {
    double value = 0.0;
    bool converged = true;
};

// hard ceiling on integrand evaluations per segment; a clamped-to-epsilon
// utility drives the integrand to ~1e12 where the absolute tolerance is
// unreachable and unbounded refinement would take 2^max_depth nodes
constexpr long kSimpsonNodeBudget = 1 << 18;

template <typename F>
QuadOutcome simpson_recurse(const F& f, double a, double fa, double m, double fm, double b,
                            double fb, double whole, double tol, int depth, long& budget) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    budget -= 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) {
        return {left + right + delta / 15.0, true};
    }
    if (depth <= 0 || budget <= 0) {
        return {left + right + delta / 15.0, false};
    }
    const auto l = simpson_recurse(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1, budget);
    const auto r = simpson_recurse(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1, budget);
    return {l.value + r.value, l.converged && r.converged};
}

template <typename F>
QuadOutcome adaptive_simpson(const F& f, double a, double b, double tol, int max_depth) {
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    long budget = kSimpsonNodeBudget;
    return simpson_recurse(f, a, fa, m, fm, b, fb, whole, tol, max_depth, budget);
}

template <typename F>
double fixed_trapezoid(const F& f, double a, double b, int nodes) {
    // endpoints nudged inward so segment boundaries at the jump are never hit
    const double lo = a + 1e-9;
    const double hi = b - 1e-9;
    const double h = (hi - lo) / static_cast<double>(nodes - 1);
    double acc = 0.5 * (f(lo) + f(hi));
    for (int i = 1; i < nodes - 1; ++i) acc += f(lo + h * static_cast<double>(i));
    return acc * h;
}

}  // namespace

EFResult ef_metric(const UtilityVector& v, const EFConfig& cfg) {
    if (!(cfg.half_width > 0.0) || !std::isfinite(cfg.half_width)) {
        throw ContractViolation("ef_metric: half-width must be positive");
    }
    if (cfg.method == EFConfig::Method::fixed_trapezoid && cfg.nodes_per_segment < 2) {
        throw ContractViolation("ef_metric: trapezoid needs at least 2 nodes per segment");
    }
    const auto shares = clamped_shares(v, cfg.epsilon);

    const double lo = 1.0 - cfg.half_width;
    const double hi = 1.0 + cfg.half_width;
    std::vector<double> cuts{lo};
    if (lo < 0.0) cuts.push_back(0.0);
    cuts.push_back(1.0);
    cuts.push_back(hi);

    EFResult out;
    out.clamped = clamped_groups(v, cfg.epsilon);
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s];
        const double b = cuts[s + 1];
        const UnitSide side = b <= 1.0 ? UnitSide::below : UnitSide::above;
        auto integrand = [&](double t) { return fairness_from_shares(shares, t, side); };
        if (cfg.method == EFConfig::Method::adaptive_simpson) {
            const auto r = adaptive_simpson(integrand, a, b, cfg.tolerance, cfg.max_depth);
            total += r.value;
            out.converged = out.converged && r.converged;
        } else {
            total += fixed_trapezoid(integrand, a, b, cfg.nodes_per_segment);
        }
    }
    out.value = total / (2.0 * cfg.half_width * static_cast<double>(shares.size()));
    return out;
}

std::vector<CurveSample> ef_curve(const UtilityVector& v, std::span<const double> grid,
                                  const EFConfig& cfg) {
    const auto shares = clamped_shares(v, cfg.epsilon);
    const double groups = static_cast<double>(shares.size());
    std::vector<CurveSample> out;
    out.reserve(grid.size());
    for (double t : grid) {
        out.push_back({t, fairness_from_shares(shares, t, UnitSide::none) / groups});
    }
    return out;
}

std::vector<double> ef_curve_grid(double half_width, std::size_t points) {
    if (!(half_width > 0.0)) throw ContractViolation("ef_curve_grid: half-width must be positive");
    if (points < 2) throw ContractViolation("ef_curve_grid: need at least 2 points");
    const double lo = 1.0 - half_width;
    const double step = 2.0 * half_width / static_cast<double>(points - 1);
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) {
        double t = lo + step * static_cast<double>(i);
        if (std::abs(t - 1.0) < 1e-6) t = t < 1.0 ? 1.0 - 1e-6 : 1.0 + 1e-6;
        grid[i] = t;
    }
    return grid;
}

TradeoffDiagnostics transfer_ratio(const UtilityVector& v, const FairnessParams& params) {
    const double a = std::abs(params.tax_base);
    if (a == 0.0) throw SingularTaxBaseError("transfer ratio needs a nonzero tax base");
    require_epsilon(params.epsilon);
    checked_total(v.values(), "transfer_ratio");

    const std::size_t n = v.size();
    std::vector<double> x(n);
    for (std::size_t g = 0; g < n; ++g) x[g] = std::max(v[g], params.epsilon);

    double denom = 0.0;
    for (double xp : x) denom += std::pow(xp, 1.0 - a);
    double cross = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        const double base = std::pow(x[p], 1.0 - a);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == p) continue;
            cross += base * std::pow(x[r] / x[p], -a);
        }
    }

    TradeoffDiagnostics out;
    out.k_value = cross / denom;
    out.gamma = 1.0 - 1.0 / (1.0 + out.k_value);

    double sum_x = 0.0;
    double sum_inv = 0.0;
    for (double xp : x) {
        sum_x += xp;
        sum_inv += std::pow(xp, -a);
    }
    out.gamma_closed_form = 1.0 - denom / (sum_x * sum_inv);

    out.accuracy_direction.assign(n, 1.0);
    out.fairness_direction.resize(n);
    for (std::size_t g = 0; g < n; ++g) out.fairness_direction[g] = 1.0 - x[g] / sum_x;
    return out;
}

}  // namespace elastirank
