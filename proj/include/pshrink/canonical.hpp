#pragma once

// Thresholding shrinkage estimators for the normal-means model
// Z ~ N(theta, sigma^2 I) in d dimensions.
//
// The estimator family is
//
//     theta_i = (1 - a |x_i|^(beta-2) / D)_+ z_i,   x = z / sigma,   D = sum |x_j|^beta,
//
// which zeroes every coordinate whose shrink factor would be negative. With
// beta = 2 and a = d - 2 it is the positive-part James-Stein estimator. All
// formulas work on the standardized coordinates x and rescale afterwards.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "random.hpp"
#include "stats.hpp"

namespace pshrink {

/// Non-owning view of a noisy coefficient vector and its noise scale.
class CanonicalSample {
public:
    CanonicalSample(std::span<const double> z, double sigma = 1.0) : z_(z), sigma_(sigma) {
        if (z_.empty()) throw InputError("CanonicalSample: empty coefficient vector");
        if (!(sigma_ > 0.0) || !std::isfinite(sigma_))
            throw InputError("CanonicalSample: sigma must be positive and finite");
    }

    std::span<const double> z() const noexcept { return z_; }
    double sigma() const noexcept { return sigma_; }
    std::size_t dimension() const noexcept { return z_.size(); }

    double standardized(std::size_t i) const noexcept { return z_[i] / sigma_; }

    void require_dimension(std::size_t min_d, const char* op) const {
        if (dimension() < min_d)
            throw InputError(std::string(op) + ": requires d >= " + std::to_string(min_d) + ", got " +
                             std::to_string(dimension()));
    }

private:
    std::span<const double> z_;
    double sigma_;
};

/// How the shrink constant a is chosen for a given dimension d.
namespace a_rule {
/// a = 0.97 (d - 2) C_beta; equals (5/3)(d - 2) at beta = 4/3 to three digits.
struct FiniteSample {};
/// a = d (2 ln d)^((2 - beta)/2) m_beta.
struct Asymptotic {};
/// a = d.
struct EmpiricalBayes {};
/// a = 2 (beta - 1) d - 2 beta, the largest a with a proof of minimaxity.
struct DominationBound {};
struct Fixed {
    double a;
};
}  // namespace a_rule

using ARule = std::variant<a_rule::FiniteSample, a_rule::Asymptotic, a_rule::EmpiricalBayes,
                           a_rule::DominationBound, a_rule::Fixed>;

inline std::string to_string(const ARule& rule) {
    return std::visit(
        [](const auto& r) -> std::string {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, a_rule::FiniteSample>) return "finite";
            else if constexpr (std::is_same_v<R, a_rule::Asymptotic>) return "asymptotic";
            else if constexpr (std::is_same_v<R, a_rule::EmpiricalBayes>) return "eb";
            else if constexpr (std::is_same_v<R, a_rule::DominationBound>) return "domination";
            else return "fixed:" + std::to_string(r.a);
        },
        rule);
}

struct ShrinkConfig {
    double beta = 4.0 / 3.0;
    ARule a_rule = a_rule::FiniteSample{};

    /// Checks the parts of the configuration that do not depend on d.
    void validate() const {
        if (!(beta > 0.0 && beta <= 2.0))
            throw ConfigError("ShrinkConfig: beta must lie in (0, 2], got " + std::to_string(beta));
        if (const auto* fixed = std::get_if<a_rule::Fixed>(&a_rule)) {
            if (!(fixed->a > 0.0) || !std::isfinite(fixed->a))
                throw ConfigError("ShrinkConfig: fixed a must be positive and finite");
        }
        if (std::holds_alternative<a_rule::DominationBound>(a_rule) && !(beta > 1.0))
            throw ConfigError("ShrinkConfig: the domination bound needs 1 < beta <= 2");
        if (std::holds_alternative<a_rule::FiniteSample>(a_rule) && !(beta > 0.5))
            throw ConfigError("ShrinkConfig: the finite-sample rule needs beta > 1/2");
    }

    bool needs_d_at_least_3() const noexcept {
        return std::holds_alternative<a_rule::FiniteSample>(a_rule) ||
               std::holds_alternative<a_rule::DominationBound>(a_rule);
    }
};

inline void require_beta(double beta, const char* op) {
    if (!(beta > 0.0 && beta <= 2.0))
        throw ConfigError(std::string(op) + ": beta must lie in (0, 2], got " + std::to_string(beta));
}

/// D = sum_i |z_i / sigma|^beta.
inline double shrink_denominator(const CanonicalSample& sample, double beta) {
    require_beta(beta, "shrink_denominator");
    double total = 0.0;
    for (std::size_t i = 0; i < sample.dimension(); ++i) {
        const double x = std::abs(sample.standardized(i));
        total += beta == 2.0 ? x * x : std::pow(x, beta);
    }
    return total;
}

/// E|e|^beta for e standard normal: 2^(beta/2) Gamma((beta+1)/2) / sqrt(pi).
inline double moment_constant(double beta) {
    if (!(beta > -1.0)) throw ConfigError("moment_constant: beta must exceed -1");
    return std::exp(0.5 * beta * std::numbers::ln2 + std::lgamma(0.5 * (beta + 1.0))) /
           std::sqrt(std::numbers::pi);
}

/// Large-d limit of a_beta / d: 4 Gamma((beta+1)/2)^2 / (sqrt(pi) Gamma((2 beta - 1)/2)).
inline double c_beta(double beta) {
    if (!(beta > 0.5 && beta <= 2.0))
        throw ConfigError("c_beta: beta must lie in (1/2, 2], got " + std::to_string(beta));
    const double g = std::tgamma(0.5 * (beta + 1.0));
    return 4.0 * g * g / (std::sqrt(std::numbers::pi) * std::tgamma(beta - 0.5));
}

/// The shrink constant for dimension d, in standardized (unit-variance) units.
inline double resolve_a(const ShrinkConfig& config, std::size_t d) {
    config.validate();
    const double beta = config.beta;
    const double dd = static_cast<double>(d);
    if (config.needs_d_at_least_3() && d < 3)
        throw ConfigError("resolve_a: rule " + to_string(config.a_rule) + " requires d >= 3");

    const double a = std::visit(
        [&](const auto& r) -> double {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, a_rule::FiniteSample>) {
                return 0.97 * (dd - 2.0) * c_beta(beta);
            } else if constexpr (std::is_same_v<R, a_rule::Asymptotic>) {
                if (d < 2) throw ConfigError("resolve_a: the asymptotic rule requires d >= 2");
                return dd * std::pow(2.0 * std::log(dd), 0.5 * (2.0 - beta)) * moment_constant(beta);
            } else if constexpr (std::is_same_v<R, a_rule::EmpiricalBayes>) {
                return dd;
            } else if constexpr (std::is_same_v<R, a_rule::DominationBound>) {
                return 2.0 * (beta - 1.0) * dd - 2.0 * beta;
            } else {
                return r.a;
            }
        },
        config.a_rule);

    if (!(a > 0.0))
        throw ConfigError("resolve_a: rule " + to_string(config.a_rule) + " gives non-positive a = " +
                          std::to_string(a) + " at d = " + std::to_string(d));
    return a;
}

namespace detail {

// log of a |x|^(beta-2) / D, or +inf when x == 0 and beta < 2.
inline double log_shrink_fraction(double abs_x, double beta, double log_a, double log_d) {
    if (beta == 2.0) return log_a - log_d;
    if (abs_x == 0.0) return std::numeric_limits<double>::infinity();
    return log_a + (beta - 2.0) * std::log(abs_x) - log_d;
}

inline void require_positive_a(double a, const char* op) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError(std::string(op) + ": a must be positive and finite");
}

}  // namespace detail

/// Positive-part estimator with an explicit (standardized) shrink constant a.
/// Returns the zero vector when D = 0.
inline std::vector<double> threshold_estimate(const CanonicalSample& sample, double beta, double a) {
    require_beta(beta, "threshold_estimate");
    detail::require_positive_a(a, "threshold_estimate");
    const auto z = sample.z();
    std::vector<double> out(z.size(), 0.0);
    const double big_d = shrink_denominator(sample, beta);
    if (big_d == 0.0) return out;

    const double log_a = std::log(a);
    const double log_d = std::log(big_d);
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] == 0.0) continue;
        const double log_h = detail::log_shrink_fraction(std::abs(sample.standardized(i)), beta, log_a, log_d);
        if (log_h >= 0.0) continue;
        out[i] = (1.0 - std::exp(log_h)) * z[i];
    }
    return out;
}

inline std::vector<double> threshold_estimate(const CanonicalSample& sample, const ShrinkConfig& config) {
    config.validate();
    if (config.needs_d_at_least_3()) sample.require_dimension(3, "threshold_estimate");
    return threshold_estimate(sample, config.beta, resolve_a(config, sample.dimension()));
}

/// The estimator without the positive part: z_i - a sigma sign(x_i)|x_i|^(beta-1) / D.
/// Over-shrunk coordinates change sign instead of stopping at zero.
inline std::vector<double> untruncated_estimate(const CanonicalSample& sample, double beta, double a) {
    require_beta(beta, "untruncated_estimate");
    detail::require_positive_a(a, "untruncated_estimate");
    const double big_d = shrink_denominator(sample, beta);
    if (big_d == 0.0) throw DegenerateInputError("untruncated_estimate: D = 0 for the zero vector");

    const auto z = sample.z();
    std::vector<double> out(z.size(), 0.0);
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double x = sample.standardized(i);
        if (x == 0.0) continue;
        const double pull = a * std::pow(std::abs(x), beta - 1.0) / big_d;
        out[i] = sample.sigma() * (x - std::copysign(pull, x));
    }
    return out;
}

inline std::vector<double> untruncated_estimate(const CanonicalSample& sample, const ShrinkConfig& config) {
    config.validate();
    if (config.needs_d_at_least_3()) sample.require_dimension(3, "untruncated_estimate");
    return untruncated_estimate(sample, config.beta, resolve_a(config, sample.dimension()));
}

struct SureValue {
    std::vector<double> per_coordinate;
    double total = 0.0;
};

/// Stein's unbiased estimate of the risk of threshold_estimate(sample, beta, a).
///
/// Clipped coordinates contribute x_i^2 - 1; the rest contribute
/// 1 + h_i^2 x_i^2 - 2 (beta - 1) h_i + 2 beta h_i |x_i|^beta / D with
/// h_i = a |x_i|^(beta-2) / D. Values are rescaled by sigma^2.
inline SureValue sure(const CanonicalSample& sample, double beta, double a) {
    if (!(beta > 1.0 && beta <= 2.0))
        throw ConfigError("sure: beta must lie in (1, 2], got " + std::to_string(beta));
    detail::require_positive_a(a, "sure");
    const double big_d = shrink_denominator(sample, beta);
    if (big_d == 0.0) throw DegenerateInputError("sure: D = 0 for the zero vector");

    const double var = sample.sigma() * sample.sigma();
    const double log_a = std::log(a);
    const double log_d = std::log(big_d);
    SureValue result;
    result.per_coordinate.resize(sample.dimension());
    for (std::size_t i = 0; i < sample.dimension(); ++i) {
        const double x = sample.standardized(i);
        const double abs_x = std::abs(x);
        const double log_h = detail::log_shrink_fraction(abs_x, beta, log_a, log_d);
        double value;
        if (log_h >= 0.0) {
            value = x * x - 1.0;
        } else {
            const double h = std::exp(log_h);
            const double x_beta = beta == 2.0 ? x * x : std::pow(abs_x, beta);
            value = 1.0 + h * h * x * x - 2.0 * (beta - 1.0) * h + 2.0 * beta * h * x_beta / big_d;
        }
        result.per_coordinate[i] = value * var;
        result.total += value * var;
    }
    return result;
}

/// {1.05, 1.10, ..., 2.00}.
inline std::vector<double> default_beta_grid() {
    std::vector<double> grid;
    for (int k = 1; k <= 20; ++k) grid.push_back(1.0 + 0.05 * k);
    return grid;
}

struct BetaSelection {
    double beta = 0.0;
    double a = 0.0;  // standardized units
    double sure_total = 0.0;
};

/// Picks the grid value of beta with the smallest SURE, using the
/// finite-sample rule for a at each beta. Ties go to the larger beta.
/// Grid entries outside (1, 2] are skipped.
inline BetaSelection select_beta_by_sure(const CanonicalSample& sample, std::span<const double> beta_grid) {
    if (beta_grid.empty()) throw ConfigError("select_beta_by_sure: empty beta grid");
    sample.require_dimension(3, "select_beta_by_sure");
    BetaSelection best;
    bool found = false;
    for (double beta : beta_grid) {
        if (!(beta > 1.0 && beta <= 2.0)) continue;
        const double a = resolve_a(ShrinkConfig{beta, a_rule::FiniteSample{}}, sample.dimension());
        const double total = sure(sample, beta, a).total;
        if (!found || total < best.sure_total || (total == best.sure_total && beta > best.beta)) {
            best = {beta, a, total};
            found = true;
        }
    }
    if (!found) throw ConfigError("select_beta_by_sure: no grid entry lies in (1, 2]");
    return best;
}

struct MonteCarloEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Simulates a_beta = 2 / E[ sum |xi_i|^(2 beta - 2) / (sum |xi_i|^beta)^2 ] over
/// i.i.d. standard normal xi. The standard error comes from the delta method.
inline MonteCarloEstimate monte_carlo_a_beta(double beta, std::size_t d, std::size_t reps, std::uint64_t seed,
                                             unsigned threads = 0) {
    if (!(beta > 0.5 && beta <= 2.0))
        throw ConfigError("monte_carlo_a_beta: beta must lie in (1/2, 2], got " + std::to_string(beta));
    if (d < 3) throw ConfigError("monte_carlo_a_beta: d must be at least 3");
    if (reps < 1000) throw ConfigError("monte_carlo_a_beta: reps must be at least 1000");

    std::vector<double> ratios(reps);
    parallel_for(reps, threads, [&](std::size_t r) {
        NormalStream normal(seed, streams::a_beta, r);
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double xi = normal();
            if (beta == 2.0) {
                num += xi * xi;
                den += xi * xi;
            } else {
                const double log_abs = std::log(std::abs(xi));
                num += std::exp((2.0 * beta - 2.0) * log_abs);
                den += std::exp(beta * log_abs);
            }
        }
        ratios[r] = num / (den * den);
    });

    const MeanEstimate m = mean_with_error(ratios);
    if (!std::isfinite(m.mean) || !std::isfinite(m.std_error) || !(m.mean > 0.0))
        throw NumericalError("monte_carlo_a_beta: non-finite accumulation");
    return {2.0 / m.mean, 2.0 * m.std_error / (m.mean * m.mean)};
}

}  // namespace pshrink
