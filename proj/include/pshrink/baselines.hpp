#pragma once

// Level-by-level wavelet shrinkage rules: VisuShrink, SureShrink (hybrid),
// BlockJS, positive-part James-Stein and the beta-thresholding estimators.
//
// Coefficients stay in raw units where each noisy coefficient has standard
// deviation sigma; thresholds derived for unit variance are multiplied by sigma.
// Every rule touches only detail levels j >= cutoff_level; the coarse block
// and lower levels are passed through unchanged.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "canonical.hpp"
#include "dwt.hpp"
#include "errors.hpp"

namespace pshrink {

/// Lowest integer level j with j >= log2(ln n) + 1.
inline int cutoff_level(std::size_t n) {
    if (n < 2) throw InputError("cutoff_level: n must be at least 2");
    const double bound = std::log2(std::log(static_cast<double>(n))) + 1.0;
    return std::max(0, static_cast<int>(std::ceil(bound)));
}

inline double soft_threshold(double x, double lambda) {
    const double mag = std::abs(x) - lambda;
    return mag > 0.0 ? std::copysign(mag, x) : 0.0;
}

/// sigma sqrt(2 ln n).
inline double universal_threshold(double sigma, std::size_t n) {
    return sigma * std::sqrt(2.0 * std::log(static_cast<double>(n)));
}

namespace detail {

template <class LevelRule>
WaveletDecomposition map_levels(const WaveletDecomposition& decomp, int cutoff, LevelRule&& rule) {
    WaveletDecomposition out = decomp;
    for (auto& level : out.details) {
        if (level.level < cutoff) continue;
        rule(level.coefficients);
    }
    return out;
}

inline void require_sigma(double sigma, const char* op) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw ConfigError(std::string(op) + ": sigma must be positive and finite");
}

}  // namespace detail

inline WaveletDecomposition visu_shrink(const WaveletDecomposition& decomp, double sigma, std::size_t n,
                                        int cutoff) {
    detail::require_sigma(sigma, "visu_shrink");
    const double lambda = universal_threshold(sigma, n);
    return detail::map_levels(decomp, cutoff, [&](std::vector<double>& c) {
        for (double& v : c) v = soft_threshold(v, lambda);
    });
}

/// SURE of soft thresholding at t for unit-variance data x:
/// d - 2 #{|x_i| <= t} + sum min(|x_i|, t)^2.
inline double soft_threshold_sure(std::span<const double> x, double t) {
    double risk = static_cast<double>(x.size());
    for (double v : x) {
        const double m = std::abs(v);
        if (m <= t) risk -= 2.0;
        risk += std::min(m, t) * std::min(m, t);
    }
    return risk;
}

/// Threshold in [0, sqrt(2 ln d)] minimizing soft_threshold_sure over the
/// candidates {0, |x_i| below the cap, cap}. Smallest minimizer wins ties.
inline double sure_soft_threshold(std::span<const double> x) {
    const std::size_t d = x.size();
    const double cap = std::sqrt(2.0 * std::log(static_cast<double>(std::max<std::size_t>(d, 2))));
    std::vector<double> sq(d);
    for (std::size_t i = 0; i < d; ++i) sq[i] = x[i] * x[i];
    std::sort(sq.begin(), sq.end());

    // With t^2 = sq[k] (k-th smallest), #{|x| <= t} counts ties, so evaluate
    // each candidate at the last index of its run of equal values.
    double best_t = 0.0;
    double best_risk = soft_threshold_sure(x, 0.0);
    double prefix = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        prefix += sq[k];
        if (k + 1 < d && sq[k + 1] == sq[k]) continue;
        const double t = std::sqrt(sq[k]);
        if (t > cap) break;
        const double below = static_cast<double>(k + 1);
        const double risk = static_cast<double>(d) - 2.0 * below + prefix + static_cast<double>(d - k - 1) * sq[k];
        if (risk < best_risk) {
            best_risk = risk;
            best_t = t;
        }
    }
    if (soft_threshold_sure(x, cap) < best_risk) best_t = cap;
    return best_t;
}

/// Hybrid rule: per level, the universal threshold sqrt(2 ln d) when the level
/// looks sparse, otherwise the SURE-minimizing threshold.
///
/// Sparsity test (Donoho & Johnstone 1995, WaveLab HybridThresh):
/// sparse when (||x||^2 - d)/d < log2(d)^(3/2) / sqrt(d).
inline WaveletDecomposition sure_shrink(const WaveletDecomposition& decomp, double sigma, int cutoff) {
    detail::require_sigma(sigma, "sure_shrink");
    return detail::map_levels(decomp, cutoff, [&](std::vector<double>& c) {
        const std::size_t d = c.size();
        if (d < 2) return;
        std::vector<double> x(d);
        double energy = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            x[i] = c[i] / sigma;
            energy += x[i] * x[i];
        }
        if (energy == 0.0) return;
        const double dd = static_cast<double>(d);
        const double universal = std::sqrt(2.0 * std::log(dd));
        const double eta = (energy - dd) / dd;
        const double critical = std::pow(std::log2(dd), 1.5) / std::sqrt(dd);
        const double t = eta < critical ? universal : sure_soft_threshold(x);
        for (double& v : c) v = soft_threshold(v, sigma * t);
    });
}

struct BlockJsParams {
    std::size_t block_length = 0;  // 0 selects floor(ln n)
    double lambda_star = 4.50524;
};

inline std::size_t block_js_length(std::size_t n, const BlockJsParams& params = {}) {
    if (params.block_length > 0) return params.block_length;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::log(static_cast<double>(n)))));
}

/// Block James-Stein (Cai 1999): each block B of length L is scaled by
/// (1 - lambda* L sigma^2 / S_B^2)_+. A short final block borrows coefficients
/// cyclically from the start of the level to compute S_B^2.
inline WaveletDecomposition block_js(const WaveletDecomposition& decomp, double sigma, std::size_t n, int cutoff,
                                     const BlockJsParams& params = {}) {
    detail::require_sigma(sigma, "block_js");
    if (!(params.lambda_star > 0.0)) throw ConfigError("block_js: lambda* must be positive");
    const std::size_t len = block_js_length(n, params);
    const double kill = params.lambda_star * static_cast<double>(len) * sigma * sigma;
    return detail::map_levels(decomp, cutoff, [&](std::vector<double>& c) {
        const std::size_t d = c.size();
        const std::vector<double> in = c;
        for (std::size_t start = 0; start < d; start += len) {
            double s2 = 0.0;
            for (std::size_t m = 0; m < len; ++m) {
                const double v = in[(start + m) % d];
                s2 += v * v;
            }
            const double factor = s2 > 0.0 ? std::max(0.0, 1.0 - kill / s2) : 0.0;
            for (std::size_t i = start; i < std::min(start + len, d); ++i) c[i] = factor * in[i];
        }
    });
}

/// Positive-part James-Stein per level (beta = 2, a = d - 2). Levels with
/// fewer than three coefficients are left alone.
inline WaveletDecomposition js_plus_levelwise(const WaveletDecomposition& decomp, double sigma, int cutoff) {
    detail::require_sigma(sigma, "js_plus_levelwise");
    return detail::map_levels(decomp, cutoff, [&](std::vector<double>& c) {
        if (c.size() < 3) return;
        c = threshold_estimate(CanonicalSample(c, sigma), 2.0, static_cast<double>(c.size()) - 2.0);
    });
}

/// Applies threshold_estimate with the given configuration to each level,
/// with d equal to that level's length.
inline WaveletDecomposition power_shrink_levelwise(const WaveletDecomposition& decomp, double sigma, int cutoff,
                                                 const ShrinkConfig& config) {
    detail::require_sigma(sigma, "power_shrink_levelwise");
    config.validate();
    return detail::map_levels(decomp, cutoff, [&](std::vector<double>& c) {
        c = threshold_estimate(CanonicalSample(c, sigma), config);
    });
}

/// Per level: choose beta by SURE on the grid, then apply the estimator with
/// that beta and its finite-sample a. All-zero levels pass through.
inline WaveletDecomposition power_shrink_sure_levelwise(const WaveletDecomposition& decomp, double sigma, int cutoff,
                                                      std::span<const double> beta_grid) {
    detail::require_sigma(sigma, "power_shrink_sure_levelwise");
    return detail::map_levels(decomp, cutoff, [&](std::vector<double>& c) {
        if (std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; })) return;
        const CanonicalSample sample(c, sigma);
        const BetaSelection pick = select_beta_by_sure(sample, beta_grid);
        c = threshold_estimate(sample, pick.beta, pick.a);
    });
}

enum class MethodKind { VisuShrink, SureShrink, BlockJS, JamesSteinPlus, PowerShrink, PowerShrinkSure, Identity };

/// A named level-wise estimator together with its settings.
class LevelwiseMethod {
public:
    static LevelwiseMethod identity() { return LevelwiseMethod(MethodKind::Identity); }
    static LevelwiseMethod visu_shrink() { return LevelwiseMethod(MethodKind::VisuShrink); }
    static LevelwiseMethod sure_shrink() { return LevelwiseMethod(MethodKind::SureShrink); }
    static LevelwiseMethod james_stein_plus() { return LevelwiseMethod(MethodKind::JamesSteinPlus); }

    static LevelwiseMethod block_js(BlockJsParams params = {}) {
        if (!(params.lambda_star > 0.0)) throw ConfigError("BlockJS: lambda* must be positive");
        LevelwiseMethod m(MethodKind::BlockJS);
        m.block_ = params;
        return m;
    }

    static LevelwiseMethod power_shrink(ShrinkConfig config = {}) {
        config.validate();
        LevelwiseMethod m(MethodKind::PowerShrink);
        m.shrink_ = config;
        return m;
    }

    static LevelwiseMethod power_shrink_sure(std::vector<double> beta_grid = default_beta_grid()) {
        if (std::none_of(beta_grid.begin(), beta_grid.end(), [](double b) { return b > 1.0 && b <= 2.0; }))
            throw ConfigError("PowerShrinkSure: beta grid has no entry in (1, 2]");
        LevelwiseMethod m(MethodKind::PowerShrinkSure);
        m.beta_grid_ = std::move(beta_grid);
        return m;
    }

    MethodKind kind() const noexcept { return kind_; }
    const ShrinkConfig& shrink_config() const noexcept { return shrink_; }
    const std::vector<double>& beta_grid() const noexcept { return beta_grid_; }
    const BlockJsParams& block_params() const noexcept { return block_; }

    /// Short token used by the CLI and in CSV output.
    std::string name() const {
        switch (kind_) {
            case MethodKind::VisuShrink: return "visu";
            case MethodKind::SureShrink: return "sure";
            case MethodKind::BlockJS: return "blockjs";
            case MethodKind::JamesSteinPlus: return "js";
            case MethodKind::PowerShrink: return "zh";
            case MethodKind::PowerShrinkSure: return "zh-sure";
            case MethodKind::Identity: return "identity";
        }
        return "unknown";
    }

    /// Whether the rule changes anything; identity skips the transform entirely.
    bool is_identity() const noexcept { return kind_ == MethodKind::Identity; }

    WaveletDecomposition apply(const WaveletDecomposition& decomp, double sigma, int cutoff) const {
        switch (kind_) {
            case MethodKind::VisuShrink: return pshrink::visu_shrink(decomp, sigma, decomp.n, cutoff);
            case MethodKind::SureShrink: return pshrink::sure_shrink(decomp, sigma, cutoff);
            case MethodKind::BlockJS: return pshrink::block_js(decomp, sigma, decomp.n, cutoff, block_);
            case MethodKind::JamesSteinPlus: return js_plus_levelwise(decomp, sigma, cutoff);
            case MethodKind::PowerShrink: return power_shrink_levelwise(decomp, sigma, cutoff, shrink_);
            case MethodKind::PowerShrinkSure: return power_shrink_sure_levelwise(decomp, sigma, cutoff, beta_grid_);
            case MethodKind::Identity: return decomp;
        }
        return decomp;
    }

private:
    explicit LevelwiseMethod(MethodKind kind) : kind_(kind) {}

    MethodKind kind_;
    ShrinkConfig shrink_{};
    std::vector<double> beta_grid_{};
    BlockJsParams block_{};
};

/// Parses a CLI token; zh uses the given configuration.
inline LevelwiseMethod parse_method(std::string_view token, const ShrinkConfig& zh_config = {}) {
    if (token == "zh") return LevelwiseMethod::power_shrink(zh_config);
    if (token == "zh-sure") return LevelwiseMethod::power_shrink_sure();
    if (token == "visu") return LevelwiseMethod::visu_shrink();
    if (token == "sure") return LevelwiseMethod::sure_shrink();
    if (token == "blockjs") return LevelwiseMethod::block_js();
    if (token == "js") return LevelwiseMethod::james_stein_plus();
    if (token == "identity") return LevelwiseMethod::identity();
    throw ConfigError("unknown method '" + std::string(token) + "'");
}

}  // namespace pshrink
