#pragma once

// Monte Carlo risk engine.
//
// canonical_risk: E||estimate - theta||^2 for Z ~ N(theta, sigma^2 I).
// wavelet_risk / risk_sweep: E||f_hat - f||^2 for Y = f + sigma e through
// DWT -> level-wise rule -> inverse DWT.
//
// Replicate r always draws its noise from substream (seed, stream, key(n, r)),
// so every method in a sweep cell sees the same noise (common random numbers)
// and the results do not depend on the thread count.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "baselines.hpp"
#include "canonical.hpp"
#include "dwt.hpp"
#include "errors.hpp"
#include "random.hpp"
#include "stats.hpp"
#include "testbed.hpp"

namespace pshrink {

// ---------------------------------------------------------------------------
// Noise level

struct SigmaEstimate {
    double value = 0.0;
    bool degenerate = false;  // set when the finest level has zero spread
};

/// Median absolute deviation of the finest detail level divided by 0.6745.
inline SigmaEstimate estimate_sigma(const WaveletDecomposition& decomp) {
    if (decomp.details.empty() || decomp.details.back().coefficients.size() < 2)
        throw InputError("estimate_sigma: finest detail level needs at least two coefficients");
    const auto& finest = decomp.details.back().coefficients;
    const double center = median(finest);
    std::vector<double> dev(finest.size());
    for (std::size_t i = 0; i < finest.size(); ++i) dev[i] = std::abs(finest[i] - center);
    const double mad = median(std::move(dev));
    return {mad / 0.6745, mad == 0.0};
}

// ---------------------------------------------------------------------------
// Denoising pipeline

struct DenoiseResult {
    std::vector<double> estimate;
    double sigma = 0.0;
    bool sigma_estimated = false;
    bool sigma_degenerate = false;
};

/// Number of pyramid steps so that the coarse block sits at the cutoff level.
inline int pipeline_levels(std::size_t n) {
    const int total = std::countr_zero(n);
    return std::clamp(total - cutoff_level(n), 1, total);
}

namespace detail {

struct ReplicateOutcome {
    std::vector<double> estimate;
    WaveletDecomposition shrunk;
    double sigma = 0.0;
    bool sigma_degenerate = false;
};

inline ReplicateOutcome run_pipeline(std::span<const double> y, const LevelwiseMethod& method,
                                     std::optional<double> sigma) {
    require_dyadic(y.size(), "denoise");
    const int levels = pipeline_levels(y.size());
    const int cutoff = cutoff_level(y.size());
    WaveletDecomposition decomp = dwt_forward(y, levels);

    ReplicateOutcome out;
    if (sigma) {
        if (!(*sigma > 0.0)) throw ConfigError("denoise: sigma must be positive");
        out.sigma = *sigma;
    } else {
        const SigmaEstimate est = estimate_sigma(decomp);
        out.sigma = est.value;
        out.sigma_degenerate = est.degenerate;
    }
    if (method.is_identity() || out.sigma_degenerate) {
        out.estimate.assign(y.begin(), y.end());
        out.shrunk = std::move(decomp);
        return out;
    }
    out.shrunk = method.apply(decomp, out.sigma, cutoff);
    out.estimate = dwt_inverse(out.shrunk);
    return out;
}

}  // namespace detail

/// Denoises a length-2^J signal. With no sigma the noise level is estimated
/// from the finest detail level; a zero estimate leaves the data unchanged.
inline DenoiseResult denoise(std::span<const double> y, const LevelwiseMethod& method,
                             std::optional<double> sigma = std::nullopt) {
    auto outcome = detail::run_pipeline(y, method, sigma);
    return {std::move(outcome.estimate), outcome.sigma, !sigma.has_value(), outcome.sigma_degenerate};
}

// ---------------------------------------------------------------------------
// Canonical model

enum class CanonicalEstimator { PositivePart, Untruncated, Identity };

struct CanonicalRiskReport {
    std::string theta;  // description of the mean vector
    std::size_t d = 0;
    double beta = 0.0;
    double a = 0.0;
    std::size_t reps = 0;
    double mean_risk = 0.0;
    double std_error = 0.0;
    std::vector<double> coordinate_risk;
    std::vector<double> coordinate_std_error;
    std::vector<double> losses;  // total squared error per replicate
};

/// Squared error per replicate and coordinate: result[r][i].
template <class Estimator>
std::vector<std::vector<double>> canonical_squared_errors(std::span<const double> theta, double sigma,
                                                          std::size_t reps, std::uint64_t seed, unsigned threads,
                                                          Estimator&& estimator) {
    std::vector<std::vector<double>> errors(reps);
    parallel_for(reps, threads, [&](std::size_t r) {
        NormalStream normal(seed, streams::canonical_risk, r);
        std::vector<double> z(theta.begin(), theta.end());
        for (double& v : z) v += sigma * normal();
        const std::vector<double> est = estimator(CanonicalSample(z, sigma));
        auto& row = errors[r];
        row.resize(theta.size());
        for (std::size_t i = 0; i < theta.size(); ++i) row[i] = (est[i] - theta[i]) * (est[i] - theta[i]);
    });
    return errors;
}

inline CanonicalRiskReport summarize_canonical(const std::vector<std::vector<double>>& errors) {
    CanonicalRiskReport report;
    report.reps = errors.size();
    report.d = errors.empty() ? 0 : errors.front().size();
    report.losses.resize(report.reps);
    for (std::size_t r = 0; r < report.reps; ++r)
        for (double e : errors[r]) report.losses[r] += e;
    const MeanEstimate total = mean_with_error(report.losses);
    report.mean_risk = total.mean;
    report.std_error = total.std_error;
    std::vector<double> column(report.reps);
    for (std::size_t i = 0; i < report.d; ++i) {
        for (std::size_t r = 0; r < report.reps; ++r) column[r] = errors[r][i];
        const MeanEstimate m = mean_with_error(column);
        report.coordinate_risk.push_back(m.mean);
        report.coordinate_std_error.push_back(m.std_error);
    }
    return report;
}

/// Monte Carlo risk of one estimator at mean vector theta. Runs with the same
/// seed share noise draws, so reports from different estimators are paired.
inline CanonicalRiskReport canonical_risk(std::span<const double> theta, const ShrinkConfig& config, double sigma,
                                          std::size_t reps, std::uint64_t seed,
                                          CanonicalEstimator estimator = CanonicalEstimator::PositivePart,
                                          unsigned threads = 0, std::string theta_label = {}) {
    if (reps < 100) throw ConfigError("canonical_risk: reps must be at least 100");
    if (theta.empty()) throw InputError("canonical_risk: empty theta");
    if (!(sigma > 0.0)) throw ConfigError("canonical_risk: sigma must be positive");
    config.validate();
    const std::size_t d = theta.size();
    const double a = resolve_a(config, d);

    auto errors = canonical_squared_errors(theta, sigma, reps, seed, threads, [&](const CanonicalSample& s) {
        switch (estimator) {
            case CanonicalEstimator::PositivePart: return threshold_estimate(s, config.beta, a);
            case CanonicalEstimator::Untruncated: return untruncated_estimate(s, config.beta, a);
            case CanonicalEstimator::Identity: break;
        }
        return std::vector<double>(s.z().begin(), s.z().end());
    });
    CanonicalRiskReport report = summarize_canonical(errors);
    report.theta = std::move(theta_label);
    report.beta = config.beta;
    report.a = a;
    return report;
}

// ---------------------------------------------------------------------------
// Wavelet regression

enum class SigmaMode { Known, Estimated };

struct RiskReport {
    std::string method;
    std::string signal;
    std::size_t n = 0;
    double snr = 0.0;
    std::size_t reps = 0;
    double mean_risk = 0.0;
    double std_error = 0.0;
    double relative_risk = 0.0;  // mean_risk / n
};

/// Squared errors of one replicate in the signal and coefficient domains.
struct ReplicateLoss {
    double signal_domain = 0.0;
    double wavelet_domain = 0.0;
};

inline std::uint64_t replicate_counter(std::size_t n, std::size_t rep) {
    return (static_cast<std::uint64_t>(std::countr_zero(n)) << 48) ^ static_cast<std::uint64_t>(rep);
}

/// The noisy observation used by replicate `rep` of any experiment at this n.
inline std::vector<double> replicate_observation(const TestSignal& signal, double sigma, std::uint64_t seed,
                                                 std::size_t rep) {
    NormalStream normal(seed, streams::wavelet_noise, replicate_counter(signal.samples.size(), rep));
    std::vector<double> y = signal.samples;
    for (double& v : y) v += sigma * normal();
    return y;
}

inline ReplicateLoss replicate_loss(const TestSignal& signal, const WaveletDecomposition& truth,
                                    std::span<const double> y, const LevelwiseMethod& method, SigmaMode mode,
                                    double sigma) {
    const auto outcome = detail::run_pipeline(
        y, method, mode == SigmaMode::Known ? std::optional<double>(sigma) : std::nullopt);
    ReplicateLoss loss;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double e = outcome.estimate[i] - signal.samples[i];
        loss.signal_domain += e * e;
    }
    const auto est = outcome.shrunk.flatten();
    const auto ref = truth.flatten();
    for (std::size_t i = 0; i < est.size(); ++i) loss.wavelet_domain += (est[i] - ref[i]) * (est[i] - ref[i]);
    return loss;
}

inline RiskReport make_report(const LevelwiseMethod& method, const TestSignal& signal,
                              std::span<const double> losses) {
    const MeanEstimate m = mean_with_error(losses);
    const std::size_t n = signal.samples.size();
    return {method.name(), signal.name, n, signal.snr, losses.size(), m.mean, m.std_error,
            m.mean / static_cast<double>(n)};
}

struct SweepOptions {
    double snr = 3.0;
    std::size_t reps = 500;
    std::uint64_t seed = 1;
    SigmaMode sigma_mode = SigmaMode::Known;
    double sigma = 1.0;
    unsigned threads = 0;
};

/// One report per (signal, n, method) cell plus the per-replicate losses behind it.
struct SweepResult {
    std::vector<RiskReport> reports;
    std::vector<std::vector<double>> losses;

    /// Index of the report for this cell, or reports.size() when absent.
    std::size_t find(std::string_view method, std::string_view signal, std::size_t n) const {
        for (std::size_t i = 0; i < reports.size(); ++i)
            if (reports[i].method == method && reports[i].signal == signal && reports[i].n == n) return i;
        return reports.size();
    }
};

/// Cartesian sweep over signals x n values x methods. Within a (signal, n)
/// cell every method sees the same noise draws.
inline SweepResult risk_sweep(std::span<const LevelwiseMethod> methods, std::span<const std::string> signal_names,
                              std::span<const std::size_t> n_values, const SweepOptions& options,
                              const SignalRegistry& registry = SignalRegistry::standard()) {
    if (options.reps < 2) throw ConfigError("risk_sweep: reps must be at least 2");
    if (methods.empty() || signal_names.empty() || n_values.empty())
        throw ConfigError("risk_sweep: methods, signals and n values must be non-empty");
    for (const auto& name : signal_names)
        if (!registry.contains(name)) throw ConfigError("unknown signal '" + name + "'");
    for (std::size_t n : n_values) require_dyadic(n, "risk_sweep");

    SweepResult result;
    for (const auto& name : signal_names) {
        for (std::size_t n : n_values) {
            const TestSignal signal = generate_signal(name, n, options.snr, registry, options.sigma);
            const WaveletDecomposition truth = dwt_forward(signal.samples, pipeline_levels(n));
            // losses[m][r]
            std::vector<std::vector<double>> cell(methods.size(), std::vector<double>(options.reps));
            parallel_for(options.reps, options.threads, [&](std::size_t r) {
                const auto y = replicate_observation(signal, options.sigma, options.seed, r);
                for (std::size_t m = 0; m < methods.size(); ++m)
                    cell[m][r] =
                        replicate_loss(signal, truth, y, methods[m], options.sigma_mode, options.sigma).signal_domain;
            });
            for (std::size_t m = 0; m < methods.size(); ++m) {
                result.reports.push_back(make_report(methods[m], signal, cell[m]));
                result.losses.push_back(std::move(cell[m]));
            }
        }
    }
    return result;
}

/// Monte Carlo risk of one method on one signal (the signal's own n and snr).
inline RiskReport wavelet_risk(const LevelwiseMethod& method, const TestSignal& signal, SigmaMode sigma_mode,
                               std::size_t reps, std::uint64_t seed, unsigned threads = 0, double sigma = 1.0) {
    if (reps < 50) throw ConfigError("wavelet_risk: reps must be at least 50");
    require_dyadic(signal.samples.size(), "wavelet_risk");
    const std::size_t n = signal.samples.size();
    const WaveletDecomposition truth = dwt_forward(signal.samples, pipeline_levels(n));
    std::vector<double> losses(reps);
    parallel_for(reps, threads, [&](std::size_t r) {
        const auto y = replicate_observation(signal, sigma, seed, r);
        losses[r] = replicate_loss(signal, truth, y, method, sigma_mode, sigma).signal_domain;
    });
    return make_report(method, signal, losses);
}

}  // namespace pshrink
