#pragma once

// Test functions for the regression model Y_i = f(t_i) + e_i, t_i = (i - 1)/n.
//
// Blocks, Bumps, HeaviSine and Doppler follow Donoho & Johnstone (1994).
// Spikes and Corner are stand-ins for two further curves whose exact forms
// are not pinned down; they are registered under their own names so they can
// be swapped without touching callers.

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "random.hpp"
#include "stats.hpp"

namespace pshrink {

namespace signals {

inline constexpr std::array<double, 11> kJumpPositions{0.10, 0.13, 0.15, 0.23, 0.25, 0.40,
                                                      0.44, 0.65, 0.76, 0.78, 0.81};

inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

inline double blocks(double t) {
    constexpr std::array<double, 11> heights{4.0, -5.0, 3.0, -4.0, 5.0, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2};
    double f = 0.0;
    for (std::size_t j = 0; j < heights.size(); ++j) f += heights[j] * 0.5 * (1.0 + sgn(t - kJumpPositions[j]));
    return f;
}

inline double bumps(double t) {
    constexpr std::array<double, 11> heights{4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2};
    constexpr std::array<double, 11> widths{0.005, 0.005, 0.006, 0.01, 0.01, 0.03,
                                            0.01,  0.01,  0.005, 0.008, 0.005};
    double f = 0.0;
    for (std::size_t j = 0; j < heights.size(); ++j) {
        const double u = std::abs((t - kJumpPositions[j]) / widths[j]);
        f += heights[j] / std::pow(1.0 + u, 4.0);
    }
    return f;
}

inline double heavisine(double t) {
    return 4.0 * std::sin(4.0 * std::numbers::pi * t) - sgn(t - 0.3) - sgn(0.72 - t);
}

inline double doppler(double t) {
    constexpr double eps = 0.05;
    return std::sqrt(t * (1.0 - t)) * std::sin(2.0 * std::numbers::pi * (1.0 + eps) / (t + eps));
}

// Stand-in: five two-sided exponential spikes of width 0.01.
inline double spikes(double t) {
    constexpr std::array<double, 5> at{0.15, 0.35, 0.52, 0.7, 0.86};
    constexpr std::array<double, 5> height{4.0, -3.0, 5.0, 2.5, -4.0};
    double f = 0.0;
    for (std::size_t j = 0; j < at.size(); ++j) f += height[j] * std::exp(-std::abs(t - at[j]) / 0.01);
    return f;
}

// Stand-in: continuous, with a slope discontinuity at t = 0.5.
inline double corner(double t) {
    return t < 0.5 ? 10.0 * t * t : 2.5 - 10.0 * (t - 0.5);
}

}  // namespace signals

using SignalFunction = std::function<double(double)>;

/// Named test functions, kept in registration order.
class SignalRegistry {
public:
    /// The six built-in functions: blocks, bumps, heavisine, doppler, spikes, corner.
    static const SignalRegistry& standard() {
        static const SignalRegistry registry = [] {
            SignalRegistry r;
            r.add("blocks", signals::blocks);
            r.add("bumps", signals::bumps);
            r.add("heavisine", signals::heavisine);
            r.add("doppler", signals::doppler);
            r.add("spikes", signals::spikes);
            r.add("corner", signals::corner);
            return r;
        }();
        return registry;
    }

    void add(std::string name, SignalFunction f) {
        name = normalize(name);
        if (contains(name)) throw ConfigError("SignalRegistry: duplicate signal '" + name + "'");
        entries_.emplace_back(std::move(name), std::move(f));
    }

    bool contains(std::string_view name) const {
        const std::string key = normalize(name);
        return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == key; });
    }

    const SignalFunction& at(std::string_view name) const {
        const std::string key = normalize(name);
        for (const auto& [n, f] : entries_)
            if (n == key) return f;
        throw ConfigError("unknown signal '" + std::string(name) + "'");
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& e : entries_) out.push_back(e.first);
        return out;
    }

    static std::string normalize(std::string_view name) {
        std::string s(name);
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
        return s;
    }

private:
    std::vector<std::pair<std::string, SignalFunction>> entries_;
};

/// The four functions with published definitions.
inline std::vector<std::string> canonical_signal_names() { return {"blocks", "bumps", "heavisine", "doppler"}; }

struct TestSignal {
    std::string name;
    std::vector<double> samples;
    double snr = 0.0;
};

inline void require_dyadic(std::size_t n, const char* op) {
    if (n < 2 || !std::has_single_bit(n))
        throw InputError(std::string(op) + ": n = " + std::to_string(n) + " is not a power of two >= 2");
}

/// f(t_i) on t_i = (i - 1)/n, unscaled.
inline std::vector<double> sample_signal(std::string_view name, std::size_t n,
                                         const SignalRegistry& registry = SignalRegistry::standard()) {
    require_dyadic(n, "sample_signal");
    const auto& f = registry.at(name);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = f(static_cast<double>(i) / static_cast<double>(n));
    return out;
}

/// Samples the named function and multiplies by snr * sigma / sd so that the
/// sample standard deviation equals snr * sigma. No mean centering.
inline TestSignal generate_signal(std::string_view name, std::size_t n, double snr,
                                  const SignalRegistry& registry = SignalRegistry::standard(), double sigma = 1.0) {
    if (!(snr > 0.0) || !std::isfinite(snr)) throw ConfigError("generate_signal: snr must be positive");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("generate_signal: sigma must be positive");
    std::vector<double> samples = sample_signal(name, n, registry);
    const double sd = sample_sd(samples);
    if (!(sd > 0.0)) throw ConfigError("generate_signal: '" + std::string(name) + "' is constant on this grid");
    const double scale = snr * sigma / sd;
    for (double& v : samples) v *= scale;
    return {SignalRegistry::normalize(name), std::move(samples), snr};
}

/// samples + sigma * N(0, 1), reproducible for a given seed.
inline std::vector<double> add_noise(const TestSignal& signal, double sigma, std::uint64_t seed) {
    if (!(sigma > 0.0)) throw ConfigError("add_noise: sigma must be positive");
    NormalStream normal(seed, streams::signal_noise, 0);
    std::vector<double> out = signal.samples;
    for (double& v : out) v += sigma * normal();
    return out;
}

}  // namespace pshrink
