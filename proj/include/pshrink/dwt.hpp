#pragma once

// Periodized orthogonal discrete wavelet transform (pyramid algorithm).
//
// One analysis step maps x (length N, even) to
//     approx[k] = sum_m h[m] x[(2k + m) mod N]
//     detail[k] = sum_m g[m] x[(2k + m) mod N],   g[m] = (-1)^m h[L-1-m],
// and synthesis is the transpose. With an orthonormal h the whole transform
// is an orthogonal matrix, so i.i.d. N(0, sigma^2) noise stays i.i.d. N(0, sigma^2).

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace pshrink {

template <std::size_t Taps>
struct OrthonormalFilter {
    std::array<double, Taps> lowpass;

    constexpr std::array<double, Taps> highpass() const {
        std::array<double, Taps> g{};
        for (std::size_t m = 0; m < Taps; ++m) {
            const double sign = (m % 2 == 0) ? 1.0 : -1.0;
            g[m] = sign * lowpass[Taps - 1 - m];
        }
        return g;
    }
};

/// Daubechies least-asymmetric wavelet with 8 vanishing moments (16 taps).
inline constexpr OrthonormalFilter<16> symmlet8{{
    0.0018899503327594609,  -0.0003029205147213668, -0.014952258337048231, 0.003808752013890615,
    0.049137179673607506,   -0.027219029917056003,  -0.051945838107709037, 0.3644418948353314,
    0.77718575170052351,    0.48135965125837221,    -0.061273359067658524, -0.14329423835080971,
    0.0076074873249176054,  0.031695087811492981,   -0.00054213233179114812, -0.0033824159510061256,
}};

struct DetailLevel {
    int level = 0;  // resolution j; holds 2^j coefficients
    std::vector<double> coefficients;
};

/// Coarse approximation plus detail levels ordered from coarsest to finest.
struct WaveletDecomposition {
    std::vector<double> coarse;
    std::vector<DetailLevel> details;
    std::size_t n = 0;

    int coarse_level() const { return std::countr_zero(coarse.size()); }

    /// Throws InputError unless the level lengths fit together into n.
    void validate() const {
        if (n == 0 || !std::has_single_bit(n)) throw InputError("WaveletDecomposition: n must be a power of two");
        if (coarse.empty() || !std::has_single_bit(coarse.size()))
            throw InputError("WaveletDecomposition: coarse length must be a power of two");
        std::size_t expected = coarse.size();
        std::size_t total = coarse.size();
        for (const auto& level : details) {
            if (level.coefficients.size() != expected ||
                level.level != std::countr_zero(expected))
                throw InputError("WaveletDecomposition: inconsistent length at detail level " +
                                 std::to_string(level.level));
            total += expected;
            expected *= 2;
        }
        if (total != n) throw InputError("WaveletDecomposition: level lengths do not sum to n");
    }

    /// Coarse block followed by the detail levels, coarsest first.
    std::vector<double> flatten() const {
        std::vector<double> out(coarse);
        out.reserve(n);
        for (const auto& level : details)
            out.insert(out.end(), level.coefficients.begin(), level.coefficients.end());
        return out;
    }

    double squared_norm() const {
        double s = 0.0;
        for (double c : coarse) s += c * c;
        for (const auto& level : details)
            for (double c : level.coefficients) s += c * c;
        return s;
    }
};

namespace detail {

template <std::size_t Taps>
void analysis_step(std::span<const double> x, std::span<double> approx, std::span<double> detail,
                   const OrthonormalFilter<Taps>& filter) {
    const std::size_t n = x.size();
    const auto& h = filter.lowpass;
    const auto g = filter.highpass();
    for (std::size_t k = 0; k < n / 2; ++k) {
        double a = 0.0;
        double d = 0.0;
        for (std::size_t m = 0; m < Taps; ++m) {
            const double v = x[(2 * k + m) % n];
            a += h[m] * v;
            d += g[m] * v;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

template <std::size_t Taps>
void synthesis_step(std::span<const double> approx, std::span<const double> detail, std::span<double> x,
                    const OrthonormalFilter<Taps>& filter) {
    const std::size_t n = x.size();
    const auto& h = filter.lowpass;
    const auto g = filter.highpass();
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t k = 0; k < n / 2; ++k) {
        for (std::size_t m = 0; m < Taps; ++m) {
            x[(2 * k + m) % n] += h[m] * approx[k] + g[m] * detail[k];
        }
    }
}

}  // namespace detail

/// Decomposes a length-2^J signal through `levels` pyramid steps.
template <std::size_t Taps = 16>
WaveletDecomposition dwt_forward(std::span<const double> signal, int levels,
                                 const OrthonormalFilter<Taps>& filter = symmlet8) {
    const std::size_t n = signal.size();
    if (n < 2 || !std::has_single_bit(n))
        throw InputError("dwt_forward: signal length " + std::to_string(n) + " is not a power of two >= 2");
    const int max_levels = std::countr_zero(n);
    if (levels < 1 || levels > max_levels)
        throw InputError("dwt_forward: levels must lie in [1, " + std::to_string(max_levels) + "]");

    WaveletDecomposition out;
    out.n = n;
    out.details.resize(static_cast<std::size_t>(levels));
    std::vector<double> current(signal.begin(), signal.end());
    for (int step = 0; step < levels; ++step) {
        const std::size_t half = current.size() / 2;
        std::vector<double> approx(half);
        auto& slot = out.details[static_cast<std::size_t>(levels - 1 - step)];
        slot.level = std::countr_zero(half);
        slot.coefficients.resize(half);
        detail::analysis_step<Taps>(current, approx, slot.coefficients, filter);
        current = std::move(approx);
    }
    out.coarse = std::move(current);
    return out;
}

template <std::size_t Taps = 16>
std::vector<double> dwt_inverse(const WaveletDecomposition& decomp,
                                const OrthonormalFilter<Taps>& filter = symmlet8) {
    decomp.validate();
    std::vector<double> current = decomp.coarse;
    for (const auto& level : decomp.details) {
        std::vector<double> next(current.size() * 2);
        detail::synthesis_step<Taps>(current, level.coefficients, next, filter);
        current = std::move(next);
    }
    return current;
}

}  // namespace pshrink
