#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pshrink/baselines.hpp"
#include "pshrink/testbed.hpp"

using namespace pshrink;

namespace {

std::vector<double> noise(std::mt19937_64& rng, std::size_t n, double sd) {
    std::normal_distribution<double> normal(0.0, sd);
    std::vector<double> x(n);
    for (double& v : x) v = normal(rng);
    return x;
}

// Soft-threshold SURE for unit variance, written out term by term:
// sum_i [1 - 2 I(|x_i| <= t) + min(|x_i|, t)^2].
double brute_soft_sure(const std::vector<double>& x, double t) {
    double total = 0.0;
    for (double v : x) {
        const double m = std::fabs(v);
        total += 1.0 - (m <= t ? 2.0 : 0.0) + std::min(m, t) * std::min(m, t);
    }
    return total;
}

double brute_sure_threshold(const std::vector<double>& x) {
    const double cap = std::sqrt(2.0 * std::log(static_cast<double>(x.size())));
    std::vector<double> candidates{0.0, cap};
    for (double v : x)
        if (std::fabs(v) <= cap) candidates.push_back(std::fabs(v));
    std::sort(candidates.begin(), candidates.end());
    double best_t = candidates.front();
    double best = brute_soft_sure(x, best_t);
    for (double t : candidates) {
        const double r = brute_soft_sure(x, t);
        if (r < best) {
            best = r;
            best_t = t;
        }
    }
    return best_t;
}

// Decomposition with a 4-coefficient coarse block and one detail level per
// entry of `levels` (lengths 4, 8, 16, ...).
WaveletDecomposition make_decomposition(std::vector<double> coarse, std::vector<std::vector<double>> levels) {
    WaveletDecomposition dec;
    dec.coarse = std::move(coarse);
    std::size_t n = dec.coarse.size();
    int j = std::countr_zero(dec.coarse.size());
    for (auto& c : levels) {
        n += c.size();
        dec.details.push_back({j++, std::move(c)});
    }
    dec.n = n;
    dec.validate();
    return dec;
}

WaveletDecomposition noisy_blocks_decomposition(std::uint64_t seed, std::size_t n = 1024) {
    const auto sig = generate_signal("blocks", n, 3.0);
    std::mt19937_64 rng(seed);
    auto y = sig.samples;
    const auto e = noise(rng, n, 1.0);
    for (std::size_t i = 0; i < n; ++i) y[i] += e[i];
    return dwt_forward(y, 6);
}

}  // namespace

TEST(SoftThreshold, Examples) {
    EXPECT_DOUBLE_EQ(soft_threshold(3.0, 1.0), 2.0);
    EXPECT_DOUBLE_EQ(soft_threshold(-0.5, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(soft_threshold(-3.5, 1.0), -2.5);
    for (double x : {-2.0, -0.1, 0.0, 0.7, 12.0}) EXPECT_DOUBLE_EQ(soft_threshold(x, 0.0), x);
}

TEST(CutoffLevel, LowestLevelAboveLogLogBound) {
    EXPECT_EQ(cutoff_level(64), 4);    // log2(ln 64) + 1 = 3.06
    EXPECT_EQ(cutoff_level(1024), 4);  // 3.79
    EXPECT_EQ(cutoff_level(2048), 4);  // 3.93
    EXPECT_EQ(cutoff_level(4096), 5);  // 4.06
    EXPECT_EQ(cutoff_level(8192), 5);
}

TEST(UniversalThreshold, Value) {
    EXPECT_NEAR(universal_threshold(1.0, 1024), 3.72329741105903413, 1e-12);
    EXPECT_NEAR(universal_threshold(2.0, 1024), 2.0 * 3.72329741105903413, 1e-12);
}

TEST(VisuShrink, KillsEverythingBelowThreshold) {
    auto dec = make_decomposition({10.0, -7.0, 3.0, 1.0}, {{1.0, -2.0, 3.0, -0.5}, {3.7, -3.7, 0, 1, 2, 0.1, -0.2, 3.0}});
    const auto out = visu_shrink(dec, 1.0, 1024, 2);
    EXPECT_EQ(out.coarse, dec.coarse);
    for (const auto& level : out.details)
        for (double c : level.coefficients) EXPECT_EQ(c, 0.0);
}

TEST(VisuShrink, NoiselessBlocksSoftThresholdedAtUniversalLevel) {
    const auto sig = generate_signal("blocks", 1024, 3.0);
    const auto dec = dwt_forward(sig.samples, 6);
    const double lambda = universal_threshold(1.0, 1024);
    const auto out = visu_shrink(dec, 1.0, 1024, 4);
    int survivors = 0;
    for (std::size_t k = 0; k < dec.details.size(); ++k) {
        const auto& in = dec.details[k].coefficients;
        const auto& got = out.details[k].coefficients;
        for (std::size_t i = 0; i < in.size(); ++i) {
            if (std::abs(in[i]) > lambda) {
                ++survivors;
                EXPECT_NEAR(got[i], in[i] - std::copysign(lambda, in[i]), 1e-12);
            } else {
                EXPECT_EQ(got[i], 0.0);
            }
        }
    }
    EXPECT_GT(survivors, 0);
}

TEST(SureShrink, SureThresholdMatchesBruteForce) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 8u << (trial % 6);
        auto x = noise(rng, d, 1.0);
        if (trial % 3 == 0)
            for (std::size_t i = 0; i < d / 4; ++i) x[i] += 4.0;
        if (trial % 7 == 0) x[1] = x[0];  // exercise ties
        const double t = sure_soft_threshold(x);
        const double ref = brute_sure_threshold(x);
        EXPECT_NEAR(brute_soft_sure(x, t), brute_soft_sure(x, ref), 1e-9);
        EXPECT_NEAR(soft_threshold_sure(x, t), brute_soft_sure(x, t), 1e-9);
    }
}

TEST(SureShrink, PureNoiseLevelTakesSparseBranch) {
    int mostly_zero = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed);
        auto dec = make_decomposition(std::vector<double>(256, 0.0), {noise(rng, 256, 1.0)});
        const auto out = sure_shrink(dec, 1.0, 0);
        const auto& c = out.details[0].coefficients;
        const auto zeros = std::count(c.begin(), c.end(), 0.0);
        if (zeros >= 250) ++mostly_zero;
    }
    EXPECT_GE(mostly_zero, 95);
}

TEST(SureShrink, DenseLevelKeepsLargeCoefficients) {
    std::mt19937_64 rng(77);
    auto level = noise(rng, 64, 1.0);
    for (double& v : level) v += (v >= 0 ? 50.0 : -50.0);
    const auto dec = make_decomposition({0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                                         0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                                         0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                                         0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                                         0.0, 0.0, 0.0, 0.0},
                                        {level});
    EXPECT_DOUBLE_EQ(sure_soft_threshold(level), brute_sure_threshold(level));
    EXPECT_DOUBLE_EQ(sure_soft_threshold(level), 0.0);
    const auto out = sure_shrink(dec, 1.0, 0);
    for (std::size_t i = 0; i < level.size(); ++i) EXPECT_NEAR(out.details[0].coefficients[i], level[i], 1e-12);
}

TEST(SureShrink, AllZeroLevelUnchanged) {
    const auto dec = make_decomposition({1.0, 2.0, 3.0, 4.0}, {std::vector<double>(4, 0.0), std::vector<double>(8, 0.0)});
    const auto out = sure_shrink(dec, 1.0, 0);
    for (const auto& level : out.details)
        for (double c : level.coefficients) EXPECT_EQ(c, 0.0);
}

TEST(BlockJs, BlockLength) {
    EXPECT_EQ(block_js_length(1024), 6u);
    EXPECT_EQ(block_js_length(64), 4u);
    EXPECT_EQ(block_js_length(1024, {3, 4.50524}), 3u);
}

TEST(BlockJs, BoundaryBlockIsZeroed) {
    // L = 2, lambda* = 4.5, sigma = 1: a block with S^2 = 9 sits exactly on the boundary.
    const auto dec = make_decomposition({1.0, 1.0, 1.0, 1.0}, {{3.0, 0.0, 30.0, 40.0}});
    const auto out = block_js(dec, 1.0, 8, 0, {2, 4.5});
    EXPECT_EQ(out.details[0].coefficients[0], 0.0);
    EXPECT_EQ(out.details[0].coefficients[1], 0.0);
    // S^2 = 2500: factor 1 - 9/2500.
    EXPECT_NEAR(out.details[0].coefficients[2], 30.0 * (1.0 - 9.0 / 2500.0), 1e-13);
    EXPECT_NEAR(out.details[0].coefficients[3], 40.0 * (1.0 - 9.0 / 2500.0), 1e-13);
}

TEST(BlockJs, DefaultLambdaBoundary) {
    const double c = std::sqrt(4.50524);
    const auto dec = make_decomposition({0.0, 0.0, 0.0, 0.0}, {{c, c, c, c}});
    const auto out = block_js(dec, 1.0, 8, 0, {4, 4.50524});
    for (double v : out.details[0].coefficients) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(BlockJs, HugeBlocksPreserved) {
    const auto dec = make_decomposition({0.0, 0.0, 0.0, 0.0}, {{1e8, -2e8, 3e8, 1e8}});
    const auto out = block_js(dec, 1.0, 1024, 0);
    for (std::size_t i = 0; i < 4; ++i)
        EXPECT_NEAR(out.details[0].coefficients[i] / dec.details[0].coefficients[i], 1.0, 1e-12);
}

TEST(BlockJs, ShortFinalBlockBorrowsCyclically) {
    // d = 8, L = 3: the last block is {c6, c7, c0}.
    std::vector<double> c{10.0, 0.5, 0.5, 0.5, 0.5, 0.5, 1.0, 1.0};
    const auto dec = make_decomposition({0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}, {c});
    const auto out = block_js(dec, 1.0, 16, 0, {3, 1.0});
    const double s2_last = 1.0 + 1.0 + 100.0;
    const double factor = 1.0 - 3.0 / s2_last;
    EXPECT_NEAR(out.details[0].coefficients[6], factor * 1.0, 1e-14);
    EXPECT_NEAR(out.details[0].coefficients[7], factor * 1.0, 1e-14);
    const double first = 1.0 - 3.0 / (100.0 + 0.25 + 0.25);
    EXPECT_NEAR(out.details[0].coefficients[0], first * 10.0, 1e-13);
}

TEST(JamesSteinLevelwise, DelegatesToCanonicalBetaTwo) {
    const auto dec = noisy_blocks_decomposition(5);
    const auto out = js_plus_levelwise(dec, 1.0, 4);
    for (std::size_t k = 0; k < dec.details.size(); ++k) {
        const auto& in = dec.details[k].coefficients;
        if (dec.details[k].level < 4) {
            EXPECT_EQ(out.details[k].coefficients, in);
            continue;
        }
        const auto ref = threshold_estimate(CanonicalSample(in), 2.0, static_cast<double>(in.size()) - 2.0);
        EXPECT_EQ(out.details[k].coefficients, ref);
    }
}

TEST(JamesSteinLevelwise, ShortLevelsPassThrough) {
    WaveletDecomposition dec;
    dec.coarse = {1.0};
    dec.details = {{0, {0.3}}, {1, {0.2, -0.1}}, {2, {0.1, 0.1, 0.2, 0.1}}};
    dec.n = 8;
    const auto out = js_plus_levelwise(dec, 1.0, 0);
    EXPECT_EQ(out.details[0].coefficients, dec.details[0].coefficients);
    EXPECT_EQ(out.details[1].coefficients, dec.details[1].coefficients);
    for (double v : out.details[2].coefficients) EXPECT_EQ(v, 0.0);
}

TEST(PowerShrinkLevelwise, FinestLevelMatchesCanonicalExample) {
    const auto dec = make_decomposition({1.0, -2.0, 0.5, 4.0}, {{0.01, 5.0, 5.0, 5.0}});
    const ShrinkConfig config{4.0 / 3.0, a_rule::Fixed{10.0 / 3.0}};
    const auto out = power_shrink_levelwise(dec, 1.0, 2, config);
    const std::vector<double> z{0.01, 5.0, 5.0, 5.0};
    EXPECT_EQ(out.details[0].coefficients, threshold_estimate(CanonicalSample(z), config));
    EXPECT_EQ(out.details[0].coefficients[0], 0.0);
    EXPECT_EQ(out.coarse, dec.coarse);
}

TEST(PowerShrinkLevelwise, CutoffAboveAllLevelsIsIdentity) {
    const auto dec = noisy_blocks_decomposition(6);
    const auto out = power_shrink_levelwise(dec, 1.0, 20, ShrinkConfig{});
    EXPECT_EQ(out.flatten(), dec.flatten());
}

TEST(PowerShrinkLevelwise, BetaTwoWithDMinusTwoEqualsJamesStein) {
    std::mt19937_64 rng(12);
    for (std::size_t d : {4u, 16u, 64u, 256u}) {
        const auto dec = make_decomposition(std::vector<double>(d, 0.0), {noise(rng, d, 1.2)});
        const auto zh = power_shrink_levelwise(dec, 1.0, 0, {2.0, a_rule::Fixed{static_cast<double>(d) - 2.0}});
        const auto js = js_plus_levelwise(dec, 1.0, 0);
        EXPECT_EQ(zh.flatten(), js.flatten());
    }
}

TEST(PowerShrinkSureLevelwise, UsesSelectedBetaPerLevel) {
    const auto dec = noisy_blocks_decomposition(8);
    const auto grid = default_beta_grid();
    const auto out = power_shrink_sure_levelwise(dec, 1.0, 4, grid);
    for (std::size_t k = 0; k < dec.details.size(); ++k) {
        const auto& in = dec.details[k].coefficients;
        if (dec.details[k].level < 4) continue;
        const CanonicalSample sample(in);
        const auto pick = select_beta_by_sure(sample, grid);
        EXPECT_EQ(out.details[k].coefficients, threshold_estimate(sample, pick.beta, pick.a));
    }
}

TEST(LevelwiseMethods, ShapeCutoffAndShrinkInvariants) {
    const std::vector<LevelwiseMethod> methods{
        LevelwiseMethod::identity(),      LevelwiseMethod::visu_shrink(), LevelwiseMethod::sure_shrink(),
        LevelwiseMethod::block_js(),      LevelwiseMethod::james_stein_plus(),
        LevelwiseMethod::power_shrink(),    LevelwiseMethod::power_shrink_sure()};
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto dec = noisy_blocks_decomposition(100 + seed);
        for (const auto& m : methods) {
            const auto out = m.apply(dec, 1.0, 5);
            ASSERT_NO_THROW(out.validate());
            ASSERT_EQ(out.details.size(), dec.details.size());
            EXPECT_EQ(out.coarse, dec.coarse) << m.name();
            for (std::size_t k = 0; k < dec.details.size(); ++k) {
                const auto& in = dec.details[k].coefficients;
                const auto& got = out.details[k].coefficients;
                ASSERT_EQ(in.size(), got.size());
                if (dec.details[k].level < 5) {
                    EXPECT_EQ(got, in) << m.name();
                    continue;
                }
                for (std::size_t i = 0; i < in.size(); ++i) {
                    EXPECT_LE(std::abs(got[i]), std::abs(in[i])) << m.name();
                    if (in[i] != 0.0 && m.kind() != MethodKind::VisuShrink && m.kind() != MethodKind::SureShrink) {
                        const double factor = got[i] / in[i];
                        EXPECT_GE(factor, 0.0) << m.name();
                        EXPECT_LE(factor, 1.0) << m.name();
                    }
                }
            }
        }
    }
}

TEST(LevelwiseMethods, ParseAndValidate) {
    for (const char* token : {"zh", "zh-sure", "visu", "sure", "blockjs", "js", "identity"})
        EXPECT_EQ(parse_method(token).name(), token);
    EXPECT_THROW(parse_method("hard"), ConfigError);
    EXPECT_THROW(LevelwiseMethod::block_js({4, 0.0}), ConfigError);
    EXPECT_THROW(LevelwiseMethod::power_shrink({3.0, a_rule::FiniteSample{}}), ConfigError);
    EXPECT_THROW(LevelwiseMethod::power_shrink_sure({0.5, 1.0}), ConfigError);
    EXPECT_EQ(parse_method("zh", {1.5, a_rule::EmpiricalBayes{}}).shrink_config().beta, 1.5);
}
