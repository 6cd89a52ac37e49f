#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "qpmkit/pairstats.hpp"
#include "qpmkit/presets.hpp"

using namespace qpmkit;
using units::hz_to_mhz;
using units::mhz_to_hz;

TEST(TrueCoincidences, SubtractAndClamp) {
    auto t = true_coincidences(1000.0, 100.0);
    EXPECT_EQ(t.rate_hz, 900.0);
    EXPECT_FALSE(t.underflow);

    t = true_coincidences(100.0, 100.0);
    EXPECT_EQ(t.rate_hz, 0.0);
    EXPECT_FALSE(t.underflow);

    t = true_coincidences(50.0, 100.0);
    EXPECT_EQ(t.rate_hz, 0.0);
    EXPECT_TRUE(t.underflow);

    EXPECT_THROW(true_coincidences(-1.0, 0.0), DomainError);
}

TEST(Accidentals, SinglesProduct) {
    EXPECT_NEAR(accidentals_estimate(1e5, 1e5, 2e-9), 20.0, 1e-9);
    EXPECT_EQ(accidentals_estimate(0.0, 3e5, 2e-9), 0.0);
    EXPECT_NEAR(accidentals_estimate(1e6, 1e6, 2e-9), 2000.0, 1e-6);
    EXPECT_THROW(accidentals_estimate(1.0, 1.0, 0.0), DomainError);
}

TEST(Car, Basics) {
    EXPECT_EQ(car(900.0, 100.0), 9.0);
    EXPECT_EQ(car(0.0, 100.0), 0.0);
    EXPECT_TRUE(std::isinf(car(10.0, 0.0)));
    for (double s : {1e-3, 0.5, 7.0, 1e6}) EXPECT_DOUBLE_EQ(car(s * 900.0, s * 100.0), 9.0);
}

TEST(Car, InverseWithPumpPower) {
    // true ~ P, accidentals ~ P^2
    double prev = std::numeric_limits<double>::infinity();
    for (double p = 0.5; p <= 10.0; p += 0.5) {
        const double c = car(1e4 * p, 3.0 * p * p);
        EXPECT_LT(c, prev);
        EXPECT_NEAR(c * p, 1e4 / 3.0, 1e-9);
        prev = c;
    }
}

TEST(FitThroughOrigin, ExactLine) {
    const std::vector<std::pair<double, double>> pts{{1, 2}, {2, 4}, {3, 6}};
    const auto f = fit_through_origin(pts);
    EXPECT_EQ(f.slope, 2.0);
    EXPECT_EQ(f.r_squared, 1.0);
    EXPECT_EQ(f.slope_stderr, 0.0);
}

TEST(FitThroughOrigin, ExactLinesRecoverSlope) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> k(-50.0, 50.0);
    std::uniform_real_distribution<double> x(0.1, 20.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double slope = k(rng);
        std::vector<std::pair<double, double>> pts;
        for (int i = 0; i < 8; ++i) {
            const double xi = x(rng);
            pts.emplace_back(xi, slope * xi);
        }
        const auto f = fit_through_origin(pts);
        EXPECT_NEAR(f.slope, slope, 1e-12 * std::abs(slope));
        EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
    }
}

TEST(FitThroughOrigin, NoisyLineWithinThreeStderr) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> noise(0.0, 0.1);
    std::vector<std::pair<double, double>> pts;
    for (int i = 1; i <= 20; ++i) {
        const double x = 0.5 * i;
        pts.emplace_back(x, 3.0 * x + noise(rng));
    }
    const auto f = fit_through_origin(pts);
    EXPECT_GT(f.slope_stderr, 0.0);
    EXPECT_LT(std::abs(f.slope - 3.0), 3.0 * f.slope_stderr);
    EXPECT_LE(f.r_squared, 1.0);
    EXPECT_GT(f.r_squared, 0.99);
}

TEST(FitThroughOrigin, DegenerateInput) {
    const std::vector<std::pair<double, double>> one{{1, 1}};
    EXPECT_THROW(fit_through_origin(one), FitError);
    const std::vector<std::pair<double, double>> zero_x{{0, 1}, {0, 2}};
    EXPECT_THROW(fit_through_origin(zero_x), FitError);
}

TEST(SplitterCorrection, Doubles) {
    EXPECT_NEAR(splitter_correction(5.417), 10.834, 1e-12);
    EXPECT_NEAR(splitter_correction(1.195), 2.390, 1e-12);
    EXPECT_EQ(splitter_correction(0.0), 0.0);
}

TEST(LossBudget, IntrinsicRates) {
    const auto budget = presets::coincidence_setup_budget();
    EXPECT_NEAR(loss_corrected_rate(10.834, budget), 254.3, 1.3);
    EXPECT_NEAR(loss_corrected_rate(2.390, budget), 56.1, 0.3);
    EXPECT_EQ(loss_corrected_rate(3.7, LossBudget{}), 3.7);
}

TEST(LossBudget, Validation) {
    EXPECT_THROW(loss_corrected_rate(1.0, LossBudget{0.0, 1.0, 1.0, 1.0, 0}), DomainError);
    EXPECT_THROW(loss_corrected_rate(1.0, LossBudget{1.0, 1.2, 1.0, 1.0, 0}), DomainError);
    EXPECT_THROW(loss_corrected_rate(1.0, LossBudget{1.0, 1.0, 1.0, 1.0, -1}), DomainError);
}

TEST(LossBudget, PipelineIsLinear) {
    const auto budget = presets::coincidence_setup_budget();
    const double base = loss_corrected_rate(splitter_correction(mhz_to_hz(1.0)), budget);
    for (double s : {0.0, 0.25, 3.0, 1e3}) {
        EXPECT_NEAR(loss_corrected_rate(splitter_correction(mhz_to_hz(s)), budget), s * base,
                    1e-9 * s * base);
    }
}

TEST(SpectralDensity, BestChannel) {
    const auto sd = spectral_density(262.88, 20.0, 810.0);
    EXPECT_NEAR(sd.per_nm, 13.14, 0.01);
    EXPECT_NEAR(sd.bandwidth_thz, 9.15, 0.02);
    EXPECT_NEAR(sd.per_thz, 28.7, 0.1);
    EXPECT_NEAR(sd.per_nm * 20.0, 262.88, 1e-12);
    EXPECT_NEAR(sd.per_thz * sd.bandwidth_thz, 262.88, 1e-12);
    EXPECT_EQ(spectral_density(42.0, 1.0, 700.0).per_nm, 42.0);
}

TEST(AnalyzeSweep, SyntheticMeasurement) {
    // True coincidences 5.417 MHz/mW, accidentals growing with P^2.
    std::vector<CoincidencePoint> pts;
    for (double p : {0.1, 0.2, 0.3, 0.4, 0.5}) {
        const double acc = 2e4 * p * p;
        pts.push_back({p, mhz_to_hz(5.417) * p + acc, acc, 2e-9});
    }
    const auto s = analyze_sweep(pts, presets::coincidence_setup_budget());
    EXPECT_NEAR(hz_to_mhz(s.fit.slope), 5.417, 1e-9);
    EXPECT_NEAR(hz_to_mhz(s.effective_rate), 10.834, 1e-9);
    EXPECT_NEAR(hz_to_mhz(s.intrinsic_rate), 254.3, 1.3);
    for (std::size_t i = 1; i < s.car_series.size(); ++i) {
        EXPECT_LT(s.car_series[i], s.car_series[i - 1]);
    }
}
