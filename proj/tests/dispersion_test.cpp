#include <gtest/gtest.h>

#include <algorithm>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "qpmkit/crystal_config.hpp"
#include "qpmkit/dispersion.hpp"

using namespace qpmkit;

namespace {

// Independent long-double evaluation of the KTP Sellmeier formulas, written
// out term by term from the published coefficients.
long double oracle_ny(long double l) {
    return std::sqrt(2.19229L + 0.83547L / (1.0L - 0.04970L / (l * l)) - 0.01621L * l * l);
}
long double oracle_nz(long double l) {
    return std::sqrt(2.25411L + 1.06543L / (1.0L - 0.05486L / (l * l)) - 0.02140L * l * l);
}

const DispersionModel kModel = ktp_default();

}  // namespace

TEST(Sellmeier, MatchesIndependentEvaluation) {
    for (double l : {0.405, 0.5, 0.76271, 0.810, 0.86345, 1.0, 1.1}) {
        EXPECT_NEAR(sellmeier_index(kModel, Axis::Y, l), static_cast<double>(oracle_ny(l)), 1e-13);
        EXPECT_NEAR(sellmeier_index(kModel, Axis::Z, l), static_cast<double>(oracle_nz(l)), 1e-13);
    }
}

TEST(Sellmeier, FrozenValues) {
    // Frozen from a 30-digit evaluation of the same formulas.
    EXPECT_NEAR(sellmeier_index(kModel, Axis::Z, 0.405), 1.96251196509543, 1e-12);
    EXPECT_NEAR(sellmeier_index(kModel, Axis::Y, 0.405), 1.84073390823956, 1e-12);
    EXPECT_NEAR(sellmeier_index(kModel, Axis::Z, 0.810), 1.84464478031099, 1e-12);
    EXPECT_NEAR(sellmeier_index(kModel, Axis::Y, 0.810), 1.75658731371425, 1e-12);

    EXPECT_NEAR(sellmeier_index(kModel, Axis::Z, 0.405), 1.9625, 5e-4);
    EXPECT_NEAR(sellmeier_index(kModel, Axis::Y, 0.405), 1.8407, 5e-4);
    EXPECT_GT(sellmeier_index(kModel, Axis::Z, 0.810), sellmeier_index(kModel, Axis::Y, 0.810));
}

TEST(Sellmeier, OutsideWindowIsDomainError) {
    EXPECT_THROW(sellmeier_index(kModel, Axis::Z, 0.39), DomainError);
    EXPECT_THROW(sellmeier_index(kModel, Axis::Y, 1.2), DomainError);
    EXPECT_THROW(sellmeier_index(kModel, Axis::Y, std::nan("")), DomainError);
}

TEST(Sellmeier, NegativeRadicandIsModelError) {
    DispersionModel broken = kModel;
    broken.z.sellmeier = {-5.0, 0.1, 0.01, 0.0};
    EXPECT_THROW(sellmeier_index(broken, Axis::Z, 0.8), ModelError);
}

TEST(TemperatureCorrection, ZeroAtReference) {
    for (double l = 0.40; l <= 1.10; l += 0.05) {
        EXPECT_EQ(temperature_correction(kModel, Axis::Y, l, 25.0), 0.0);
        EXPECT_EQ(temperature_correction(kModel, Axis::Z, l, 25.0), 0.0);
    }
}

TEST(TemperatureCorrection, FrozenValueAt66C) {
    // n1 dT + n2 dT^2 at 405 nm, dT = 41 degC; frozen from a 30-digit evaluation.
    EXPECT_NEAR(temperature_correction(kModel, Axis::Z, 0.405, 66.0), 0.00190921779282099, 1e-15);
    EXPECT_NEAR(temperature_correction(kModel, Axis::Y, 0.405, 66.0), 0.00107963506646799, 1e-15);
}

TEST(TemperatureCorrection, QuadraticTermIsPresent) {
    // Second difference in T equals 2 n2 for a quadratic.
    const double l = 0.6;
    const double f0 = temperature_correction(kModel, Axis::Z, l, 40.0);
    const double fp = temperature_correction(kModel, Axis::Z, l, 41.0);
    const double fm = temperature_correction(kModel, Axis::Z, l, 39.0);
    const auto& c = kModel.z.thermo_optic.second;
    const double n2 = c[0] + c[1] / l + c[2] / (l * l) + c[3] / (l * l * l);
    EXPECT_NEAR(fp - 2 * f0 + fm, 2 * n2, 1e-15);
}

TEST(RefractiveIndex, PumpWavenumbersAt66C) {
    const double nz = refractive_index(kModel, Axis::Z, 0.405, 66.0);
    const double ny = refractive_index(kModel, Axis::Y, 0.405, 66.0);
    EXPECT_NEAR(nz, 1.9640, 1.5e-3);
    EXPECT_NEAR(ny, 1.8415, 1.5e-3);
    EXPECT_NEAR(wavenumber(kModel, Axis::Z, 0.405, 66.0), 30.47, 0.02);
    EXPECT_NEAR(wavenumber(kModel, Axis::Y, 0.405, 66.0), 28.57, 0.02);
    EXPECT_EQ(refractive_index(kModel, Axis::Z, 0.405, 25.0), sellmeier_index(kModel, Axis::Z, 0.405));
}

TEST(RefractiveIndex, PositiveBirefringenceEverywhere) {
    for (int i = 0; i <= 70; ++i) {
        const double l = std::min(0.40 + 0.01 * i, 1.10);
        for (double t = 20.0; t <= 80.0; t += 5.0) {
            EXPECT_GT(refractive_index(kModel, Axis::Z, l, t), refractive_index(kModel, Axis::Y, l, t))
                << "lambda=" << l << " T=" << t;
        }
    }
}

TEST(RefractiveIndex, NormalDispersion) {
    const double h = 1e-5;
    for (double l = 0.45; l <= 1.0; l += 0.01) {
        for (Axis axis : {Axis::Y, Axis::Z}) {
            const double d = (refractive_index(kModel, axis, l + h, 50.0) -
                              refractive_index(kModel, axis, l - h, 50.0)) / (2 * h);
            EXPECT_TRUE(std::isfinite(d));
            EXPECT_LT(d, 0.0);
            // continuity at the step scale
            EXPECT_LT(std::abs(refractive_index(kModel, axis, l + 1e-9, 50.0) -
                               refractive_index(kModel, axis, l, 50.0)), 1e-8);
        }
    }
}

TEST(RefractiveIndex, MonotoneInTemperatureWhenCoefficientsPositive) {
    for (int i = 0; i <= 35; ++i) {
        const double l = std::min(0.40 + 0.02 * i, 1.10);
        for (Axis axis : {Axis::Y, Axis::Z}) {
            const auto& t = kModel.axis(axis).thermo_optic;
            const double inv = 1.0 / l;
            const double n1 = t.first[0] + inv * (t.first[1] + inv * (t.first[2] + inv * t.first[3]));
            const double n2 = t.second[0] + inv * (t.second[1] + inv * (t.second[2] + inv * t.second[3]));
            if (!(n1 > 0 && n2 > 0)) continue;
            double prev = refractive_index(kModel, axis, l, 25.0);
            for (double temp = 26.0; temp <= 80.0; temp += 1.0) {
                const double cur = refractive_index(kModel, axis, l, temp);
                EXPECT_GT(cur, prev);
                prev = cur;
            }
        }
    }
}

TEST(CrystalConfig, ShippedProfileEqualsBuiltin) {
    const auto loaded = load_crystal(std::string(QPMKIT_DATA_DIR) + "/ktp-default.json");
    EXPECT_EQ(dispersion_to_json(loaded), dispersion_to_json(kModel));
    EXPECT_EQ(load_crystal("ktp-default").name, "ktp-default");
}

TEST(CrystalConfig, JsonRoundTrip) {
    const auto j = dispersion_to_json(kModel);
    const auto back = dispersion_from_json(j);
    EXPECT_EQ(dispersion_to_json(back).dump(), j.dump());
}

TEST(CrystalConfig, RejectsInvalidProfiles) {
    auto j = dispersion_to_json(kModel);
    j["axes"]["z"]["sellmeier"]["C"] = 0.5;  // pole at 0.707 um
    EXPECT_THROW(dispersion_from_json(j), ModelError);

    auto missing = dispersion_to_json(kModel);
    missing["axes"].erase("y");
    EXPECT_THROW(dispersion_from_json(missing), ModelError);

    EXPECT_THROW(load_crystal("/nonexistent/profile.json"), ModelError);
}

TEST(CrystalConfig, AlternateCoefficientsSwapWithoutCodeChanges) {
    auto j = dispersion_to_json(kModel);
    j["name"] = "no-thermo";
    j["axes"]["z"]["thermo_optic"]["n1"] = {0.0, 0.0, 0.0, 0.0};
    j["axes"]["z"]["thermo_optic"]["n2"] = {0.0, 0.0, 0.0, 0.0};
    const auto path = std::filesystem::temp_directory_path() / "qpmkit_no_thermo.json";
    std::ofstream(path) << j.dump(2);
    const auto m = load_crystal(path.string());
    EXPECT_EQ(refractive_index(m, Axis::Z, 0.5, 70.0), sellmeier_index(m, Axis::Z, 0.5));
    std::filesystem::remove(path);
}
