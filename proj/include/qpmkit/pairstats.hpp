#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "qpmkit/errors.hpp"
#include "qpmkit/units.hpp"

// Coincidence-rate analysis: accidental subtraction, CAR, slope of rate
// versus pump power, and the corrections that take a measured coincidence
// slope to an intrinsic pair-generation rate. All rates are in Hz (or Hz/mW
// for slopes); convert at the edges with units::mhz_to_hz.

namespace qpmkit {

struct CoincidencePoint {
    double pump_power_mw = 0.0;
    double measured_hz = 0.0;
    double accidentals_hz = 0.0;
    double window_s = 2e-9;
};

struct TrueCoincidences {
    double rate_hz = 0.0;
    bool underflow = false;  // accidentals exceeded the measured rate; rate clamped to 0
};

inline TrueCoincidences true_coincidences(double measured_hz, double accidentals_hz) {
    if (!(measured_hz >= 0.0) || !(accidentals_hz >= 0.0)) {
        throw DomainError("coincidence rates must be non-negative");
    }
    if (accidentals_hz > measured_hz) return {0.0, true};
    return {measured_hz - accidentals_hz, false};
}

// Uncorrelated-coincidence estimate R_a R_b tau.
inline double accidentals_estimate(double singles_a_hz, double singles_b_hz, double window_s) {
    if (!(singles_a_hz >= 0.0) || !(singles_b_hz >= 0.0) || !(window_s > 0.0)) {
        throw DomainError("accidentals_estimate needs non-negative singles and a positive window");
    }
    return singles_a_hz * singles_b_hz * window_s;
}

// Coincidence-to-accidental ratio. Zero accidentals yields +inf.
inline double car(double true_rate_hz, double accidentals_hz) {
    if (!(true_rate_hz >= 0.0) || !(accidentals_hz >= 0.0)) {
        throw DomainError("CAR inputs must be non-negative");
    }
    if (accidentals_hz == 0.0) return std::numeric_limits<double>::infinity();
    return true_rate_hz / accidentals_hz;
}

struct FitResult {
    double slope = 0.0;
    double slope_stderr = 0.0;
    double r_squared = 0.0;
};

// Least squares y = k x with no intercept. R^2 uses the total sum of squares
// about the mean of y.
inline FitResult fit_through_origin(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw FitError("fit needs at least two points");
    double sxx = 0.0;
    double sxy = 0.0;
    double mean_y = 0.0;
    for (const auto& [x, y] : points) {
        sxx += x * x;
        sxy += x * y;
        mean_y += y;
    }
    if (sxx == 0.0) throw FitError("all abscissae are zero");
    mean_y /= static_cast<double>(points.size());

    FitResult fit;
    fit.slope = sxy / sxx;
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (const auto& [x, y] : points) {
        const double r = y - fit.slope * x;
        ss_res += r * r;
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    // One fitted parameter.
    const double dof = static_cast<double>(points.size() - 1);
    fit.slope_stderr = std::sqrt(ss_res / dof / sxx);
    if (ss_tot > 0.0) {
        fit.r_squared = 1.0 - ss_res / ss_tot;
    } else {
        fit.r_squared = ss_res == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
    }
    return fit;
}

// A 50:50 splitter sends both photons of a pair to the same detector half
// the time.
inline double splitter_correction(double coincidence_rate) {
    if (!(coincidence_rate >= 0.0)) throw DomainError("rate must be non-negative");
    return 2.0 * coincidence_rate;
}

struct LossBudget {
    double pump_coupling = 1.0;
    double fiber_coupling = 1.0;
    double detector_efficiency = 1.0;  // per arm
    double filter_transmission = 1.0;  // per filter
    int n_filters = 0;
};

inline void validate(const LossBudget& b) {
    auto fraction = [](double f) { return f > 0.0 && f <= 1.0; };
    if (!fraction(b.pump_coupling) || !fraction(b.fiber_coupling) ||
        !fraction(b.detector_efficiency) || !fraction(b.filter_transmission)) {
        throw DomainError("loss-budget efficiencies must lie in (0, 1]");
    }
    if (b.n_filters < 0) throw DomainError("n_filters must be non-negative");
}

// Overall detection probability of a pair: both detectors must fire, so the
// detector efficiency enters squared; coupling factors enter once and the
// filter stack once per filter.
inline double pair_detection_efficiency(const LossBudget& b) {
    validate(b);
    return b.pump_coupling * b.fiber_coupling * b.detector_efficiency * b.detector_efficiency *
           std::pow(b.filter_transmission, b.n_filters);
}

inline double loss_corrected_rate(double effective_rate, const LossBudget& budget) {
    return effective_rate / pair_detection_efficiency(budget);
}

struct SpectralDensity {
    double per_nm = 0.0;
    double bandwidth_thz = 0.0;
    double per_thz = 0.0;
};

// Rate per unit bandwidth, in wavelength and in frequency (dnu = c dlambda / lambda^2).
inline SpectralDensity spectral_density(double rate, double bandwidth_nm, double center_nm) {
    if (!(rate >= 0.0) || !(bandwidth_nm > 0.0) || !(center_nm > 0.0)) {
        throw DomainError("spectral_density needs a non-negative rate and positive bandwidth/center");
    }
    SpectralDensity sd;
    sd.per_nm = rate / bandwidth_nm;
    const double center_m = center_nm * 1e-9;
    sd.bandwidth_thz = units::kSpeedOfLight * (bandwidth_nm * 1e-9) / (center_m * center_m) * 1e-12;
    sd.per_thz = rate / sd.bandwidth_thz;
    return sd;
}

struct PairRateSummary {
    FitResult fit;               // true coincidences vs pump power, Hz/mW
    double effective_rate = 0.0; // after splitter correction, Hz/mW
    double intrinsic_rate = 0.0; // after loss-budget correction, Hz/mW
    std::vector<double> car_series;
    std::vector<bool> underflow;
};

// Full analysis of a pump-power sweep.
inline PairRateSummary analyze_sweep(std::span<const CoincidencePoint> points,
                                     const LossBudget& budget, bool fifty_fifty_splitter = true) {
    std::vector<std::pair<double, double>> xy;
    PairRateSummary summary;
    for (const auto& p : points) {
        if (!(p.pump_power_mw >= 0.0) || !(p.window_s > 0.0)) {
            throw DomainError("coincidence point needs non-negative power and positive window");
        }
        const auto t = true_coincidences(p.measured_hz, p.accidentals_hz);
        xy.emplace_back(p.pump_power_mw, t.rate_hz);
        summary.car_series.push_back(car(t.rate_hz, p.accidentals_hz));
        summary.underflow.push_back(t.underflow);
    }
    summary.fit = fit_through_origin(xy);
    summary.effective_rate =
        fifty_fifty_splitter ? splitter_correction(summary.fit.slope) : summary.fit.slope;
    summary.intrinsic_rate = loss_corrected_rate(summary.effective_rate, budget);
    return summary;
}

}  // namespace qpmkit
