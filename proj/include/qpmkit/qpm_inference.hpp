#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qpmkit/dispersion.hpp"
#include "qpmkit/errors.hpp"
#include "qpmkit/phasematch.hpp"
#include "qpmkit/units.hpp"

// QPM-order inference from a temperature at which a type-0 and a type-II
// process emit the same signal/idler pair. With k_wg shared, subtracting the
// two phase-matching conditions eliminates it and leaves the order gap
// m_x - m_y as a real number; the integer pair is then chosen among odd
// positive orders.

namespace qpmkit {

inline constexpr double kObservationEnergyTolNm = 0.1;

struct IntersectionObservation {
    double temperature_c = 0.0;
    double pump_nm = 0.0;
    double signal_nm = 0.0;
    double idler_nm = 0.0;
};

// Measured wavelengths need only conserve energy to measurement precision.
inline void validate(const IntersectionObservation& obs) {
    const double expected = idler_from_energy(obs.pump_nm, obs.signal_nm);
    if (!(std::abs(expected - obs.idler_nm) <= kObservationEnergyTolNm)) {
        throw DomainError("observation violates energy conservation: idler " +
                          std::to_string(obs.idler_nm) + " nm, expected " +
                          std::to_string(expected) + " nm");
    }
}

// The five numbers of the two linear conditions
//   type0_pump = type0_pair_sum + m_x * grating + k_wg
//   type2_pump = type2_pair_sum + m_y * grating + k_wg
// all in rad/um.
struct EquationConstants {
    double type0_pump = 0.0;
    double type0_pair_sum = 0.0;
    double type2_pump = 0.0;
    double type2_pair_sum = 0.0;
    double grating = 0.0;
};

inline EquationConstants equation_constants(const DispersionModel& disp, const GratingSpec& grating,
                                            const IntersectionObservation& obs) {
    validate(obs);
    const double t = obs.temperature_c;
    auto k = [&](Axis axis, double nm) { return wavenumber(disp, axis, units::nm_to_um(nm), t); };
    const auto type0 = axes_for(ProcessKind::Type0);
    const auto type2 = axes_for(ProcessKind::Type2);

    EquationConstants c;
    c.type0_pump = k(type0.pump, obs.pump_nm);
    c.type0_pair_sum = k(type0.signal, obs.signal_nm) + k(type0.idler, obs.idler_nm);
    c.type2_pump = k(type2.pump, obs.pump_nm);
    c.type2_pair_sum = k(type2.signal, obs.signal_nm) + k(type2.idler, obs.idler_nm);
    c.grating = grating_wavenumber(grating, t);
    return c;
}

// delta = m_x - m_y implied by the constants.
inline double order_gap(const EquationConstants& c) {
    if (c.grating == 0.0 || !std::isfinite(c.grating)) {
        throw ModelError("degenerate grating constant");
    }
    return ((c.type0_pump - c.type0_pair_sum) - (c.type2_pump - c.type2_pair_sum)) / c.grating;
}

struct QpmSolution {
    int m_x = 0;  // type-0 order
    int m_y = 0;  // type-II order
    double k_wg = 0.0;
    double residual_split = 0.0;  // |k_wg(type-0) - k_wg(type-II)|
    double score = 0.0;           // |delta - (m_x - m_y)|
};

struct QpmInference {
    double order_gap = 0.0;
    QpmSolution best;
    bool accepted = false;             // best.score < kOrderScoreThreshold
    std::vector<QpmSolution> tied;     // other pairs with the same score, ascending m_x + m_y
};

inline constexpr double kOrderScoreThreshold = 0.5;
inline constexpr int kDefaultMaxOrder = 9;

inline QpmSolution evaluate_orders(const EquationConstants& c, int m_x, int m_y) {
    const double kwg_type0 = c.type0_pump - c.type0_pair_sum - m_x * c.grating;
    const double kwg_type2 = c.type2_pump - c.type2_pair_sum - m_y * c.grating;
    QpmSolution s;
    s.m_x = m_x;
    s.m_y = m_y;
    s.k_wg = 0.5 * (kwg_type0 + kwg_type2);
    s.residual_split = std::abs(kwg_type0 - kwg_type2);
    s.score = std::abs(order_gap(c) - (m_x - m_y));
    return s;
}

// Exhaustive search over odd (m_x, m_y) in [1, max_order]^2. Pairs sharing a
// difference score identically; those are reported in `tied` and the
// lowest-order pair wins.
inline QpmInference infer_orders(const EquationConstants& c, int max_order = kDefaultMaxOrder) {
    if (max_order < 1 || max_order % 2 == 0) {
        throw DomainError("max_order must be a positive odd integer");
    }
    QpmInference result;
    result.order_gap = order_gap(c);

    std::vector<QpmSolution> candidates;
    for (int mx = 1; mx <= max_order; mx += 2) {
        for (int my = 1; my <= max_order; my += 2) {
            candidates.push_back(evaluate_orders(c, mx, my));
        }
    }
    double best_score = std::numeric_limits<double>::infinity();
    for (const auto& s : candidates) best_score = std::min(best_score, s.score);

    std::vector<QpmSolution> winners;
    for (const auto& s : candidates) {
        if (std::abs(s.score - best_score) <= 1e-12 * (1.0 + best_score)) winners.push_back(s);
    }
    std::stable_sort(winners.begin(), winners.end(), [](const auto& l, const auto& r) {
        return l.m_x + l.m_y < r.m_x + r.m_y;
    });
    result.best = winners.front();
    result.tied.assign(winners.begin() + 1, winners.end());
    result.accepted = result.best.score < kOrderScoreThreshold;
    return result;
}

// Brightness ratio of two QPM processes, (d_a/m_a)^2 / (d_b/m_b)^2. The
// first-order Fourier factor 2/(pi m) cancels except for the 1/m.
inline double relative_brightness(double d_a, int m_a, double d_b, int m_b) {
    if (!(d_a > 0.0) || !(d_b > 0.0) || m_a < 1 || m_b < 1) {
        throw DomainError("relative_brightness needs positive coefficients and orders");
    }
    const double a = d_a / m_a;
    const double b = d_b / m_b;
    return (a * a) / (b * b);
}

}  // namespace qpmkit
