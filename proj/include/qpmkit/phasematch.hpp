#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qpmkit/dispersion.hpp"
#include "qpmkit/errors.hpp"
#include "qpmkit/roots.hpp"
#include "qpmkit/units.hpp"

namespace qpmkit {

// Periodically poled grating with thermal expansion along the grating vector:
//   period(T) = period_0 [1 + alpha dT + beta dT^2],  dT = T - t_ref.
struct GratingSpec {
    double poling_period_um = 9.96;
    double alpha = 6.7e-6;   // 1/degC
    double beta = 11e-9;     // 1/degC^2
    double length_mm = 12.0;
    double t_ref_c = 25.0;
};

inline constexpr double kGratingTempMin = 0.0;
inline constexpr double kGratingTempMax = 100.0;

inline double poling_period(const GratingSpec& grating, double temperature_c) {
    if (!(temperature_c >= kGratingTempMin && temperature_c <= kGratingTempMax)) {
        throw DomainError("grating temperature " + std::to_string(temperature_c) +
                          " degC outside [0, 100] degC");
    }
    if (!(grating.poling_period_um > 0.0)) {
        throw DomainError("poling period must be positive");
    }
    const double dt = temperature_c - grating.t_ref_c;
    return grating.poling_period_um * (1.0 + grating.alpha * dt + grating.beta * dt * dt);
}

// 2 pi / period(T), rad/um.
inline double grating_wavenumber(const GratingSpec& grating, double temperature_c) {
    return units::kTwoPi / poling_period(grating, temperature_c);
}

enum class ProcessKind { Type0, Type2 };

constexpr std::string_view to_string(ProcessKind kind) {
    return kind == ProcessKind::Type0 ? "type0" : "type2";
}

struct ProcessAxes {
    Axis pump;
    Axis signal;
    Axis idler;
};

// Type-0: z -> z + z.  Type-II: y -> z + y (signal is the z-polarized photon).
constexpr ProcessAxes axes_for(ProcessKind kind) {
    return kind == ProcessKind::Type0 ? ProcessAxes{Axis::Z, Axis::Z, Axis::Z}
                                      : ProcessAxes{Axis::Y, Axis::Z, Axis::Y};
}

// One SPDC process in the waveguide. The QPM order is a positive odd integer;
// k_wg is the scalar waveguide contribution (rad/um, wavelength- and
// temperature-independent); d_eff (pm/V) only feeds brightness ratios.
class ProcessSpec {
public:
    ProcessSpec(ProcessKind kind, int qpm_order, double k_wg_rad_per_um, double d_eff_pm_per_v = 0.0)
        : kind_(kind), qpm_order_(qpm_order), k_wg_(k_wg_rad_per_um), d_eff_(d_eff_pm_per_v) {
        if (qpm_order < 1 || qpm_order % 2 == 0) {
            throw DomainError("QPM order must be a positive odd integer, got " +
                              std::to_string(qpm_order));
        }
    }

    ProcessKind kind() const { return kind_; }
    ProcessAxes axes() const { return axes_for(kind_); }
    int qpm_order() const { return qpm_order_; }
    double k_wg() const { return k_wg_; }
    double d_eff() const { return d_eff_; }

    ProcessSpec with_order(int order) const { return {kind_, order, k_wg_, d_eff_}; }
    ProcessSpec with_k_wg(double k_wg) const { return {kind_, qpm_order_, k_wg, d_eff_}; }

    friend bool operator==(const ProcessSpec&, const ProcessSpec&) = default;

private:
    ProcessKind kind_;
    int qpm_order_;
    double k_wg_;
    double d_eff_;
};

inline constexpr double kD33PmPerV = 18.5;
inline constexpr double kD24PmPerV = 3.92;

struct TuningPoint {
    double temperature_c = 0.0;
    double signal_nm = 0.0;
    double idler_nm = 0.0;
    double residual = 0.0;  // phase mismatch at the solution, rad/um
};

struct WavelengthInterval {
    double lo_nm = 0.0;
    double hi_nm = 0.0;
};

struct TemperatureInterval {
    double lo_c = 0.0;
    double hi_c = 0.0;
};

// Energy conservation: 1/idler = 1/pump - 1/signal.
inline double idler_from_energy(double pump_nm, double signal_nm) {
    if (!(pump_nm > 0.0) || !(signal_nm > pump_nm)) {
        std::ostringstream msg;
        msg << "non-physical wavelength pair: pump " << pump_nm << " nm, signal " << signal_nm
            << " nm (need 0 < pump < signal)";
        throw DomainError(msg.str());
    }
    return 1.0 / (1.0 / pump_nm - 1.0 / signal_nm);
}

// Delta k = k_p - k_s - k_i - m 2 pi / period(T) - k_wg  (rad/um).
// Zero means phase matched; the idler follows from energy conservation.
inline double phase_mismatch(const DispersionModel& disp, const GratingSpec& grating,
                             const ProcessSpec& proc, double pump_nm, double signal_nm,
                             double temperature_c) {
    const double idler_nm = idler_from_energy(pump_nm, signal_nm);
    const auto axes = proc.axes();
    const double kp = wavenumber(disp, axes.pump, units::nm_to_um(pump_nm), temperature_c);
    const double ks = wavenumber(disp, axes.signal, units::nm_to_um(signal_nm), temperature_c);
    const double ki = wavenumber(disp, axes.idler, units::nm_to_um(idler_nm), temperature_c);
    return kp - ks - ki - proc.qpm_order() * grating_wavenumber(grating, temperature_c) -
           proc.k_wg();
}

// Widest signal bracket whose idler partner stays inside the model window:
// from the signal at which the idler reaches the window edge up to degeneracy.
inline WavelengthInterval signal_search_range(const DispersionModel& disp, double pump_nm) {
    const double idler_max_nm = units::um_to_nm(disp.validity.max_um);
    const double degenerate_nm = 2.0 * pump_nm;
    if (!(idler_max_nm > degenerate_nm)) {
        throw DomainError("validity window does not reach the degenerate wavelength");
    }
    // Nudged inward so the idler at the lower edge stays strictly inside.
    const double lo = 1.0 / (1.0 / pump_nm - 1.0 / idler_max_nm) + 1e-6;
    return {lo, degenerate_nm};
}

inline constexpr double kSolverResidualTol = 1e-6;  // rad/um

// Finds the phase-matched signal wavelength inside `bracket` at fixed pump
// and temperature. The signal is the shorter-wavelength member of the pair,
// so the bracket is clipped at degeneracy (2 x pump). Returns nullopt when
// Delta k has no sign change on the clipped bracket.
inline std::optional<TuningPoint> solve_pair(const DispersionModel& disp,
                                             const GratingSpec& grating,
                                             const ProcessSpec& proc, double pump_nm,
                                             double temperature_c, WavelengthInterval bracket) {
    const double degenerate_nm = 2.0 * pump_nm;
    if (!(bracket.lo_nm < bracket.hi_nm)) {
        throw DomainError("signal bracket must satisfy lo < hi");
    }
    if (!(bracket.lo_nm > pump_nm) || bracket.lo_nm >= degenerate_nm) {
        throw DomainError("signal bracket must start between pump and 2 x pump");
    }
    const double hi = std::min(bracket.hi_nm, degenerate_nm);
    detail::require_in_window(disp, units::nm_to_um(pump_nm));
    detail::require_in_window(disp, units::nm_to_um(bracket.lo_nm));
    detail::require_in_window(disp, units::nm_to_um(idler_from_energy(pump_nm, bracket.lo_nm)));

    auto mismatch = [&](double signal_nm) {
        return phase_mismatch(disp, grating, proc, pump_nm, signal_nm, temperature_c);
    };
    RootOptions opt;
    opt.x_tolerance = 1e-3;  // nm
    opt.f_tolerance = 1e-12;
    const auto root = find_bracketed_root(mismatch, bracket.lo_nm, hi, opt);
    if (!root) return std::nullopt;

    TuningPoint point;
    point.temperature_c = temperature_c;
    point.signal_nm = root->x;
    point.idler_nm = idler_from_energy(pump_nm, root->x);
    point.residual = root->fx;
    if (!(std::abs(point.residual) < kSolverResidualTol)) {
        // Only reachable if Delta k is discontinuous inside the bracket.
        return std::nullopt;
    }
    return point;
}

inline std::optional<TuningPoint> solve_pair(const DispersionModel& disp,
                                             const GratingSpec& grating,
                                             const ProcessSpec& proc, double pump_nm,
                                             double temperature_c) {
    return solve_pair(disp, grating, proc, pump_nm, temperature_c,
                      signal_search_range(disp, pump_nm));
}

struct TuningSample {
    double temperature_c = 0.0;
    std::optional<TuningPoint> point;  // nullopt: no phase-matched pair at this temperature
};

struct TuningCurve {
    ProcessSpec process;
    double pump_nm = 0.0;
    std::vector<TuningSample> samples;

    std::size_t solved_count() const {
        std::size_t n = 0;
        for (const auto& s : samples) n += s.point.has_value();
        return n;
    }
};

// Temperatures t_lo, t_lo + step, ... up to t_hi (inclusive within 1e-9 step).
inline std::vector<double> temperature_grid(TemperatureInterval range, double step_c) {
    if (!(step_c > 0.0)) throw DomainError("temperature step must be positive");
    if (!(range.hi_c >= range.lo_c)) throw DomainError("temperature range must satisfy lo <= hi");
    const auto n = static_cast<std::size_t>(std::floor((range.hi_c - range.lo_c) / step_c + 1e-9)) + 1;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) grid[i] = range.lo_c + static_cast<double>(i) * step_c;
    return grid;
}

inline TuningCurve tuning_curve(const DispersionModel& disp, const GratingSpec& grating,
                                const ProcessSpec& proc, double pump_nm, TemperatureInterval range,
                                double step_c, std::optional<WavelengthInterval> bracket = {}) {
    const auto signal_bracket = bracket.value_or(signal_search_range(disp, pump_nm));
    TuningCurve curve{proc, pump_nm, {}};
    for (double t : temperature_grid(range, step_c)) {
        curve.samples.push_back({t, solve_pair(disp, grating, proc, pump_nm, t, signal_bracket)});
    }
    return curve;
}

namespace detail {

inline constexpr double kTemperatureScanStep = 0.25;  // degC

// Scan grid over the bracket that always ends exactly on hi.
inline std::vector<double> temperature_grid_inclusive(TemperatureInterval range) {
    if (!(range.hi_c > range.lo_c)) throw DomainError("temperature bracket must satisfy lo < hi");
    auto ts = temperature_grid(range, kTemperatureScanStep);
    if (ts.back() < range.hi_c) ts.push_back(range.hi_c);
    return ts;
}

// Scans `range` on a coarse grid and refines the first sign change of f.
template <typename F>
std::optional<Root> first_temperature_root(F&& f, TemperatureInterval range) {
    const auto ts = temperature_grid_inclusive(range);
    RootOptions opt;
    opt.x_tolerance = 1e-6;
    opt.f_tolerance = 1e-12;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        if (auto r = find_bracketed_root(f, ts[i], ts[i + 1], opt)) return r;
    }
    return std::nullopt;
}

}  // namespace detail

// Temperature at which the degenerate pair (signal = idler = 2 x pump) is
// phase matched, or nullopt if none inside the bracket.
inline std::optional<double> degeneracy_temperature(const DispersionModel& disp,
                                                    const GratingSpec& grating,
                                                    const ProcessSpec& proc, double pump_nm,
                                                    TemperatureInterval t_bracket) {
    const double degenerate_nm = 2.0 * pump_nm;
    auto mismatch = [&](double t) {
        return phase_mismatch(disp, grating, proc, pump_nm, degenerate_nm, t);
    };
    const auto root = detail::first_temperature_root(mismatch, t_bracket);
    if (!root || !(std::abs(root->fx) < kSolverResidualTol)) return std::nullopt;
    return root->x;
}

struct Intersection {
    double temperature_c = 0.0;
    TuningPoint point_a;
    TuningPoint point_b;
    bool all_temperatures = false;  // identical processes: every temperature intersects
};

inline constexpr double kIntersectionTolNm = 0.01;

// Temperature where the phase-matched signal wavelengths of two processes
// coincide. Identical processes intersect everywhere; the first solvable
// temperature of the bracket is returned with all_temperatures set.
inline std::optional<Intersection> find_intersection(const DispersionModel& disp,
                                                     const GratingSpec& grating,
                                                     const ProcessSpec& a, const ProcessSpec& b,
                                                     double pump_nm, TemperatureInterval t_bracket) {
    const auto bracket = signal_search_range(disp, pump_nm);
    auto solve = [&](const ProcessSpec& p, double t) {
        return solve_pair(disp, grating, p, pump_nm, t, bracket);
    };

    if (a == b) {
        for (double t : detail::temperature_grid_inclusive(t_bracket)) {
            if (auto pa = solve(a, t)) return Intersection{t, *pa, *pa, true};
        }
        return std::nullopt;
    }

    // Difference of signal wavelengths where both processes are solvable.
    auto gap = [&](double t) -> std::optional<double> {
        const auto pa = solve(a, t);
        const auto pb = solve(b, t);
        if (!pa || !pb) return std::nullopt;
        return pa->signal_nm - pb->signal_nm;
    };

    const auto ts = detail::temperature_grid_inclusive(t_bracket);
    std::optional<double> prev = gap(ts.front());
    for (std::size_t i = 1; i < ts.size(); ++i) {
        const std::optional<double> cur = gap(ts[i]);
        if (prev && cur && (*prev == 0.0 || std::signbit(*prev) != std::signbit(*cur))) {
            double lo = ts[i - 1];
            double hi = ts[i];
            double glo = *prev;
            bool refined = true;
            while (hi - lo > 1e-9) {
                const double mid = 0.5 * (lo + hi);
                const auto gmid = gap(mid);
                if (!gmid) {
                    refined = false;
                    break;
                }
                if (*gmid == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (std::signbit(*gmid) == std::signbit(glo)) {
                    lo = mid;
                    glo = *gmid;
                } else {
                    hi = mid;
                }
            }
            if (refined) {
                const double t = 0.5 * (lo + hi);
                const auto pa = solve(a, t);
                const auto pb = solve(b, t);
                if (pa && pb && std::abs(pa->signal_nm - pb->signal_nm) < kIntersectionTolNm) {
                    return Intersection{t, *pa, *pb, false};
                }
            }
        }
        prev = cur;
    }
    return std::nullopt;
}

}  // namespace qpmkit
