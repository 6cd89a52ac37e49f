#pragma once

#include <numbers>

namespace qpmkit::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

constexpr double nm_to_um(double nm) { return nm * 1e-3; }
constexpr double um_to_nm(double um) { return um * 1e3; }

constexpr double mhz_to_hz(double mhz) { return mhz * 1e6; }
constexpr double hz_to_mhz(double hz) { return hz * 1e-6; }

constexpr double ns_to_s(double ns) { return ns * 1e-9; }
constexpr double ps_to_s(double ps) { return ps * 1e-12; }

}  // namespace qpmkit::units
