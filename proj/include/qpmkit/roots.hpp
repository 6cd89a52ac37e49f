#pragma once

#include <cmath>
#include <optional>

namespace qpmkit {

struct RootOptions {
    double x_tolerance = 1e-6;   // bisection stops once the bracket is this narrow
    double f_tolerance = 1e-12;  // secant polish target on |f|
    int max_secant_steps = 50;
};

struct Root {
    double x = 0.0;
    double fx = 0.0;
};

// Bracketed root of a continuous scalar function: bisection down to
// x_tolerance, then secant steps confined to the final bracket.
// Returns nullopt when f(lo) and f(hi) share a sign.
template <typename F>
std::optional<Root> find_bracketed_root(F&& f, double lo, double hi, const RootOptions& opt = {}) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return Root{lo, flo};
    if (fhi == 0.0) return Root{hi, fhi};
    if (std::signbit(flo) == std::signbit(fhi)) return std::nullopt;

    while (hi - lo > opt.x_tolerance) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if (fmid == 0.0) return Root{mid, fmid};
        if (std::signbit(fmid) == std::signbit(flo)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
    }

    Root best = std::abs(flo) < std::abs(fhi) ? Root{lo, flo} : Root{hi, fhi};
    for (int i = 0; i < opt.max_secant_steps && std::abs(best.fx) > opt.f_tolerance; ++i) {
        if (fhi == flo) break;
        double x = hi - fhi * (hi - lo) / (fhi - flo);
        if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
        const double fx = f(x);
        if (std::abs(fx) < std::abs(best.fx)) best = {x, fx};
        if (fx == 0.0) break;
        if (std::signbit(fx) == std::signbit(flo)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    return best;
}

}  // namespace qpmkit
