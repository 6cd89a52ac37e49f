#pragma once

#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>

#include "qpmkit/errors.hpp"
#include "qpmkit/units.hpp"

namespace qpmkit {

// Crystallographic polarization axis. The x axis never enters the
// phase-matching conditions handled here.
enum class Axis { Y, Z };

constexpr std::string_view to_string(Axis axis) { return axis == Axis::Y ? "y" : "z"; }

// n^2 = A + B / (1 - C / lambda^2) + D * lambda^2, lambda in micrometres.
// D is stored with its sign (negative for KTP).
struct SellmeierCoefficients {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
};

// First- and second-order thermo-optic terms, each a cubic in 1/lambda:
//   n1(lambda) = sum_m first[m] / lambda^m    (per degC)
//   n2(lambda) = sum_m second[m] / lambda^m   (per degC^2)
struct ThermoOpticCoefficients {
    std::array<double, 4> first{};
    std::array<double, 4> second{};
};

struct AxisDispersion {
    SellmeierCoefficients sellmeier;
    ThermoOpticCoefficients thermo_optic;
};

struct WavelengthWindow {
    double min_um = 0.40;
    double max_um = 1.10;

    constexpr bool contains(double wavelength_um) const {
        return wavelength_um >= min_um && wavelength_um <= max_um;
    }
};

// Bulk refractive index model for the y and z axes of a biaxial crystal.
// Immutable after construction; every query is a pure function of its inputs.
struct DispersionModel {
    std::string name;
    AxisDispersion y;
    AxisDispersion z;
    double t_ref_c = 25.0;
    WavelengthWindow validity;

    const AxisDispersion& axis(Axis a) const { return a == Axis::Y ? y : z; }
};

namespace detail {

inline void require_in_window(const DispersionModel& model, double wavelength_um) {
    if (!std::isfinite(wavelength_um) || !model.validity.contains(wavelength_um)) {
        std::ostringstream msg;
        msg << "wavelength " << wavelength_um << " um outside validity window ["
            << model.validity.min_um << ", " << model.validity.max_um << "] um of model '"
            << model.name << "'";
        throw DomainError(msg.str());
    }
}

inline double inverse_power_series(const std::array<double, 4>& coeffs, double wavelength_um) {
    const double inv = 1.0 / wavelength_um;
    // Horner in 1/lambda
    return coeffs[0] + inv * (coeffs[1] + inv * (coeffs[2] + inv * coeffs[3]));
}

}  // namespace detail

// Fan et al. (1987) Sellmeier fit for flux-grown KTP with the Emanueli & Arie
// (2003) thermo-optic coefficients. Reference temperature 25 degC.
inline DispersionModel ktp_default() {
    DispersionModel model;
    model.name = "ktp-default";
    model.y.sellmeier = {2.19229, 0.83547, 0.04970, -0.01621};
    model.z.sellmeier = {2.25411, 1.06543, 0.05486, -0.02140};
    model.y.thermo_optic.first = {6.2897e-6, 6.3061e-6, -6.0629e-6, 2.6486e-6};
    model.y.thermo_optic.second = {-0.14445e-8, 2.2244e-8, -3.5770e-8, 1.3470e-8};
    model.z.thermo_optic.first = {9.9587e-6, 9.9228e-6, -8.9603e-6, 4.1010e-6};
    model.z.thermo_optic.second = {-1.1882e-8, 10.459e-8, -9.8136e-8, 3.1481e-8};
    model.t_ref_c = 25.0;
    model.validity = {0.40, 1.10};
    return model;
}

// Room-temperature index from the Sellmeier equation.
inline double sellmeier_index(const DispersionModel& model, Axis axis, double wavelength_um) {
    detail::require_in_window(model, wavelength_um);
    const auto& s = model.axis(axis).sellmeier;
    const double lambda_sq = wavelength_um * wavelength_um;
    const double denom = 1.0 - s.c / lambda_sq;
    if (denom <= 0.0) {
        throw ModelError("Sellmeier pole inside validity window of model '" + model.name + "'");
    }
    const double radicand = s.a + s.b / denom + s.d * lambda_sq;
    if (!(radicand > 0.0)) {
        throw ModelError("non-positive Sellmeier radicand for model '" + model.name + "'");
    }
    return std::sqrt(radicand);
}

// Index offset relative to t_ref:  n1(lambda) dT + n2(lambda) dT^2.
//
// NOTE: the quadratic term is deliberate. A linear-only reading of the
// second term collapses the correction to a single coefficient and does not
// match the published thermo-optic fit.
inline double temperature_correction(const DispersionModel& model, Axis axis, double wavelength_um,
                                     double temperature_c) {
    detail::require_in_window(model, wavelength_um);
    const auto& t = model.axis(axis).thermo_optic;
    const double dt = temperature_c - model.t_ref_c;
    const double n1 = detail::inverse_power_series(t.first, wavelength_um);
    const double n2 = detail::inverse_power_series(t.second, wavelength_um);
    return n1 * dt + n2 * dt * dt;
}

inline double refractive_index(const DispersionModel& model, Axis axis, double wavelength_um,
                               double temperature_c) {
    return sellmeier_index(model, axis, wavelength_um) +
           temperature_correction(model, axis, wavelength_um, temperature_c);
}

// Propagation constant 2 pi n / lambda in rad/um.
inline double wavenumber(const DispersionModel& model, Axis axis, double wavelength_um,
                         double temperature_c) {
    return units::kTwoPi * refractive_index(model, axis, wavelength_um, temperature_c) /
           wavelength_um;
}

}  // namespace qpmkit
