#pragma once

#include "qpmkit/pairstats.hpp"
#include "qpmkit/phasematch.hpp"
#include "qpmkit/qpm_inference.hpp"

// Parameters of the 9.96 um PPRKTP waveguide measurement: grating, pump,
// the type-0/type-II spectral crossing at 66 degC and the loss budget of the
// coincidence setup.

namespace qpmkit::presets {

inline constexpr double kPumpNm = 405.0;
inline constexpr double kFittedKwg = -0.056;  // rad/um
inline constexpr double kCoincidenceWindowS = 2e-9;

inline GratingSpec rktp_grating() { return GratingSpec{9.96, 6.7e-6, 11e-9, 12.0, 25.0}; }

inline IntersectionObservation crossing_66c() { return {66.0, kPumpNm, 762.71, 863.45}; }

inline ProcessSpec type0_third_order() {
    return ProcessSpec(ProcessKind::Type0, 3, kFittedKwg, kD33PmPerV);
}

inline ProcessSpec type2_first_order() {
    return ProcessSpec(ProcessKind::Type2, 1, kFittedKwg, kD24PmPerV);
}

inline LossBudget coincidence_setup_budget() { return LossBudget{0.35, 0.30, 0.65, 0.98, 2}; }

// Measured coincidence slopes, MHz/mW.
inline constexpr double kType0SlopeMhzPerMw = 5.417;
inline constexpr double kType2SlopeMhzPerMw = 1.195;

}  // namespace qpmkit::presets
