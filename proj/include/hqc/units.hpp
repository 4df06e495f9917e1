#pragma once

// Canonical units: time in microseconds, angular frequency in rad/us,
// lengths in micrometres. Cyclic frequencies (MHz etc.) carry no 2pi.

namespace hqc::units {

inline constexpr double two_pi = 6.28318530717958647692;
inline constexpr double speed_of_light = 2.99792458e8;  ///< um/us

// Cyclic frequency -> angular frequency in rad/us.
inline constexpr double hz(double f) { return two_pi * f * 1e-6; }
inline constexpr double khz(double f) { return two_pi * f * 1e-3; }
inline constexpr double mhz(double f) { return two_pi * f; }
inline constexpr double ghz(double f) { return two_pi * f * 1e3; }
inline constexpr double thz(double f) { return two_pi * f * 1e6; }

// Angular frequency in rad/us -> cyclic MHz.
inline constexpr double to_mhz(double w) { return w / two_pi; }

}  // namespace hqc::units
