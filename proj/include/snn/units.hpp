#pragma once

// All engine quantities are carried in SI units as double. These factors
// convert from the units the model is usually written in.
namespace snn::units {

inline constexpr double kPico = 1e-12;
inline constexpr double kNano = 1e-9;
inline constexpr double kMilli = 1e-3;
inline constexpr double kMicro = 1e-6;

inline constexpr double pA(double v) { return v * kPico; }
inline constexpr double pF(double v) { return v * kPico; }
inline constexpr double nS(double v) { return v * kNano; }
inline constexpr double mV(double v) { return v * kMilli; }
inline constexpr double ms(double v) { return v * kMilli; }
inline constexpr double us(double v) { return v * kMicro; }

inline constexpr double to_pA(double amps) { return amps / kPico; }
inline constexpr double to_ms(double seconds) { return seconds / kMilli; }

}  // namespace snn::units
