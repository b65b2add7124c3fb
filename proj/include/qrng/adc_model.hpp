#pragma once

#include <cstdint>

#include "qrng/signal_model.hpp"

namespace qrng {

/// Fraction of the ADC input range covered by the nominal interference swing
/// S_max - S_min after calibration (the ratio r = w / delta_u).
inline constexpr double kDefaultRangeFill = 0.8;

struct AdcConfig {
  int n = 10;                // bit depth
  double delta_u = 1.0;      // V, input range [0, delta_u)
  double bandwidth = 20e9;   // Hz, analog -3 dB bandwidth
  double sample_time = -1.0; // s on the waveform grid; < 0 selects the filtered pulse maximum
  double gain = 0.25;        // V per intensity unit
  double offset = 0.0;       // V at zero intensity
  double sinad_db = 38.0;

  void validate() const;

  std::uint32_t bins() const { return std::uint32_t{1} << n; }
  double bin_width() const { return delta_u / static_cast<double>(bins()); }
  double to_volts(double intensity) const { return offset + gain * intensity; }

  /// Choose gain and offset so that `mean_level` maps to delta_u / 2 and a
  /// swing of `nominal_width` intensity units covers `range_fill * delta_u`.
  void calibrate(double mean_level, double nominal_width, double range_fill = kDefaultRangeFill);
};

/// Second-order IIR section in direct form I:
///   y[k] = b0 x[k] + b1 x[k-1] + b2 x[k-2] - a1 y[k-1] - a2 y[k-2].
class Biquad {
 public:
  Biquad(double b0, double b1, double b2, double a1, double a2, double dt);

  double process(double x) noexcept {
    const double y = b0_ * x + b1_ * x1_ + b2_ * x2_ - a1_ * y1_ - a2_ * y2_;
    x2_ = x1_;
    x1_ = x;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

  void reset() noexcept { x1_ = x2_ = y1_ = y2_ = 0.0; }

  /// Both poles strictly inside the unit circle.
  bool stable() const noexcept;

  double dt() const noexcept { return dt_; }
  double b0() const noexcept { return b0_; }
  double b1() const noexcept { return b1_; }
  double b2() const noexcept { return b2_; }
  double a1() const noexcept { return a1_; }
  double a2() const noexcept { return a2_; }

 private:
  double b0_, b1_, b2_, a1_, a2_;
  double dt_;
  double x1_ = 0.0, x2_ = 0.0, y1_ = 0.0, y2_ = 0.0;
};

/// Butterworth low-pass, bilinear transform pre-warped at `bandwidth`.
Biquad design_butterworth2(double bandwidth, double dt);

/// Causal filtering from zero state; the filter's own state is left untouched.
Waveform filter_waveform(const Waveform& w, const Biquad& filter);

/// Linear interpolation of the waveform at `t_s`.
double sample_at(const Waveform& w, double t_s);

/// Saturating uniform quantizer over [0, delta_u) with 2^n bins.
std::uint32_t quantize(double v, const AdcConfig& cfg);

double enob(double sinad_db);
double sinad_from_enob(double enob_bits);

inline constexpr const char* kFilterDiscretization =
    "butterworth2 bilinear transform, pre-warped at cutoff";

}  // namespace qrng
