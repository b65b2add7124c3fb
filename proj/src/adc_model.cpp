#include "qrng/adc_model.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "qrng/error.hpp"

namespace qrng {

void AdcConfig::validate() const {
  if (n < 1 || n > 24) throw InvalidParameter("adc n must lie in [1, 24]");
  if (!(delta_u > 0.0)) throw InvalidParameter("adc delta_u must be > 0");
  if (!(bandwidth > 0.0)) throw InvalidParameter("adc bandwidth must be > 0");
  if (!(gain > 0.0)) throw InvalidParameter("adc gain must be > 0");
  if (!(sinad_db > 1.76)) throw InvalidParameter("adc sinad_db must be > 1.76");
}

void AdcConfig::calibrate(double mean_level, double nominal_width, double range_fill) {
  if (!(nominal_width > 0.0) || !(range_fill > 0.0))
    throw InvalidParameter("calibrate: width and range_fill must be > 0");
  gain = range_fill * delta_u / nominal_width;
  offset = 0.5 * delta_u - gain * mean_level;
}

Biquad::Biquad(double b0, double b1, double b2, double a1, double a2, double dt)
    : b0_(b0), b1_(b1), b2_(b2), a1_(a1), a2_(a2), dt_(dt) {}

bool Biquad::stable() const noexcept {
  // Roots of z^2 + a1 z + a2.
  const std::complex<double> disc = std::sqrt(std::complex<double>(a1_ * a1_ - 4.0 * a2_));
  const auto r1 = (-a1_ + disc) / 2.0;
  const auto r2 = (-a1_ - disc) / 2.0;
  return std::abs(r1) < 1.0 && std::abs(r2) < 1.0;
}

Biquad design_butterworth2(double bandwidth, double dt) {
  if (!(dt > 0.0)) throw InvalidParameter("design_butterworth2: dt must be > 0");
  if (!(bandwidth > 0.0) || bandwidth >= 0.5 / dt)
    throw InvalidParameter("design_butterworth2: bandwidth must lie in (0, Nyquist)");
  const double k = std::tan(std::numbers::pi * bandwidth * dt);
  const double k2 = k * k;
  const double norm = 1.0 / (1.0 + std::numbers::sqrt2 * k + k2);
  const double b0 = k2 * norm;
  return Biquad(b0, 2.0 * b0, b0, 2.0 * (k2 - 1.0) * norm,
                (1.0 - std::numbers::sqrt2 * k + k2) * norm, dt);
}

Waveform filter_waveform(const Waveform& w, const Biquad& filter) {
  if (std::abs(filter.dt() - w.dt) > 1e-9 * w.dt)
    throw InvalidParameter("filter_waveform: filter designed for a different dt");
  Biquad f = filter;
  f.reset();
  Waveform out{w.t0, w.dt, std::vector<double>(w.size())};
  for (std::size_t i = 0; i < w.size(); ++i) out.samples[i] = f.process(w.samples[i]);
  return out;
}

double sample_at(const Waveform& w, double t_s) {
  if (w.samples.empty()) throw InvalidParameter("sample_at: empty waveform");
  const double pos = (t_s - w.t0) / w.dt;
  const double last = static_cast<double>(w.size() - 1);
  if (pos < -1e-9 || pos > last + 1e-9) throw InvalidParameter("sample_at: t_s outside waveform span");
  if (pos <= 0.0) return w.samples.front();
  if (pos >= last) return w.samples.back();
  const double nearest = std::round(pos);
  if (std::abs(pos - nearest) < 1e-9) return w.samples[static_cast<std::size_t>(nearest)];
  const auto i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  return w.samples[i] + frac * (w.samples[i + 1] - w.samples[i]);
}

std::uint32_t quantize(double v, const AdcConfig& cfg) {
  const std::uint32_t k = cfg.bins();
  if (!(v > 0.0)) return 0;  // also catches NaN
  const double pos = std::floor(v / cfg.delta_u * static_cast<double>(k));
  if (pos >= static_cast<double>(k - 1)) return k - 1;
  return static_cast<std::uint32_t>(pos);
}

double enob(double sinad_db) {
  if (!(sinad_db > 1.76)) throw InvalidParameter("enob: SINAD must exceed 1.76 dB");
  return (sinad_db - 1.76) / 6.02;
}

double sinad_from_enob(double enob_bits) {
  if (!(enob_bits > 0.0)) throw InvalidParameter("sinad_from_enob: ENOB must be > 0");
  return enob_bits * 6.02 + 1.76;
}

}  // namespace qrng
