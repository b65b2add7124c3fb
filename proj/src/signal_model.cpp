#include "qrng/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qrng/error.hpp"

namespace qrng {
namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidParameter(msg);
}

// Positive Gaussian draw: resample until the value is > 0.
double truncated_positive_normal(RandomStream& rng, double mean, double stddev) {
  if (stddev == 0.0) return mean;
  for (;;) {
    const double x = rng.normal(mean, stddev);
    if (x > 0.0) return x;
  }
}

}  // namespace

void PulseShape::validate() const {
  require(width > 0.0, "pulse width must be > 0");
  require(peak_power > 0.0, "pulse peak_power must be > 0");
  if (kind == PulseKind::flat_top) require(edge_width > 0.0, "flat_top edge_width must be > 0");
}

double PulseShape::envelope(double t) const {
  if (kind == PulseKind::gaussian) return std::exp(-t * t / (2.0 * width * width));
  if (t < 0.0) return std::exp(-t * t / (2.0 * edge_width * edge_width));
  if (t <= width) return 1.0;
  const double u = t - width;
  return std::exp(-u * u / (2.0 * edge_width * edge_width));
}

double PulseShape::chirp_phase(double t, double alpha) const {
  if (kind == PulseKind::gaussian) return alpha * t * t / (4.0 * width * width);
  if (t >= 0.0) return 0.0;
  return alpha * t * t / (4.0 * edge_width * edge_width);
}

double PulseShape::resolution_scale() const {
  return kind == PulseKind::gaussian ? width : std::min(width, edge_width);
}

double PulseShape::reference_time(double period) const {
  return kind == PulseKind::gaussian ? 0.5 * period : 4.0 * edge_width;
}

void LaserParams::validate() const {
  require(alpha >= 0.0, "alpha must be >= 0");
  require(repetition_period > 0.0, "repetition_period must be > 0");
  require(sigma_s1 >= 0.0 && sigma_s1 <= 0.5, "sigma_s1 must lie in [0, 0.5]");
  require(sigma_s2 >= 0.0 && sigma_s2 <= 0.5, "sigma_s2 must lie in [0, 0.5]");
  require(mean_s1 > 0.0, "mean_s1 must be > 0");
  require(mean_s2 > 0.0, "mean_s2 must be > 0");
}

void NoiseParams::validate() const {
  require(sigma_jitter >= 0.0, "sigma_jitter must be >= 0");
  require(sigma_zeta >= 0.0, "sigma_zeta must be >= 0");
}

double PhaseModel::sample(RandomStream& rng) const {
  return 2.0 * std::numbers::pi * rng.uniform();
}

void PulseInterferenceConfig::validate() const {
  pulse.validate();
  laser.validate();
  noise.validate();
}

double visibility_kappa(double delta, double alpha, double w) {
  require(w > 0.0, "visibility_kappa: w must be > 0");
  return std::exp(-(1.0 + alpha * alpha) * delta * delta / (8.0 * w * w));
}

double integral_signal(double s1, double s2, double kappa, double delta_phi) {
  require(s1 >= 0.0 && s2 >= 0.0, "integral_signal: powers must be non-negative");
  require(kappa >= 0.0 && kappa <= 1.0, "integral_signal: kappa must lie in [0, 1]");
  return s1 + s2 + 2.0 * kappa * std::sqrt(s1 * s2) * std::cos(delta_phi);
}

InterferenceEvent draw_event(RandomStream& rng, const PulseInterferenceConfig& config) {
  const auto& laser = config.laser;
  InterferenceEvent ev;
  ev.delta_phi = config.phase.sample(rng);
  ev.s1 = truncated_positive_normal(rng, laser.mean_s1, laser.sigma_s1 * laser.mean_s1);
  ev.s2 = truncated_positive_normal(rng, laser.mean_s2, laser.sigma_s2 * laser.mean_s2);
  ev.delta = rng.normal(0.0, config.noise.sigma_jitter);
  ev.zeta = rng.normal(0.0, config.noise.sigma_zeta * config.mean_level());
  const double kappa = visibility_kappa(ev.delta, laser.alpha, config.pulse.width);
  ev.integral_signal = integral_signal(ev.s1, ev.s2, kappa, ev.delta_phi) + ev.zeta;
  return ev;
}

Waveform interference_waveform(const PulseInterferenceConfig& config, double delta_phi,
                               double delta, const TimeGrid& grid) {
  return interference_waveform(config, delta_phi, delta, grid, config.laser.mean_s1,
                               config.laser.mean_s2);
}

Waveform interference_waveform(const PulseInterferenceConfig& config, double delta_phi,
                               double delta, const TimeGrid& grid, double s1, double s2) {
  const auto& pulse = config.pulse;
  const auto& laser = config.laser;
  require(grid.dt > 0.0 && grid.count > 0, "interference_waveform: empty grid");
  require(grid.span() >= laser.repetition_period * (1.0 - 1e-9),
          "interference_waveform: grid must span one repetition period");
  require(grid.dt <= pulse.resolution_scale() / 10.0 * (1.0 + 1e-9),
          "interference_waveform: grid too coarse to resolve the pulse");
  require(s1 >= 0.0 && s2 >= 0.0, "interference_waveform: powers must be non-negative");

  Waveform out{grid.t0, grid.dt, std::vector<double>(grid.count)};
  detail::fill_interference(config, delta_phi, delta, grid.t0, grid.dt, s1, s2, out.samples);
  return out;
}

void detail::fill_interference(const PulseInterferenceConfig& config, double delta_phi, double delta,
                               double t0, double dt, double s1, double s2, std::span<double> out) {
  const auto& pulse = config.pulse;
  const auto& laser = config.laser;
  const double a1 = pulse.peak_power * s1 / laser.mean_s1;
  const double a2 = pulse.peak_power * s2 / laser.mean_s2;
  const double t_ref = pulse.reference_time(laser.repetition_period);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double t = t0 + dt * static_cast<double>(i) - t_ref;
    const double p1 = a1 * pulse.envelope(t);
    const double p2 = a2 * pulse.envelope(t - delta);
    const double chirp = pulse.chirp_phase(t, laser.alpha) - pulse.chirp_phase(t - delta, laser.alpha);
    out[i] = p1 + p2 + 2.0 * std::sqrt(p1 * p2) * std::cos(delta_phi + chirp);
  }
}

Waveform mean_level_waveform(const PulseInterferenceConfig& config, const TimeGrid& grid) {
  const double t_ref = config.pulse.reference_time(config.laser.repetition_period);
  Waveform out{grid.t0, grid.dt, std::vector<double>(grid.count)};
  for (std::size_t i = 0; i < grid.count; ++i)
    out.samples[i] = 2.0 * config.pulse.peak_power * config.pulse.envelope(out.time(i) - t_ref);
  return out;
}

TimeGrid default_grid(const PulseInterferenceConfig& config, double max_dt) {
  const double period = config.laser.repetition_period;
  double dt = config.pulse.resolution_scale() / 10.0;
  if (max_dt > 0.0) dt = std::min(dt, max_dt);
  const auto count = static_cast<std::size_t>(std::ceil(period / dt - 1e-9));
  return TimeGrid{0.0, period / static_cast<double>(count), count};
}

}  // namespace qrng
