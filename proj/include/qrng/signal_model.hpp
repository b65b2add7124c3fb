#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qrng/random.hpp"

namespace qrng {

enum class PulseKind { gaussian, flat_top };

/// Intensity envelope of one laser pulse.
///
/// Gaussian pulses have intensity exp(-t^2 / (2 w^2)) around their centre, so
/// `width` is the rms width of the intensity profile; with this convention the
/// integrated two-pulse visibility is exactly exp(-(1 + alpha^2) delta^2 / (8 w^2)).
/// Flat-top pulses are a plateau of duration `width` starting at the reference
/// time, with Gaussian rise and fall edges of rms width `edge_width`.
struct PulseShape {
  PulseKind kind = PulseKind::gaussian;
  double width = 25e-12;       // s
  double edge_width = 30e-12;  // s, flat_top only
  double peak_power = 1.0;

  void validate() const;

  /// Normalized envelope (maximum 1) at time `t` relative to the reference time.
  double envelope(double t) const;

  /// Chirp phase accumulated by the pulse at time `t` relative to the reference
  /// time. Linear chirp over the whole Gaussian pulse; flat-top pulses are only
  /// chirped on the rising edge.
  double chirp_phase(double t, double alpha) const;

  /// Shortest time scale the simulation grid must resolve.
  double resolution_scale() const;

  /// Position of the reference time (Gaussian centre, or flat-top plateau start)
  /// inside a repetition period.
  double reference_time(double period) const;
};

struct LaserParams {
  double alpha = 4.0;                   // linewidth enhancement (Henry) factor
  double repetition_period = 400e-12;  // s
  double sigma_s1 = 0.01;               // relative std of s1
  double sigma_s2 = 0.01;
  double mean_s1 = 1.0;
  double mean_s2 = 1.0;

  void validate() const;
};

struct NoiseParams {
  double sigma_jitter = 0.0;  // s, std of the overlap error delta
  double sigma_zeta = 0.0;    // photodetector noise std relative to mean_s1 + mean_s2

  void validate() const;
};

enum class PhaseKind { uniform };

struct PhaseModel {
  PhaseKind kind = PhaseKind::uniform;

  /// Draw a phase difference in [0, 2 pi).
  double sample(RandomStream& rng) const;
};

struct PulseInterferenceConfig {
  PulseShape pulse;
  LaserParams laser;
  NoiseParams noise;
  PhaseModel phase;

  void validate() const;

  /// Phase-averaged interference level mean_s1 + mean_s2.
  double mean_level() const { return laser.mean_s1 + laser.mean_s2; }
};

/// One Monte-Carlo draw of the random variables behind the interference signal.
struct InterferenceEvent {
  double delta_phi = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double delta = 0.0;
  double zeta = 0.0;
  double integral_signal = 0.0;  // includes zeta
};

struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t count = 0;

  double span() const { return dt * static_cast<double>(count); }
};

/// Uniformly sampled intensity trace.
struct Waveform {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> samples;

  std::size_t size() const { return samples.size(); }
  double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  double end_time() const { return samples.empty() ? t0 : time(samples.size() - 1); }
};

double visibility_kappa(double delta, double alpha, double w);

double integral_signal(double s1, double s2, double kappa, double delta_phi);

InterferenceEvent draw_event(RandomStream& rng, const PulseInterferenceConfig& config);

/// Intensity of two interfering pulses: the second delayed by `delta`, carrying
/// power scales s1, s2 (defaulting to the configured means).
Waveform interference_waveform(const PulseInterferenceConfig& config, double delta_phi,
                               double delta, const TimeGrid& grid);
Waveform interference_waveform(const PulseInterferenceConfig& config, double delta_phi,
                               double delta, const TimeGrid& grid, double s1, double s2);

namespace detail {
/// Unchecked kernel of interference_waveform: fills out.size() grid points.
void fill_interference(const PulseInterferenceConfig& config, double delta_phi, double delta,
                       double t0, double dt, double s1, double s2, std::span<double> out);
}  // namespace detail

/// Phase-averaged intensity p1(t) + p2(t) at the configured mean powers; the
/// reference used to calibrate the sampled signal.
Waveform mean_level_waveform(const PulseInterferenceConfig& config, const TimeGrid& grid);

/// Grid covering one repetition period with the step the pulse needs
/// (resolution_scale / 10, or finer if `max_dt` is smaller).
TimeGrid default_grid(const PulseInterferenceConfig& config, double max_dt);

}  // namespace qrng
