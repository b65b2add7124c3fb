#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qrng/adc_model.hpp"
#include "qrng/entropy_reduction.hpp"
#include "qrng/pdf_estimation.hpp"
#include "qrng/signal_model.hpp"

namespace qrng {

enum class SignalPath {
  integral,  // closed-form integral signal per event
  waveform,  // time-domain pulse pair -> Butterworth filter -> single-point sample
};

struct McOptions {
  /// Draw events in pairs sharing powers and jitter with phases dphi and
  /// dphi + pi. Each event keeps its exact marginal law; pairs are not
  /// independent, so raw samples meant for extraction should disable this.
  bool antithetic = true;
  unsigned threads = 0;  // 0 selects hardware concurrency
  std::size_t chunk = 16384;  // events per substream
};

/// Analog interference values in intensity units, photodetector noise included.
///
/// For the waveform path each sample is normalized by the filtered
/// phase-averaged reference at the sampling instant and scaled by
/// mean_s1 + mean_s2, so a noiseless, jitter-free sample equals the integral
/// signal. Chunk k of the batch uses substream k of `seed`.
std::vector<double> simulate_signal(const PulseInterferenceConfig& config, const AdcConfig& adc,
                                    SignalPath path, std::size_t count, std::uint64_t seed,
                                    const McOptions& options = {});

/// Sampling instant actually used by the waveform path: adc.sample_time when it
/// is non-negative, otherwise the maximum of the filtered reference.
double effective_sample_time(const PulseInterferenceConfig& config, const AdcConfig& adc);

/// Ideal support at the mean powers with kappa = 1.
QuantumPdfParams nominal_support(const PulseInterferenceConfig& config);

/// Copy of `adc` with gain and offset calibrated to the nominal support.
AdcConfig calibrated_adc(const AdcConfig& adc, const PulseInterferenceConfig& config,
                         double range_fill = kDefaultRangeFill);

std::vector<std::uint32_t> digitize(std::span<const double> values, const AdcConfig& adc);

/// Everything derived from one simulated batch.
struct SimulationAnalysis {
  EmpiricalPdf adc_histogram;       // 2^n ADC codes, volts
  EmpiricalPdf analysis_histogram;  // unsaturated fine grid aligned at S_min, intensity units
  ReductionReport report;
  std::optional<BStatistic> b;
};

/// Reduction report in simulation mode: S_min and the support width come from
/// the model parameters; first-bin and half-support masses are read from an
/// unsaturated histogram whose bin edges fall on S_min + k * (ADC bin) / 16.
SimulationAnalysis analyze_simulation(std::span<const double> values,
                                      const PulseInterferenceConfig& config, const AdcConfig& adc,
                                      const BOptions& b_options = {});

/// One point of the semi-analytic noise sweep.
struct TheoryPoint {
  int n_bits;
  double sigma_zeta;
  double h_inf;
  double h_inf_q;
  double h_inf_comparator;
  Reduction gamma_strict = Reduction::untrusted();
  Reduction gamma_relaxed = Reduction::untrusted();
  double gamma_nq;
  Reduction gamma_comparator = Reduction::untrusted();
  Reduction gamma_nq_gamma = Reduction::untrusted();
};

/// Deterministic reduction factors for the noisy-arcsine model: powers
/// N(1, sigma_s) each, kappa = 1, noise sigma_zeta relative to the mean level.
TheoryPoint theory_point(int n, double sigma_s, double sigma_zeta,
                         double range_fill = kDefaultRangeFill);

/// Smallest relative photodetector noise at which the strict ADC factor
/// (1 + H_q - H denominator) diverges, by bisection on the semi-analytic model.
double strict_divergence_threshold(int n, double sigma_s, double range_fill = kDefaultRangeFill,
                                   double lo = 1e-5, double hi = 0.05);

struct CurveSettings {
  std::size_t mc_samples = 1'000'000;
  std::uint64_t seed = 1;
  double range_fill = kDefaultRangeFill;
  double sinad_db = 38.0;
  BOptions b_options;
};

/// B -> gamma_nq * Gamma table from Monte-Carlo sweeps (one substream family
/// shared by all grid points).
BGammaCurve b_to_gamma_curve(int n, double sigma_s, std::span<const double> sigma_zeta_grid,
                             const CurveSettings& settings = {});

}  // namespace qrng
