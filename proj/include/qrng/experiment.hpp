#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrng/extractors.hpp"
#include "qrng/sample_io.hpp"
#include "qrng/simulation.hpp"

namespace qrng {

enum class Scenario { fig2, fig3, fig4, fig5, fig6, custom };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

/// Complete description of a batch run. Serializes to nested JSON; the JSON
/// echoed into every manifest parses back to an equal config.
struct ExperimentConfig {
  Scenario scenario = Scenario::custom;
  SignalPath signal_path = SignalPath::integral;
  PulseInterferenceConfig physics;
  AdcConfig adc;  // gain and offset are derived from range_fill at run time
  double range_fill = kDefaultRangeFill;
  BOptions b_options;
  std::size_t block_len = 4096;
  std::size_t mc_samples = 1'000'000;
  std::uint64_t rng_seed = 1;
  bool antithetic = true;

  // Sweep axes used by `figures` and `curve`.
  std::vector<double> bandwidths{20e9, 2.5e9, 1e9};
  std::vector<double> jitters{0.0, 10e-12};
  std::vector<int> bit_depths{8, 10, 12};
  std::vector<double> sigma_zeta_grid;

  std::string output_dir = "out";
  bool write_samples = false;
  std::string samples_format = "bin";  // "bin" or "csv"

  /// Throws InvalidParameter naming the offending field.
  void validate() const;

  bool operator==(const ExperimentConfig&) const;
};

/// Preset parameters of each scenario.
ExperimentConfig preset(Scenario s);

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Starts from the preset named by "scenario" (default custom) and applies the
/// given fields. Unknown keys and bad types are reported with their path.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Default photodetector-noise sweep: 10 points from 0 to 5 % of the mean level.
std::vector<double> default_sigma_zeta_grid();

struct SimulateOutput {
  AdcConfig adc;  // calibrated
  double sample_time = 0.0;  // waveform path only
  std::vector<double> values;
  std::vector<std::uint32_t> codes;
  SimulationAnalysis analysis;
};

/// One Monte-Carlo batch with the configured physics and ADC. When `out_dir`
/// is given, writes histogram.csv, report.txt, report.csv, manifest.json and,
/// if requested, the quantized samples.
SimulateOutput run_simulate(const ExperimentConfig& cfg,
                            const std::optional<std::filesystem::path>& out_dir = std::nullopt);

struct AnalyzeSettings {
  int n = 10;
  double delta_u = 1.0;
  double sinad_db = 38.0;
  BOptions b_options;
};

/// Ingestion-mode report: B from the sample histogram, gamma_nq * Gamma from the
/// curve, Gamma_ADC = curve(B) * gamma_enob. Throws OutOfModel when B is not
/// covered by the curve or the histogram is unimodal.
ReductionReport run_analyze(const SampleSet& samples, const AnalyzeSettings& settings,
                            const BGammaCurve& curve);

/// Converts samples to bits, runs the extraction pipeline and, when `out` is
/// given, writes the packed bits plus `<out>.meta`. Nothing is written when the
/// report marks the source untrusted.
ExtractionResult run_extract(const SampleSet& samples, const ReductionReport& report,
                             std::size_t block_len, const std::optional<BitBuffer>& seed,
                             const std::optional<std::filesystem::path>& out = std::nullopt);

/// Monte-Carlo B curve for every configured bit depth.
BGammaCurve run_curve(const ExperimentConfig& cfg);

/// Writes the fig2..fig6 datasets as CSV files into `dir`.
void run_figures(const ExperimentConfig& cfg, const std::filesystem::path& dir);

void write_manifest(const std::filesystem::path& path, const ExperimentConfig& cfg,
                    const nlohmann::json& derived);

}  // namespace qrng
