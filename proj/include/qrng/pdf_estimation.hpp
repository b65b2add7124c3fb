#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace qrng {

/// Anything that can report the probability mass of an interval.
class DensityModel {
 public:
  virtual ~DensityModel() = default;
  /// Probability of the signal falling into [lo, hi].
  virtual double mass(double lo, double hi) const = 0;
};

/// Uniform histogram layout: `bins` equal bins covering [lo, hi).
struct BinSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t bins = 1;

  void validate() const;
  double width() const { return (hi - lo) / static_cast<double>(bins); }
  /// Saturating bin lookup consistent with `quantize`.
  std::size_t index(double v) const;
};

/// Normalized histogram of sampled values.
class EmpiricalPdf : public DensityModel {
 public:
  explicit EmpiricalPdf(BinSpec spec);
  EmpiricalPdf(BinSpec spec, std::vector<std::uint64_t> counts);

  const BinSpec& spec() const noexcept { return spec_; }
  std::size_t bins() const noexcept { return counts_.size(); }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  std::uint64_t total() const noexcept { return total_; }
  bool empty() const noexcept { return total_ == 0; }

  double bin_low(std::size_t i) const;
  double bin_high(std::size_t i) const;
  double bin_center(std::size_t i) const;
  double probability(std::size_t i) const;
  double density(std::size_t i) const;

  void add(double v) { add_to_bin(spec_.index(v)); }
  void add_to_bin(std::size_t i, std::uint64_t count = 1);

  /// Add another histogram with identical layout.
  void merge(const EmpiricalPdf& other);

  /// Bin-mass summation with linearly apportioned partial end bins.
  double mass(double lo, double hi) const override;

 private:
  BinSpec spec_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

/// Support of the ideal (phase-only) interference signal.
struct QuantumPdfParams {
  double s_min = 0.0;
  double s_max = 4.0;

  void validate() const;
  double width() const { return s_max - s_min; }
};

struct SBounds {
  double s_min;
  double s_max;
  bool degenerate;  // zero-width support (kappa = 0)
};

SBounds s_bounds(double s1, double s2, double kappa);

double quantum_pdf(double x, const QuantumPdfParams& p);
double quantum_cdf(double x, const QuantumPdfParams& p);
/// Inverse of quantum_cdf.
double quantum_quantile(double u, const QuantumPdfParams& p);

/// Arcsine law as a DensityModel; intervals are clipped to the support.
class ArcsinePdf : public DensityModel {
 public:
  explicit ArcsinePdf(QuantumPdfParams p);
  double mass(double lo, double hi) const override;
  const QuantumPdfParams& params() const noexcept { return p_; }

 private:
  QuantumPdfParams p_;
};

/// Semi-analytic interference-signal density: the arcsine law of a pulse pair
/// with Gaussian (truncated positive) power fluctuations, smeared by additive
/// Gaussian noise. Masses are evaluated by quadrature over the power
/// distribution and, per power pair, over the substituted phase variable
/// x = s_min + w sin^2(theta / 2), which removes the edge singularities.
struct NoisyArcsineParams {
  double mean_s1 = 1.0;
  double mean_s2 = 1.0;
  double sigma_s1 = 0.0;  // relative
  double sigma_s2 = 0.0;  // relative
  double kappa = 1.0;
  double noise_sigma = 0.0;  // absolute, same units as the signal
};

class NoisyArcsineModel : public DensityModel {
 public:
  explicit NoisyArcsineModel(NoisyArcsineParams p);
  double mass(double lo, double hi) const override;
  const NoisyArcsineParams& params() const noexcept { return p_; }

 private:
  double mass_fixed_power(double s1, double s2, double lo, double hi) const;
  NoisyArcsineParams p_;
};

EmpiricalPdf accumulate(std::span<const double> values, const BinSpec& spec);

/// Histogram of ADC codes: 2^n bins over [0, delta_u).
EmpiricalPdf accumulate_codes(std::span<const std::uint32_t> codes, int n, double delta_u);

double empirical_cdf(const EmpiricalPdf& pdf, double y);

/// Operational rules for the B statistic.
struct BOptions {
  double width_threshold = 0.01;  // fraction of the highest bin counted in the total width
  std::size_t window = 0;         // moving-average window in bins; 0 selects max(3, K/64)
  double min_prominence = 0.05;   // fraction of the smoothed maximum a peak must stand out by

  std::size_t effective_window(std::size_t bins) const;
};

struct BStatistic {
  double total_width = 0.0;
  double peak_distance = 0.0;
  double value = 0.0;
  double peak_low = 0.0;   // position of the lower-voltage peak
  double peak_high = 0.0;  // position of the higher-voltage peak
};

BStatistic estimate_B(const EmpiricalPdf& pdf, const BOptions& options = {});

/// Centered moving average; windows are truncated at the array ends.
std::vector<double> moving_average(std::span<const double> v, std::size_t window);

void write_histogram_csv(std::ostream& os, const EmpiricalPdf& pdf);
EmpiricalPdf read_histogram_csv(std::istream& is);

}  // namespace qrng
