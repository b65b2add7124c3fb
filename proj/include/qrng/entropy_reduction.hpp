#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qrng/pdf_estimation.hpp"

namespace qrng {

/// A reduction factor that is either a finite number or the "untrusted source"
/// sentinel. The sentinel never converts to a floating-point infinity.
class Reduction {
 public:
  static Reduction finite(double v) { return Reduction(v); }
  static Reduction untrusted() { return Reduction(); }

  bool is_untrusted() const noexcept { return !value_.has_value(); }
  bool is_finite() const noexcept { return value_.has_value(); }

  /// Throws UntrustedSource for the sentinel.
  double value() const;

  /// Textual form: the number, or "untrusted".
  std::string str() const;
  static Reduction parse(const std::string& s);

  /// Sentinel sorts above every finite factor.
  bool operator<=(const Reduction& other) const noexcept;
  friend Reduction operator*(const Reduction& a, const Reduction& b);
  bool operator==(const Reduction& other) const = default;

 private:
  Reduction() = default;
  explicit Reduction(double v) : value_(v) {}
  std::optional<double> value_;
};

struct MinEntropy {
  double h_inf;
  double p_max;
};

/// Most-probable-bin min-entropy of a histogram.
MinEntropy min_entropy_pmax(const EmpiricalPdf& pdf);

/// n / h_inf.
Reduction gamma_classical(double n, double h_inf);

/// -log2 of the mass within the lower half of the ideal support; +inf when the
/// mass is zero.
double h_inf_comparator(const DensityModel& pdf, const QuantumPdfParams& p);

/// H_inf values this close below 1 are treated as 1 by gamma_comparator; they
/// arise from sampling noise and from power fluctuations that shift the
/// half-support mass by a few 1e-4.
inline constexpr double kComparatorTolerance = 0.01;

/// 1 / (2 - h_inf); sentinel for h_inf >= 2.
Reduction gamma_comparator(double h_inf, double tolerance = kComparatorTolerance);

/// -log2 of the mass in the first ADC bin [s_min, s_min + delta_u / 2^n].
double h_inf_first_bin(const DensityModel& pdf, double s_min, double delta_u, int n);

/// Closed-form first-bin min-entropy of the arcsine law for r = w / delta_u:
///   -log2(1/2 - atan((q - 2) / (2 sqrt(q - 1))) / pi),  q = r 2^n.
/// Requires q >= 2.
double h_inf_q_closed_form(double r, int n);

/// n / (1 + h_inf_q - h_inf).
Reduction gamma_adc_strict(double n, double h_inf_q, double h_inf);

/// n / (2 h_inf_q - h_inf).
Reduction gamma_adc_relaxed(double n, double h_inf_q, double h_inf);

/// n / h_inf_q.
double gamma_nq(double n, double h_inf_q);

/// n / enob.
double gamma_enob(double n, double enob_bits);

/// gamma_nq * gamma_enob * gamma_comparator.
Reduction gamma_total(double gamma_nq, double gamma_enob, const Reduction& gamma_comparator);

struct ReductionReport {
  int n_bits = 0;
  double h_inf = 0.0;    // first-bin min-entropy of the measured PDF
  double h_inf_q = 0.0;  // first-bin min-entropy of the ideal PDF
  double h_inf_comparator = 0.0;
  double p_max = 0.0;
  double h_inf_classical = 0.0;  // -log2 p_max
  Reduction gamma_classical = Reduction::untrusted();
  Reduction gamma_comparator = Reduction::untrusted();
  Reduction gamma_adc_strict = Reduction::untrusted();
  Reduction gamma_adc_relaxed = Reduction::untrusted();
  double gamma_nq = 0.0;
  double gamma_enob = 0.0;
  Reduction gamma_total = Reduction::untrusted();
  std::optional<double> b_value;
  std::string mode;  // "simulation" or "ingestion"
  std::map<std::string, std::string> metadata;

  void write_key_value(std::ostream& os) const;
  static ReductionReport read_key_value(std::istream& is);
  static std::string csv_header();
  std::string csv_row() const;
};

/// One point of the B -> gamma_nq * Gamma relation.
struct CurveRow {
  double b = 0.0;
  bool bimodal = true;
  double gamma_nq_gamma = 0.0;  // finite, or the row is excluded
  bool trusted = true;
  int n_bits = 0;
  double sigma_s = 0.0;
  double sigma_zeta = 0.0;
};

/// Lookup table mapping a measured B to gamma_nq * Gamma.
///
/// Rows that are unimodal or untrusted are kept for export but excluded from
/// interpolation. The remaining points are sorted by B and made monotone
/// non-decreasing with pool-adjacent-violators before linear interpolation.
class BGammaCurve {
 public:
  BGammaCurve() = default;
  explicit BGammaCurve(std::vector<CurveRow> rows);

  const std::vector<CurveRow>& rows() const noexcept { return rows_; }
  /// Interpolation knots (B, value) after monotone regression.
  const std::vector<std::pair<double, double>>& knots() const noexcept { return knots_; }

  double b_min() const;
  double b_max() const;

  /// Curve restricted to rows of one bit depth.
  BGammaCurve subset(int n_bits) const;

  /// B at or below b_min maps to the first knot; above b_max throws OutOfModel.
  double lookup(double b) const;

  void write_csv(std::ostream& os) const;
  static BGammaCurve read_csv(std::istream& is);

 private:
  std::vector<CurveRow> rows_;
  std::vector<std::pair<double, double>> knots_;
};

}  // namespace qrng
