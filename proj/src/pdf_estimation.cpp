#include "qrng/pdf_estimation.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "qrng/error.hpp"

namespace qrng {
namespace {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

// ---------------------------------------------------------------------------
// Histograms

void BinSpec::validate() const {
  if (bins == 0) throw InvalidParameter("histogram needs at least one bin");
  if (!(hi > lo)) throw InvalidParameter("histogram edges must be strictly increasing");
}

std::size_t BinSpec::index(double v) const {
  if (!(v > lo)) return 0;
  const double pos = std::floor((v - lo) / (hi - lo) * static_cast<double>(bins));
  if (pos >= static_cast<double>(bins - 1)) return bins - 1;
  return static_cast<std::size_t>(pos);
}

EmpiricalPdf::EmpiricalPdf(BinSpec spec) : spec_(spec) {
  spec_.validate();
  counts_.assign(spec_.bins, 0);
}

EmpiricalPdf::EmpiricalPdf(BinSpec spec, std::vector<std::uint64_t> counts)
    : spec_(spec), counts_(std::move(counts)) {
  spec_.validate();
  if (counts_.size() != spec_.bins) throw InvalidParameter("histogram counts do not match bin count");
  total_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

double EmpiricalPdf::bin_low(std::size_t i) const {
  return spec_.lo + spec_.width() * static_cast<double>(i);
}
double EmpiricalPdf::bin_high(std::size_t i) const {
  return i + 1 == bins() ? spec_.hi : bin_low(i + 1);
}
double EmpiricalPdf::bin_center(std::size_t i) const {
  return spec_.lo + spec_.width() * (static_cast<double>(i) + 0.5);
}
double EmpiricalPdf::probability(std::size_t i) const {
  return total_ ? static_cast<double>(counts_.at(i)) / static_cast<double>(total_) : 0.0;
}
double EmpiricalPdf::density(std::size_t i) const { return probability(i) / spec_.width(); }

void EmpiricalPdf::add_to_bin(std::size_t i, std::uint64_t count) {
  counts_.at(i) += count;
  total_ += count;
}

void EmpiricalPdf::merge(const EmpiricalPdf& other) {
  if (other.spec_.bins != spec_.bins || other.spec_.lo != spec_.lo || other.spec_.hi != spec_.hi)
    throw InvalidParameter("merge: histogram layouts differ");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
}

double EmpiricalPdf::mass(double lo, double hi) const {
  if (empty()) throw InvalidParameter("mass of an empty histogram");
  if (!(hi > lo)) return 0.0;
  const double bw = spec_.width();
  double acc = 0.0;
  const double a = std::max(lo, spec_.lo);
  const double b = std::min(hi, spec_.hi);
  if (!(b > a)) return 0.0;
  const auto first = std::min(static_cast<std::size_t>((a - spec_.lo) / bw), bins() - 1);
  for (std::size_t i = first; i < bins(); ++i) {
    const double l = bin_low(i);
    if (l >= b) break;
    const double overlap = std::min(b, bin_high(i)) - std::max(a, l);
    if (overlap > 0.0) acc += static_cast<double>(counts_[i]) * std::min(1.0, overlap / bw);
  }
  return acc / static_cast<double>(total_);
}

EmpiricalPdf accumulate(std::span<const double> values, const BinSpec& spec) {
  EmpiricalPdf pdf(spec);
  for (double v : values) pdf.add(v);
  return pdf;
}

EmpiricalPdf accumulate_codes(std::span<const std::uint32_t> codes, int n, double delta_u) {
  if (n < 1 || n > 24) throw InvalidParameter("accumulate_codes: n must lie in [1, 24]");
  const std::size_t k = std::size_t{1} << n;
  EmpiricalPdf pdf(BinSpec{0.0, delta_u, k});
  for (auto c : codes) {
    if (c >= k) throw InvalidParameter("accumulate_codes: code exceeds 2^n - 1");
    pdf.add_to_bin(c);
  }
  return pdf;
}

double empirical_cdf(const EmpiricalPdf& pdf, double y) {
  if (pdf.empty()) throw InvalidParameter("empirical_cdf: empty histogram");
  if (y <= pdf.spec().lo) return 0.0;
  if (y >= pdf.spec().hi) return 1.0;
  return pdf.mass(pdf.spec().lo, y);
}

// ---------------------------------------------------------------------------
// Ideal arcsine law

void QuantumPdfParams::validate() const {
  if (!(s_max > s_min)) throw InvalidParameter("quantum pdf needs s_min < s_max");
}

SBounds s_bounds(double s1, double s2, double kappa) {
  if (!(s1 > 0.0) || !(s2 > 0.0)) throw InvalidParameter("s_bounds: powers must be > 0");
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw InvalidParameter("s_bounds: kappa must lie in [0, 1]");
  const double half = 2.0 * kappa * std::sqrt(s1 * s2);
  return {s1 + s2 - half, s1 + s2 + half, half == 0.0};
}

double quantum_pdf(double x, const QuantumPdfParams& p) {
  p.validate();
  if (!(x > p.s_min && x < p.s_max)) throw InvalidParameter("quantum_pdf: x outside (s_min, s_max)");
  return 1.0 / (std::numbers::pi * std::sqrt((x - p.s_min) * (p.s_max - x)));
}

double quantum_cdf(double x, const QuantumPdfParams& p) {
  p.validate();
  if (!(x >= p.s_min && x <= p.s_max)) throw InvalidParameter("quantum_cdf: x outside [s_min, s_max]");
  const double u = std::clamp((x - p.s_min) / p.width(), 0.0, 1.0);
  return 2.0 / std::numbers::pi * std::asin(std::sqrt(u));
}

double quantum_quantile(double u, const QuantumPdfParams& p) {
  p.validate();
  if (!(u >= 0.0 && u <= 1.0)) throw InvalidParameter("quantum_quantile: u outside [0, 1]");
  const double s = std::sin(0.5 * std::numbers::pi * u);
  return p.s_min + p.width() * s * s;
}

ArcsinePdf::ArcsinePdf(QuantumPdfParams p) : p_(p) { p_.validate(); }

double ArcsinePdf::mass(double lo, double hi) const {
  const double a = std::clamp(lo, p_.s_min, p_.s_max);
  const double b = std::clamp(hi, p_.s_min, p_.s_max);
  if (!(b > a)) return 0.0;
  return quantum_cdf(b, p_) - quantum_cdf(a, p_);
}

// ---------------------------------------------------------------------------
// Noisy arcsine model

NoisyArcsineModel::NoisyArcsineModel(NoisyArcsineParams p) : p_(p) {
  if (!(p_.mean_s1 > 0.0 && p_.mean_s2 > 0.0)) throw InvalidParameter("noisy arcsine: means must be > 0");
  if (!(p_.sigma_s1 >= 0.0 && p_.sigma_s1 <= 0.5 && p_.sigma_s2 >= 0.0 && p_.sigma_s2 <= 0.5))
    throw InvalidParameter("noisy arcsine: relative power sigma must lie in [0, 0.5]");
  if (!(p_.kappa > 0.0 && p_.kappa <= 1.0)) throw InvalidParameter("noisy arcsine: kappa must lie in (0, 1]");
  if (!(p_.noise_sigma >= 0.0)) throw InvalidParameter("noisy arcsine: noise sigma must be >= 0");
}

double NoisyArcsineModel::mass_fixed_power(double s1, double s2, double lo, double hi) const {
  const auto [s_min, s_max, degenerate] = s_bounds(s1, s2, p_.kappa);
  const double w = s_max - s_min;
  if (p_.noise_sigma <= 1e-12 * w) return ArcsinePdf({s_min, s_max}).mass(lo, hi);

  const double sigma = p_.noise_sigma;
  auto integrand = [&](double theta) {
    const double s = std::sin(0.5 * theta);
    const double x = s_min + w * s * s;
    return std_normal_cdf((hi - x) / sigma) - std_normal_cdf((lo - x) / sigma);
  };
  // Split where x(theta) crosses the interval ends so each piece is smooth.
  std::vector<double> cuts{0.0, std::numbers::pi};
  for (double edge : {lo, hi}) {
    const double u = (edge - s_min) / w;
    if (u > 0.0 && u < 1.0) cuts.push_back(2.0 * std::asin(std::sqrt(u)));
  }
  std::sort(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    acc += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, cuts[i], cuts[i + 1],
                                                                          15, 1e-12);
  }
  return acc / std::numbers::pi;
}

double NoisyArcsineModel::mass(double lo, double hi) const {
  if (!(hi > lo)) return 0.0;
  using boost::math::quadrature::gauss;
  constexpr double kZ = 7.0;
  auto phi = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); };

  // Expectation over one truncated-positive Gaussian power.
  auto over_power = [&](double mean, double rel_sigma, auto&& f) {
    if (rel_sigma == 0.0) return f(mean);
    const double z_lo = std::max(-kZ, -1.0 / rel_sigma);
    const double norm = std_normal_cdf(kZ) - std_normal_cdf(z_lo);
    const double v = gauss<double, 30>::integrate(
        [&](double z) { return phi(z) * f(mean * (1.0 + rel_sigma * z)); }, z_lo, kZ);
    return v / norm;
  };

  return over_power(p_.mean_s1, p_.sigma_s1, [&](double s1) {
    return over_power(p_.mean_s2, p_.sigma_s2,
                      [&](double s2) { return mass_fixed_power(s1, s2, lo, hi); });
  });
}

// ---------------------------------------------------------------------------
// B statistic

std::size_t BOptions::effective_window(std::size_t bins) const {
  return window ? window : std::max<std::size_t>(3, bins / 64);
}

std::vector<double> moving_average(std::span<const double> v, std::size_t window) {
  const std::size_t n = v.size();
  std::vector<double> out(n);
  if (n == 0) return out;
  window = std::max<std::size_t>(1, window);
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + v[i];
  const std::size_t left = window / 2;
  const std::size_t right = window - left - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i >= left ? i - left : 0;
    const std::size_t b = std::min(n - 1, i + right);
    out[i] = (prefix[b + 1] - prefix[a]) / static_cast<double>(b - a + 1);
  }
  return out;
}

namespace {

struct Peak {
  std::size_t index;
  double height;
};

// Local maxima (flat tops reduced to their middle) with topographic prominence.
std::vector<Peak> prominent_peaks(const std::vector<double>& s, double min_prominence) {
  const std::size_t n = s.size();
  std::vector<Peak> peaks;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && s[j + 1] == s[i]) ++j;
    const bool rises = i == 0 || s[i - 1] < s[i];
    const bool falls = j + 1 == n || s[j + 1] < s[i];
    if (rises && falls && s[i] > 0.0) {
      const std::size_t mid = (i + j) / 2;
      double left_min = s[i];
      std::size_t k = i;
      while (k > 0 && s[k - 1] <= s[i]) left_min = std::min(left_min, s[--k]);
      if (k == 0) left_min = std::min(left_min, 0.0);
      double right_min = s[j];
      k = j;
      while (k + 1 < n && s[k + 1] <= s[i]) right_min = std::min(right_min, s[++k]);
      if (k + 1 == n) right_min = std::min(right_min, 0.0);
      const double prominence = s[i] - std::max(left_min, right_min);
      if (prominence >= min_prominence) peaks.push_back({mid, s[i]});
    }
    i = j + 1;
  }
  return peaks;
}

}  // namespace

BStatistic estimate_B(const EmpiricalPdf& pdf, const BOptions& options) {
  if (pdf.total() < 10000) throw InvalidParameter("estimate_B: needs at least 1e4 counts");
  const auto& counts = pdf.counts();
  const std::size_t k = counts.size();
  const double bw = pdf.spec().width();

  const auto max_count = *std::max_element(counts.begin(), counts.end());
  const double threshold = options.width_threshold * static_cast<double>(max_count);
  std::size_t first = k, last = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (static_cast<double>(counts[i]) >= threshold) {
      first = std::min(first, i);
      last = i;
    }
  }

  std::vector<double> raw(counts.begin(), counts.end());
  const auto smooth = moving_average(raw, options.effective_window(k));
  const double smooth_max = *std::max_element(smooth.begin(), smooth.end());
  auto peaks = prominent_peaks(smooth, options.min_prominence * smooth_max);
  if (peaks.size() < 2) throw UnimodalPdf("estimate_B: fewer than two separated maxima");
  std::partial_sort(peaks.begin(), peaks.begin() + 2, peaks.end(),
                    [](const Peak& a, const Peak& b) { return a.height > b.height; });
  const auto lo_idx = std::min(peaks[0].index, peaks[1].index);
  const auto hi_idx = std::max(peaks[0].index, peaks[1].index);

  BStatistic b;
  b.total_width = static_cast<double>(last - first + 1) * bw;
  b.peak_low = pdf.bin_center(lo_idx);
  b.peak_high = pdf.bin_center(hi_idx);
  b.peak_distance = b.peak_high - b.peak_low;
  b.value = b.total_width / b.peak_distance;
  return b;
}

// ---------------------------------------------------------------------------
// CSV

void write_histogram_csv(std::ostream& os, const EmpiricalPdf& pdf) {
  os << "bin_low,bin_high,count\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < pdf.bins(); ++i)
    os << pdf.bin_low(i) << ',' << pdf.bin_high(i) << ',' << pdf.counts()[i] << '\n';
}

EmpiricalPdf read_histogram_csv(std::istream& is) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line)) throw DataFormatError("histogram csv: missing header", line_no);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "bin_low,bin_high,count") throw DataFormatError("histogram csv: bad header", line_no);

  std::vector<double> lows, highs;
  std::vector<std::uint64_t> counts;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c) ||
        c.find(',') != std::string::npos)
      throw DataFormatError("histogram csv: expected three fields", line_no);
    try {
      std::size_t used = 0;
      lows.push_back(std::stod(a, &used));
      if (used != a.size()) throw std::invalid_argument(a);
      highs.push_back(std::stod(b, &used));
      if (used != b.size()) throw std::invalid_argument(b);
      if (c.empty() || c.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument(c);
      counts.push_back(std::stoull(c));
    } catch (const std::exception&) {
      throw DataFormatError("histogram csv: unparsable value", line_no);
    }
    const std::size_t i = lows.size() - 1;
    if (!(highs[i] > lows[i])) throw DataFormatError("histogram csv: empty bin", line_no);
    if (i > 0) {
      const double w0 = highs[0] - lows[0];
      if (std::abs(lows[i] - highs[i - 1]) > 1e-9 * w0 ||
          std::abs((highs[i] - lows[i]) - w0) > 1e-6 * w0)
        throw DataFormatError("histogram csv: bins are not uniform and contiguous", line_no);
    }
  }
  if (counts.empty()) throw DataFormatError("histogram csv: no bins", line_no);
  const BinSpec spec{lows.front(), highs.back(), counts.size()};
  return EmpiricalPdf(spec, std::move(counts));
}

}  // namespace qrng
