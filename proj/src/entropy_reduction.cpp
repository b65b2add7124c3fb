#include "qrng/entropy_reduction.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "qrng/error.hpp"

namespace qrng {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Measured first-bin entropies may undershoot the ideal one by sampling noise.
constexpr double kEntropyTolerance = 0.05;

double neg_log2(double p) { return p > 0.0 ? -std::log2(p) : kInf; }

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataFormatError("cannot parse " + what + ": '" + s + "'");
  }
}

void check_entropy_order(double h_inf_q, double h_inf) {
  if (h_inf < h_inf_q - kEntropyTolerance)
    throw InvalidParameter("measured first-bin min-entropy below the ideal value");
}

}  // namespace

// ---------------------------------------------------------------------------

double Reduction::value() const {
  if (!value_) throw UntrustedSource("reduction factor is infinite: source untrusted");
  return *value_;
}

std::string Reduction::str() const { return value_ ? fmt(*value_) : "untrusted"; }

Reduction Reduction::parse(const std::string& s) {
  if (s == "untrusted") return untrusted();
  return finite(parse_double(s, "reduction factor"));
}

bool Reduction::operator<=(const Reduction& other) const noexcept {
  if (other.is_untrusted()) return true;
  if (is_untrusted()) return false;
  return *value_ <= *other.value_;
}

Reduction operator*(const Reduction& a, const Reduction& b) {
  if (a.is_untrusted() || b.is_untrusted()) return Reduction::untrusted();
  return Reduction::finite(*a.value_ * *b.value_);
}

// ---------------------------------------------------------------------------

MinEntropy min_entropy_pmax(const EmpiricalPdf& pdf) {
  if (pdf.empty()) throw InvalidParameter("min_entropy_pmax: empty histogram");
  const auto& c = pdf.counts();
  const double p_max =
      static_cast<double>(*std::max_element(c.begin(), c.end())) / static_cast<double>(pdf.total());
  return {neg_log2(p_max) + 0.0, p_max};
}

Reduction gamma_classical(double n, double h_inf) {
  if (!(h_inf > 0.0)) return Reduction::untrusted();
  if (h_inf > n * (1.0 + 1e-12)) throw InvalidParameter("gamma_classical: h_inf exceeds n");
  return Reduction::finite(n / h_inf);
}

double h_inf_comparator(const DensityModel& pdf, const QuantumPdfParams& p) {
  p.validate();
  return neg_log2(pdf.mass(p.s_min, p.s_min + 0.5 * p.width()));
}

Reduction gamma_comparator(double h_inf, double tolerance) {
  if (h_inf < 1.0 - tolerance) throw InvalidParameter("gamma_comparator: h_inf below 1 (model mismatch)");
  if (h_inf >= 2.0) return Reduction::untrusted();
  return Reduction::finite(1.0 / (2.0 - std::max(h_inf, 1.0)));
}

double h_inf_first_bin(const DensityModel& pdf, double s_min, double delta_u, int n) {
  if (!(delta_u > 0.0) || n < 1) throw InvalidParameter("h_inf_first_bin: invalid ADC parameters");
  return neg_log2(pdf.mass(s_min, s_min + std::ldexp(delta_u, -n)));
}

double h_inf_q_closed_form(double r, int n) {
  if (!(r > 0.0) || n < 1) throw InvalidParameter("h_inf_q_closed_form: r and n must be positive");
  const double q = std::ldexp(r, n);
  if (q < 2.0) throw InvalidParameter("h_inf_q_closed_form: r * 2^n must be >= 2");
  const double mass = 0.5 - std::atan((q - 2.0) / (2.0 * std::sqrt(q - 1.0))) / std::numbers::pi;
  return -std::log2(mass);
}

Reduction gamma_adc_strict(double n, double h_inf_q, double h_inf) {
  check_entropy_order(h_inf_q, h_inf);
  const double denom = 1.0 + h_inf_q - h_inf;
  if (!(denom > 0.0)) return Reduction::untrusted();
  return Reduction::finite(n / denom);
}

Reduction gamma_adc_relaxed(double n, double h_inf_q, double h_inf) {
  check_entropy_order(h_inf_q, h_inf);
  const double denom = 2.0 * h_inf_q - h_inf;
  if (!(denom > 0.0)) return Reduction::untrusted();
  return Reduction::finite(n / denom);
}

double gamma_nq(double n, double h_inf_q) {
  if (!(h_inf_q > 0.0)) throw InvalidParameter("gamma_nq: h_inf_q must be > 0");
  return n / h_inf_q;
}

double gamma_enob(double n, double enob_bits) {
  if (!(enob_bits > 0.0)) throw InvalidParameter("gamma_enob: ENOB must be > 0");
  if (enob_bits > n) throw InvalidParameter("gamma_enob: ENOB exceeds the bit depth");
  return n / enob_bits;
}

Reduction gamma_total(double gamma_nq_v, double gamma_enob_v, const Reduction& gamma_comparator_v) {
  return Reduction::finite(gamma_nq_v * gamma_enob_v) * gamma_comparator_v;
}

// ---------------------------------------------------------------------------
// Report serialization

void ReductionReport::write_key_value(std::ostream& os) const {
  os << "mode=" << mode << '\n'
     << "n_bits=" << n_bits << '\n'
     << "h_inf=" << fmt(h_inf) << '\n'
     << "h_inf_q=" << fmt(h_inf_q) << '\n'
     << "h_inf_comparator=" << fmt(h_inf_comparator) << '\n'
     << "p_max=" << fmt(p_max) << '\n'
     << "h_inf_classical=" << fmt(h_inf_classical) << '\n'
     << "gamma_classical=" << gamma_classical.str() << '\n'
     << "gamma_comparator=" << gamma_comparator.str() << '\n'
     << "gamma_adc_strict=" << gamma_adc_strict.str() << '\n'
     << "gamma_adc_relaxed=" << gamma_adc_relaxed.str() << '\n'
     << "gamma_nq=" << fmt(gamma_nq) << '\n'
     << "gamma_enob=" << fmt(gamma_enob) << '\n'
     << "gamma_total=" << gamma_total.str() << '\n'
     << "b_value=" << (b_value ? fmt(*b_value) : std::string("none")) << '\n';
  for (const auto& [k, v] : metadata) os << "meta." << k << '=' << v << '\n';
}

ReductionReport ReductionReport::read_key_value(std::istream& is) {
  ReductionReport r;
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::string> kv;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataFormatError("report: expected key=value", line_no);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto need = [&](const std::string& k) -> const std::string& {
    auto it = kv.find(k);
    if (it == kv.end()) throw DataFormatError("report: missing key " + k);
    return it->second;
  };
  r.mode = need("mode");
  r.n_bits = static_cast<int>(parse_double(need("n_bits"), "n_bits"));
  r.h_inf = parse_double(need("h_inf"), "h_inf");
  r.h_inf_q = parse_double(need("h_inf_q"), "h_inf_q");
  r.h_inf_comparator = parse_double(need("h_inf_comparator"), "h_inf_comparator");
  r.p_max = parse_double(need("p_max"), "p_max");
  r.h_inf_classical = parse_double(need("h_inf_classical"), "h_inf_classical");
  r.gamma_classical = Reduction::parse(need("gamma_classical"));
  r.gamma_comparator = Reduction::parse(need("gamma_comparator"));
  r.gamma_adc_strict = Reduction::parse(need("gamma_adc_strict"));
  r.gamma_adc_relaxed = Reduction::parse(need("gamma_adc_relaxed"));
  r.gamma_nq = parse_double(need("gamma_nq"), "gamma_nq");
  r.gamma_enob = parse_double(need("gamma_enob"), "gamma_enob");
  r.gamma_total = Reduction::parse(need("gamma_total"));
  const auto& b = need("b_value");
  if (b != "none") r.b_value = parse_double(b, "b_value");
  for (const auto& [k, v] : kv)
    if (k.rfind("meta.", 0) == 0) r.metadata[k.substr(5)] = v;
  return r;
}

std::string ReductionReport::csv_header() {
  return "mode,n_bits,h_inf,h_inf_q,h_inf_comparator,p_max,h_inf_classical,gamma_classical,"
         "gamma_comparator,gamma_adc_strict,gamma_adc_relaxed,gamma_nq,gamma_enob,gamma_total,b_value";
}

std::string ReductionReport::csv_row() const {
  std::ostringstream os;
  os << mode << ',' << n_bits << ',' << fmt(h_inf) << ',' << fmt(h_inf_q) << ','
     << fmt(h_inf_comparator) << ',' << fmt(p_max) << ',' << fmt(h_inf_classical) << ','
     << gamma_classical.str() << ',' << gamma_comparator.str() << ',' << gamma_adc_strict.str()
     << ',' << gamma_adc_relaxed.str() << ',' << fmt(gamma_nq) << ',' << fmt(gamma_enob) << ','
     << gamma_total.str() << ',' << (b_value ? fmt(*b_value) : std::string("none"));
  return os.str();
}

// ---------------------------------------------------------------------------
// B -> gamma_nq * Gamma lookup

BGammaCurve::BGammaCurve(std::vector<CurveRow> rows) : rows_(std::move(rows)) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows_)
    if (r.bimodal && r.trusted && std::isfinite(r.b)) pts.emplace_back(r.b, r.gamma_nq_gamma);
  std::sort(pts.begin(), pts.end());

  // Pool adjacent violators: blocks of (sum of B, sum of value, weight).
  struct Block {
    double b_sum, v_sum;
    double weight;
  };
  std::vector<Block> blocks;
  for (const auto& [b, v] : pts) {
    blocks.push_back({b, v, 1.0});
    while (blocks.size() > 1) {
      auto& last = blocks.back();
      auto& prev = blocks[blocks.size() - 2];
      if (prev.v_sum / prev.weight <= last.v_sum / last.weight) break;
      prev.b_sum += last.b_sum;
      prev.v_sum += last.v_sum;
      prev.weight += last.weight;
      blocks.pop_back();
    }
  }
  for (const auto& blk : blocks) {
    const double b = blk.b_sum / blk.weight;
    const double v = blk.v_sum / blk.weight;
    if (!knots_.empty() && b <= knots_.back().first) {
      knots_.back().second = std::max(knots_.back().second, v);
      continue;
    }
    knots_.emplace_back(b, v);
  }
  // Keep the measured extent of the domain even when end points were pooled.
  if (!pts.empty() && !knots_.empty()) {
    knots_.front().first = std::min(knots_.front().first, pts.front().first);
    knots_.back().first = std::max(knots_.back().first, pts.back().first);
  }
}

BGammaCurve BGammaCurve::subset(int n_bits) const {
  std::vector<CurveRow> rows;
  for (const auto& r : rows_)
    if (r.n_bits == n_bits) rows.push_back(r);
  return BGammaCurve(std::move(rows));
}

double BGammaCurve::b_min() const {
  if (knots_.empty()) throw OutOfModel("empty B curve");
  return knots_.front().first;
}

double BGammaCurve::b_max() const {
  if (knots_.empty()) throw OutOfModel("empty B curve");
  return knots_.back().first;
}

double BGammaCurve::lookup(double b) const {
  if (knots_.empty()) throw OutOfModel("empty B curve");
  if (!std::isfinite(b)) throw OutOfModel("B is not finite");
  if (b <= knots_.front().first) return knots_.front().second;
  if (b > knots_.back().first) throw OutOfModel("B = " + fmt(b) + " exceeds curve domain " + fmt(b_max()));
  auto hi = std::lower_bound(knots_.begin(), knots_.end(), b,
                             [](const auto& k, double x) { return k.first < x; });
  auto lo = hi - 1;
  const double t = (b - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

void BGammaCurve::write_csv(std::ostream& os) const {
  os << "B,gamma_nq_gamma,n_bits,sigma_s,sigma_zeta\n";
  for (const auto& r : rows_) {
    os << (r.bimodal ? fmt(r.b) : std::string("nan")) << ','
       << (r.trusted ? fmt(r.gamma_nq_gamma) : std::string("untrusted")) << ',' << r.n_bits << ','
       << fmt(r.sigma_s) << ',' << fmt(r.sigma_zeta) << '\n';
  }
}

BGammaCurve BGammaCurve::read_csv(std::istream& is) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line)) throw DataFormatError("curve csv: missing header", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "B,gamma_nq_gamma,n_bits,sigma_s,sigma_zeta") throw DataFormatError("curve csv: bad header", 1);
  std::vector<CurveRow> rows;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream row(line);
    for (std::string cell; std::getline(row, cell, ',');) f.push_back(cell);
    if (f.size() != 5) throw DataFormatError("curve csv: expected five fields", line_no);
    try {
      CurveRow r;
      r.bimodal = f[0] != "nan";
      r.b = r.bimodal ? parse_double(f[0], "B") : std::numeric_limits<double>::quiet_NaN();
      r.trusted = f[1] != "untrusted";
      r.gamma_nq_gamma = r.trusted ? parse_double(f[1], "gamma_nq_gamma") : 0.0;
      r.n_bits = static_cast<int>(parse_double(f[2], "n_bits"));
      r.sigma_s = parse_double(f[3], "sigma_s");
      r.sigma_zeta = parse_double(f[4], "sigma_zeta");
      rows.push_back(r);
    } catch (const DataFormatError& e) {
      throw DataFormatError(std::string("curve csv: ") + e.what(), line_no);
    }
  }
  return BGammaCurve(std::move(rows));
}

}  // namespace qrng
