#include "qrng/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "qrng/error.hpp"

namespace qrng {
namespace {

// Waveform-path machinery shared by all events of a batch.
struct WaveformSampler {
  const PulseInterferenceConfig& config;
  TimeGrid grid;
  Biquad filter;
  double t_s;
  std::size_t prefix;  // grid points needed to interpolate at t_s
  double reference;    // filtered phase-averaged level at t_s

  double sample(double delta_phi, double delta, double s1, double s2, std::vector<double>& buf) const {
    buf.resize(prefix);
    detail::fill_interference(config, delta_phi, delta, grid.t0, grid.dt, s1, s2, buf);
    Biquad f = filter;
    f.reset();
    for (auto& x : buf) x = f.process(x);
    const double pos = (t_s - grid.t0) / grid.dt;
    const auto i = std::min(static_cast<std::size_t>(pos), prefix - 1);
    const double frac = pos - static_cast<double>(i);
    const double y = i + 1 < prefix ? buf[i] + frac * (buf[i + 1] - buf[i]) : buf[i];
    return config.mean_level() * y / reference;
  }
};

TimeGrid waveform_grid(const PulseInterferenceConfig& config, const AdcConfig& adc) {
  return default_grid(config, 1.0 / (20.0 * adc.bandwidth));
}

WaveformSampler make_sampler(const PulseInterferenceConfig& config, const AdcConfig& adc) {
  const TimeGrid grid = waveform_grid(config, adc);
  Biquad filter = design_butterworth2(adc.bandwidth, grid.dt);
  const Waveform ref = filter_waveform(mean_level_waveform(config, grid), filter);
  double t_s = adc.sample_time;
  if (t_s < 0.0) {
    const auto it = std::max_element(ref.samples.begin(), ref.samples.end());
    t_s = ref.time(static_cast<std::size_t>(it - ref.samples.begin()));
  }
  const double reference = sample_at(ref, t_s);
  if (!(reference > 1e-9 * config.pulse.peak_power))
    throw InvalidParameter("sample_time falls where the filtered pulse is negligible");
  const auto prefix = std::min(grid.count, static_cast<std::size_t>((t_s - grid.t0) / grid.dt) + 2);
  return {config, grid, filter, t_s, prefix, reference};
}

double pair_signal(const InterferenceEvent& ev, const PulseInterferenceConfig& config, double delta_phi) {
  const double kappa = visibility_kappa(ev.delta, config.laser.alpha, config.pulse.width);
  return integral_signal(ev.s1, ev.s2, kappa, delta_phi);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

double effective_sample_time(const PulseInterferenceConfig& config, const AdcConfig& adc) {
  return make_sampler(config, adc).t_s;
}

std::vector<double> simulate_signal(const PulseInterferenceConfig& config, const AdcConfig& adc,
                                    SignalPath path, std::size_t count, std::uint64_t seed,
                                    const McOptions& options) {
  config.validate();
  std::optional<WaveformSampler> sampler;
  if (path == SignalPath::waveform) sampler.emplace(make_sampler(config, adc));

  const std::size_t chunk = std::max<std::size_t>(2, options.chunk & ~std::size_t{1});
  const std::size_t chunks = (count + chunk - 1) / chunk;
  const double zeta_sigma = config.noise.sigma_zeta * config.mean_level();
  std::vector<double> values(count);

  auto run_chunk = [&](std::size_t c) {
    RandomStream rng = RandomStream::substream(seed, c);
    std::vector<double> buf;
    const std::size_t begin = c * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    auto signal = [&](const InterferenceEvent& ev, double delta_phi) {
      if (sampler) return sampler->sample(delta_phi, ev.delta, ev.s1, ev.s2, buf);
      return pair_signal(ev, config, delta_phi);
    };
    for (std::size_t i = begin; i < end; ++i) {
      const InterferenceEvent ev = draw_event(rng, config);
      values[i] = sampler ? signal(ev, ev.delta_phi) + ev.zeta : ev.integral_signal;
      if (options.antithetic && i + 1 < end) {
        ++i;
        values[i] = signal(ev, ev.delta_phi + std::numbers::pi) + rng.normal(0.0, zeta_sigma);
      }
    }
  };

  unsigned threads = options.threads ? options.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, chunks));
  if (threads <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
    return values;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t c; (c = next.fetch_add(1)) < chunks;) run_chunk(c);
    });
  for (auto& th : pool) th.join();
  return values;
}

QuantumPdfParams nominal_support(const PulseInterferenceConfig& config) {
  const auto b = s_bounds(config.laser.mean_s1, config.laser.mean_s2, 1.0);
  return {b.s_min, b.s_max};
}

AdcConfig calibrated_adc(const AdcConfig& adc, const PulseInterferenceConfig& config, double range_fill) {
  AdcConfig out = adc;
  out.calibrate(config.mean_level(), nominal_support(config).width(), range_fill);
  return out;
}

std::vector<std::uint32_t> digitize(std::span<const double> values, const AdcConfig& adc) {
  std::vector<std::uint32_t> codes(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) codes[i] = quantize(adc.to_volts(values[i]), adc);
  return codes;
}

SimulationAnalysis analyze_simulation(std::span<const double> values,
                                      const PulseInterferenceConfig& config, const AdcConfig& adc,
                                      const BOptions& b_options) {
  adc.validate();
  if (values.empty()) throw InvalidParameter("analyze_simulation: no samples");
  const auto support = nominal_support(config);
  const auto codes = digitize(values, adc);

  // Unsaturated fine grid: 16 sub-bins per ADC bin, edges on S_min + k * step.
  const double step = adc.bin_width() / adc.gain / 16.0;
  const auto [vmin_it, vmax_it] = std::minmax_element(values.begin(), values.end());
  const double below = std::max(0.0, support.s_min - *vmin_it);
  const double lo = support.s_min - step * (std::ceil(below / step) + 1.0);
  const double above = std::max(*vmax_it, support.s_max) - lo;
  const auto k = static_cast<std::size_t>(std::ceil(above / step)) + 1;

  SimulationAnalysis a{accumulate_codes(codes, adc.n, adc.delta_u),
                       accumulate(values, BinSpec{lo, lo + step * static_cast<double>(k), k}),
                       {},
                       std::nullopt};
  auto& r = a.report;
  r.mode = "simulation";
  r.n_bits = adc.n;
  const double n = adc.n;

  const auto me = min_entropy_pmax(a.adc_histogram);
  r.p_max = me.p_max;
  r.h_inf_classical = me.h_inf;
  r.gamma_classical = gamma_classical(n, me.h_inf);

  try {
    a.b = estimate_B(a.adc_histogram, b_options);
    r.b_value = a.b->value;
    r.metadata["b_status"] = "bimodal";
  } catch (const UnimodalPdf&) {
    r.metadata["b_status"] = "unimodal";
  }

  const double range_intensity = adc.delta_u / adc.gain;
  const double ratio = support.width() / range_intensity;
  r.h_inf = h_inf_first_bin(a.analysis_histogram, support.s_min, range_intensity, adc.n);
  r.h_inf_q = h_inf_q_closed_form(ratio, adc.n);
  r.h_inf_comparator = h_inf_comparator(a.analysis_histogram, support);
  try {
    r.gamma_comparator = qrng::gamma_comparator(r.h_inf_comparator);
  } catch (const InvalidParameter&) {
    r.gamma_comparator = Reduction::untrusted();
    r.metadata["comparator_status"] = "model_mismatch";
  }
  try {
    r.gamma_adc_strict = qrng::gamma_adc_strict(n, r.h_inf_q, r.h_inf);
    r.gamma_adc_relaxed = qrng::gamma_adc_relaxed(n, r.h_inf_q, r.h_inf);
  } catch (const InvalidParameter&) {
    r.metadata["adc_factor_status"] = "model_mismatch";
  }
  r.gamma_nq = qrng::gamma_nq(n, r.h_inf_q);
  r.gamma_enob = qrng::gamma_enob(n, enob(adc.sinad_db));
  r.gamma_total = qrng::gamma_total(r.gamma_nq, r.gamma_enob, r.gamma_comparator);

  r.metadata["support_s_min"] = fmt(support.s_min);
  r.metadata["support_s_max"] = fmt(support.s_max);
  r.metadata["range_ratio_r"] = fmt(ratio);
  r.metadata["first_bin_anchor"] = "s_min";
  r.metadata["b_width_threshold"] = fmt(b_options.width_threshold);
  r.metadata["b_window_bins"] = std::to_string(b_options.effective_window(a.adc_histogram.bins()));
  r.metadata["b_min_prominence"] = fmt(b_options.min_prominence);
  r.metadata["comparator_tolerance"] = fmt(kComparatorTolerance);
  r.metadata["filter_discretization"] = kFilterDiscretization;
  r.metadata["samples"] = std::to_string(values.size());
  return a;
}

TheoryPoint theory_point(int n, double sigma_s, double sigma_zeta, double range_fill) {
  const NoisyArcsineModel model({1.0, 1.0, sigma_s, sigma_s, 1.0, 2.0 * sigma_zeta});
  const QuantumPdfParams support{0.0, 4.0};
  const double range_intensity = support.width() / range_fill;

  TheoryPoint p{};
  p.n_bits = n;
  p.sigma_zeta = sigma_zeta;
  p.h_inf = h_inf_first_bin(model, support.s_min, range_intensity, n);
  p.h_inf_q = h_inf_q_closed_form(range_fill, n);
  p.h_inf_comparator = h_inf_comparator(model, support);
  p.gamma_strict = gamma_adc_strict(n, p.h_inf_q, p.h_inf);
  p.gamma_relaxed = gamma_adc_relaxed(n, p.h_inf_q, p.h_inf);
  p.gamma_nq = gamma_nq(n, p.h_inf_q);
  p.gamma_comparator = gamma_comparator(p.h_inf_comparator);
  p.gamma_nq_gamma = Reduction::finite(p.gamma_nq) * p.gamma_comparator;
  return p;
}

double strict_divergence_threshold(int n, double sigma_s, double range_fill, double lo, double hi) {
  auto margin = [&](double sz) {
    const NoisyArcsineModel model({1.0, 1.0, sigma_s, sigma_s, 1.0, 2.0 * sz});
    const double h = h_inf_first_bin(model, 0.0, 4.0 / range_fill, n);
    return 1.0 + h_inf_q_closed_form(range_fill, n) - h;
  };
  double f_lo = margin(lo);
  if (!(f_lo > 0.0) || !(margin(hi) <= 0.0))
    throw InvalidParameter("strict_divergence_threshold: bracket does not contain the pole");
  for (int it = 0; it < 60 && hi - lo > 1e-9; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (margin(mid) > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

BGammaCurve b_to_gamma_curve(int n, double sigma_s, std::span<const double> sigma_zeta_grid,
                             const CurveSettings& settings) {
  PulseInterferenceConfig config;
  config.laser.sigma_s1 = config.laser.sigma_s2 = sigma_s;
  config.noise.sigma_jitter = 0.0;
  AdcConfig adc;
  adc.n = n;
  adc.sinad_db = settings.sinad_db;
  adc = calibrated_adc(adc, config, settings.range_fill);

  std::vector<CurveRow> rows;
  for (double sz : sigma_zeta_grid) {
    config.noise.sigma_zeta = sz;
    const auto values = simulate_signal(config, adc, SignalPath::integral, settings.mc_samples, settings.seed);
    const auto a = analyze_simulation(values, config, adc, settings.b_options);
    CurveRow row;
    row.n_bits = n;
    row.sigma_s = sigma_s;
    row.sigma_zeta = sz;
    row.bimodal = a.b.has_value();
    row.b = a.b ? a.b->value : std::numeric_limits<double>::quiet_NaN();
    const auto g = Reduction::finite(a.report.gamma_nq) * a.report.gamma_comparator;
    row.trusted = g.is_finite();
    row.gamma_nq_gamma = row.trusted ? g.value() : 0.0;
    rows.push_back(row);
  }
  return BGammaCurve(std::move(rows));
}

}  // namespace qrng
