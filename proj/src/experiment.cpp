#include "qrng/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "qrng/error.hpp"

namespace qrng {

using nlohmann::json;

namespace {

std::string pulse_kind_str(PulseKind k) { return k == PulseKind::gaussian ? "gaussian" : "flat_top"; }
std::string path_str(SignalPath p) { return p == SignalPath::integral ? "integral" : "waveform"; }

[[noreturn]] void field_error(const std::string& path, const std::string& msg) {
  throw InvalidParameter("config: " + path + ": " + msg);
}

// Reads j[key] into `out` if present, reporting type errors with the field path.
template <typename T>
void read(const json& j, const char* key, T& out, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception&) {
    field_error(path + key, "wrong type");
  }
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& path) {
  if (!j.is_object()) field_error(path.empty() ? "<root>" : path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) field_error(path + it.key(), "unknown field");
}

const json& section(const json& j, const char* key, const std::string& path) {
  static const json empty = json::object();
  auto it = j.find(key);
  if (it == j.end()) return empty;
  if (!it->is_object()) field_error(path + key, "expected an object");
  return *it;
}

template <typename F>
void with_prefix(const std::string& prefix, F&& f) {
  try {
    f();
  } catch (const InvalidParameter& e) {
    throw InvalidParameter("config: " + prefix + ": " + e.what());
  }
}

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InvalidParameter("cannot create output directory " + dir.string());
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InvalidParameter("cannot write " + p.string());
  return out;
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::fig2: return "fig2";
    case Scenario::fig3: return "fig3";
    case Scenario::fig4: return "fig4";
    case Scenario::fig5: return "fig5";
    case Scenario::fig6: return "fig6";
    case Scenario::custom: return "custom";
  }
  return "custom";
}

Scenario scenario_from_string(const std::string& s) {
  for (auto sc : {Scenario::fig2, Scenario::fig3, Scenario::fig4, Scenario::fig5, Scenario::fig6, Scenario::custom})
    if (to_string(sc) == s) return sc;
  field_error("scenario", "unknown scenario '" + s + "'");
}

std::vector<double> default_sigma_zeta_grid() {
  std::vector<double> g;
  for (int i = 0; i < 10; ++i) g.push_back(0.05 * i / 9.0);
  return g;
}

void ExperimentConfig::validate() const {
  with_prefix("pulse", [&] { physics.pulse.validate(); });
  with_prefix("laser", [&] { physics.laser.validate(); });
  with_prefix("noise", [&] { physics.noise.validate(); });
  with_prefix("adc", [&] { adc.validate(); });
  if (!(range_fill > 0.0 && range_fill <= 1.0)) field_error("adc.range_fill", "must lie in (0, 1]");
  if (adc.bandwidth * physics.pulse.resolution_scale() > 2.0 && signal_path == SignalPath::waveform)
    field_error("adc.bandwidth", "too high for the pulse grid");
  if (mc_samples < 10000) field_error("mc_samples", "must be >= 10000 for PDF estimation");
  if (block_len < 2) field_error("extractor.block_len", "must be >= 2");
  if (!(b_options.width_threshold > 0.0 && b_options.width_threshold < 1.0))
    field_error("b.width_threshold", "must lie in (0, 1)");
  if (!(b_options.min_prominence >= 0.0 && b_options.min_prominence < 1.0))
    field_error("b.min_prominence", "must lie in [0, 1)");
  if (bandwidths.empty()) field_error("sweeps.bandwidths", "must not be empty");
  for (double bw : bandwidths)
    if (!(bw > 0.0)) field_error("sweeps.bandwidths", "entries must be > 0");
  for (double j : jitters)
    if (!(j >= 0.0)) field_error("sweeps.jitters", "entries must be >= 0");
  for (int n : bit_depths)
    if (n < 1 || n > 24) field_error("sweeps.bit_depths", "entries must lie in [1, 24]");
  for (double s : sigma_zeta_grid)
    if (!(s >= 0.0)) field_error("sweeps.sigma_zeta", "entries must be >= 0");
  if (samples_format != "bin" && samples_format != "csv")
    field_error("output.samples_format", "must be 'bin' or 'csv'");
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const { return to_json(*this) == to_json(o); }

ExperimentConfig preset(Scenario s) {
  ExperimentConfig c;
  c.scenario = s;
  c.sigma_zeta_grid = default_sigma_zeta_grid();
  auto& laser = c.physics.laser;
  switch (s) {
    case Scenario::fig2:
      c.signal_path = SignalPath::waveform;
      c.physics.pulse = {PulseKind::gaussian, 25e-12, 30e-12, 1.0};
      laser.alpha = 4.0;
      laser.repetition_period = 400e-12;  // 2.5 GHz
      laser.sigma_s1 = laser.sigma_s2 = 0.05;
      c.adc.bandwidth = 20e9;
      c.mc_samples = 200000;
      break;
    case Scenario::fig3:
      c.signal_path = SignalPath::waveform;
      c.physics.pulse = {PulseKind::flat_top, 1e-9, 30e-12, 1.0};
      laser.alpha = 4.0;
      laser.repetition_period = 2e-9;  // 500 MHz
      laser.sigma_s1 = laser.sigma_s2 = 0.05;
      c.physics.noise.sigma_jitter = 10e-12;
      c.adc.bandwidth = 1e9;
      // 400 ps after the end of the rising edge.
      c.adc.sample_time = c.physics.pulse.reference_time(laser.repetition_period) + 400e-12;
      c.bandwidths = {20e9, 1e9};
      c.mc_samples = 200000;
      break;
    case Scenario::fig4:
    case Scenario::fig5:
    case Scenario::fig6:
      laser.sigma_s1 = laser.sigma_s2 = 0.05;
      break;
    case Scenario::custom:
      break;
  }
  return c;
}

json to_json(const ExperimentConfig& c) {
  const auto& p = c.physics;
  return json{
      {"scenario", to_string(c.scenario)},
      {"signal_path", path_str(c.signal_path)},
      {"pulse",
       {{"kind", pulse_kind_str(p.pulse.kind)},
        {"width", p.pulse.width},
        {"edge_width", p.pulse.edge_width},
        {"peak_power", p.pulse.peak_power}}},
      {"laser",
       {{"alpha", p.laser.alpha},
        {"repetition_period", p.laser.repetition_period},
        {"sigma_s1", p.laser.sigma_s1},
        {"sigma_s2", p.laser.sigma_s2},
        {"mean_s1", p.laser.mean_s1},
        {"mean_s2", p.laser.mean_s2}}},
      {"noise", {{"sigma_jitter", p.noise.sigma_jitter}, {"sigma_zeta", p.noise.sigma_zeta}}},
      {"phase", {{"kind", "uniform"}}},
      {"adc",
       {{"n", c.adc.n},
        {"delta_u", c.adc.delta_u},
        {"bandwidth", c.adc.bandwidth},
        {"sample_time", c.adc.sample_time},
        {"sinad_db", c.adc.sinad_db},
        {"range_fill", c.range_fill}}},
      {"b",
       {{"width_threshold", c.b_options.width_threshold},
        {"window", c.b_options.window},
        {"min_prominence", c.b_options.min_prominence}}},
      {"extractor", {{"block_len", c.block_len}}},
      {"mc_samples", c.mc_samples},
      {"rng_seed", c.rng_seed},
      {"antithetic", c.antithetic},
      {"sweeps",
       {{"bandwidths", c.bandwidths},
        {"jitters", c.jitters},
        {"bit_depths", c.bit_depths},
        {"sigma_zeta", c.sigma_zeta_grid}}},
      {"output",
       {{"dir", c.output_dir}, {"write_samples", c.write_samples}, {"samples_format", c.samples_format}}},
  };
}

ExperimentConfig config_from_json(const json& j) {
  check_keys(j,
             {"scenario", "signal_path", "pulse", "laser", "noise", "phase", "adc", "b", "extractor",
              "mc_samples", "rng_seed", "antithetic", "sweeps", "output"},
             "");
  std::string scenario = "custom";
  read(j, "scenario", scenario, "");
  ExperimentConfig c = preset(scenario_from_string(scenario));

  std::string path = path_str(c.signal_path);
  read(j, "signal_path", path, "");
  if (path == "integral") c.signal_path = SignalPath::integral;
  else if (path == "waveform") c.signal_path = SignalPath::waveform;
  else field_error("signal_path", "must be 'integral' or 'waveform'");

  const auto& pulse = section(j, "pulse", "");
  check_keys(pulse, {"kind", "width", "edge_width", "peak_power"}, "pulse.");
  std::string kind = pulse_kind_str(c.physics.pulse.kind);
  read(pulse, "kind", kind, "pulse.");
  if (kind == "gaussian") c.physics.pulse.kind = PulseKind::gaussian;
  else if (kind == "flat_top") c.physics.pulse.kind = PulseKind::flat_top;
  else field_error("pulse.kind", "must be 'gaussian' or 'flat_top'");
  read(pulse, "width", c.physics.pulse.width, "pulse.");
  read(pulse, "edge_width", c.physics.pulse.edge_width, "pulse.");
  read(pulse, "peak_power", c.physics.pulse.peak_power, "pulse.");

  const auto& laser = section(j, "laser", "");
  check_keys(laser, {"alpha", "repetition_period", "sigma_s1", "sigma_s2", "mean_s1", "mean_s2"}, "laser.");
  read(laser, "alpha", c.physics.laser.alpha, "laser.");
  read(laser, "repetition_period", c.physics.laser.repetition_period, "laser.");
  read(laser, "sigma_s1", c.physics.laser.sigma_s1, "laser.");
  read(laser, "sigma_s2", c.physics.laser.sigma_s2, "laser.");
  read(laser, "mean_s1", c.physics.laser.mean_s1, "laser.");
  read(laser, "mean_s2", c.physics.laser.mean_s2, "laser.");

  const auto& noise = section(j, "noise", "");
  check_keys(noise, {"sigma_jitter", "sigma_zeta"}, "noise.");
  read(noise, "sigma_jitter", c.physics.noise.sigma_jitter, "noise.");
  read(noise, "sigma_zeta", c.physics.noise.sigma_zeta, "noise.");

  const auto& phase = section(j, "phase", "");
  check_keys(phase, {"kind"}, "phase.");
  std::string phase_kind = "uniform";
  read(phase, "kind", phase_kind, "phase.");
  if (phase_kind != "uniform") field_error("phase.kind", "only 'uniform' is supported");

  const auto& adc = section(j, "adc", "");
  check_keys(adc, {"n", "delta_u", "bandwidth", "sample_time", "sinad_db", "range_fill"}, "adc.");
  read(adc, "n", c.adc.n, "adc.");
  read(adc, "delta_u", c.adc.delta_u, "adc.");
  read(adc, "bandwidth", c.adc.bandwidth, "adc.");
  read(adc, "sample_time", c.adc.sample_time, "adc.");
  read(adc, "sinad_db", c.adc.sinad_db, "adc.");
  read(adc, "range_fill", c.range_fill, "adc.");

  const auto& b = section(j, "b", "");
  check_keys(b, {"width_threshold", "window", "min_prominence"}, "b.");
  read(b, "width_threshold", c.b_options.width_threshold, "b.");
  read(b, "window", c.b_options.window, "b.");
  read(b, "min_prominence", c.b_options.min_prominence, "b.");

  const auto& ex = section(j, "extractor", "");
  check_keys(ex, {"block_len"}, "extractor.");
  read(ex, "block_len", c.block_len, "extractor.");

  read(j, "mc_samples", c.mc_samples, "");
  read(j, "rng_seed", c.rng_seed, "");
  read(j, "antithetic", c.antithetic, "");

  const auto& sw = section(j, "sweeps", "");
  check_keys(sw, {"bandwidths", "jitters", "bit_depths", "sigma_zeta"}, "sweeps.");
  read(sw, "bandwidths", c.bandwidths, "sweeps.");
  read(sw, "jitters", c.jitters, "sweeps.");
  read(sw, "bit_depths", c.bit_depths, "sweeps.");
  read(sw, "sigma_zeta", c.sigma_zeta_grid, "sweeps.");

  const auto& out = section(j, "output", "");
  check_keys(out, {"dir", "write_samples", "samples_format"}, "output.");
  read(out, "dir", c.output_dir, "output.");
  read(out, "write_samples", c.write_samples, "output.");
  read(out, "samples_format", c.samples_format, "output.");

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("config: cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidParameter(std::string("config: ") + e.what());
  }
  return config_from_json(j);
}

void write_manifest(const std::filesystem::path& path, const ExperimentConfig& cfg, const json& derived) {
  const json manifest{
      {"config", to_json(cfg)},
      {"derived", derived},
      {"decisions",
       {{"filter_discretization", kFilterDiscretization},
        {"b_width_threshold", cfg.b_options.width_threshold},
        {"b_window_bins", cfg.b_options.window == 0 ? json("max(3, K/64)") : json(cfg.b_options.window)},
        {"b_min_prominence", cfg.b_options.min_prominence},
        {"comparator_tolerance", kComparatorTolerance},
        {"first_bin_anchor", "s_min"},
        {"substream_seed", "splitmix64(splitmix64(seed) ^ splitmix64(chunk + 1)), chunk = 16384 events"},
        {"toeplitz_seed_policy", "one seed per session, reused across blocks"},
        {"out_len_rounding", "floor(N / gamma_adc)"}}},
  };
  auto out = open_out(path);
  out << manifest.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

SimulateOutput run_simulate(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& out_dir) {
  cfg.validate();
  SimulateOutput o{calibrated_adc(cfg.adc, cfg.physics, cfg.range_fill), -1.0, {}, {}, {
      EmpiricalPdf(BinSpec{}), EmpiricalPdf(BinSpec{}), {}, std::nullopt}};
  if (cfg.signal_path == SignalPath::waveform) o.sample_time = effective_sample_time(cfg.physics, o.adc);

  McOptions mc;
  mc.antithetic = cfg.antithetic && !cfg.write_samples;
  o.values = simulate_signal(cfg.physics, o.adc, cfg.signal_path, cfg.mc_samples, cfg.rng_seed, mc);
  o.codes = digitize(o.values, o.adc);
  o.analysis = analyze_simulation(o.values, cfg.physics, o.adc, cfg.b_options);

  if (out_dir) {
    ensure_dir(*out_dir);
    {
      auto f = open_out(*out_dir / "histogram.csv");
      write_histogram_csv(f, o.analysis.adc_histogram);
    }
    {
      auto f = open_out(*out_dir / "report.txt");
      o.analysis.report.write_key_value(f);
    }
    {
      auto f = open_out(*out_dir / "report.csv");
      f << ReductionReport::csv_header() << '\n' << o.analysis.report.csv_row() << '\n';
    }
    if (cfg.write_samples)
      write_samples_file(*out_dir / (cfg.samples_format == "csv" ? "samples.csv" : "samples.bin"),
                         SampleSet{o.adc.n, o.codes});
    write_manifest(*out_dir / "manifest.json", cfg,
                   json{{"gain", o.adc.gain},
                        {"offset", o.adc.offset},
                        {"sample_time", o.sample_time},
                        {"antithetic_used", mc.antithetic}});
  }
  return o;
}

ReductionReport run_analyze(const SampleSet& samples, const AnalyzeSettings& settings, const BGammaCurve& curve) {
  const int n = samples.n_bits ? samples.n_bits : settings.n;
  if (samples.n_bits && settings.n && samples.n_bits != settings.n)
    throw InvalidParameter("analyze: sample file bit depth differs from --bits");
  const EmpiricalPdf hist = [&] {
    try {
      return accumulate_codes(samples.codes, n, settings.delta_u);
    } catch (const InvalidParameter& e) {
      throw DataFormatError(std::string("analyze: ") + e.what());
    }
  }();

  ReductionReport r;
  r.mode = "ingestion";
  r.n_bits = n;
  const auto me = min_entropy_pmax(hist);
  r.p_max = me.p_max;
  r.h_inf_classical = me.h_inf;
  r.gamma_classical = gamma_classical(n, me.h_inf);

  BStatistic b;
  try {
    b = estimate_B(hist, settings.b_options);
  } catch (const UnimodalPdf&) {
    throw OutOfModel("analyze: histogram is not bimodal, no reduction factor can be assigned");
  }
  r.b_value = b.value;
  const double g = curve.subset(n).lookup(b.value);

  // Ideal support estimated from the outer edges of the two peak bins.
  const double bw = hist.spec().width();
  const QuantumPdfParams support{b.peak_low - 0.5 * bw, b.peak_high + 0.5 * bw};
  const double ratio = support.width() / settings.delta_u;
  r.h_inf_q = h_inf_q_closed_form(ratio, n);
  r.gamma_nq = gamma_nq(n, r.h_inf_q);
  r.h_inf = h_inf_first_bin(hist, support.s_min, settings.delta_u, n);
  r.h_inf_comparator = h_inf_comparator(hist, support);
  try {
    r.gamma_adc_strict = gamma_adc_strict(n, r.h_inf_q, r.h_inf);
    r.gamma_adc_relaxed = gamma_adc_relaxed(n, r.h_inf_q, r.h_inf);
  } catch (const InvalidParameter&) {
    r.metadata["adc_factor_status"] = "model_mismatch";
  }
  r.gamma_enob = gamma_enob(n, enob(settings.sinad_db));
  r.gamma_comparator = Reduction::finite(std::max(1.0, g / r.gamma_nq));
  r.gamma_total = Reduction::finite(g * r.gamma_enob);

  r.metadata["gamma_total_rule"] = "curve(B) * gamma_enob";
  r.metadata["curve_gamma_nq_gamma"] = fmt(g);
  r.metadata["curve_b_min"] = fmt(curve.subset(n).b_min());
  r.metadata["curve_b_max"] = fmt(curve.subset(n).b_max());
  r.metadata["support_from"] = "b_peaks";
  r.metadata["range_ratio_r"] = fmt(ratio);
  r.metadata["b_width_threshold"] = fmt(settings.b_options.width_threshold);
  r.metadata["b_window_bins"] = std::to_string(settings.b_options.effective_window(hist.bins()));
  r.metadata["b_min_prominence"] = fmt(settings.b_options.min_prominence);
  r.metadata["samples"] = std::to_string(samples.codes.size());
  return r;
}

ExtractionResult run_extract(const SampleSet& samples, const ReductionReport& report, std::size_t block_len,
                             const std::optional<BitBuffer>& seed,
                             const std::optional<std::filesystem::path>& out) {
  const int n = samples.n_bits ? samples.n_bits : report.n_bits;
  if (n < 1) throw InvalidParameter("extract: unknown sample bit depth");
  for (auto c : samples.codes)
    if (c >> n) throw DataFormatError("extract: sample code exceeds the bit depth");
  const BitBuffer raw = codes_to_bits(samples.codes, n);
  ExtractorConfig cfg{block_len, 1.0};
  auto res = extraction_pipeline(raw, report, cfg, seed);

  if (out) {
    write_bits_file(*out, res.output);
    write_bits_file(std::filesystem::path(out->string() + ".seed"), res.seed);
    auto meta = open_out(std::filesystem::path(out->string() + ".meta"));
    meta << "format=packed bits, LSB-first within bytes\n"
         << "output_bits=" << res.output.size() << '\n'
         << "block_len_N=" << res.block_len << '\n'
         << "out_len_M=" << res.out_len << '\n'
         << "blocks=" << res.blocks << '\n'
         << "gamma_adc=" << fmt(res.gamma_adc) << '\n'
         << "seed_len=" << res.seed.size() << '\n'
         << "seed_source=" << (seed ? "file" : "von_neumann_head") << '\n'
         << "seed_raw_bits=" << res.seed_raw_bits << '\n'
         << "seed_policy=one seed per session, reused across blocks\n"
         << "matrix_layout=T[i][j] = seed[i - j + N - 1]; first row seed[N-1..0], first column seed[N-1..M+N-2]\n"
         << "sample_bits=" << n << " per sample, LSB-first\n";
  }
  return res;
}

BGammaCurve run_curve(const ExperimentConfig& cfg) {
  cfg.validate();
  CurveSettings s;
  s.mc_samples = cfg.mc_samples;
  s.seed = cfg.rng_seed;
  s.range_fill = cfg.range_fill;
  s.sinad_db = cfg.adc.sinad_db;
  s.b_options = cfg.b_options;
  const auto grid = cfg.sigma_zeta_grid.empty() ? default_sigma_zeta_grid() : cfg.sigma_zeta_grid;
  std::vector<CurveRow> rows;
  for (int n : cfg.bit_depths) {
    const auto c = b_to_gamma_curve(n, cfg.physics.laser.sigma_s1, grid, s);
    rows.insert(rows.end(), c.rows().begin(), c.rows().end());
  }
  return BGammaCurve(std::move(rows));
}

void run_figures(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  ensure_dir(dir);

  // fig2/fig3: PDFs over bandwidth x jitter plus filtered pulse shapes.
  for (Scenario sc : {Scenario::fig2, Scenario::fig3}) {
    ExperimentConfig base = preset(sc);
    base.mc_samples = cfg.mc_samples;
    base.rng_seed = cfg.rng_seed;
    const std::string name = to_string(sc);
    auto pdf_csv = open_out(dir / (name + "_pdf.csv"));
    auto sum_csv = open_out(dir / (name + "_summary.csv"));
    auto pulse_csv = open_out(dir / (name + "_pulse.csv"));
    pdf_csv << "bandwidth,jitter,bin_low,bin_high,count\n" << std::setprecision(12);
    sum_csv << "bandwidth,jitter,sample_time,b_value,peak_low,peak_high\n" << std::setprecision(12);
    pulse_csv << "bandwidth,time,intensity,sample_time\n" << std::setprecision(12);
    for (double bw : base.bandwidths) {
      ExperimentConfig c = base;
      c.adc.bandwidth = bw;
      const auto adc = calibrated_adc(c.adc, c.physics, c.range_fill);
      const TimeGrid grid = default_grid(c.physics, 1.0 / (20.0 * bw));
      const auto shape = filter_waveform(mean_level_waveform(c.physics, grid), design_butterworth2(bw, grid.dt));
      const double ts = effective_sample_time(c.physics, adc);
      for (std::size_t i = 0; i < shape.size(); ++i)
        pulse_csv << bw << ',' << shape.time(i) << ',' << shape.samples[i] << ',' << ts << '\n';
      for (double jit : base.jitters) {
        c.physics.noise.sigma_jitter = jit;
        const auto o = run_simulate(c);
        const auto& h = o.analysis.adc_histogram;
        for (std::size_t i = 0; i < h.bins(); ++i)
          pdf_csv << bw << ',' << jit << ',' << h.bin_low(i) << ',' << h.bin_high(i) << ',' << h.counts()[i] << '\n';
        sum_csv << bw << ',' << jit << ',' << o.sample_time << ',';
        if (o.analysis.b)
          sum_csv << o.analysis.b->value << ',' << o.analysis.b->peak_low << ',' << o.analysis.b->peak_high << '\n';
        else
          sum_csv << "unimodal,,\n";
      }
    }
  }

  // fig4/fig5: semi-analytic noise sweeps.
  const double sigma_s = preset(Scenario::fig4).physics.laser.sigma_s1;
  const auto grid = cfg.sigma_zeta_grid.empty() ? default_sigma_zeta_grid() : cfg.sigma_zeta_grid;
  auto fig4 = open_out(dir / "fig4.csv");
  auto fig5 = open_out(dir / "fig5.csv");
  fig4 << "n_bits,sigma_s,sigma_zeta,h_inf,h_inf_q,gamma_relaxed,gamma_strict\n" << std::setprecision(12);
  fig5 << "n_bits,sigma_s,sigma_zeta,h_inf_comparator,gamma_comparator,gamma_nq,gamma_nq_gamma\n"
       << std::setprecision(12);
  for (int n : cfg.bit_depths) {
    for (double sz : grid) {
      const auto p = theory_point(n, sigma_s, sz, cfg.range_fill);
      fig4 << n << ',' << sigma_s << ',' << sz << ',' << p.h_inf << ',' << p.h_inf_q << ','
           << p.gamma_relaxed.str() << ',' << p.gamma_strict.str() << '\n';
      fig5 << n << ',' << sigma_s << ',' << sz << ',' << p.h_inf_comparator << ',' << p.gamma_comparator.str()
           << ',' << p.gamma_nq << ',' << p.gamma_nq_gamma.str() << '\n';
    }
  }

  // fig6: Monte-Carlo B curve.
  ExperimentConfig c6 = preset(Scenario::fig6);
  c6.mc_samples = cfg.mc_samples;
  c6.rng_seed = cfg.rng_seed;
  c6.bit_depths = cfg.bit_depths;
  c6.sigma_zeta_grid = grid;
  c6.range_fill = cfg.range_fill;
  auto fig6 = open_out(dir / "fig6.csv");
  run_curve(c6).write_csv(fig6);

  write_manifest(dir / "manifest.json", cfg, json{{"datasets", {"fig2_pdf.csv", "fig2_summary.csv", "fig2_pulse.csv",
                                                                "fig3_pdf.csv", "fig3_summary.csv", "fig3_pulse.csv",
                                                                "fig4.csv", "fig5.csv", "fig6.csv"}}});
}

}  // namespace qrng
