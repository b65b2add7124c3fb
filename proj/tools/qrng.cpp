// qrng: batch front-end for the pulse-interference QRNG toolkit.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qrng/error.hpp"
#include "qrng/experiment.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kUntrusted = 3, kDataFormat = 4 };

struct ConfigArgs {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;

  void add(CLI::App* app) {
    app->add_option("-c,--config", config, "JSON config file")->check(CLI::ExistingFile);
    app->add_option("-p,--preset", preset, "Scenario preset (fig2..fig6, custom) used without --config");
    app->add_option("--seed", seed, "Override rng_seed");
    app->add_option("--mc-samples", samples, "Override mc_samples");
  }

  qrng::ExperimentConfig load() const {
    qrng::ExperimentConfig cfg;
    if (!config.empty()) cfg = qrng::load_config(config);
    else if (!preset.empty()) cfg = qrng::preset(qrng::scenario_from_string(preset));
    else cfg = qrng::preset(qrng::Scenario::custom);
    if (seed) cfg.rng_seed = *seed;
    if (samples) cfg.mc_samples = *samples;
    cfg.validate();
    return cfg;
  }
};

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw qrng::InvalidParameter("cannot open " + p.string());
  return in;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw qrng::InvalidParameter("cannot write " + p.string());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and post-processing toolkit for a laser-pulse-interference QRNG"};
  app.require_subcommand(1);

  // simulate
  ConfigArgs sim_args;
  std::string sim_out;
  bool sim_write_samples = false;
  std::string sim_dump;
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo batch: histogram, reduction report, manifest");
  sim_args.add(sim);
  sim->add_option("-o,--out", sim_out, "Output directory (default: config output.dir)");
  sim->add_flag("--write-samples", sim_write_samples, "Also write the quantized samples");
  sim->add_option("--dump-config", sim_dump, "Write the resolved config as JSON and exit");

  // analyze
  std::string an_samples, an_curve, an_out;
  qrng::AnalyzeSettings an_settings;
  auto* an = app.add_subcommand("analyze", "Ingest quantized samples and estimate Gamma_ADC via B");
  an->add_option("-s,--samples", an_samples, "Sample file (CSV or binary)")->required()->check(CLI::ExistingFile);
  an->add_option("--curve", an_curve, "B lookup table from `qrng curve`")->required()->check(CLI::ExistingFile);
  an->add_option("-n,--bits", an_settings.n, "ADC bit depth (checked against binary headers)");
  an->add_option("--delta-u", an_settings.delta_u, "ADC input range in volts");
  an->add_option("--sinad", an_settings.sinad_db, "ADC SINAD in dB");
  an->add_option("-o,--out", an_out, "Report file (default: stdout)");

  // extract
  std::string ex_samples, ex_report, ex_out, ex_seed;
  std::size_t ex_block = 4096;
  auto* ex = app.add_subcommand("extract", "Toeplitz-hash quantized samples using a reduction report");
  ex->add_option("-s,--samples", ex_samples, "Sample file")->required()->check(CLI::ExistingFile);
  ex->add_option("-r,--report", ex_report, "Report from simulate or analyze")->required()->check(CLI::ExistingFile);
  ex->add_option("-N,--block-len", ex_block, "Raw bits per block");
  ex->add_option("--seed-file", ex_seed, "Packed Toeplitz seed (N+M-1 bits); default: debias the raw head")
      ->check(CLI::ExistingFile);
  ex->add_option("-o,--out", ex_out, "Output bit file")->required();

  // curve
  ConfigArgs cv_args;
  std::string cv_out;
  auto* cv = app.add_subcommand("curve", "Emit the B -> gamma_nq*Gamma lookup table");
  cv_args.add(cv);
  cv->add_option("-o,--out", cv_out, "CSV file (default: stdout)");

  // figures
  ConfigArgs fg_args;
  std::string fg_out;
  auto* fg = app.add_subcommand("figures", "Emit all figure datasets as CSV");
  fg_args.add(fg);
  fg->add_option("-o,--out", fg_out, "Output directory (default: config output.dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*sim) {
      auto cfg = sim_args.load();
      if (sim_write_samples) cfg.write_samples = true;
      if (!sim_out.empty()) cfg.output_dir = sim_out;
      if (!sim_dump.empty()) {
        open_out(sim_dump) << qrng::to_json(cfg).dump(2) << '\n';
        return kOk;
      }
      const auto o = qrng::run_simulate(cfg, fs::path(cfg.output_dir));
      std::cout << "wrote " << cfg.output_dir << " (" << o.values.size() << " samples, gamma_total "
                << o.analysis.report.gamma_total.str() << ")\n";
    } else if (*an) {
      auto samples = qrng::read_samples_file(an_samples);
      auto curve_in = open_in(an_curve);
      const auto curve = qrng::BGammaCurve::read_csv(curve_in);
      const auto report = qrng::run_analyze(samples, an_settings, curve);
      if (an_out.empty()) {
        report.write_key_value(std::cout);
      } else {
        auto out = open_out(an_out);
        report.write_key_value(out);
      }
    } else if (*ex) {
      const auto samples = qrng::read_samples_file(ex_samples);
      auto rin = open_in(ex_report);
      const auto report = qrng::ReductionReport::read_key_value(rin);
      std::optional<qrng::BitBuffer> seed;
      if (!ex_seed.empty()) {
        const auto cfg = qrng::ExtractorConfig::from_report(ex_block, report);
        seed = qrng::read_bits_file(ex_seed, cfg.block_len + cfg.out_len() - 1);
      }
      const auto res = qrng::run_extract(samples, report, ex_block, seed, fs::path(ex_out));
      std::cout << "wrote " << res.output.size() << " bits to " << ex_out << '\n';
    } else if (*cv) {
      const auto curve = qrng::run_curve(cv_args.load());
      if (cv_out.empty()) {
        curve.write_csv(std::cout);
      } else {
        auto out = open_out(cv_out);
        curve.write_csv(out);
      }
    } else if (*fg) {
      auto cfg = fg_args.load();
      if (!fg_out.empty()) cfg.output_dir = fg_out;
      qrng::run_figures(cfg, cfg.output_dir);
      std::cout << "wrote figure datasets to " << cfg.output_dir << '\n';
    }
  } catch (const qrng::UntrustedSource& e) {
    std::cerr << "untrusted source: " << e.what() << '\n';
    return kUntrusted;
  } catch (const qrng::OutOfModel& e) {
    std::cerr << "out of model: " << e.what() << '\n';
    return kUntrusted;
  } catch (const qrng::DataFormatError& e) {
    std::cerr << "data format error: " << e.what() << '\n';
    return kDataFormat;
  } catch (const qrng::InvalidParameter& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
  return kOk;
}
