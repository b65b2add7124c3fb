#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qrng/error.hpp"
#include "qrng/simulation.hpp"

using namespace qrng;

namespace {

PulseInterferenceConfig quiet() {
  PulseInterferenceConfig c;
  c.laser.sigma_s1 = c.laser.sigma_s2 = 0.0;
  c.noise.sigma_jitter = 0.0;
  c.noise.sigma_zeta = 0.0;
  return c;
}

AdcConfig adc_for(const PulseInterferenceConfig& c, int n) {
  AdcConfig a;
  a.n = n;
  return calibrated_adc(a, c);
}

}  // namespace

TEST_CASE("simulate_signal is deterministic and independent of thread count") {
  PulseInterferenceConfig c;
  c.noise.sigma_zeta = 0.01;
  const auto adc = adc_for(c, 10);
  McOptions one{true, 1, 1000}, four{true, 4, 1000};
  const auto a = simulate_signal(c, adc, SignalPath::integral, 10'001, 42, one);
  const auto b = simulate_signal(c, adc, SignalPath::integral, 10'001, 42, four);
  CHECK(a == b);
  const auto d = simulate_signal(c, adc, SignalPath::integral, 10'001, 43, one);
  CHECK(a != d);
  // A shorter batch is a prefix of a longer one.
  const auto p = simulate_signal(c, adc, SignalPath::integral, 2'500, 42, one);
  CHECK(std::equal(p.begin(), p.end(), a.begin()));
}

TEST_CASE("antithetic pairs have opposite interference terms") {
  const auto c = quiet();
  const auto adc = adc_for(c, 10);
  McOptions on{true, 1, 16384}, off{false, 1, 16384};
  const auto v = simulate_signal(c, adc, SignalPath::integral, 1000, 5, on);
  for (std::size_t i = 0; i + 1 < v.size(); i += 2) CHECK(v[i] + v[i + 1] == doctest::Approx(4.0).epsilon(1e-12));
  const auto w = simulate_signal(c, adc, SignalPath::integral, 1000, 5, off);
  int paired = 0;
  for (std::size_t i = 0; i + 1 < w.size(); i += 2) paired += std::abs(w[i] + w[i + 1] - 4.0) < 1e-9;
  CHECK(paired < 5);
}

TEST_CASE("support, calibration and digitization") {
  PulseInterferenceConfig c;
  c.laser.mean_s1 = 1.0;
  c.laser.mean_s2 = 2.25;
  const auto s = nominal_support(c);
  CHECK(s.s_min == doctest::Approx(0.25));
  CHECK(s.s_max == doctest::Approx(6.25));
  const auto adc = calibrated_adc(AdcConfig{}, c, 0.8);
  CHECK(adc.to_volts(s.s_max) - adc.to_volts(s.s_min) == doctest::Approx(0.8 * adc.delta_u));
  CHECK(adc.to_volts(c.mean_level()) == doctest::Approx(adc.delta_u / 2));
  const std::vector<double> v{0.0, 0.25, 3.0, 6.25, 9.0};
  const auto codes = digitize(v, adc);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(codes[i] == quantize(adc.to_volts(v[i]), adc));
}

TEST_CASE("noiseless limit: comparator is exact and the ADC factor is the non-uniformity factor") {
  const auto c = quiet();
  const auto adc = adc_for(c, 10);
  const auto v = simulate_signal(c, adc, SignalPath::integral, 1'000'000, 9);
  const auto a = analyze_simulation(v, c, adc);
  const auto& r = a.report;
  CHECK(std::abs(r.h_inf_comparator - 1.0) < 1e-3);
  CHECK(r.gamma_comparator.value() == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.gamma_total.value() / r.gamma_enob == doctest::Approx(r.gamma_nq).epsilon(1e-3));
  CHECK(r.h_inf == doctest::Approx(r.h_inf_q).epsilon(0.02));
  REQUIRE(a.b.has_value());
  CHECK(a.b->value > 1.0);
  CHECK(a.b->value < 1.05);
  CHECK(r.mode == "simulation");
}

TEST_CASE("waveform path reproduces the integral signal without noise") {
  auto c = quiet();
  c.laser.alpha = 0.0;
  const auto adc = adc_for(c, 10);
  const auto v = simulate_signal(c, adc, SignalPath::waveform, 20000, 3);
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  CHECK(*lo > -1e-6);
  CHECK(*lo < 1e-2);
  CHECK(*hi < 4.0 + 1e-6);
  CHECK(*hi > 4.0 - 1e-2);
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  CHECK(mean == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("semi-analytic sweep invariants") {
  const double sigma_s = 0.05;
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(0.05 * i / 9.0);
  std::vector<std::vector<TheoryPoint>> sweep;
  for (int n : {8, 10, 12}) {
    sweep.emplace_back();
    for (double sz : grid) sweep.back().push_back(theory_point(n, sigma_s, sz));
  }
  for (const auto& row : sweep)
    for (std::size_t i = 1; i < row.size(); ++i) {
      CHECK(row[i - 1].gamma_comparator <= row[i].gamma_comparator);
      CHECK(row[i - 1].gamma_nq_gamma <= row[i].gamma_nq_gamma);
      CHECK(row[i - 1].gamma_relaxed <= row[i].gamma_relaxed);
    }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(sweep[0][i].gamma_nq_gamma <= sweep[1][i].gamma_nq_gamma);
    CHECK(sweep[1][i].gamma_nq_gamma <= sweep[2][i].gamma_nq_gamma);
  }
}

TEST_CASE("noise moves mass out of the first bin") {
  for (int n : {8, 10, 12})
    for (double sz : {1e-4, 1e-3, 5e-3}) {
      const auto p = theory_point(n, 0.0, sz);
      CHECK(p.h_inf >= p.h_inf_q - 1e-9);
    }
}

TEST_CASE("strict factor diverges before the relaxed one") {
  const double t = strict_divergence_threshold(10, 0.01);
  CHECK(t > 0.0015);
  CHECK(t < 0.006);
  const auto below = theory_point(10, 0.01, 0.9 * t);
  const auto above = theory_point(10, 0.01, 1.1 * t);
  CHECK(below.gamma_strict.is_finite());
  CHECK(above.gamma_strict.is_untrusted());
  CHECK(above.gamma_relaxed.is_finite());
  CHECK(below.gamma_strict.value() > 10.0 / (1.0 + below.h_inf_q));
}

TEST_CASE("B curve grows with noise") {
  CurveSettings s;
  s.mc_samples = 100'000;
  const std::vector<double> grid{0.0, 0.01, 0.02, 0.03};
  const auto curve = b_to_gamma_curve(10, 0.05, grid, s);
  REQUIRE(curve.rows().size() == grid.size());
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (curve.rows()[i].bimodal) CHECK(curve.rows()[i].b > curve.rows()[i - 1].b);
  CHECK(curve.lookup(curve.b_min()) <= curve.lookup(curve.b_max()));
}

TEST_CASE("analysis input validation") {
  const auto c = quiet();
  const auto adc = adc_for(c, 10);
  CHECK_THROWS_AS(analyze_simulation(std::vector<double>{}, c, adc), InvalidParameter);
}
