#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qrng/error.hpp"
#include "qrng/signal_model.hpp"

using namespace qrng;
using std::numbers::pi;

namespace {

// Composite Simpson over the waveform samples (odd count required).
double simpson(const Waveform& w) {
  const std::size_t n = w.size() % 2 ? w.size() : w.size() - 1;
  double s = w.samples[0] + w.samples[n - 1];
  for (std::size_t i = 1; i + 1 < n; ++i) s += (i % 2 ? 4.0 : 2.0) * w.samples[i];
  return s * w.dt / 3.0;
}

PulseInterferenceConfig quiet_config() {
  PulseInterferenceConfig c;
  c.laser.sigma_s1 = c.laser.sigma_s2 = 0.0;
  return c;
}

// Arcsine CDF on [0, 4], written out independently of the library.
double arcsine_cdf_0_4(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 4.0) return 1.0;
  return 2.0 / pi * std::asin(std::sqrt(x / 4.0));
}

}  // namespace

TEST_CASE("visibility_kappa examples") {
  CHECK(visibility_kappa(0.0, 2.0, 50e-12) == 1.0);
  const double w = 37e-12;
  CHECK(visibility_kappa(std::sqrt(8.0) * w, 0.0, w) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  // exp(-10/72) evaluated in long double.
  const long double expect = std::exp(-10.0L / 72.0L);
  CHECK(visibility_kappa(10e-12, 3.0, 30e-12) == doctest::Approx(static_cast<double>(expect)).epsilon(1e-13));
  CHECK(visibility_kappa(10e-12, 3.0, 30e-12) == doctest::Approx(0.87025).epsilon(1e-4));
  CHECK_THROWS_AS(visibility_kappa(1e-12, 1.0, 0.0), InvalidParameter);
}

TEST_CASE("visibility_kappa monotonicity and scaling") {
  const double w = 25e-12;
  double prev = 1.0;
  for (int i = 1; i <= 50; ++i) {
    const double k = visibility_kappa(i * 1e-12, 4.0, w);
    CHECK(k < prev);
    CHECK(visibility_kappa(-i * 1e-12, 4.0, w) == doctest::Approx(k));
    prev = k;
  }
  for (double a = 0.0; a < 6.0; a += 0.5)
    CHECK(visibility_kappa(5e-12, a + 0.5, w) < visibility_kappa(5e-12, a, w));
  for (double d : {1e-12, 4e-12, 13e-12}) {
    CHECK(visibility_kappa(d, 4.0, w / 2) == doctest::Approx(visibility_kappa(2 * d, 4.0, w)).epsilon(1e-14));
    CHECK(visibility_kappa(d, 4.0, w) < 1.0);
  }
}

TEST_CASE("integral_signal examples and symmetries") {
  CHECK(integral_signal(1, 1, 1, pi) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(integral_signal(1, 1, 1, 0) == 4.0);
  CHECK(integral_signal(1, 1, 0.5, pi / 2) == doctest::Approx(2.0).epsilon(1e-15));
  for (double ph : {0.3, 1.1, 2.9, 4.0}) {
    CHECK(integral_signal(0.7, 1.9, 0.8, ph) == doctest::Approx(integral_signal(0.7, 1.9, 0.8, -ph)));
    CHECK(integral_signal(0.7, 1.9, 0.8, ph) == doctest::Approx(integral_signal(1.9, 0.7, 0.8, ph)));
  }
  CHECK_THROWS_AS(integral_signal(-1, 1, 1, 0), InvalidParameter);
  CHECK_THROWS_AS(integral_signal(1, 1, 1.5, 0), InvalidParameter);
}

TEST_CASE("config validation") {
  PulseInterferenceConfig c;
  CHECK_NOTHROW(c.validate());
  c.pulse.width = 0;
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
  c = {};
  c.laser.sigma_s1 = 0.6;
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
  c = {};
  c.laser.alpha = -1;
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
  c = {};
  c.noise.sigma_zeta = -0.1;
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
  c = {};
  c.pulse.kind = PulseKind::flat_top;
  c.pulse.edge_width = 0;
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
}

TEST_CASE("draw_event noiseless limit") {
  auto c = quiet_config();
  RandomStream rng(7);
  for (int i = 0; i < 1000; ++i) {
    const auto ev = draw_event(rng, c);
    CHECK(ev.delta_phi >= 0.0);
    CHECK(ev.delta_phi < 2 * pi);
    CHECK(ev.integral_signal == doctest::Approx(2.0 + 2.0 * std::cos(ev.delta_phi)).epsilon(1e-14));
  }
}

TEST_CASE("draw_event invariants with noise") {
  PulseInterferenceConfig c;
  c.laser.sigma_s1 = c.laser.sigma_s2 = 0.3;
  c.noise.sigma_jitter = 5e-12;
  c.noise.sigma_zeta = 0.02;
  RandomStream rng(3);
  for (int i = 0; i < 20000; ++i) {
    const auto ev = draw_event(rng, c);
    REQUIRE(ev.s1 > 0.0);
    REQUIRE(ev.s2 > 0.0);
    const double s = ev.integral_signal - ev.zeta;
    const double r = 2.0 * std::sqrt(ev.s1 * ev.s2);
    CHECK(s >= ev.s1 + ev.s2 - r - 1e-12);
    CHECK(s <= ev.s1 + ev.s2 + r + 1e-12);
  }
}

TEST_CASE("draw_event support and determinism") {
  auto c = quiet_config();
  RandomStream rng(11);
  double lo = 10, hi = -10;
  for (int i = 0; i < 1'000'000; ++i) {
    const double s = draw_event(rng, c).integral_signal;
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  CHECK(lo < 1e-2);
  CHECK(hi > 4.0 - 1e-2);

  PulseInterferenceConfig n;
  n.noise.sigma_zeta = 0.01;
  n.noise.sigma_jitter = 1e-12;
  RandomStream a(99), b(99);
  for (int i = 0; i < 100; ++i) {
    const auto x = draw_event(a, n), y = draw_event(b, n);
    CHECK(x.integral_signal == y.integral_signal);
    CHECK(x.delta == y.delta);
  }
}

TEST_CASE("noiseless integral signal follows the arcsine law") {
  auto c = quiet_config();
  RandomStream rng(5);
  std::vector<double> v(200000);
  for (auto& x : v) x = draw_event(rng, c).integral_signal;
  std::sort(v.begin(), v.end());
  double ks = 0.0;
  const double n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = arcsine_cdf_0_4(v[i]);
    ks = std::max({ks, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
  }
  CHECK(ks < 0.01);
}

TEST_CASE("interference_waveform limits") {
  auto c = quiet_config();
  c.laser.alpha = 0.0;
  const TimeGrid g = default_grid(c, 0.0);
  const auto bright = interference_waveform(c, 0.0, 0.0, g);
  const auto dark = interference_waveform(c, pi, 0.0, g);
  const double t_ref = c.pulse.reference_time(c.laser.repetition_period);
  for (std::size_t i = 0; i < g.count; ++i) {
    const double t = bright.time(i) - t_ref;
    const double p = c.pulse.peak_power * std::exp(-t * t / (2 * c.pulse.width * c.pulse.width));
    CHECK(bright.samples[i] == doctest::Approx(4.0 * p).epsilon(1e-12));
    CHECK(std::abs(dark.samples[i]) < 1e-12);
  }
}

TEST_CASE("time-integrated waveform reproduces the integral signal") {
  auto c = quiet_config();
  c.laser.alpha = 0.0;
  TimeGrid g{0.0, c.pulse.width / 40.0, 641};
  g.dt = c.laser.repetition_period / 640.0;
  const Waveform ref = mean_level_waveform(c, g);
  const double norm = simpson(ref) / c.mean_level();  // integral of one pulse at unit power
  for (double ph : {0.0, 0.7, 2.0, pi}) {
    const auto w = interference_waveform(c, ph, 0.0, g);
    const double expect = integral_signal(1.0, 1.0, 1.0, ph);
    CHECK(simpson(w) / norm == doctest::Approx(expect).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("chirped waveform visibility matches the closed-form kappa") {
  auto c = quiet_config();
  c.laser.alpha = 4.0;
  TimeGrid g{0.0, 0.0, 4001};
  g.dt = c.laser.repetition_period / 4000.0;
  for (double delta : {0.0, 3e-12, 8e-12, 15e-12}) {
    const double i0 = simpson(interference_waveform(c, 0.0, delta, g));
    const double ipi = simpson(interference_waveform(c, pi, delta, g));
    const double p = simpson(mean_level_waveform(c, g)) / 2.0;
    const double kappa = (i0 - ipi) / (4.0 * p);
    CHECK(kappa == doctest::Approx(visibility_kappa(delta, 4.0, c.pulse.width)).epsilon(1e-6));
  }
}

TEST_CASE("waveform samples are non-negative and grid is validated") {
  PulseInterferenceConfig c;
  c.pulse.kind = PulseKind::flat_top;
  c.pulse.width = 1e-9;
  c.laser.repetition_period = 2e-9;
  const TimeGrid g = default_grid(c, 0.0);
  CHECK(g.dt <= c.pulse.resolution_scale() / 10.0 * (1 + 1e-12));
  CHECK(g.span() == doctest::Approx(c.laser.repetition_period));
  for (double ph : {0.0, 1.0, 3.0}) {
    const auto w = interference_waveform(c, ph, 7e-12, g, 0.8, 1.3);
    for (double x : w.samples) CHECK(x >= -1e-12);
  }
  CHECK_THROWS_AS(interference_waveform(c, 0.0, 0.0, TimeGrid{0, 1e-12, 10}), InvalidParameter);
  CHECK_THROWS_AS(interference_waveform(c, 0.0, 0.0, TimeGrid{0, 50e-12, 100}), InvalidParameter);
}

TEST_CASE("flat-top envelope and chirp") {
  PulseShape p{PulseKind::flat_top, 1e-9, 30e-12, 1.0};
  CHECK(p.envelope(0.0) == 1.0);
  CHECK(p.envelope(0.5e-9) == 1.0);
  CHECK(p.envelope(-30e-12) == doctest::Approx(std::exp(-0.5)));
  CHECK(p.envelope(1e-9 + 30e-12) == doctest::Approx(std::exp(-0.5)));
  CHECK(p.chirp_phase(100e-12, 4.0) == 0.0);
  CHECK(p.chirp_phase(-30e-12, 4.0) == doctest::Approx(1.0));
}
