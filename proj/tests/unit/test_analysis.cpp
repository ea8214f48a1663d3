#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "../oracles.hpp"
#include "mldrive/analysis.hpp"
#include "mldrive/errors.hpp"

using namespace mldrive;
using std::numbers::pi;

namespace {

Waveform synth(double f, int periods, int per_period, const std::function<double(double)>& g) {
  Waveform w{1.0 / (f * per_period), {}};
  for (int i = 0; i < periods * per_period; ++i) w.samples.push_back(g(w.time_at(i)));
  return w;
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("pure sine has no distortion") {
    const auto w = synth(50.0, 2, 2000, [](double t) { return 3.0 * std::sin(2 * pi * 50 * t); });
    const auto s = analysis::spectrum_of(w, 50.0);
    CHECK(s.magnitude(1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(s.thd_pct < 0.1);
    CHECK(std::abs(s.phase_fund) < 1e-12);
    CHECK(s.magnitudes.size() == 100);
  }

  TEST_CASE("square wave against the truncated odd-harmonic series") {
    Waveform w{1.0 / (50.0 * 10000), {}};
    for (int i = 0; i < 20000; ++i) w.samples.push_back(i % 5000 == 0 ? 0.0 : (i % 10000 < 5000 ? 1.0 : -1.0));
    const auto s = analysis::spectrum_of(w, 50.0, 99);
    // sum over odd n = 3..99 of 1/n^2, evaluated independently
    CHECK(s.thd_pct == doctest::Approx(47.82266374633585).epsilon(1e-4));
    CHECK(s.magnitude(1) == doctest::Approx(4.0 / pi).epsilon(1e-5));
    CHECK(s.magnitude(2) < 1e-9);
    CHECK(s.magnitude(3) == doctest::Approx(4.0 / (3 * pi)).epsilon(1e-4));
  }

  TEST_CASE("fundamental matches a direct projection") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    const double a = g(rng), b = g(rng), c = g(rng);
    const auto w = synth(60.0, 3, 777, [&](double t) {
      return a * std::sin(2 * pi * 60 * t + 0.3) + b * std::cos(2 * pi * 180 * t) + c;
    });
    const auto s = analysis::spectrum_of(w, 60.0, 10);
    const auto h = oracle::harmonic(w.samples, w.dt, 60.0);
    CHECK(s.magnitude(1) == doctest::Approx(h[0]).epsilon(1e-12));
    CHECK(s.phase_fund == doctest::Approx(h[1]).epsilon(1e-12));
    CHECK(s.magnitude(3) == doctest::Approx(std::abs(b)).epsilon(1e-10));
  }

  TEST_CASE("THD is scale invariant") {
    const auto base = synth(50.0, 2, 3000, [](double t) {
      return std::sin(2 * pi * 50 * t) + 0.2 * std::sin(2 * pi * 250 * t + 1.0) +
             0.05 * std::sin(2 * pi * 1150 * t);
    });
    const double ref = analysis::spectrum_of(base, 50.0).thd_pct;
    CHECK(ref == doctest::Approx(100.0 * std::hypot(0.2, 0.05)).epsilon(1e-9));
    for (double k : {1e-3, 0.7, 250.0}) {
      Waveform scaled = base;
      for (auto& x : scaled.samples) x *= k;
      CHECK(std::abs(analysis::spectrum_of(scaled, 50.0).thd_pct - ref) <= 1e-9 * ref);
    }
  }

  TEST_CASE("Parseval bound") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> amp(20);
      for (auto& x : amp) x = u(rng);
      const auto w = synth(50.0, 2, 1000, [&](double t) {
        double v = 0.0;
        for (int n = 1; n <= 20; ++n) v += amp[n - 1] * std::sin(2 * pi * 50 * n * t + n);
        return v;
      });
      const auto s = analysis::spectrum_of(w, 50.0, 40);
      double bins = 0.0;
      for (double m : s.magnitudes) bins += 0.5 * m * m;
      const double ms = analysis::mean_square(w);
      CHECK(bins <= ms * (1.0 + 1e-6));
      CHECK(bins == doctest::Approx(ms).epsilon(1e-6));
    }
  }

  TEST_CASE("phase lag") {
    const auto ref = synth(50.0, 2, 4000, [](double t) { return std::sin(2 * pi * 50 * t); });
    CHECK(analysis::fundamental_phase_lag(ref, ref, 50.0) == 0.0);
    const auto quarter =
        synth(50.0, 2, 4000, [](double t) { return std::sin(2 * pi * 50 * (t - 0.005)); });
    CHECK(analysis::fundamental_phase_lag(quarter, ref, 50.0) == doctest::Approx(pi / 2));
    for (double tau : {1e-5, 3.3e-4, -2e-3, 7e-3}) {
      const auto shifted =
          synth(50.0, 2, 4000, [&](double t) { return 0.8 * std::sin(2 * pi * 50 * (t - tau)); });
      CHECK(std::abs(analysis::fundamental_phase_lag(shifted, ref, 50.0) - 2 * pi * 50 * tau) <
            1e-6);
    }
    // wrapped into (-pi, pi]
    const auto half =
        synth(50.0, 2, 4000, [](double t) { return std::sin(2 * pi * 50 * (t - 0.01)); });
    const double lag = analysis::fundamental_phase_lag(half, ref, 50.0);
    CHECK(lag > -pi);
    CHECK(lag <= pi);
    CHECK(std::abs(lag) == doctest::Approx(pi));
  }

  TEST_CASE("window and fundamental errors") {
    const auto odd = synth(50.0, 2, 1000, [](double t) { return std::sin(2 * pi * 50 * t); });
    Waveform trimmed = odd;
    trimmed.samples.resize(1500);
    CHECK_THROWS_AS(analysis::spectrum_of(trimmed, 50.0), AnalysisError);
    Waveform one = odd;
    one.samples.resize(1000);
    CHECK_THROWS_AS(analysis::spectrum_of(one, 50.0), AnalysisError);
    const auto dc = synth(50.0, 2, 1000, [](double) { return 1.0; });
    CHECK_THROWS_AS(analysis::spectrum_of(dc, 50.0), AnalysisError);
    CHECK_THROWS_AS(analysis::fundamental_phase_lag(dc, odd, 50.0), AnalysisError);
  }

  TEST_CASE("exports") {
    analysis::Spectrum s;
    s.f_fund = 50.0;
    s.magnitudes = {1.0, 0.5};
    std::ostringstream a;
    analysis::write_spectrum_csv(a, s);
    CHECK(a.str() == "n,f_hz,magnitude\n1,50,1\n2,100,0.5\n");
    std::ostringstream b;
    analysis::write_summary_csv(b, {{"PH/NATURAL", 24.5, 0.01}});
    CHECK(b.str() == "method,thd_pct,phase_lag_rad\nPH/NATURAL,24.500000,0.010000000\n");
  }
}
