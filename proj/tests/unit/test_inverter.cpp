#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "mldrive/errors.hpp"
#include "mldrive/inverter.hpp"
#include "mldrive/modulation.hpp"

using namespace mldrive;

TEST_SUITE("inverter") {
  TEST_CASE("linear level map") {
    const inverter::InverterConfig inv{400.0, 5};
    CHECK(inverter::level_voltage(0, inv) == 0.0);
    CHECK(inverter::level_voltage(2, inv) == 200.0);
    CHECK(inverter::level_voltage(-1, inv) == -100.0);
    CHECK(inv.step_voltage() == 100.0);
    CHECK_THROWS_AS(inverter::level_voltage(3, inv), IntegrityError);
    CHECK_THROWS_AS(inverter::level_voltage(-3, inv), IntegrityError);
  }

  TEST_CASE("validation") {
    CHECK_THROWS_AS(inverter::validate({0.0, 5}), ConfigurationError);
    CHECK_THROWS_AS(inverter::validate({400.0, 4}), ConfigurationError);
    CHECK_THROWS_AS(inverter::synthesize_voltage({1e-5, {0, 4}}, {400.0, 5}), IntegrityError);
  }

  TEST_CASE("constant step between adjacent levels") {
    for (int m : {3, 5, 7, 9}) {
      const inverter::InverterConfig inv{600.0, m};
      const int top = (m - 1) / 2;
      for (int l = -top; l < top; ++l) {
        CHECK(inverter::level_voltage(l + 1, inv) - inverter::level_voltage(l, inv) ==
              doctest::Approx(600.0 / (m - 1)));
      }
    }
  }

  TEST_CASE("full period at m_a = 1 has five voltages and zero mean") {
    for (auto s : {modulation::Sampling::Natural, modulation::Sampling::Symmetric,
                   modulation::Sampling::Asymmetric, modulation::Sampling::CrossingCorrected}) {
      modulation::ModulationConfig cfg;
      cfg.sampling = s;
      // off the reference peaks, where the comparator tie rule is one-sided
      const double dt = 1.0 / (50.0 * (21 * 400 + 2));
      const auto lv = modulation::generate_levels(cfg, 0.02, dt);
      const auto w = inverter::synthesize_voltage(lv, {400.0, 5});
      CHECK(w.dt == lv.dt);
      CHECK(w.size() == lv.levels.size());
      std::set<double> values(w.samples.begin(), w.samples.end());
      CHECK(values == std::set<double>{-200.0, -100.0, 0.0, 100.0, 200.0});
      const double mean = std::accumulate(w.samples.begin(), w.samples.end(), 0.0) /
                          static_cast<double>(w.size());
      if (s == modulation::Sampling::Symmetric) {
        // not half-wave antisymmetric at odd m_f; zero mean up to the time grid
        CHECK(std::abs(mean) <= 2.0 * 100.0 / static_cast<double>(w.size()));
      } else {
        CHECK(std::abs(mean) < 1e-9 * 400.0);
      }
    }
  }

  TEST_CASE("export") {
    std::ostringstream out;
    inverter::write_waveform_csv(out, Waveform{0.25, {100.0, -200.0}});
    CHECK(out.str() == "t,v\n0,100\n0.25,-200\n");
  }
}
