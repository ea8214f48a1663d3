#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mldrive/config.hpp"
#include "mldrive/errors.hpp"
#include "mldrive/scenario.hpp"

using namespace mldrive;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mldrive_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string error_of(const std::string& text) {
  try {
    config::from_file(config::KeyValueFile::parse(text));
  } catch (const ConfigurationError& e) {
    return e.what();
  }
  return "";
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MLDRIVE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kOpenLoop = R"(
[scenario]
mode = OPEN_LOOP_SPWM
[modulation]
levels_m = 5
disposition = PO
sampling = ASYM
[analysis]
samples_per_carrier = 40
)";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("key-value parsing") {
    const auto f = config::KeyValueFile::parse(
        "# comment\n[scenario]\nmode = TABLE1_SWEEP ; trailing\n\n[drive]\n  w_ref=  80 \n");
    REQUIRE(f.has("scenario.mode"));
    CHECK(f.entries().at("scenario.mode").value == "TABLE1_SWEEP");
    CHECK(f.entries().at("drive.w_ref").value == "80");
    CHECK(f.entries().at("drive.w_ref").line == 6);

    CHECK_THROWS_WITH_AS(config::KeyValueFile::parse("x = 1\n"), doctest::Contains("line 1"),
                         ConfigurationError);
    CHECK_THROWS_WITH_AS(config::KeyValueFile::parse("[a]\nx = 1\nx = 2\n"),
                         doctest::Contains("line 3"), ConfigurationError);
    CHECK_THROWS_WITH_AS(config::KeyValueFile::parse("[a]\nnonsense\n"),
                         doctest::Contains("line 2"), ConfigurationError);
    CHECK_THROWS_AS(config::KeyValueFile::read("/nonexistent/mldrive.ini"), ConfigurationError);
  }

  TEST_CASE("defaults and overrides") {
    const auto cfg = config::from_file(config::KeyValueFile::parse(""));
    CHECK(cfg.mode == config::Mode::OpenLoopSPWM);
    CHECK(cfg.seed == 1);
    CHECK(cfg.analysis.n_harmonics == 100);
    CHECK(cfg.controller == config::ControllerKind::NeuroFuzzy);

    const auto c2 = config::from_file(config::KeyValueFile::parse(
        "[scenario]\nseed = 9\n[modulation]\nlevels_m = 7\n[training]\nspeeds = 50, 90\n"));
    CHECK(c2.seed == 9);
    CHECK(c2.training.seed == 9);
    CHECK(c2.drive.modulation.levels_m == 7);
    CHECK(c2.drive.inverter.levels_m == 7);
    CHECK(c2.training.speeds == std::vector<double>{50.0, 90.0});
  }

  TEST_CASE("errors name the offending line") {
    CHECK(error_of("[scenario]\nbogus = 1\n").find("line 2") != std::string::npos);
    CHECK(error_of("[modulation]\n\nm_a = abc\n").find("line 3") != std::string::npos);
    CHECK(error_of("[modulation]\ndisposition = XYZ\n").find("line 2") != std::string::npos);
    // validation failures too
    CHECK(error_of("[scenario]\nmode = OPEN_LOOP_SPWM\n[modulation]\nm_a = 1.5\n")
              .find("line 4") != std::string::npos);
    CHECK(error_of("[scenario]\nmode = CLOSED_LOOP_DRIVE\n[control]\nblend = 2\n").find("line 4") !=
          std::string::npos);
    CHECK(error_of("[analysis]\nn_harmonics = 0\n") != "");
  }

  TEST_CASE("fnv1a") {
    CHECK(config::fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(config::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(config::fnv1a("foobar") == 0x85944171f73967e8ULL);
  }

  TEST_CASE("open-loop run is reproducible and lists its files") {
    auto cfg = config::from_file(config::KeyValueFile::parse(kOpenLoop));
    const auto a = scratch("open_a");
    const auto b = scratch("open_b");
    cfg.output_dir = a.string();
    const auto ra = scenario::run_scenario(cfg, 42);
    cfg.output_dir = b.string();
    const auto rb = scenario::run_scenario(cfg, 42);
    CHECK(ra.files == rb.files);
    REQUIRE(ra.files.size() >= 4);
    for (const auto& f : ra.files) {
      CHECK(fs::exists(a / f));
      CHECK(slurp(a / f) == slurp(b / f));
    }
    const auto manifest = slurp(a / "manifest.txt");
    CHECK(manifest == slurp(b / "manifest.txt"));
    CHECK(manifest.find("config_fnv1a 000000000000002a") != std::string::npos);
    CHECK(manifest.find("module modulation 1.0") != std::string::npos);
    CHECK(manifest.find("module cli 1.0") != std::string::npos);
    for (const auto& f : ra.files) {
      if (f != "manifest.txt") CHECK(manifest.find("file " + f + " ") != std::string::npos);
    }
    CHECK(slurp(a / "summary.csv").find("PO/ASYM") != std::string::npos);
  }

  TEST_CASE("zero speed reference keeps the motor at rest") {
    auto cfg = config::from_file(config::KeyValueFile::parse(
        "[scenario]\nmode = CLOSED_LOOP_DRIVE\nduration = 0.2\n[drive]\nw_ref = 0\n"
        "[control]\ncontroller = PI\n"));
    const auto dir = scratch("rest");
    cfg.output_dir = dir.string();
    scenario::run_scenario(cfg, 0);
    std::istringstream traj(slurp(dir / "trajectory.csv"));
    std::string line;
    std::getline(traj, line);
    CHECK(line == "t,omega,i,v_applied,torque");
    int rows = 0;
    while (std::getline(traj, line)) {
      ++rows;
      CHECK(line.substr(line.find(',')) == ",0,0,0,0");
    }
    CHECK(rows > 10);
  }

  TEST_CASE("command line exit codes") {
    const auto dir = scratch("cli");
    {
      std::ofstream(dir / "ok.ini") << kOpenLoop;
      std::ofstream(dir / "bad.ini") << "[modulation]\nlevels_m = 4\n";
      std::ofstream(dir / "diverge.ini")
          << "[scenario]\nmode = TRAIN_CONTROLLER\n[training]\nlr = 1e6\nepochs = 50\n";
    }
    const auto out = (dir / "out").string();
    CHECK(run_cli("run " + (dir / "ok.ini").string() + " --quiet --output-dir " + out) == 0);
    CHECK(fs::exists(dir / "out" / "manifest.txt"));
    CHECK(run_cli("run " + (dir / "bad.ini").string() + " -q --output-dir " + out) == 2);
    CHECK(run_cli("run " + (dir / "missing.ini").string()) == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("run " + (dir / "diverge.ini").string() + " -q --output-dir " + out) == 3);

    // environment variable beats the config, the flag beats both
    const auto env_out = dir / "env";
    const std::string with_env = "MLDRIVE_OUTPUT_DIR=" + env_out.string() + " ";
    const std::string cli = MLDRIVE_CLI_PATH;
    CHECK(std::system((with_env + cli + " run " + (dir / "ok.ini").string() + " -q").c_str()) == 0);
    CHECK(fs::exists(env_out / "manifest.txt"));
    const auto flag_out = dir / "flag";
    CHECK(std::system((with_env + cli + " run " + (dir / "ok.ini").string() + " -q --output-dir " +
                       flag_out.string())
                          .c_str()) == 0);
    CHECK(fs::exists(flag_out / "manifest.txt"));
    CHECK(slurp(flag_out / "voltage.csv") == slurp(env_out / "voltage.csv"));
  }
}
