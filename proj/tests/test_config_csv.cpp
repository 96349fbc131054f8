#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pirm/config.hpp"
#include "pirm/csv.hpp"

using namespace pirm;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text, const fs::path& base = {}) {
  std::istringstream in(text);
  return parse_config(in, base);
}

}  // namespace

TEST_CASE("format_number prints the shortest round-trip form") {
  CHECK(csv::format_number(0.1) == "0.1");
  CHECK(csv::format_number(1.0) == "1");
  CHECK(csv::format_number(-0.0089) == "-0.0089");
  CHECK(csv::format_number(1e-300) == "1e-300");
  CHECK(csv::format_number(NAN) == "nan");
  CHECK(csv::format_number(-INFINITY) == "-inf");
  for (double v : {0.1 + 0.2, M_PI, 1.0 / 3.0, 123456789.125, -2.5e-17}) {
    CHECK(csv::parse_number(csv::format_number(v)) == v);
  }
}

TEST_CASE("parse_number is strict") {
  CHECK(csv::parse_number(" 2.5 ") == 2.5);
  CHECK(csv::parse_number("+1e3") == 1000.0);
  CHECK_THROWS_AS(csv::parse_number(""), std::domain_error);
  CHECK_THROWS_AS(csv::parse_number("1.5x"), std::domain_error);
  CHECK_THROWS_AS(csv::parse_number("abc"), std::domain_error);
}

TEST_CASE("split and read_table") {
  CHECK(csv::split(" a, b ,c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(csv::split("") == std::vector<std::string>{""});
  std::istringstream ok("x,y\n1,2\n\n3,4\n");
  CHECK(csv::read_table(ok, "x,y").size() == 2);
  std::istringstream short_row("x,y\n1\n");
  CHECK_THROWS_AS(csv::read_table(short_row, "x,y"), std::domain_error);
  std::istringstream wrong("y,x\n1,2\n");
  CHECK_THROWS_AS(csv::read_table(wrong, "x,y"), std::domain_error);
}

TEST_CASE("config defaults") {
  const auto cfg = parse("");
  CHECK(cfg.all_variants);
  CHECK(cfg.scenario.prior_mean == 0.5);
  CHECK(cfg.scenario.prior_sd == 0.25);
  CHECK(cfg.scenario.iterations == 20);
  CHECK(cfg.scenario.runs == 20000);
  CHECK_FALSE(cfg.scenario.prior.has_value());
}

TEST_CASE("config parses every scenario key") {
  const auto cfg = parse(
      "# comment\n"
      "prior_mean = 0.1\nprior_sd=0.2\nslope_log_mean=0.3\nslope_log_sd=0.4\n"
      "s1_log10_low=0.5\ns1_log10_high=0.6\nnoise_sd=0.7\nc0=0.8\n"
      "iterations=9\nruns=10\nbatches=2\nstart_mode=uniform\nalgorithm=standard\nseed=42\n");
  const auto& sc = cfg.scenario;
  CHECK_FALSE(cfg.all_variants);
  CHECK(sc.prior_mean == 0.1);
  CHECK(sc.prior_sd == 0.2);
  CHECK(sc.slope_log_mean == 0.3);
  CHECK(sc.slope_log_sd == 0.4);
  CHECK(sc.s1_log10_low == 0.5);
  CHECK(sc.s1_log10_high == 0.6);
  CHECK(sc.noise_sd == 0.7);
  CHECK(sc.c0 == 0.8);
  CHECK(sc.iterations == 9);
  CHECK(sc.runs == 10);
  CHECK(sc.batches == 2);
  CHECK(sc.start_mode == StartMode::Uniform);
  CHECK(sc.algorithm == Algorithm::Standard);
  CHECK(sc.seed == 42);
}

TEST_CASE("config rejects malformed input") {
  CHECK_THROWS_AS(parse("bogus=1\n"), ConfigError);
  CHECK_THROWS_AS(parse("c0=0.3\nc0=0.4\n"), ConfigError);
  CHECK_THROWS_AS(parse("c0\n"), ConfigError);
  CHECK_THROWS_AS(parse("c0=abc\n"), ConfigError);
  CHECK_THROWS_AS(parse("runs=-5\n"), ConfigError);
  CHECK_THROWS_AS(parse("runs=2.5\n"), ConfigError);
  CHECK_THROWS_AS(parse("c0=0\n"), ConfigError);
  CHECK_THROWS_AS(parse("start_mode=random\n"), ConfigError);
  CHECK_THROWS_AS(parse("algorithm=fast\n"), ConfigError);
  CHECK_THROWS_AS(parse("prior.kind=beta\n"), ConfigError);
  CHECK_THROWS_AS(parse("prior.kind=uniform\nprior.mu=1\n"), ConfigError);
  CHECK_THROWS_AS(parse("prior.kind=kde\n"), ConfigError);
  CHECK_THROWS_AS(parse("prior.kind=gaussian\nprior.sigma=0\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/pirm.conf"), ConfigError);
}

TEST_CASE("config prior kinds") {
  SUBCASE("gaussian overrides") {
    const auto cfg = parse("prior.kind=gaussian\nprior.mu=1\nprior.sigma=2\n");
    const auto& g = std::get<GaussianPrior>(*cfg.scenario.prior);
    CHECK(g.mean() == 1.0);
    CHECK(g.sd() == 2.0);
  }
  SUBCASE("uniform") {
    CHECK(std::holds_alternative<UniformPrior>(*parse("prior.kind=uniform\n").scenario.prior));
  }
  SUBCASE("file-backed kinds resolve paths against the config directory") {
    const fs::path dir = fs::temp_directory_path() / "pirm_config_test";
    fs::create_directories(dir);
    std::ofstream(dir / "samples.txt") << "0.1\n0.5\n0.9\n";
    std::ofstream(dir / "mix.csv") << "weight,mean,sigma\n0.5,0,1\n0.5,1,1\n";
    std::ofstream(dir / "table.csv") << "x,log_density\n0,0\n1,2\n";
    std::ofstream(dir / "run.conf") << "prior.kind=kde\nprior.samples_path=samples.txt\nprior.bandwidth=0.2\n";

    const auto kde = load_config(dir / "run.conf");
    const auto& k = std::get<GaussianMixturePrior>(*kde.scenario.prior);
    CHECK(k.size() == 3);
    CHECK(k.sigma() == 0.2);

    const auto silverman = parse("prior.kind=kde\nprior.samples_path=samples.txt\n", dir);
    CHECK(std::get<GaussianMixturePrior>(*silverman.scenario.prior).sigma() > 0.0);

    const auto mix = parse("prior.kind=mixture\nprior.mixture_path=mix.csv\n", dir);
    CHECK(std::get<GaussianMixturePrior>(*mix.scenario.prior).size() == 2);

    const auto tab = parse("prior.kind=tabulated\nprior.grid_path=table.csv\n", dir);
    CHECK(std::get<TabulatedPrior>(*tab.scenario.prior).slope_bound() == 2.0);
    const auto declared = parse("prior.kind=tabulated\nprior.grid_path=table.csv\nprior.J=5\n", dir);
    CHECK(std::get<TabulatedPrior>(*declared.scenario.prior).slope_bound() == 5.0);
    CHECK_THROWS_AS(parse("prior.kind=tabulated\nprior.grid_path=table.csv\nprior.J=1\n", dir), ConfigError);
    CHECK_THROWS_AS(parse("prior.kind=mixture\nprior.mixture_path=missing.csv\n", dir), ConfigError);
    fs::remove_all(dir);
  }
}
