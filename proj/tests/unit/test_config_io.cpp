#include <algorithm>
#include <cstring>
#include <functional>
#include <random>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "near.hpp"
#include "qcal/config.hpp"
#include "qcal/errors.hpp"
#include "qcal/experiment.hpp"
#include "qcal/io.hpp"

using namespace qcal;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_SUITE("key-value config") {
  TEST_CASE("values, comments and quotes") {
    const auto kv = KeyValueConfig::parse("# header\nmode = \"compare\"  # trailing\nhorizon = 2e-7\nseed = 7\n");
    CHECK(*kv.get_string("mode") == "compare");
    CHECK(*kv.get_double("horizon") == 2e-7);
    CHECK(*kv.get_uint("seed") == 7u);
    CHECK_FALSE(kv.get_double("absent").has_value());
    CHECK_NOTHROW(kv.require_all_consumed());
  }

  TEST_CASE("errors name the key and the line") {
    const auto kv = KeyValueConfig::parse("seed = 1\nphonon_temp = warm\n", "run.toml");
    const std::string msg = error_of([&] { (void)kv.get_double("phonon_temp"); });
    CHECK(contains(msg, "run.toml:2"));
    CHECK(contains(msg, "phonon_temp"));

    CHECK(contains(error_of([] { (void)KeyValueConfig::parse("a = 1\nb = 2\na = 3\n"); }), "line 1"));
    CHECK(contains(error_of([] { (void)KeyValueConfig::parse("a = 1\njust text\n", "c"); }), "c:2"));
    CHECK(contains(error_of([] { (void)KeyValueConfig::parse("[table]\n", "c"); }), "c:1"));
    CHECK(contains(error_of([] { (void)KeyValueConfig::parse("a = \"open\n", "c"); }), "a"));
    const auto neg = KeyValueConfig::parse("n_traj = -3\n");
    CHECK(contains(error_of([&] { (void)neg.get_uint("n_traj"); }), "n_traj"));
  }

  TEST_CASE("unread keys are reported") {
    const auto kv = KeyValueConfig::parse("seed = 1\ntypo_key = 3\n");
    (void)kv.get_uint("seed");
    CHECK(contains(error_of([&] { kv.require_all_consumed(); }), "typo_key"));
  }

  TEST_CASE("shortest decimal text round-trips exactly") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2e-12) == "2e-12");
    std::mt19937_64 gen(9);
    for (int i = 0; i < 10000; ++i) {
      std::uint64_t bits = gen();
      double v;
      std::memcpy(&v, &bits, sizeof v);
      if (!std::isfinite(v)) continue;
      const double back = std::strtod(format_double(v).c_str(), nullptr);
      CHECK(std::memcmp(&back, &v, sizeof v) == 0);
    }
  }
}

TEST_SUITE("experiment config") {
  TEST_CASE("echo round-trips every field") {
    ExperimentConfig c;
    c.params.drive_strength = 0.037;
    c.params.coupling = std::sqrt(0.07);
    c.params.phonon_temp = 0.093;
    c.mode = Mode::trajectories;
    c.horizon = 3.3e-7;
    c.dt = 1.7e-11;
    c.n_traj = 123;
    c.seed = 99;
    c.frame = Frame::lab;
    c.stride = 17;
    c.initial_x = InitialX::stationary_ou;
    c.threads = 3;
    c.grid = {0.001, 0.05, 3};
    c.dt_me = 2e-12;
    c.fp_grid = {0.002, 0.2, 999};
    c.route = CorrectionRoute::spectral;
    c.bin_width = 7e-4;
    const std::string text = to_config_text(c);
    const auto kv = KeyValueConfig::parse(text);
    const ExperimentConfig back = read_experiment(kv);
    CHECK_NOTHROW(kv.require_all_consumed());
    CHECK(to_config_text(back) == text);
    CHECK(back.params == c.params);
    CHECK(back.seed == c.seed);
    CHECK(back.grid.m == 3);
    CHECK(back.fp_grid.n == 999u);
  }

  TEST_CASE("mode requirements and validation") {
    CHECK(contains(error_of([] { (void)read_experiment(KeyValueConfig::parse("mode = \"compare\"\n")); }), "seed"));
    CHECK_NOTHROW(read_experiment(KeyValueConfig::parse("mode = \"fp-reduce\"\n")));
    CHECK_THROWS_AS(read_experiment(KeyValueConfig::parse("mode = \"fp-reduce\"\nhorizon = 0\n")), ConfigError);
    CHECK_THROWS_AS(read_experiment(KeyValueConfig::parse("mode = \"fp-reduce\"\nfp_nodes = 1\n")), ConfigError);
    CHECK_THROWS_AS(read_experiment(KeyValueConfig::parse("mode = \"sideways\"\n")), ConfigError);
    const std::string detuned = "mode = \"fp-reduce\"\ndrive_frequency_ratio = 0.95\n";
    CHECK_THROWS_AS(read_experiment(KeyValueConfig::parse(detuned + "frame = \"rotating\"\n")), ConfigError);
    CHECK_NOTHROW(read_experiment(KeyValueConfig::parse(detuned + "frame = \"lab\"\n")));
  }

  TEST_CASE("automatic steps and histogram anchor") {
    ExperimentConfig c;
    CHECK(c.resolved_bin_width() == near(c.params.phonon_temp / 100.0, 1e-15));
    const double a = bin_anchor(c);
    const double k = (c.params.phonon_temp - a) / c.resolved_bin_width() - 0.5;
    CHECK(std::abs(k - std::round(k)) < 1e-9);
    c.frame = Frame::lab;
    CHECK(c.resolved_dt() == near(1.0 / (1000.0 * c.params.omega()), 1e-15));
    c.dt = 3e-12;
    CHECK(c.resolved_dt() == 3e-12);
  }
}

TEST_SUITE("csv and json") {
  TEST_CASE("csv headers") {
    CHECK(first_line(trajectory_csv({})) == "t_s,Te_K,pop_excited,n_down,n_up");
    CHECK(first_line(final_states_csv(EnsembleResult{}, 1e-7)) == "t_s,Te_K,pop_excited,n_down,n_up");
    HybridDensity rho;
    rho.grid = build_grid(PhysicalParams::defaults(), 0.0, 0.01, 1);
    rho.blocks.assign(rho.grid.n, Mat2::Identity());
    const std::string d = density_csv(rho);
    CHECK(first_line(d) == "X_K2,F,rho00,rho11,Re_rho01,Im_rho01");
    CHECK(std::count(d.begin(), d.end(), '\n') == static_cast<long>(rho.grid.n + 1));
    CHECK(first_line(fp_csv({}, StationaryDensity{})) == "X,b,D,j1,j2,delta1,delta2,F_s");
  }

  TEST_CASE("histogram csv aligns columns on a shared binning") {
    Histogram a{0.10, 0.01, {10.0, 20.0, 70.0}};
    Histogram b{0.11, 0.01, {50.0, 50.0}};
    const std::string s = histogram_csv({"mc", "me"}, {a, b});
    auto centre = [](int k) { return format_double(0.10 + (k + 0.5) * 0.01); };
    CHECK(s == "Te_K,mc,me\n" + centre(0) + ",10,0\n" + centre(1) + ",20,50\n" + centre(2) + ",70,50\n");
    CHECK_THROWS_AS(histogram_csv({"mc"}, {a, b}), ConfigError);
    Histogram c{0.10, 0.02, {50.0}};
    CHECK_THROWS_AS(histogram_csv({"mc", "x"}, {a, c}), ConfigError);
  }

  TEST_CASE("fp summary structure") {
    ExperimentConfig c;
    c.mode = Mode::fp_reduce;
    c.fp_grid = {2e-3, 0.36, 300};
    const auto r = run_fp(c);
    const auto j = nlohmann::json::parse(fp_summary_json(c, r));
    CHECK(j.at("mode") == "fp-reduce");
    CHECK(j.at("route") == "resolvent");
    CHECK(j.at("T_S").get<double>() == r.t_s);
    CHECK(j.at("params").at("coupling_squared").get<double>() == near(0.1, 1e-15));
    CHECK(j.at("F_s").contains("mean_Te_K"));
    CHECK_FALSE(j.at("multistable").get<bool>());
  }
}

TEST_SUITE("manifest") {
  TEST_CASE("git blob ids") {
    CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
    CHECK(git_blob_sha1("phonon_temp = 0.1\n") == "7a7c6d9c71b6c6f840e9368505b658437dc40e52");
  }

  TEST_CASE("round trip and tamper detection") {
    Manifest m;
    m.command = "simulate";
    m.arguments = {"mc=on"};
    m.config_text = to_config_text(ExperimentConfig{});
    m.config_sha1 = git_blob_sha1(m.config_text);
    m.inputs = {{"run.toml", git_blob_sha1("seed = 1\n")}};
    m.outputs = {"summary.json", "trajectories.csv"};
    const std::string text = manifest_json(m);
    const Manifest back = parse_manifest(text);
    CHECK(back.command == m.command);
    CHECK(back.arguments == m.arguments);
    CHECK(back.config_text == m.config_text);
    CHECK(back.outputs == m.outputs);
    REQUIRE(back.inputs.size() == 1);
    CHECK(back.inputs[0].sha1 == m.inputs[0].sha1);
    CHECK(manifest_json(back) == text);

    auto j = nlohmann::json::parse(text);
    j["config_text"] = m.config_text + "# edited\n";
    CHECK_THROWS_AS(parse_manifest(j.dump()), ConfigError);
    CHECK_THROWS_AS(parse_manifest("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_manifest("{\"command\": \"simulate\"}"), ConfigError);
  }
}
