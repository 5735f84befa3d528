#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "aerostp/cli.hpp"
#include "aerostp/io.hpp"

using namespace aerostp;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "aerostp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("aerostp_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    write_text_file(file(name), text);
    return file(name);
  }

 private:
  fs::path path_;
};

const std::string kBaseline = R"(layers:
  - {density: 1.0e-5, altitude: 100}
channel:
  beta: 0.7
)";

const std::string kTwoLayer = R"(layers:
  - {density: 1.0e-5, altitude: 100}
  - {density: 1.0e-5, altitude: 200}
)";

std::string baseline_at(double h) {
  return "layers:\n  - {density: 1.0e-5, altitude: " + std::to_string(h) + "}\n";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("analyze writes stp, association and params") {
  TempDir dir;
  const auto cfg = dir.write("baseline.yaml", kBaseline);
  const auto r = run({"analyze", "-c", cfg});
  REQUIRE(r.code == kExitOk);
  const auto j = Json::parse(r.out);
  CHECK(j.contains("stp"));
  CHECK(j.contains("association"));
  CHECK(j.contains("params"));
  CHECK(j["stp"].get<double>() == doctest::Approx(0.6448496883).epsilon(1e-8));
  CHECK(j["association"]["layer1_los"].get<double>() +
            j["association"]["layer1_nlos"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(j["conditional_stp"]["layer1_los"].size() == 4);

  const auto out = dir.file("a.json");
  REQUIRE(run({"analyze", "-c", cfg, "-o", out}).code == kExitOk);
  CHECK(fs::exists(out));
  CHECK(fs::exists(manifest_path(out)));
}

TEST_CASE("config errors exit 2") {
  TempDir dir;
  auto r = run({"analyze", "-c",
                dir.write("a.yaml", "layers:\n  - {density: 1.0e-5, altitude: 100}\n"
                                    "channel:\n  alpha_los: 1.9\n")});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("alpha_los must be > 2") != std::string::npos);
  CHECK(r.err.find(":4:") != std::string::npos);

  r = run({"analyze", "-c",
           dir.write("m.yaml", "layers:\n  - {density: 1.0e-5, altitude: 100}\n"
                               "channel:\n  m_los: 2.5\n")});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("integer") != std::string::npos);

  CHECK(run({"analyze", "-c", dir.file("missing.yaml")}).code == kExitConfig);
  CHECK(run({"analyze"}).code == kExitConfig);
  CHECK(run({"frobnicate"}).code == kExitConfig);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("simulate enforces the minimum trial count") {
  TempDir dir;
  const auto cfg = dir.write("baseline.yaml", kBaseline);
  const auto r = run({"simulate", "-c", cfg, "--trials", "10"});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("at least 100") != std::string::npos);
}

TEST_CASE("simulate output is byte-identical across runs and thread counts") {
  TempDir dir;
  const auto cfg = dir.write("baseline.yaml", kBaseline);
  const auto a = dir.file("a.json");
  const auto b = dir.file("b.json");
  const auto c = dir.file("c.json");
  REQUIRE(run({"simulate", "-c", cfg, "--trials", "300", "--seed", "5", "-o", a}).code == 0);
  REQUIRE(run({"simulate", "-c", cfg, "--trials", "300", "--seed", "5", "-o", b}).code == 0);
  REQUIRE(run({"simulate", "-c", cfg, "--trials", "300", "--seed", "5", "--threads", "3", "-o", c})
              .code == 0);
  CHECK(read_text_file(a) == read_text_file(b));
  CHECK(read_text_file(a) == read_text_file(c));
  const auto j = Json::parse(read_text_file(a));
  CHECK(j["stp"]["trials"] == 300);
  CHECK(j["stp"].contains("stderr"));
  CHECK(j["stp"].contains("empty_windows"));
  CHECK(j["seed"] == 5);

  const auto m = manifest_from_json(Json::parse(read_text_file(manifest_path(a))));
  CHECK(m.config_sha256 == sha256_hex(kBaseline));
  CHECK(m.seed == std::optional<std::uint64_t>(5));
  CHECK(m.outputs == std::vector<std::string>{a});
  CHECK(m.command_line.size() == 10);
}

TEST_CASE("re-running a manifest reproduces the output") {
  TempDir dir;
  const auto cfg = dir.write("baseline.yaml", kBaseline);
  const auto out = dir.file("s.json");
  REQUIRE(run({"simulate", "-c", cfg, "--trials", "200", "-o", out}).code == 0);
  const std::string first = read_text_file(out);
  const auto m = manifest_from_json(Json::parse(read_text_file(manifest_path(out))));
  fs::remove(out);
  fs::remove(manifest_path(out));
  std::vector<std::string> args(m.command_line.begin() + 1, m.command_line.end());
  REQUIRE(run(args).code == 0);
  CHECK(read_text_file(out) == first);
}

TEST_CASE("simulate agrees with analyze on the single-layer network") {
  TempDir dir;
  const auto cfg = dir.write("baseline.yaml", kBaseline);
  const auto a = run({"analyze", "-c", cfg});
  const auto s = run({"simulate", "-c", cfg, "--trials", "100000"});
  REQUIRE(a.code == 0);
  REQUIRE(s.code == 0);
  const double analytic = Json::parse(a.out)["stp"].get<double>();
  const auto mc = Json::parse(s.out)["stp"];
  CHECK(std::abs(mc["mean"].get<double>() - analytic) <= 3.0 * mc["stderr"].get<double>());
}

TEST_CASE("1-D sweep CSV header and manifest") {
  TempDir dir;
  const auto cfg = dir.write("baseline.yaml", kBaseline);
  const auto out = dir.file("h.csv");
  const auto r = run({"sweep", "-c", cfg, "--grid", "h1=50:200:3", "--engines", "analytic,mc",
                      "--trials", "200", "-o", out});
  REQUIRE(r.code == 0);
  std::ifstream in(out);
  const auto t = read_csv(in);
  REQUIRE(t.header.size() > 4);
  CHECK(t.header[0] == "h1");
  CHECK(t.header[1] == "stp_analytic");
  CHECK(t.header[2] == "stp_mc");
  CHECK(t.header[3] == "stp_mc_stderr");
  CHECK(t.rows.size() == 3);
  const auto m = manifest_from_json(Json::parse(read_text_file(manifest_path(out))));
  CHECK(m.extra["sweep"]["axes"][0]["parameter"] == "h1");
  CHECK(m.seed.has_value());
}

TEST_CASE("2-D sweep row count and optimum file") {
  TempDir dir;
  const auto cfg = dir.write("baseline.yaml", kBaseline);
  const auto out = dir.file("hl.csv");
  const auto r = run({"sweep", "-c", cfg, "--grid", "h1=100,200", "--grid",
                      "lambda1=10^-7:10^-3.5:15:log", "--optimize", "-o", out});
  REQUIRE(r.code == 0);
  std::ifstream in(out);
  CHECK(read_csv(in).rows.size() == 30);
  std::ifstream opt(dir.file("hl_optimum.csv"));
  const auto t = read_csv(opt);
  CHECK(t.header[0] == "h1");
  REQUIRE(t.rows.size() == 2);
  const auto ia = t.column("argmax_density");
  const auto ib = t.column("bound");
  for (const auto& row : t.rows) CHECK(parse_double(row[ia]) <= parse_double(row[ib]));
}

TEST_CASE("iso-total-density sweep reports the argmax fraction") {
  TempDir dir;
  const auto cfg = dir.write("two.yaml", kTwoLayer);
  const auto out = dir.file("iso.csv");
  const auto r = run({"sweep", "-c", cfg, "--iso-total", "10^-6,10^-4.6", "--fractions", "21",
                      "-o", out});
  REQUIRE(r.code == 0);
  std::ifstream in(dir.file("iso_argmax.csv"));
  const auto t = read_csv(in);
  REQUIRE(t.rows.size() == 2);
  const auto f = t.column("argmax_fraction");
  CHECK(parse_double(t.rows[0][f]) <= 0.2);
  CHECK(parse_double(t.rows[1][f]) >= 0.8);
  std::ifstream all(out);
  CHECK(read_csv(all).rows.size() == 42);
}

TEST_CASE("malformed grid exits 2; failed points keep exit 0") {
  TempDir dir;
  const auto cfg = dir.write("baseline.yaml", kBaseline);
  CHECK(run({"sweep", "-c", cfg, "--grid", "h1=1:2", "-o", dir.file("x.csv")}).code ==
        kExitConfig);
  CHECK(run({"sweep", "-c", cfg, "-o", dir.file("x.csv")}).code == kExitConfig);
  CHECK(run({"sweep", "-c", cfg, "--grid", "h1=100,200", "--engines", "magic", "-o",
             dir.file("x.csv")})
            .code == kExitConfig);
  const auto r = run({"sweep", "-c", cfg, "--grid", "alpha_los=2.5,1.5", "-o", dir.file("y.csv")});
  CHECK(r.code == kExitOk);
  CHECK(r.err.find("warning: 1") != std::string::npos);
  std::ifstream in(dir.file("y.csv"));
  const auto t = read_csv(in);
  CHECK(t.rows[0][t.column("error")].empty());
  CHECK(!t.rows[1][t.column("error")].empty());
}

TEST_CASE("bound per layer plus total") {
  TempDir dir;
  const auto out = dir.file("b.json");
  const auto r = run({"bound", "-c", dir.write("two.yaml", kTwoLayer), "-o", out});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(read_text_file(out));
  REQUIRE(j["bounds"].size() == 2);
  CHECK(j["total"].get<double>() ==
        doctest::Approx(j["bounds"][0]["bound"].get<double>() +
                        j["bounds"][1]["bound"].get<double>())
            .epsilon(1e-15));
  CHECK(r.out.find("total bound") != std::string::npos);
}

TEST_CASE("bound decreases with altitude") {
  TempDir dir;
  const auto a = dir.file("a.json");
  const auto b = dir.file("b.json");
  REQUIRE(run({"bound", "-c", dir.write("h100.yaml", baseline_at(100)), "-o", a}).code == 0);
  REQUIRE(run({"bound", "-c", dir.write("h200.yaml", baseline_at(200)), "-o", b}).code == 0);
  CHECK(Json::parse(read_text_file(a))["total"].get<double>() >
        Json::parse(read_text_file(b))["total"].get<double>());
}

TEST_CASE("bound with Nakagami shape exits 4") {
  TempDir dir;
  const auto r = run({"bound", "-c", dir.write("m3.yaml", kBaseline + "  m_los: 3\n")});
  CHECK(r.code == kExitUnsupported);
}

}  // TEST_SUITE
