#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "rotortrack_test_cli";

int run(const std::string& args, const std::string& log = "cli.log") {
  const std::string cmd = std::string(ROTORTRACK_CLI) + " " + args + " > " + (kRoot / log).string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path write(const std::string& name, const std::string& text) {
  fs::create_directories(kRoot);
  std::ofstream(kRoot / name) << text;
  return kRoot / name;
}

std::string config(const std::string& track, const std::string& sim = R"("T_reduced": 20, "dt": 2e-3)",
                   int big_m = 8, const std::string& extra = "") {
  return R"({"rotor": {"B_invcm": 0.203, "mu_debye": 0.709, "M": )" + std::to_string(big_m) +
         R"(}, "simulation": {)" + sim + R"(}, "track": )" + track + extra + "}";
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    FAIL("missing column " << name);
    return 0;
  }
};

Csv read_csv(const fs::path& p) {
  Csv c;
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) c.header.push_back(cell);
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    c.rows.push_back(row);
  }
  return c;
}

const std::string kGauss = R"({"kind": "gaussian", "alpha": 0.6})";

}  // namespace

TEST_CASE("simulate writes the run directory") {
  const fs::path cfg = write("g.json", config(kGauss));
  const fs::path out = kRoot / "g";
  fs::remove_all(out);
  REQUIRE(run("simulate --config " + cfg.string() + " --out " + out.string()) == 0);
  for (const char* f : {"record.csv", "fields.csv", "resolved_config.json", "traces.svg", "plane.svg",
                        "populations.svg", "units.txt"}) {
    CHECK(fs::exists(out / f));
  }
  const Csv rec = read_csv(out / "record.csv");
  CHECK(rec.header.size() == 11 + 17);
  double last = -1.0;
  double dev = 0.0;
  for (const auto& r : rec.rows) {
    CHECK(r[0] > last);
    last = r[0];
    for (double x : r) CHECK(std::isfinite(x));
    dev = std::max(dev, std::abs(r[rec.col("ox")] - r[rec.col("ox_d")]));
  }
  CHECK(last == 20.0);
  CHECK(dev < 1e-2);
  const Csv fields = read_csv(out / "fields.csv");
  CHECK(fields.rows.size() == 10001);
  CHECK(slurp(kRoot / "cli.log").find("26.15") != std::string::npos);
}

TEST_CASE("resolved config reproduces the run bit for bit") {
  const fs::path cfg = write("r.json", config(kGauss));
  fs::remove_all(kRoot / "r1");
  fs::remove_all(kRoot / "r2");
  REQUIRE(run("simulate --config " + cfg.string() + " --out " + (kRoot / "r1").string()) == 0);
  REQUIRE(run("simulate --config " + (kRoot / "r1" / "resolved_config.json").string() + " --out " +
              (kRoot / "r2").string()) == 0);
  CHECK(slurp(kRoot / "r1" / "record.csv") == slurp(kRoot / "r2" / "record.csv"));
  CHECK(slurp(kRoot / "r1" / "fields.csv") == slurp(kRoot / "r2" / "fields.csv"));
}

TEST_CASE("replay: own fields, filtered fields, broken files") {
  const fs::path cfg = write("rp.json", config(kGauss));
  const fs::path run_dir = kRoot / "rp";
  fs::remove_all(run_dir);
  REQUIRE(run("simulate --config " + cfg.string() + " --out " + run_dir.string()) == 0);
  const fs::path fields = run_dir / "fields.csv";

  REQUIRE(run("replay --config " + cfg.string() + " --fields " + fields.string() + " --out " +
              (kRoot / "rp_exact").string()) == 0);
  const Csv a = read_csv(run_dir / "record.csv");
  const Csv b = read_csv(kRoot / "rp_exact" / "record.csv");
  REQUIRE(a.rows.size() == b.rows.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    worst = std::max({worst, std::abs(a.rows[i][a.col("ox")] - b.rows[i][b.col("ox")]),
                      std::abs(a.rows[i][a.col("oy")] - b.rows[i][b.col("oy")])});
  }
  CHECK(worst < 1e-9);

  REQUIRE(run("replay --config " + cfg.string() + " --fields " + fields.string() + " --cutoff 3 --out " +
              (kRoot / "rp_filtered").string()) == 0);
  const auto report = nlohmann::json::parse(slurp(kRoot / "rp_filtered" / "replay_report.json"));
  CHECK(report["cutoff"].get<double>() == 3.0);
  CHECK(report["max_deviation"].get<double>() < 1e-2);

  // truncated: drop the last half of the rows
  std::ifstream in(fields);
  std::ostringstream cut;
  std::string line;
  for (int i = 0; i < 5000 && std::getline(in, line); ++i) cut << line << '\n';
  const fs::path truncated = write("truncated.csv", cut.str());
  CHECK(run("replay --config " + cfg.string() + " --fields " + truncated.string(), "trunc.log") == 5);
  CHECK(slurp(kRoot / "trunc.log").find("GridMismatch") != std::string::npos);

  const fs::path nocol = write("nocol.csv", "t,eps_x\n0,0\n1,0\n");
  CHECK(run("replay --config " + cfg.string() + " --fields " + nocol.string()) == 9);
}

TEST_CASE("config errors exit with 4") {
  CHECK(run("simulate --config " + write("bad_alpha.json", config(R"({"kind": "gaussian", "alpha": 1.1})")).string(),
            "alpha.log") == 4);
  CHECK(slurp(kRoot / "alpha.log").find("alpha < 1") != std::string::npos);
  CHECK(run("simulate --config " +
            write("no_rotor.json", R"({"simulation": {"T_reduced": 5}, "track": {"kind": "gaussian", "alpha": 0.5}})")
                .string(),
            "rotor.log") == 4);
  CHECK(slurp(kRoot / "rotor.log").find("rotor") != std::string::npos);
  CHECK(run("simulate --config /nonexistent.json") == 4);
  CHECK(run("simulate") == 4);
  CHECK(run("frobnicate --config x") == 4);
}

TEST_CASE("radius-1 data track is rejected") {
  std::ostringstream csv;
  csv << "x,y\n";
  for (int k = 0; k < 64; ++k) csv << std::cos(2 * M_PI * k / 64) << ',' << std::sin(2 * M_PI * k / 64) << '\n';
  write("unit_circle.csv", csv.str());
  const fs::path cfg = write("unit.json", config(R"({"kind": "data", "file": "unit_circle.csv", "blend_in": 5})"));
  CHECK(run("simulate --config " + cfg.string() + " --out " + (kRoot / "unit").string(), "unit.log") == 4);
  CHECK(slurp(kRoot / "unit.log").find("PointOutsideDisk") != std::string::npos);
}

TEST_CASE("singularity guard exits with 2 and keeps the partial record") {
  const fs::path cfg = write("guard.json", config(kGauss, R"("T_reduced": 20, "dt": 2e-3)", 8,
                                                  R"(, "guard": {"d_min": 1e-8, "margin_min": 0.8})"));
  const fs::path out = kRoot / "guard";
  fs::remove_all(out);
  CHECK(run("simulate --config " + cfg.string() + " --out " + out.string(), "guard.log") == 2);
  CHECK(slurp(kRoot / "guard.log").find("SingularityGuard") != std::string::npos);
  const Csv rec = read_csv(out / "record.csv");
  CHECK(!rec.rows.empty());
  CHECK(rec.rows.back()[0] < 20.0);
}

TEST_CASE("basis leakage exits with 3") {
  const fs::path cfg = write("leak.json", config(R"({"kind": "gaussian", "alpha": 0.9})", R"("T_reduced": 50, "dt": 1e-3)", 2));
  CHECK(run("simulate --config " + cfg.string() + " --out " + (kRoot / "leak").string(), "leak.log") == 3);
  CHECK(slurp(kRoot / "leak.log").find("increase the basis cutoff") != std::string::npos);
}

TEST_CASE("study writes a table and marks failed cells") {
  const fs::path cfg = write("study.json", config(kGauss));
  const fs::path out = kRoot / "study";
  fs::remove_all(out);
  REQUIRE(run("study --config " + cfg.string() + " --dt 4e-3,2e-3 --m 1,8 --out " + out.string()) == 0);
  const std::string table = slurp(out / "study.csv");
  CHECK(table.rfind("dt,M,status,max_deviation,runtime_s,message\n", 0) == 0);
  CHECK(table.find("0.004,1,BasisLeakage") != std::string::npos);
  CHECK(table.find("0.002,8,ok,") != std::string::npos);
  CHECK(run("study --config " + cfg.string() + " --dt \"\" --m 8") == 4);
  CHECK(run("study --config " + cfg.string() + " --dt 2e-3 --m 0") == 4);
}

TEST_CASE("tracks preview") {
  const fs::path out = kRoot / "preview";
  fs::remove_all(out);
  REQUIRE(run("tracks preview --config " + (fs::path(PRESET_DIR) / "spiral.json").string() + " --out " +
              out.string(), "preview.log") == 0);
  const Csv p = read_csv(out / "track_preview.csv");
  CHECK(p.rows.size() == 1001);
  double r_max = 0.0;
  for (const auto& r : p.rows) r_max = std::max(r_max, r[p.col("radius")]);
  CHECK(r_max == doctest::Approx(0.95).epsilon(1e-6));
  CHECK(slurp(kRoot / "preview.log").find("consistent") != std::string::npos);
}

TEST_CASE("frames output") {
  const fs::path cfg = write("frames.json", config(kGauss, R"("T_reduced": 20, "dt": 2e-3)", 8,
                                                   R"(, "output": {"formats": ["csv", "frames"], "frame_count": 25})"));
  const fs::path out = kRoot / "frames_run";
  fs::remove_all(out);
  REQUIRE(run("simulate --config " + cfg.string() + " --out " + out.string()) == 0);
  CHECK(std::distance(fs::directory_iterator(out / "frames"), {}) == 25);
  CHECK_FALSE(fs::exists(out / "traces.svg"));
}
