#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

const char* binary() {
  const char* bin = std::getenv("QCORR_BIN");
  REQUIRE_MESSAGE(bin != nullptr,
                  "QCORR_BIN must point at the qcorr executable");
  return bin;
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("qcorr_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run(const std::string& args) {
  const fs::path out = scratch_dir() / "stdout.txt";
  const std::string cmd = std::string(binary()) + " " + args + " > " +
                          out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream f(out);
  std::stringstream ss;
  ss << f.rdbuf();
  r.output = ss.str();
  return r;
}

fs::path write_file(const std::string& name, const std::string& contents) {
  const fs::path p = scratch_dir() / name;
  std::ofstream f(p);
  f << contents;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("crosscorr: delta arrays produce the shifted-delta estimates") {
  const auto a = write_file("delta_a.csv", "1,0,0,0\n");
  const auto b = write_file("delta_b.csv", "0,1,0,0\n");
  const auto out = scratch_dir() / "delta.json";
  const auto r = run("crosscorr " + a.string() + " " + b.string() +
                     " --m 16 --out " + out.string());
  CHECK(r.exit_code == 0);

  const auto doc = nlohmann::json::parse(slurp(out));
  CHECK(doc["meta"]["algorithm"] == "crosscorr");
  CHECK(doc["meta"]["n"] == 4);
  CHECK(doc["meta"]["m"] == 16);
  REQUIRE(doc["rows"].size() == 4);
  CHECK(doc["rows"][0]["quantum_estimate"].get<double>() ==
        doctest::Approx(0.0));
  CHECK(doc["rows"][3]["quantum_estimate"].get<double>() ==
        doctest::Approx(1.0));
  for (const auto& row : doc["rows"]) {
    CHECK(row["within_bound"].get<bool>());
    CHECK(row["oracle_calls"].get<int>() == 15);
  }
  // volatile fields stay out of the default report
  CHECK_FALSE(doc["meta"].contains("timestamp"));
  CHECK_FALSE(doc["summary"].contains("wall_time_ms"));
}

TEST_CASE("crosscorr: usage errors exit with 1") {
  const auto a = write_file("u_a.csv", "1,0,0,0\n");
  const auto b = write_file("u_b.csv", "0,1,0,0\n");
  SUBCASE("M not a power of two") {
    const auto r = run("crosscorr " + a.string() + " " + b.string() +
                       " --m 12");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("power of two") != std::string::npos);
  }
  SUBCASE("missing input file") {
    const auto r = run("crosscorr " + a.string() + " /nonexistent.csv");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("nonexistent.csv") != std::string::npos);
  }
  SUBCASE("non-power-of-two array length") {
    const auto c = write_file("u_c.csv", "1,2,3\n");
    const auto d = write_file("u_d.csv", "1,2,3\n");
    const auto r = run("crosscorr " + c.string() + " " + d.string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("power of two") != std::string::npos);
  }
  SUBCASE("NaN rejected with file and rule") {
    const auto c = write_file("u_nan.csv", "1,nan,3,4\n");
    const auto r = run("crosscorr " + c.string() + " " + b.string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("u_nan.csv") != std::string::npos);
    CHECK(r.output.find("not finite") != std::string::npos);
  }
  SUBCASE("declared --n mismatch") {
    const auto r = run("crosscorr " + a.string() + " " + b.string() +
                       " --n 8");
    CHECK(r.exit_code == 1);
  }
}

TEST_CASE("crosscorr: reports are byte-identical for a fixed seed") {
  const auto a =
      write_file("r_a.csv", "0.31,0.7,0.12,0.98,0.44,0.05,0.66,0.27\n");
  const auto b =
      write_file("r_b.csv", "0.91,0.02,0.55,0.13,0.78,0.34,0.2,0.61\n");
  for (const std::string mode : {"exact", "sampling"}) {
    const auto out1 = scratch_dir() / ("rep1_" + mode + ".json");
    const auto out2 = scratch_dir() / ("rep2_" + mode + ".json");
    const std::string base = "crosscorr " + a.string() + " " + b.string() +
                             " --m 256 --seed 7 --mode " + mode + " --out ";
    CHECK(run(base + out1.string()).exit_code == 0);
    CHECK(run(base + out2.string()).exit_code == 0);
    const std::string r1 = slurp(out1);
    CHECK(!r1.empty());
    CHECK(r1 == slurp(out2));
  }
}

TEST_CASE("crosscorr: csv format") {
  const auto a = write_file("c_a.csv", "1,0,0,0\n");
  const auto b = write_file("c_b.csv", "1,0,0,0\n");
  const auto out = scratch_dir() / "rep.csv";
  const auto r = run("crosscorr " + a.string() + " " + b.string() +
                     " --m 16 --format csv --out " + out.string());
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(out);
  CHECK(csv.find("index,quantum_estimate,classical_value") !=
        std::string::npos);
  CHECK(csv.find("# max_abs_error=") != std::string::npos);
}

TEST_CASE("crosscorr: raw-scale columns appear for non-normalized input") {
  const auto a = write_file("raw_a.csv", "2,0,1,1\n");
  const auto b = write_file("raw_b.csv", "0,2,1,1\n");
  const auto out = scratch_dir() / "raw.json";
  const auto r = run("crosscorr " + a.string() + " " + b.string() +
                     " --m 256 --out " + out.string());
  CHECK(r.exit_code == 0);
  const auto doc = nlohmann::json::parse(slurp(out));
  // classical_raw must equal the direct raw-domain correlation
  // C_0 = 2*0 + 0*2 + 1*1 + 1*1 = 2
  CHECK(doc["rows"][0]["classical_raw"].get<double>() ==
        doctest::Approx(2.0));
  CHECK(doc["rows"][0].contains("estimate_raw"));
}

TEST_CASE("sweep") {
  const auto a = write_file("s_a.csv", "0.2,0.4,0.1,0.3\n");
  const auto b = write_file("s_b.csv", "0.3,0.1,0.5,0.1\n");
  SUBCASE("oracle calls follow M - 1") {
    const auto out = scratch_dir() / "sweep.json";
    const auto r = run("sweep " + a.string() + " " + b.string() +
                       " --m-list 16,64,256 --out " + out.string());
    CHECK(r.exit_code == 0);
    const auto doc = nlohmann::json::parse(slurp(out));
    REQUIRE(doc["rows"].size() == 3);
    CHECK(doc["rows"][0]["total_oracle_calls"] == 15);
    CHECK(doc["rows"][1]["total_oracle_calls"] == 63);
    CHECK(doc["rows"][2]["total_oracle_calls"] == 255);
    CHECK(doc["rows"][0]["calls_per_estimate"] == 15);
    // complexity accounting columns are present
    CHECK(doc["rows"][0]["classical_fft_cost"].get<double>() ==
          doctest::Approx(8.0));  // 4 * log2(4)
    CHECK(doc["rows"][0]["classical_emml_pixel_cost"].get<double>() ==
          doctest::Approx(32.0));  // 4^2 * log2(4)
  }
  SUBCASE("error bound shrinks with M") {
    const auto out = scratch_dir() / "sweep2.json";
    const auto r = run("sweep " + a.string() + " " + b.string() +
                       " --m-list 16,64,256 --out " + out.string());
    CHECK(r.exit_code == 0);
    const auto doc = nlohmann::json::parse(slurp(out));
    const double b16 = doc["rows"][0]["mean_error_bound"].get<double>();
    const double b64 = doc["rows"][1]["mean_error_bound"].get<double>();
    const double b256 = doc["rows"][2]["mean_error_bound"].get<double>();
    // the 2*pi*sqrt(c(1-c))/M term dominates: 4x M shrinks the bound by
    // roughly 4, certainly by at least 2
    CHECK(b64 <= b16 / 2.0);
    CHECK(b256 <= b64 / 2.0);
  }
  SUBCASE("empty list is a usage error") {
    const auto r = run("sweep " + a.string() + " " + b.string());
    CHECK(r.exit_code == 1);
  }
}

TEST_CASE("emml") {
  SUBCASE("single uniform array converges immediately") {
    const fs::path dir = scratch_dir() / "emml_uniform";
    fs::create_directories(dir);
    {
      std::ofstream f(dir / "a0.csv");
      f << "1,1\n1,1\n";
    }
    const auto out = scratch_dir() / "emml.json";
    const auto r = run("emml " + dir.string() + " --m 32 --iterations 3 " +
                       "--tol 1e-9 --out " + out.string());
    CHECK(r.exit_code == 0);
    const auto doc = nlohmann::json::parse(slurp(out));
    CHECK(doc["convergence"]["converged"] == true);
    CHECK(doc["convergence"]["iterations_run"] == 1);
    REQUIRE(doc["iterations"].size() == 1);
    CHECK(doc["iterations"][0]["rows"].size() == 4);
    for (const auto& row : doc["iterations"][0]["rows"]) {
      CHECK(row["within_bound"].get<bool>());
    }
  }
  SUBCASE("two identical arrays: every pixel within bound") {
    const fs::path dir = scratch_dir() / "emml_pair";
    fs::create_directories(dir);
    {
      std::ofstream f(dir / "a0.csv");
      f << "0.4,0.1\n0.3,0.2\n";
    }
    {
      std::ofstream f(dir / "a1.csv");
      f << "0.4,0.1\n0.3,0.2\n";
    }
    const auto out = scratch_dir() / "emml2.json";
    const auto r = run("emml " + dir.string() + " --m 64 --iterations 1 " +
                       "--out " + out.string());
    CHECK(r.exit_code == 0);
    const auto doc = nlohmann::json::parse(slurp(out));
    REQUIRE(doc["iterations"].size() == 2);  // one block per array
    for (const auto& block : doc["iterations"]) {
      CHECK(block["sum_before_renorm"].get<double>() ==
            doctest::Approx(1.0).epsilon(0.2));
      for (const auto& row : block["rows"]) {
        CHECK(row["within_bound"].get<bool>());
      }
    }
  }
  SUBCASE("--iterations 0 is a usage error") {
    const fs::path dir = scratch_dir() / "emml_uniform";
    fs::create_directories(dir);
    {
      std::ofstream f(dir / "a0.csv");
      f << "1,1\n1,1\n";
    }
    const auto r = run("emml " + dir.string() + " --iterations 0");
    CHECK(r.exit_code == 1);
  }
  SUBCASE("empty directory is an error") {
    const fs::path dir = scratch_dir() / "emml_empty";
    fs::create_directories(dir);
    const auto r = run("emml " + dir.string());
    CHECK(r.exit_code == 1);
  }
}

TEST_CASE("json array inputs load") {
  const auto a = write_file("j_a.json", "[1, 0, 0, 0]");
  const auto b = write_file("j_b.json", "[0, 1, 0, 0]");
  const auto out = scratch_dir() / "json_in.json";
  const auto r = run("crosscorr " + a.string() + " " + b.string() +
                     " --m 16 --out " + out.string());
  CHECK(r.exit_code == 0);
  const auto doc = nlohmann::json::parse(slurp(out));
  CHECK(doc["rows"][3]["quantum_estimate"].get<double>() ==
        doctest::Approx(1.0));
}

TEST_CASE("selftest passes") {
  const auto r = run("selftest");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("FAIL") == std::string::npos);
  CHECK(r.output.find("checks passed") != std::string::npos);
}

TEST_CASE("unknown subcommand exits 1") {
  const auto r = run("frobnicate");
  CHECK(r.exit_code == 1);
}
