#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kWork = fs::path(CORNERSCAT_TEST_WORKDIR) / "cli";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void put(const std::string& name, const std::string& text) {
  fs::create_directories(kWork);
  std::ofstream(kWork / name) << text;
}

// Runs the tool inside the work directory; stdout goes to `stdout.txt`.
int run(const std::string& args) {
  fs::create_directories(kWork);
  const std::string cmd = std::string("\"") + CORNERSCAT_CLI + "\" --workdir \"" + kWork.string() + "\" " + args +
                          " > \"" + (kWork / "stdout.txt").string() + "\" 2> \"" + (kWork / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string out() { return slurp(kWork / "stdout.txt"); }
std::string err() { return slurp(kWork / "stderr.txt"); }
json manifest() { return json::parse(slurp(kWork / "manifest.json")); }

std::vector<std::string> column(const std::string& csv, size_t col) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> values;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string cell;
    for (size_t i = 0; i <= col; ++i) std::getline(row, cell, ',');
    values.push_back(cell);
  }
  return values;
}

}  // namespace

TEST_CASE("spectrum") {
  REQUIRE(run("spectrum --geometry sector --omega pi/2 --bc dirichlet --lambda-max 6.5 --out exponents.csv") == 0);
  const auto csv = slurp(kWork / "exponents.csv");
  CHECK(csv.rfind("kind,lambda,index,multiplicity,residual\n", 0) == 0);
  const auto lam = column(csv, 1);
  for (const char* v : {"2", "4", "6"}) CHECK(std::find(lam.begin(), lam.end(), v) != lam.end());
  CHECK(manifest()["subcommand"] == "spectrum");
  CHECK(manifest()["outputs"].size() == 1);

  REQUIRE(run("--json spectrum --geometry cone --omega pi/2 --order 0 --lambda-max 6") == 0);
  const auto j = json::parse(out());
  CHECK(j["schema"] == "cornerscat/1");
  std::vector<double> positive;
  for (const auto& e : j["exponents"])
    if (e["lambda"].get<double>() > 0.0) positive.push_back(e["lambda"].get<double>());
  REQUIRE(positive.size() == 3);
  for (size_t i = 0; i < 3; ++i) CHECK(positive[i] == doctest::Approx(2.0 * i + 1.0).epsilon(1e-10));

  CHECK(run("spectrum --geometry sector --omega pi") == 2);
  CHECK(err().find("excluded angle") != std::string::npos);
  CHECK(manifest()["exit_code"] == 2);
  CHECK(run("--degrees spectrum --geometry sector --omega 180") == 2);
  CHECK(run("spectrum --geometry torus --omega 1") == 2);
  CHECK(run("spectrum --omega 1 --bc robin") == 2);
  CHECK(run("spectrum") == 2);
}

TEST_CASE("cauchy-null") {
  REQUIRE(run("--json cauchy-null --geometry sector --omega pi/3 --max-degree 8 --out null.json") == 0);
  const auto j = json::parse(out());
  CHECK(j["schema"] == "cornerscat/1");
  REQUIRE(j["degrees"].size() == 7);
  for (const auto& d : j["degrees"]) {
    CHECK(d["nullity"] == 0);
    CHECK(d["certified"] == true);
  }
  CHECK(fs::exists(kWork / "null.json"));
  REQUIRE(run("--json cauchy-null --geometry sector --omega pi --max-degree 2") == 0);
  CHECK(json::parse(out())["degrees"][0]["nullity"] == 1);
  REQUIRE(run("--json cauchy-null --geometry cone --omega 0.7 --max-degree 4") == 0);
  for (const auto& d : json::parse(out())["degrees"]) CHECK(d["method"] == "interval");
  CHECK(run("cauchy-null --omega pi/3 --max-degree 8 --force-interval --precision-bits 8") == 3);
  CHECK(run("cauchy-null --geometry cone --omega pi/3 --max-degree 8 --force-interval --precision-bits 8") == 3);
  CHECK(run("cauchy-null --omega pi/3 --min-degree 1") == 2);
}

TEST_CASE("scatter: zero contrast, guard, errors") {
  put("empty.scene", "shape = none\nk = 3\nN = 32\nfar_field_out = empty_far.csv\n");
  REQUIRE(run("scatter empty.scene") == 0);
  const auto csv = slurp(kWork / "empty_far.csv");
  CHECK(csv.rfind("angle,re,im\n", 0) == 0);
  const auto re = column(csv, 1), im = column(csv, 2);
  CHECK(re.size() == 256);
  for (size_t i = 0; i < re.size(); ++i) {
    CHECK(std::stod(re[i]) == 0.0);
    CHECK(std::stod(im[i]) == 0.0);
  }

  put("coarse.scene", "shape = square\nk = 40\nN = 16\n");
  CHECK(run("scatter coarse.scene") == 5);
  CHECK(manifest()["exit_code"] == 5);
  CHECK(run("--force scatter coarse.scene") == 0);

  CHECK(run("scatter missing.scene") == 2);
  put("bad.scene", "shape = square\nk = 3\ncolour = red\n");
  CHECK(run("scatter bad.scene") == 2);
  put("nok.scene", "shape = square\n");
  CHECK(run("scatter nok.scene") == 2);
}

TEST_CASE("scatter: determinism and manifest") {
  put("tri.scene",
      "shape = triangle\nq0 = 3\nk = 4\nN = 48\nincident = plane\ndirection = 0.3\n"
      "far_field_out = tri_far.csv\nfield_out = tri_field.bin\n");
  REQUIRE(run("--json scatter tri.scene") == 0);
  const auto j = json::parse(out());
  CHECK(j["schema"] == "cornerscat/1");
  CHECK(j["results"][0]["far_field_norm"].get<double>() > 0.0);
  const auto far1 = slurp(kWork / "tri_far.csv");
  const auto bin1 = slurp(kWork / "tri_field.bin");
  const auto m1 = manifest();
  REQUIRE(run("scatter tri.scene") == 0);
  CHECK(slurp(kWork / "tri_far.csv") == far1);
  CHECK(slurp(kWork / "tri_field.bin") == bin1);
  const auto m2 = manifest();
  CHECK(m2["schema"] == "cornerscat/1");
  CHECK(m2["tool_version"] == "0.1.0");
  CHECK(m2["outputs"] == m1["outputs"]);
  CHECK(m2["inputs"] == m1["inputs"]);
  CHECK(m2["outputs"].size() == 2);
  CHECK(m2["inputs"][0]["fnv1a64"].get<std::string>().size() == 16);
  CHECK(m2.contains("timing_seconds"));
  CHECK(bin1.size() == 4 + 8 + 40 + 16 * 48 * 48);
}

TEST_CASE("sweep") {
  put("pair.scene",
      "shapes = square, none\nsquare.side = 0.6\nN = 32\nk_min = 1\nk_max = 3\nsteps = 3\nsweep_out = pair_sweep.csv\n");
  REQUIRE(run("sweep pair.scene") == 0);
  const auto csv = slurp(kWork / "pair_sweep.csv");
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "k,square_norm,square_min,square_max,square_floor,square_flag,none_norm,none_min,none_max,none_floor,none_flag");
  CHECK(column(csv, 0).size() == 3);
  for (const auto& v : column(csv, 5)) CHECK(v == "0");
  for (const auto& v : column(csv, 6)) CHECK(std::stod(v) == 0.0);
  put("nosweep.scene", "shape = square\nk = 2\n");
  CHECK(run("sweep nosweep.scene") == 2);
}

TEST_CASE("expand") {
  put("seeds.json", R"({"dimension": 2, "k": 2.0, "J": 10, "seeds": [{"n": 3, "sign": "plus", "re": 1.0}], "radii": [0.1, 0.2]})");
  REQUIRE(run("--json expand seeds.json --out expansion.json") == 0);
  const auto j = json::parse(out());
  CHECK(j["schema"] == "cornerscat/1");
  CHECK(j["residuals"].size() == 2);
  REQUIRE(j["lowest_terms"].size() == 2);
  CHECK(j["lowest_terms"][0]["harmonic"] == true);
  CHECK(fs::exists(kWork / "expansion.json"));
  put("pw3.json", R"({"dimension": 3, "k": 1.0, "J": 8, "plane_wave": {"theta": 0.4, "phi": 1.0}})");
  REQUIRE(run("--json expand pw3.json") == 0);
  for (const auto& r : json::parse(out())["residuals"]) CHECK(r["residual"].get<double>() < 1e-4);
  put("bad.json", R"({"dimension": 3, "k": 1.0, "J": 4, "seeds": [{"n": 1, "m": 3, "re": 1.0}]})");
  CHECK(run("expand bad.json") == 2);
  put("broken.json", "{ not json");
  CHECK(run("expand broken.json") == 2);
}

TEST_CASE("bundled square-vs-disk demo") {
  const fs::path scene = fs::path(CORNERSCAT_SCENES) / "square_vs_disk.scene";
  REQUIRE(run("sweep \"" + scene.string() + "\"") == 0);
  const auto csv = slurp(kWork / "square_vs_disk_sweep.csv");
  const auto k = column(csv, 0), square = column(csv, 1), square_flag = column(csv, 5), disk = column(csv, 6);
  REQUIRE(k.size() == 21);
  double square_min = 1e300, disk_min = 1e300;
  size_t dip = 0;
  for (size_t i = 0; i < k.size(); ++i) {
    CHECK(square_flag[i] == "0");
    square_min = std::min(square_min, std::stod(square[i]));
    if (std::stod(disk[i]) < disk_min) {
      disk_min = std::stod(disk[i]);
      dip = i;
    }
  }
  CHECK(std::stod(k[dip]) == doctest::Approx(6.76839).epsilon(1e-5));
  CHECK(disk_min < 1e-2);
  CHECK(disk_min < 0.01 * square_min);
  CHECK(square_min > 0.5);
}
