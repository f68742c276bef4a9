#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include "commands.hpp"
#include "ddfem/error.hpp"
#include "scene.hpp"

using namespace ddfem;
using namespace ddfem::cli;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "ddfem_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json small_ball() {
  return json::parse(R"({
    "geometry": {"kind": "ball", "radius": 1, "center": [0, 0], "name": "Omega"},
    "epsilon": 0.2,
    "box": {"lower": [-1.5, -1.5], "upper": [1.5, 1.5]},
    "h": 0.1,
    "problem": "poisson",
    "boundary": [{"segment": "Omega", "type": "dirichlet", "value": 0}],
    "out_factor_i": 1,
    "exact": "(dot(x, x) - 1) / 4"
  })");
}

fs::path write_scene(const fs::path& dir, const json& scene) {
  const auto path = dir / "scene.json";
  std::ofstream(path) << scene.dump(2);
  return path;
}

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "ddfem");
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

ErrorCode parse_code(const json& j) {
  try {
    parse_scene(j);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;  // sentinel: no error
}

}  // namespace

TEST_CASE("scene parsing rejects malformed input") {
  CHECK_NOTHROW(parse_scene(small_ball()));
  json unknown = small_ball();
  unknown["epsilonn"] = 0.1;
  CHECK(parse_code(unknown) == ErrorCode::kParse);
  json no_box = small_ball();
  no_box.erase("box");
  CHECK(parse_code(no_box) == ErrorCode::kParse);
  json bad_type = small_ball();
  bad_type["boundary"][0]["type"] = "robin";
  CHECK(parse_code(bad_type) == ErrorCode::kParse);
  json bad_expr = small_ball();
  bad_expr["exact"] = "x[0] +";
  CHECK(parse_code(bad_expr) == ErrorCode::kParse);
  json bad_problem = small_ball();
  bad_problem["problem"] = "navier_stokes";
  CHECK(parse_code(bad_problem) == ErrorCode::kParse);
  json bad_geometry = small_ball();
  bad_geometry["geometry"]["kind"] = "torus";
  CHECK(parse_code(bad_geometry) == ErrorCode::kParse);
  json negative = small_ball();
  negative["epsilon"] = -1;
  CHECK(parse_code(negative) == ErrorCode::kParse);
}

TEST_CASE("grid selection and the resolution rule") {
  Scene s = parse_scene(small_ball());
  const Grid g = scene_grid(s, 0.2);
  CHECK(g.nx == 30);
  CHECK(g.h == doctest::Approx(0.1));
  CHECK_NOTHROW(check_resolution(g, 0.2));
  CHECK_THROWS_AS(check_resolution(g, 0.1), Error);
  const Grid by_factor = scene_grid(s, 0.05, true);
  CHECK(by_factor.nx == 120);
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("exit codes for user errors") {
  const auto dir = scratch("exit_codes");
  const auto scene = write_scene(dir, small_ball()).string();

  const Run unknown = run({"solve", "--scene", scene, "--transformer", "ddm9", "--out", dir.string()});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("ddm9") != std::string::npos);
  CHECK(unknown.err.find("ddm1") != std::string::npos);

  json missing = small_ball();
  missing.erase("out_factor_i");
  const auto missing_path = write_scene(scratch("missing_out_factor"), missing).string();
  const Run no_factor = run({"solve", "--scene", missing_path, "--out", dir.string()});
  CHECK(no_factor.code == 2);
  CHECK(no_factor.err.find("at least one is required") != std::string::npos);

  json coarse = small_ball();
  coarse["h"] = 0.15;
  const auto coarse_path = write_scene(scratch("coarse"), coarse).string();
  const Run refused = run({"render", "--scene", coarse_path, "--out", dir.string()});
  CHECK(refused.code == 2);
  CHECK(refused.err.find("--allow-coarse") != std::string::npos);
  CHECK(run({"render", "--scene", coarse_path, "--out", dir.string(), "--allow-coarse"}).code == 0);

  std::ofstream(dir / "broken.json") << "{\"geometry\": ";
  CHECK(run({"solve", "--scene", (dir / "broken.json").string()}).code == 2);
  CHECK(run({"solve", "--scene", (dir / "absent.json").string()}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"solve"}).code == 2);
}

TEST_CASE("numerical failure exits with 3") {
  json scene = small_ball();
  scene["problem"] = {{"name", "poisson"}, {"coefficients", {{"f", "1 / (x[0] - x[0])"}}}};
  const auto dir = scratch("numerical");
  const Run r = run({"solve", "--scene", write_scene(dir, scene).string(), "--out", dir.string()});
  CHECK(r.code == 3);
}

TEST_CASE("solve writes deterministic outputs and a manifest") {
  const auto dir = scratch("solve");
  const auto scene = write_scene(dir, small_ball()).string();
  const Run first = run({"solve", "--scene", scene, "--out", (dir / "a").string()});
  REQUIRE(first.code == 0);
  const Run second = run({"solve", "--scene", scene, "--out", (dir / "b").string()});
  REQUIRE(second.code == 0);
  CHECK(slurp(dir / "a" / "solution.csv") == slurp(dir / "b" / "solution.csv"));
  CHECK(slurp(dir / "a" / "solution.vtk") == slurp(dir / "b" / "solution.vtk"));

  const json manifest = json::parse(slurp(dir / "a" / "manifest.json"));
  for (const char* key : {"tool", "version", "command", "scene_path", "scene_hash", "parameters", "scene"}) {
    CAPTURE(key);
    CHECK(manifest.contains(key));
  }
  CHECK(manifest["command"] == "solve");
  CHECK(manifest["scene_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
  CHECK(manifest["scene"] == small_ball());

  const json summary = json::parse(slurp(dir / "a" / "summary.json"));
  CHECK(summary["transformer"] == "ddm1");
  CHECK(summary["l2_error_chi"].get<double>() < 0.2);
}

TEST_CASE("render chi takes values 0 and 1") {
  const auto dir = scratch("render");
  Scene scene = parse_scene(small_ball());
  CommandOptions options;
  options.out = dir;
  options.field = "chi";
  const auto result = cmd_render(scene, options);
  CHECK(result.nx == 31);
  CHECK(result.points.size() == 31u * 31u);
  int inside = 0;
  for (double v : result.values) {
    CHECK((v == 0.0 || v == 1.0));
    inside += v == 1.0;
  }
  CHECK(inside * 0.01 == doctest::Approx(M_PI).epsilon(0.1));
  CHECK(fs::exists(dir / "render_chi.csv"));
  CHECK(slurp(dir / "render_chi.csv").rfind("x,y,chi\n", 0) == 0);

  options.field = "weight:Nowhere";
  CHECK_THROWS_AS(cmd_render(scene, options), Error);
  options.field = "temperature";
  CHECK_THROWS_AS(cmd_render(scene, options), Error);
}

TEST_CASE("validate reports every check") {
  const auto dir = scratch("validate");
  const Run r = run({"validate", "--scene", write_scene(dir, small_ball()).string(), "--out", dir.string()});
  CHECK(r.code == 0);
  for (const char* name : {"unique_names", "resolution", "lipschitz", "phase_field", "projection",
                           "partition_of_unity"}) {
    CAPTURE(name);
    CHECK(r.out.find(std::string("PASS ") + name) != std::string::npos);
  }
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("bundled scenes parse") {
  for (const auto& entry : fs::directory_iterator(DDFEM_SCENE_DIR)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_scene(entry.path()));
  }
}

TEST_CASE("executable exit status") {
  const auto dir = scratch("process");
  const auto scene = write_scene(dir, small_ball()).string();
  const std::string exe = DDFEM_CLI_EXE;
  const auto status = [](const std::string& command) {
    const int raw = std::system((command + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status(exe + " render --scene " + scene + " --out " + dir.string()) == 0);
  CHECK(status(exe + " solve --scene " + scene + " --transformer nope --out " + dir.string()) == 2);
}
