#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "dynframe/json_io.hpp"

using dynframe::json_io::Json;
namespace fs = std::filesystem;

namespace {

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() / ("dynframe_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }
};

struct Outcome {
  int code = -1;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = dynframe::cli::run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

Json without_timestamp(Json j) {
  j.erase("timestamp");
  return j;
}

constexpr const char* kDiagTuple = R"({"dim": 2, "A": [{"rows": 2, "cols": 2, "re": [0.5, 0, 0, 0.3], "im": [0, 0, 0, 0]}]})";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("equiv on the diagonal example") {
    Sandbox s;
    const auto tuple = s.write("t.json", kDiagTuple);
    const auto xi = s.write("xi.json", R"({"re": [1, 1], "im": [0, 0]})");
    const auto eta = s.write("eta.json", R"({"re": [2, -1], "im": [0, 0]})");
    const auto out = s.path("r.json");
    const auto r = run({"equiv", "--tuple", tuple, "--xi", xi, "--eta", eta, "--window", "box:40", "--seed", "7",
                        "--out", out});
    CHECK(r.code == 0);
    const Json j = dynframe::json_io::load(out);
    CHECK(j["passed"] == true);
    CHECK(j["seed"] == 7);
    CHECK(j["result"]["verdict"] == "Equivalent");
    const auto t = dynframe::json_io::matrix_from_json(j["result"]["witness"]);
    CHECK(std::abs(t(0, 0) - 2.0) <= 1e-10);
    CHECK(std::abs(t(1, 1) + 1.0) <= 1e-10);
    for (const auto& c : j["checks"]) CHECK(c.contains("pass"));

    // eta = (1, 0) is not a frame vector: computed, but fails.
    const auto bad = s.write("bad.json", R"({"re": [1, 0], "im": [0, 0]})");
    const auto r2 = run({"equiv", "--tuple", tuple, "--xi", xi, "--eta", bad, "--out", out});
    CHECK(r2.code == 1);
    const Json j2 = dynframe::json_io::load(out);
    CHECK(j2["passed"] == false);
    CHECK(j2.contains("error"));
  }

  TEST_CASE("fejer of z squared") {
    Sandbox s;
    const auto phi = s.write("phi.json", R"({"k": 1, "window": "box:2", "coeffs": {"re": [0, 0, 1], "im": [0, 0, 0]}})");
    const auto out = s.path("f.json");
    CHECK(run({"fejer", "--phi", phi, "--n", "4", "--out", out}).code == 0);
    const Json j = dynframe::json_io::load(out);
    CHECK(std::abs(j["result"]["psi"]["coeffs"]["re"][2].get<double>() - 0.6) <= 1e-15);
  }

  TEST_CASE("usage errors exit 2") {
    Sandbox s;
    CHECK(run({}).code == 2);
    CHECK(run({"bogus"}).code == 2);
    CHECK(run({"demo", "--out", s.path("d.json")}).code == 2);  // missing --seed
    CHECK(run({"demo", "--seed", "1", "--frobnicate", "--out", s.path("d.json")}).code == 2);
    CHECK(run({"fejer", "--phi", s.path("missing.json"), "--n", "1", "--out", s.path("f.json")}).code == 2);
    const auto broken = s.write("broken.json", "{not json");
    CHECK(run({"frame-check", "--frame", broken, "--out", s.path("f.json")}).code == 2);
    CHECK_FALSE(fs::exists(s.path("d.json")));
  }

  TEST_CASE("frame-check and commutant") {
    Sandbox s;
    const auto mercedes = s.write(
        "m.json",
        R"({"vectors": {"rows": 2, "cols": 3, "re": [0, -0.8660254037844386, 0.8660254037844386, 1, -0.5, -0.5], "im": [0,0,0,0,0,0]}})");
    CHECK(run({"frame-check", "--frame", mercedes, "--out", s.path("fc.json")}).code == 0);
    const Json fc = dynframe::json_io::load(s.path("fc.json"));
    CHECK(std::abs(fc["result"]["bounds"]["lower"].get<double>() - 1.5) <= 1e-12);

    const auto tuple = s.write("t.json", kDiagTuple);
    CHECK(run({"commutant", "--tuple", tuple, "--out", s.path("c.json")}).code == 0);
    CHECK(dynframe::json_io::load(s.path("c.json"))["result"]["dimension"] == 2);
  }

  TEST_CASE("reports are deterministic modulo the timestamp") {
    Sandbox s;
    const std::vector<std::string> base{"centrality", "--k", "1", "--d", "3", "--trials", "4", "--seed", "11"};
    auto a = base, b = base;
    a.insert(a.end(), {"--out", s.path("a.json")});
    b.insert(b.end(), {"--out", s.path("b.json")});
    CHECK(run(a).code == 0);
    CHECK(run(b).code == 0);
    CHECK(without_timestamp(dynframe::json_io::load(s.path("a.json"))) ==
          without_timestamp(dynframe::json_io::load(s.path("b.json"))));
  }

  TEST_CASE("demo and probe") {
    Sandbox s;
    CHECK(run({"demo", "--seed", "3", "--out", s.path("d.json")}).code == 0);
    const Json d = dynframe::json_io::load(s.path("d.json"));
    CHECK(d["passed"] == true);
    CHECK(run({"conjecture-probe", "--numerical", "2,3", "--cap", "20", "--out", s.path("p.json")}).code == 0);
    CHECK(run({"conjecture-probe", "--free", "2", "--window", "box:3", "--out", s.path("q.json")}).code == 0);
  }
}
