#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gsc/errors.hpp"
#include "gsc/io.hpp"

using namespace gsc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("gsc_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("spec files round-trip through the canonical form") {
  TempDir tmp;
  for (const CarpetSpec& spec :
       {builtin_sierpinski_carpet(), builtin_menger_sponge(), gen_counterexample(3, 2)}) {
    const fs::path file = tmp.path / "spec.json";
    save_spec_file(spec, file);
    const CarpetSpec loaded = load_spec_file(file);
    CHECK(loaded.d == spec.d);
    CHECK(loaded.l == spec.l);
    CHECK(loaded.cells == spec.cells);
    CHECK(spec_hash(loaded) == spec_hash(spec));
  }
}

TEST_CASE("tuples may arrive in any order, the canonical form sorts them") {
  TempDir tmp;
  const fs::path file = tmp.path / "shuffled.json";
  std::ofstream(file) << R"({"d":2,"l":3,"S":[[2,2],[0,0],[1,0],[2,0],[0,1],[2,1],[0,2],[1,2]]})";
  const CarpetSpec spec = load_spec_file(file);
  CHECK(spec.cells == builtin_sierpinski_carpet().cells);
  CHECK(spec_hash(spec) == spec_hash(builtin_sierpinski_carpet()));
}

TEST_CASE("frozen spec hashes") {
  CHECK(spec_hash(builtin_sierpinski_carpet()) == "c6ae6e022ac2ab7d");
  CHECK(spec_hash(builtin_menger_sponge()) == "d33bd9622cfe6548");
  CHECK(spec_hash(gen_counterexample(3, 2)) == "9a8f5c9066c9e5c0");
}

TEST_CASE("parse diagnostics name the offending field") {
  auto parse = [](const char* text) { return spec_from_json(Json::parse(text)); };

  CHECK_THROWS_WITH_AS(parse(R"({"l":3,"S":[[0,0]]})"),
                       doctest::Contains("missing field \"d\""), SpecError);
  CHECK_THROWS_WITH_AS(parse(R"({"d":"two","l":3,"S":[[0,0]]})"),
                       doctest::Contains("\"d\" must be an integer"), SpecError);
  CHECK_THROWS_WITH_AS(parse(R"({"d":2,"l":3,"S":[[0,0],5]})"), doctest::Contains("S[1]"),
                       SpecError);
  CHECK_THROWS_WITH_AS(parse(R"({"d":2,"l":3,"S":[[0,0],[0,0.5]]})"),
                       doctest::Contains("S[1]"), SpecError);
  CHECK_THROWS_WITH_AS(parse(R"({"d":2,"l":3,"S":[[0,0],[0,9]]})"),
                       doctest::Contains("outside [0, 2]"), SpecError);
  CHECK_THROWS_WITH_AS(parse(R"({"d":2,"l":3,"S":[[0,0],[0,0]]})"),
                       doctest::Contains("duplicate"), SpecError);
  CHECK_THROWS_WITH_AS(parse(R"({"d":2,"l":3,"S":[[0],[1,0]]})"),
                       doctest::Contains("wrong arity"), SpecError);

  TempDir tmp;
  const fs::path broken = tmp.path / "broken.json";
  std::ofstream(broken) << "{\"d\":2,\n\"l\":3,";
  try {
    load_spec_file(broken);
    FAIL("expected SpecError");
  } catch (const SpecError& e) {
    // parse diagnostics carry the byte position of the failure
    CHECK(std::string(e.what()).find("broken.json") != std::string::npos);
    CHECK(std::string(e.what()).find("parse error") != std::string::npos);
  }
  CHECK_THROWS_AS(load_spec_file(tmp.path / "missing.json"), SpecError);
}

TEST_CASE("validation report serialization is stable and complete") {
  const CarpetSpec sc = builtin_sierpinski_carpet();
  const ValidationReport report = validate_spec(sc);
  const Json j = validation_to_json(sc, report);
  CHECK(j["overall_pass"] == true);
  CHECK(j["gsc3_nondiagonality"]["method"] == "nd_2");
  CHECK(j["bb99"]["holds"] == true);
  CHECK(j["spec_hash"] == "c6ae6e022ac2ab7d");

  // stable key order
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"schema_version", "artifact_version", "spec",
                                         "spec_hash", "gsc1_symmetry", "gsc2_connectedness",
                                         "gsc3_nondiagonality", "gsc4_border", "bb99",
                                         "overall_pass"});

  // witnesses serialize on failure
  const CarpetSpec row = CarpetSpec::create(2, 3, {{0, 0}, {1, 0}, {2, 0}});
  const Json fail = validation_to_json(row, validate_spec(row));
  CHECK(fail["overall_pass"] == false);
  CHECK(fail["gsc1_symmetry"]["pass"] == false);
  CHECK(fail["gsc1_symmetry"]["witness"].contains("cell"));
}

TEST_CASE("scaling report serialization") {
  const CarpetSpec sc = builtin_sierpinski_carpet();
  const ScalingReport report = resistance_sequence(sc, 2);
  const WitnessVerdict verdict = dw_witness(report);
  const Json j = scaling_to_json(sc, report, &verdict);
  CHECK(j["levels"].size() == 2);
  CHECK(j["ratios"].size() == 1);
  CHECK(j["witness"]["pass"] == true);
  CHECK(j["complete"] == true);

  const std::string csv = scaling_to_csv(report);
  CHECK(csv.find("level,energy,ratio,dw_estimate,margin,glue_gap\n") == 0);
  // one row per level, the last one with empty ratio fields
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find(",,,,\n") != std::string::npos);

  // identical runs serialize byte-identically
  const ScalingReport again = resistance_sequence(sc, 2);
  const WitnessVerdict verdict2 = dw_witness(again);
  CHECK(scaling_to_json(sc, again, &verdict2).dump() == j.dump());
  CHECK(scaling_to_csv(again) == csv);
}

TEST_CASE("walk and profile serialization") {
  const CarpetSpec sc = builtin_sierpinski_carpet();
  const WalkStats stats = random_walk_crossing(sc, 1, 500, 99);
  const Json wj = walk_to_json(sc, stats);
  CHECK(wj["trials"] == 500);
  CHECK(wj["seed"] == 99);
  CHECK(wj["mean_steps"].is_number());

  const CellGraph g = build_cell_graph(sc, 2);
  const HarmonicSolution sol = solve_face_problem(g, 0);
  const EnergyProfile profile = energy_profile(g, sol.values, 1);
  const Json pj = profile_to_json(sc, g, profile);
  CHECK(pj["concentration"].size() == 3);
  CHECK(pj["masses"].size() == 8);

  const std::string csv = profile_to_csv(profile);
  CHECK(csv.find("fraction,cells,mu_mass\n") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("solution and graph exports") {
  const CarpetSpec sc = builtin_sierpinski_carpet();
  const CellGraph g = build_cell_graph(sc, 1);
  const HarmonicSolution sol = solve_face_problem(g, 0);

  const std::string csv = solution_to_csv(g, sol.values);
  CHECK(csv.find("o0,o1,value\n") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);

  const Json meta = solution_meta_json(sc, sol);
  CHECK(meta["energy"].is_number());
  CHECK(meta["symmetrized"] == true);

  const std::string graph_csv = graph_to_csv(g);
  CHECK(graph_csv.find("o0,o1,n0,n1\n") == 0);
  CHECK(std::count(graph_csv.begin(), graph_csv.end(), '\n') == 9);

  const Json header = graph_header_json(sc, g);
  CHECK(header["cells"] == 8);
  CHECK(header["face_edges"] == 8);
}
