#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "eow/io/runs.hpp"

using namespace eow;
using namespace eow::io;

namespace {

const std::string data_dir = EOW_DATA_DIR;
const std::string cli = EOW_CLI_PATH;

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("eow_cli_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

int shell(const std::string& cmd) {
  const int st = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

json minimal_problem() {
  return json::parse(R"({"n": 2, "hypersurface": {"graph_v": ["y1^2", "-y2^2"]},
                         "wedge": {"axis": ["1", "0"], "aperture": 0.1}})");
}

std::string parse_error_of(const json& j) {
  try {
    (void)parse_problem(j);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

json quick_screens() {
  return json::parse(R"({"screens": {"t_points": 4, "boundary_samples": 100, "target_grid": 8,
                                      "audit_polynomials": 3, "trace_samples": 5, "curve_samples": 3}})");
}

}  // namespace

TEST_CASE("polynomial literals parse and print back") {
  const Vars v{"x1", "x2", "y1", "y2", "u"};
  const auto p = parse_terms(json::parse(R"(["-1/2*x1^2*y1", "u", "3", "0.25*y2", "-x2"])"), v, 6, "p");
  CHECK(p.coefficient({{"x1", 2}, {"y1", 1}}) == Scalar(-1, 2));
  CHECK(p.coefficient({{"u", 1}}) == 1);
  CHECK(p.coefficient({}) == 3);
  CHECK(p.coefficient({{"y2", 1}}) == Scalar(1, 4));
  CHECK(p.coefficient({{"x2", 1}}) == -1);
  CHECK(parse_terms(emit_terms(p), v, 6, "p") == p);
  // terms above the cap are truncated
  CHECK(parse_terms(json::parse(R"(["x1^7"])"), v, 6, "p").is_zero());
}

TEST_CASE("malformed problems give located diagnostics") {
  auto j = minimal_problem();
  j["hypersurface"]["graph_v"] = {"y1^2", "-y2^2", "2*q1"};
  CHECK_THAT(parse_error_of(j), Catch::Matchers::ContainsSubstring("hypersurface.graph_v[2]") &&
                                    Catch::Matchers::ContainsSubstring("unknown variable 'q1'"));
  j = minimal_problem();
  j["hypersurface"]["graph_v"] = {"y1^2", "-y2^^2"};
  CHECK_THAT(parse_error_of(j), Catch::Matchers::ContainsSubstring("[1]"));
  j = minimal_problem();
  j["hypersurface"]["graph_v"] = {"y1*2"};
  CHECK_THAT(parse_error_of(j), Catch::Matchers::ContainsSubstring("coefficient must lead"));
  j = minimal_problem();
  j["wedge"]["axis"] = {"1", "x"};
  CHECK_THAT(parse_error_of(j), Catch::Matchers::ContainsSubstring("wedge.axis[1]"));
  j = minimal_problem();
  j["base_point"] = {"0", "0"};
  CHECK_THAT(parse_error_of(j), Catch::Matchers::ContainsSubstring("base_point"));
  j = minimal_problem();
  j["edge"] = {{"graph_v", {"x1^4"}}};
  CHECK_THAT(parse_error_of(j), Catch::Matchers::ContainsSubstring("edge is not contained"));
  j = minimal_problem();
  j["n"] = 1;
  j["hypersurface"]["graph_v"] = {"y1^2"};
  j.erase("wedge");
  CHECK_THAT(parse_error_of(j), Catch::Matchers::ContainsSubstring("n < 2"));
  j = minimal_problem();
  j["colour"] = "blue";
  CHECK_THAT(parse_error_of(j), Catch::Matchers::ContainsSubstring("unknown field 'colour'"));
  try {
    (void)parse_problem_text("{\n  \"n\": 2,\n  \"hypersurface\": [\n}");
    FAIL("expected a syntax error");
  } catch (const ParseError& e) {
    CHECK_THAT(std::string(e.what()), Catch::Matchers::ContainsSubstring("line 4"));
  }
}

TEST_CASE("config merging rejects unknown keys and honours overrides") {
  const json c = resolve_config(json::parse(R"({"lewy": {"angles": 360}})"), json::parse(R"({"seed": 9})"));
  CHECK(c["lewy"]["angles"] == 360);
  CHECK(c["lewy"]["max_delta"] == 0.25);
  CHECK(c["seed"] == 9);
  CHECK(resolve_config(json::object(), json::object(), 17)["seed"] == 17);
  CHECK_THROWS_AS(resolve_config(json::parse(R"({"lewy": {"angels": 1}})")), ParseError);
  CHECK_THROWS_AS(resolve_config(json::parse(R"({"seed": -1})")), ParseError);
}

TEST_CASE("serialization is canonical and idempotent") {
  for (const char* f : {"split_quadric_null_axis.json", "split_quadric_y1_axis.json", "hyperquadric.json"}) {
    const Problem P = load_problem(data_dir + "/" + f);
    const std::string once = canonical_dump(serialize_problem(P));
    const Problem Q = parse_problem_text(once);
    CHECK(canonical_dump(serialize_problem(Q)) == once);
    CHECK(Q.model.r == P.model.r);
  }
  // equivalent spellings share one canonical form and digest
  auto a = minimal_problem(), b = minimal_problem();
  b["hypersurface"]["graph_v"] = {"-1*y2^2", "1*y1*y1"};
  b["wedge"]["axis"] = {"2/2", 0};
  CHECK(canonical_dump(serialize_problem(parse_problem(a))) == canonical_dump(serialize_problem(parse_problem(b))));
}

TEST_CASE("canonical dump prints 17 significant digits") {
  CHECK(fmt_double(0.1) == "0.10000000000000001");
  CHECK(canonical_dump(json{{"b", 1}, {"a", 0.5}}) == "{\n  \"a\": 0.5,\n  \"b\": 1\n}\n");
  CHECK(fnv1a("") == 14695981039346656037ULL);
  CHECK(hex64(fnv1a("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("classify reports exact normal-form data") {
  const Problem P = load_problem(data_dir + "/hyperquadric.json");
  const Report R = run_classify(P, resolve_config(P.config));
  CHECK(R.exit_code == exit_ok);
  CHECK(R.doc["payload"]["normal_form"]["Lambda"] == json::parse(R"([["0","0"],["0","0"]])"));
  CHECK(R.doc["payload"]["normal_form"]["Omega"] == json::parse(R"([["0","-1"],["1","0"]])"));
  CHECK(R.doc["status"] == "TwoSidedExtension");
  const auto notes = R.doc["payload"]["classification"]["notes"].dump();
  CHECK_THAT(notes, Catch::Matchers::ContainsSubstring("all directions in N are null"));
}

TEST_CASE("screen report writes the figure traces deterministically") {
  const json cfg = resolve_config(json::object(), quick_screens());
  const Report R1 = run_certify(std::nullopt, "screens", cfg);
  const Report R2 = run_certify(std::nullopt, "screens", cfg);
  CHECK(R1.exit_code == exit_ok);
  CHECK(canonical_dump(R1.doc) == canonical_dump(R2.doc));
  const auto dir = scratch("screens");
  const auto files = emit_plot(R1.traces, dir.string());
  REQUIRE(files.size() == 1);
  const std::string csv = slurp(files[0]);
  CHECK(csv.rfind("t,arc,eta1,eta2\n", 0) == 0);
  CHECK(csv.find(",eta2=2*eta1^2,1,2\n") != std::string::npos);
  CHECK(csv.find(",eta2=eta1/2,1,0.5\n") != std::string::npos);
  CHECK(csv.find(",right,") != std::string::npos);
  CHECK(csv.find(",left,") != std::string::npos);
  emit_plot(R2.traces, dir.string());
  CHECK(slurp(files[0]) == csv);
  CHECK(emit_plot({}, (dir / "empty").string()).empty());
  CHECK_FALSE(std::filesystem::exists(dir / "empty"));
}

TEST_CASE("lewy target on the split quadric") {
  const Problem P = load_problem(data_dir + "/split_quadric_y1_axis.json");
  json over = json::parse(R"({"lewy": {"angles": 360, "audit_polynomials": 4}})");
  const Report R = run_certify(P, "lewy", resolve_config(P.config, over));
  CHECK(R.exit_code == exit_ok);
  CHECK(R.doc["status"] == "valid");
  for (const auto& d : R.doc["payload"]["discs"]) CHECK(d["edge_crossings"] == 2);
  REQUIRE(R.traces.size() == 1);
  CHECK(R.traces[0].header == std::vector<std::string>{"delta", "side", "xi1", "eta1", "xi2", "eta2"});
  over["lewy"]["sigma"] = {0, 1.4142135623730951};
  CHECK_THROWS_AS(run_certify(P, "lewy", resolve_config(P.config, over)), PreconditionError);
}

TEST_CASE("certificate errors become invalid reports") {
  auto j = minimal_problem();
  j["wedge"]["axis"] = {"0", "1"};
  j["config"] = json::parse(R"({"lewy": {"angles": 90, "audit_polynomials": 1, "deltas": [0.03], "sigma": [0, 1]}})");
  const Problem P = parse_problem(j);
  const Report R = run_certify(P, "lewy", resolve_config(P.config));
  CHECK(R.exit_code == exit_invalid);
  CHECK(R.doc["status"] == "invalid");
  CHECK_THAT(R.doc["error"].get<std::string>(), Catch::Matchers::ContainsSubstring("leaves W u E"));
}

TEST_CASE("command line exit codes and determinism") {
  const auto dir = scratch("cmd");
  const std::string quick = (dir / "quick.json").string();
  std::ofstream(quick) << quick_screens().dump();
  const std::string y1 = data_dir + "/split_quadric_y1_axis.json";
  const std::string nul = data_dir + "/split_quadric_null_axis.json";

  CHECK(shell(cli + " classify -i " + nul) == exit_ok);
  CHECK(shell(cli + " classify -i " + y1) == exit_ok);
  CHECK(shell(cli + " certify --target screens --config " + quick) == exit_ok);
  CHECK(shell(cli + " certify --target screens --config " + quick + " --seed 3 -o " + (dir / "a.json").string() +
              " --plot " + (dir / "pa").string()) == exit_ok);
  CHECK(shell(cli + " certify --target screens --config " + quick + " --seed 3 -o " + (dir / "b.json").string() +
              " --plot " + (dir / "pb").string()) == exit_ok);
  CHECK(slurp((dir / "a.json").string()) == slurp((dir / "b.json").string()));
  CHECK(slurp((dir / "pa" / "screen_discs.csv").string()) == slurp((dir / "pb" / "screen_discs.csv").string()));
  CHECK(shell(cli + " plot --target screens --config " + quick + " --plot " + (dir / "pc").string()) == exit_ok);
  CHECK(std::filesystem::exists(dir / "pc" / "screen_discs.csv"));

  const std::string neg = (dir / "neg.json").string();
  std::ofstream(neg) << R"({"lewy": {"sigma": [0, 1.4142135623730951]}})";
  CHECK(shell(cli + " certify --target lewy -i " + y1 + " --config " + neg) == exit_rejected);
  CHECK(shell(cli + " certify --target sweep -i " + y1) == exit_rejected);

  const std::string bad = (dir / "bad.json").string();
  std::ofstream(bad) << R"({"n": 2, "hypersurface": {"graph_v": ["y1^2", "-y2^2", "3*zz"]}})";
  CHECK(shell(cli + " classify -i " + bad) == exit_parse);
  CHECK(shell(cli + " classify -i " + (dir / "missing.json").string()) == exit_parse);
  CHECK(shell(cli + " certify --target nonsense") == exit_parse);
  CHECK(shell(cli + " classify -i " + nul + " --degree-cap 2") == exit_parse);

  // Levi form vanishing at the base point: NoGuarantee
  const std::string degenerate = (dir / "degenerate.json").string();
  std::ofstream(degenerate) << R"({"n": 2, "hypersurface": {"graph_v": ["y1^3"]},
                                    "wedge": {"axis": ["1", "0"], "aperture": 0.1}})";
  CHECK(shell(cli + " classify -i " + degenerate) == exit_no_guarantee);
}
