#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "gsi/config.hpp"
#include "gsi/csv_io.hpp"
#include "gsi/error.hpp"
#include "gsi/report.hpp"
#include "gsi/run.hpp"

using namespace gsi;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string field_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::configuration);
    return e.field();
  }
  FAIL("expected a configuration error");
  return {};
}

json minimal() { return {{"schema", 1}, {"model", "identity_2"}, {"subsets", {{1}}}, {"n", 1000}, {"seed", 1}}; }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "gsi_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(GSI_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("minimal config defaults") {
  const auto cfg = parse_config(minimal());
  CHECK(cfg.model.name == "identity_2");
  CHECK(cfg.subsets.size() == 1);
  CHECK(cfg.subsets[0].indices() == std::vector<std::size_t>{0});
  CHECK(cfg.matrix == Matrix::Identity(2, 2));
  CHECK(!cfg.matrix_given);
  CHECK(cfg.oracle_auto);
  CHECK(cfg.in_dims == 2);
  CHECK(cfg.out_dims == 2);
}

TEST_CASE("config errors name their field") {
  auto doc = minimal();
  doc["subsets"] = {{3}};
  CHECK(field_of(doc) == "subsets[0]");

  doc = minimal();
  doc["matrix"] = {{1, 0, 0}, {0, 1, 0}};
  CHECK(field_of(doc) == "matrix");

  doc = minimal();
  doc["model"] = "unknown_model";
  CHECK(field_of(doc) == "model");

  doc = minimal();
  doc["schema"] = 2;
  CHECK(field_of(doc) == "schema");

  doc = minimal();
  doc["transform"] = {{"kind", "isometry"}, {"matrix", {{1, 1}, {0, 1}}}};
  CHECK(field_of(doc) == "transform.matrix");

  doc = minimal();
  doc["colour"] = "blue";
  CHECK(field_of(doc) == "colour");

  doc = minimal();
  doc["space"] = {{"marginals", {{{"uniform", {0, 1}}}}}};
  CHECK(field_of(doc) == "space");

  doc = minimal();
  doc.erase("n");
  CHECK(field_of(doc) == "n");
}

TEST_CASE("config accepts the documented forms") {
  auto doc = minimal();
  doc["model"] = {{"name", "linear"}, {"params", {{"a", {1, 2, 3, 4, 5, 6}}, {"rows", 2}}}};
  doc["space"] = {{"marginals", {{{"uniform", {0, 1}}}, {{"normal", {0, 2}}},
                                 {{"discrete", {{"support", {0, 1}}, {"probabilities", {0.25, 0.75}}}}}}}};
  doc["subsets"] = {{1, 3}, "2", 3};
  doc["matrix"] = {{2, 0}, {0, 1}};
  doc["ci"] = {{"method", "bootstrap"}, {"reps", 300}, {"level", 0.9}};
  doc["oracle"] = "none";
  const auto cfg = parse_config(doc);
  CHECK(cfg.in_dims == 3);
  CHECK(cfg.out_dims == 2);
  CHECK(cfg.subsets.size() == 3);
  CHECK(cfg.subsets[0].indices() == std::vector<std::size_t>{0, 2});
  CHECK(cfg.subsets[2].indices() == std::vector<std::size_t>{2});
  CHECK(cfg.matrix_given);
  CHECK(cfg.ci.kind == CiConfig::Kind::bootstrap);
  CHECK(cfg.ci.bootstrap_reps == 300);
  CHECK(!cfg.oracle_auto);

  const auto m = scratch("m.txt");
  write_file(m, "# projection\n1 0\n0 3\n");
  doc = minimal();
  doc["matrix"] = m.filename().string();
  CHECK(parse_config(doc, m.parent_path().string()).matrix(1, 1) == 3.0);
}

TEST_CASE("run identity_2 against its oracle") {
  auto doc = minimal();
  doc["n"] = 100000;
  doc["ci"] = "delta";
  const auto report = run(parse_config(doc));
  REQUIRE(report.records.size() == 1);
  const auto& r = report.records[0];
  REQUIRE(r.oracle.has_value());
  CHECK(r.oracle->s_u == 0.5);
  CHECK(r.oracle->method == "closed_form");
  CHECK(std::abs(r.estimate - 0.5) < 0.01);
  REQUIRE(r.ci.has_value());
  CHECK(r.ci->low <= r.estimate);
  CHECK(r.estimate <= r.ci->high);
}

TEST_CASE("run reports oracles for both the identity and the configured matrix") {
  auto doc = minimal();
  doc["n"] = 200000;
  doc["matrix"] = {{1, 0}, {0, 2}};
  const auto report = run(parse_config(doc));
  const auto& r = report.records[0];
  REQUIRE(r.oracle.has_value());
  REQUIRE(r.oracle->general.has_value());
  CHECK(r.oracle->s_u == 0.5);
  CHECK(r.oracle->general->s_u == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(std::abs(r.estimate - r.oracle->s_u) < 0.01);
  REQUIRE(r.estimate_general.has_value());
  CHECK(std::abs(*r.estimate_general - r.oracle->general->s_u) < 0.01);
  CHECK(report_from_json(json::parse(render_json(report))) == report);
}

TEST_CASE("run rejects a constant model") {
  auto doc = minimal();
  doc["model"] = "constant";
  try {
    run(parse_config(doc));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(exit_code(e.kind()) == exit_degenerate);
  }
}

TEST_CASE("run embeds a replication study") {
  auto doc = minimal();
  doc["replications"] = 500;
  doc["ci"] = "delta";
  const auto report = run(parse_config(doc));
  REQUIRE(report.records[0].replication.has_value());
  const auto& rep = *report.records[0].replication;
  CHECK(rep.reps == 500);
  CHECK(rep.normality_stat < 0.1);
  CHECK(rep.coverage > 0.85);
  CHECK(rep.coverage <= 1.0);
  CHECK(rep.target == 0.5);
}

TEST_CASE("report round trip and CSV") {
  auto doc = minimal();
  doc["subsets"] = {{1}, {2}, {1, 2}};
  doc["model"] = "sum_prod";
  doc["ci"] = "bootstrap";
  doc["matrix"] = {{1, 0.5}, {0.5, 2}};
  doc["replications"] = 200;
  const auto report = run(parse_config(doc));
  CHECK(report_from_json(json::parse(render_json(report))) == report);
  CHECK(report_from_json(to_json(report)) == report);

  const std::string csv = render_csv(report);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.rfind("subset,estimate,oracle,sigma2_hat,ci_low,ci_high,n,seed\n", 0) == 0);

  auto bad = report;
  bad.records[1].estimate = std::numeric_limits<double>::quiet_NaN();
  const auto path = scratch("nan.json");
  fs::remove(path);
  CHECK_THROWS_AS(write_report(bad, path.string(), ReportFormat::json), Error);
  CHECK(!fs::exists(path));
  CHECK_THROWS_AS(render_json(bad), Error);
}

TEST_CASE("sample export and import reproduce the estimate") {
  auto doc = minimal();
  doc["model"] = "sum_prod";
  const auto cfg = parse_config(doc);
  const auto sample = pick_freeze(configured_model(cfg), cfg.space, cfg.subsets[0], cfg.n, subset_seed(cfg, 0));
  const auto path = scratch("sample.csv");
  io::write_sample(path.string(), sample);
  const auto back = io::read_sample(path.string(), cfg.subsets[0]);
  CHECK(back.y == sample.y);
  CHECK(back.y_u == sample.y_u);
  CHECK(estimate_index(back) == run(cfg).records[0].estimate);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 15.0 / 31.0}) CHECK(io::parse_double(io::format_double(v), "x") == v);
}

TEST_CASE("cli exit statuses") {
  const auto cfg = scratch("ok.json");
  write_file(cfg, minimal().dump());
  CHECK(cli("run --config " + cfg.string() + " --reproducible") == 0);
  CHECK(cli("run --model identity_2 --subset 1 --n 500 --seed 3") == 0);
  CHECK(cli("run --model identity_2 --subset 3 --n 500 --seed 3") == 2);
  CHECK(cli("run --model constant --subset 1 --n 500 --seed 3") == 3);
  CHECK(cli("run --config " + scratch("missing.json").string()) == 4);
  CHECK(cli("run --config " + cfg.string() + " --output /nonexistent_dir/x.json") == 4);
  CHECK(cli("models") == 0);
}

TEST_CASE("cli output is deterministic and flags override the config") {
  const auto cfg = scratch("det.json");
  auto doc = minimal();
  doc["ci"] = "bootstrap";
  write_file(cfg, doc.dump());
  const auto a = scratch("a.json"), b = scratch("b.json"), c = scratch("c.json");
  REQUIRE(cli("run --config " + cfg.string() + " --reproducible --output " + a.string()) == 0);
  REQUIRE(cli("run --config " + cfg.string() + " --reproducible --threads 3 --output " + b.string()) == 0);
  CHECK(read_file(a) == read_file(b));
  REQUIRE(cli("run --config " + cfg.string() + " --reproducible --n 2000 --output " + c.string()) == 0);
  const auto report = report_from_json(json::parse(read_file(c)));
  CHECK(report.records[0].n == 2000);
}

TEST_CASE("cli estimate on an exported sample") {
  const auto cfg = scratch("est.json");
  auto doc = minimal();
  doc["model"] = "sum_prod";
  write_file(cfg, doc.dump());
  const auto s = scratch("s.csv"), r1 = scratch("r1.json"), r2 = scratch("r2.json");
  REQUIRE(cli("sample --config " + cfg.string() + " --output " + s.string()) == 0);
  REQUIRE(cli("estimate --samples " + s.string() + " --subset 1 --output " + r2.string()) == 0);
  REQUIRE(cli("run --config " + cfg.string() + " --reproducible --output " + r1.string()) == 0);
  const auto run_report = report_from_json(json::parse(read_file(r1)));
  const auto est_report = report_from_json(json::parse(read_file(r2)));
  CHECK(est_report.records[0].estimate == run_report.records[0].estimate);
}

TEST_CASE("cli external model workflow") {
  const auto cfg = scratch("ext.json");
  json doc = minimal();
  doc["model"] = "sum_prod";
  doc["n"] = 200;
  write_file(cfg, doc.dump());
  const auto design = scratch("design.csv");
  REQUIRE(cli("design --config " + cfg.string() + " --output " + design.string()) == 0);
  const auto points = io::read_table(design.string());
  RowMatrix y(points.values.rows(), 2);
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    y(i, 0) = points.values(i, 0) + points.values(i, 1);
    y(i, 1) = points.values(i, 0) * points.values(i, 1);
  }
  const auto table = scratch("table.csv");
  io::write_external_table(table.string(), points.values, y);
  json ext = doc;
  ext["model"] = {{"external", table.string()}};
  ext["space"] = {{"marginals", {{{"uniform", {0, 1}}}, {{"uniform", {0, 1}}}}}};
  const auto builtin = run(parse_config(doc));
  const auto external = run(parse_config(ext));
  CHECK(external.records[0].estimate == builtin.records[0].estimate);
  CHECK(!external.records[0].oracle.has_value());
}
