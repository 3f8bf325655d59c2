// gsi: generalized Sobol indices for vector-valued models.
//
//   gsi run      --config run.json [overrides]   estimate (and check) indices
//   gsi design   --config run.json --output x.csv   design points to evaluate externally
//   gsi sample   --config run.json --output s.csv   export a pick-freeze sample
//   gsi estimate --samples s.csv                  estimator-only run on a sample file
//   gsi models                                    list corpus models

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsi/config.hpp"
#include "gsi/corpus.hpp"
#include "gsi/csv_io.hpp"
#include "gsi/kernels.hpp"
#include "gsi/pickfreeze.hpp"
#include "gsi/run.hpp"

namespace {

using nlohmann::json;

struct ConfigFlags {
  std::string config;
  std::string model;
  std::vector<std::string> params;
  std::vector<std::string> subsets;
  std::optional<std::size_t> n;
  std::optional<gsi::Seed> seed;
  std::string matrix;
  std::string ci;
  std::optional<double> ci_level;
  std::optional<std::size_t> bootstrap_reps;
  std::string oracle;
  std::optional<std::size_t> replications;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "Run configuration (JSON, schema 1)");
    app->add_option("--model", model, "Corpus model name, or path to an x1..xp,y1..yk CSV table");
    app->add_option("--param", params, "Corpus model parameter key=v1[,v2...] (repeatable)");
    app->add_option("--subset", subsets, "Subset of 1-based input indices, comma separated (repeatable)");
    app->add_option("--n", n, "Pick-freeze sample size N");
    app->add_option("--seed", seed, "Base seed");
    app->add_option("--matrix", matrix, "Projection matrix file (whitespace-separated rows)");
    app->add_option("--ci", ci, "Interval method")->check(CLI::IsMember({"none", "delta", "bootstrap"}));
    app->add_option("--ci-level", ci_level, "Interval level (default 0.95)");
    app->add_option("--bootstrap-reps", bootstrap_reps, "Bootstrap replicates (default 1000)");
    app->add_option("--oracle", oracle, "Exact oracle comparison")->check(CLI::IsMember({"auto", "none"}));
    app->add_option("--replications", replications, "Embed a replication study with this many replicates");
  }

  static std::string absolute(const std::string& path) { return std::filesystem::absolute(path).string(); }

  // Config file (if any) with command-line overrides applied key by key.
  gsi::RunConfig resolve() const {
    json doc = json::object();
    std::string base = ".";
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw gsi::Error(gsi::ErrorKind::io, "cannot open config " + config);
      std::stringstream buf;
      buf << in.rdbuf();
      try {
        doc = json::parse(buf.str());
      } catch (const json::parse_error& e) {
        gsi::config_error("", std::string("malformed config: ") + e.what());
      }
      base = std::filesystem::path(config).parent_path().string();
      if (base.empty()) base = ".";
    }
    if (!doc.is_object()) gsi::config_error("", "config must be a key-value object");
    if (!doc.contains("schema")) doc["schema"] = gsi::kSchemaVersion;
    if (!model.empty()) {
      if (std::filesystem::path(model).extension() == ".csv")
        doc["model"] = {{"external", absolute(model)}};
      else
        doc["model"] = {{"name", model}};
    }
    if (!params.empty()) {
      if (!doc.contains("model")) gsi::config_error("model", "--param needs a model");
      if (doc["model"].is_string()) doc["model"] = {{"name", doc["model"]}};
      for (const auto& kv : params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) gsi::config_error("model.params", "expected key=value, got '" + kv + "'");
        json values = json::array();
        std::stringstream in(kv.substr(eq + 1));
        std::string tok;
        while (std::getline(in, tok, ',')) values.push_back(gsi::io::parse_double(tok, "--param " + kv));
        doc["model"]["params"][kv.substr(0, eq)] = values;
      }
    }
    if (!subsets.empty()) doc["subsets"] = subsets;
    if (n) doc["n"] = *n;
    if (seed) doc["seed"] = *seed;
    if (!matrix.empty()) doc["matrix"] = absolute(matrix);
    if (!ci.empty() || ci_level || bootstrap_reps) {
      json c = doc.contains("ci") && doc["ci"].is_object() ? doc["ci"] : json::object();
      if (doc.contains("ci") && doc["ci"].is_string()) c["method"] = doc["ci"];
      if (!ci.empty()) c["method"] = ci;
      if (!c.contains("method")) c["method"] = "delta";
      if (ci_level) c["level"] = *ci_level;
      if (bootstrap_reps) c["reps"] = *bootstrap_reps;
      doc["ci"] = c;
    }
    if (!oracle.empty()) doc["oracle"] = oracle;
    if (replications) doc["replications"] = *replications;
    return gsi::parse_config(doc, base);
  }
};

void emit(const std::string& output, const std::string& text) {
  if (output.empty() || output == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw gsi::Error(gsi::ErrorKind::io, "cannot open " + output + " for writing");
  out << text;
  if (!out) throw gsi::Error(gsi::ErrorKind::io, "write failed for " + output);
}

std::string render(const gsi::RunReport& report, const std::string& format, bool reproducible) {
  return format == "csv" ? gsi::render_csv(report) : gsi::render_json(report, reproducible);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Sobol sensitivity indices for vector-valued models"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (default: runtime setting)");

  ConfigFlags run_flags, design_flags, sample_flags;
  std::string output, format = "json";
  bool reproducible = false;

  auto* run_cmd = app.add_subcommand("run", "Estimate indices for each configured subset");
  run_flags.attach(run_cmd);
  run_cmd->add_option("--output", output, "Report destination (default stdout)");
  run_cmd->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  run_cmd->add_flag("--reproducible", reproducible, "Omit timing so identical configs give identical bytes");

  auto* design_cmd = app.add_subcommand("design", "Write every input point a run will evaluate (x1..xp)");
  design_flags.attach(design_cmd);
  design_cmd->add_option("--output", output, "CSV destination")->required();

  std::size_t which = 1;
  auto* sample_cmd = app.add_subcommand("sample", "Export the pick-freeze sample of one subset (y_1..y_k,yu_1..yu_k)");
  sample_flags.attach(sample_cmd);
  sample_cmd->add_option("--which", which, "1-based position of the subset in the config")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--output", output, "CSV destination")->required();

  std::string samples, est_matrix, est_ci = "none";
  std::vector<std::size_t> est_subset;
  double est_level = 0.95;
  std::size_t est_reps = 1000;
  gsi::Seed est_seed = 0;
  auto* estimate_cmd = app.add_subcommand("estimate", "Estimator-only run on an exported or external sample");
  estimate_cmd->add_option("--samples", samples, "Sample CSV (y_1..y_k,yu_1..yu_k)")->required();
  estimate_cmd->add_option("--subset", est_subset, "Subset label recorded in the report (1-based)")->delimiter(',');
  estimate_cmd->add_option("--matrix", est_matrix, "Projection matrix file");
  estimate_cmd->add_option("--ci", est_ci, "Interval method")->check(CLI::IsMember({"none", "delta", "bootstrap"}));
  estimate_cmd->add_option("--ci-level", est_level, "Interval level");
  estimate_cmd->add_option("--bootstrap-reps", est_reps, "Bootstrap replicates");
  estimate_cmd->add_option("--seed", est_seed, "Bootstrap seed");
  estimate_cmd->add_option("--output", output, "Report destination (default stdout)");
  estimate_cmd->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  auto* models_cmd = app.add_subcommand("models", "List corpus models");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gsi::exit_config;
  }
  if (threads > 0) gsi::kernels::set_threads(threads);

  try {
    if (*models_cmd) {
      for (const auto& name : gsi::corpus::names()) std::cout << name << '\n';
      return gsi::exit_ok;
    }
    if (*run_cmd) {
      const auto report = gsi::run(run_flags.resolve());
      emit(output, render(report, format, reproducible));
      return gsi::exit_ok;
    }
    if (*design_cmd) {
      const auto config = design_flags.resolve();
      std::vector<gsi::RowMatrix> blocks;
      Eigen::Index rows = 0;
      for (std::size_t s = 0; s < config.subsets.size(); ++s) {
        const auto d = gsi::generate_design(config.space, config.subsets[s], config.n, gsi::subset_seed(config, s));
        blocks.push_back(d.x);
        blocks.push_back(d.frozen_inputs());
        rows += 2 * d.x.rows();
      }
      gsi::RowMatrix all(rows, static_cast<Eigen::Index>(config.in_dims));
      Eigen::Index at = 0;
      for (const auto& b : blocks) {
        all.middleRows(at, b.rows()) = b;
        at += b.rows();
      }
      std::vector<std::string> header;
      for (std::size_t j = 1; j <= config.in_dims; ++j) header.push_back("x" + std::to_string(j));
      gsi::io::write_table(output, header, all);
      return gsi::exit_ok;
    }
    if (*sample_cmd) {
      const auto config = sample_flags.resolve();
      if (which > config.subsets.size()) gsi::config_error("which", "no such subset position");
      const auto model = gsi::configured_model(config);
      const auto sample = gsi::pick_freeze(model, config.space, config.subsets[which - 1], config.n,
                                           gsi::subset_seed(config, which - 1));
      gsi::io::write_sample(output, sample);
      return gsi::exit_ok;
    }
    if (*estimate_cmd) {
      std::vector<std::size_t> label = est_subset;
      std::size_t p = 1;
      for (auto i : label) p = std::max(p, i);
      std::vector<std::size_t> zero_based;
      for (auto i : label) {
        if (i == 0) gsi::config_error("subset", "indices are 1-based");
        zero_based.push_back(i - 1);
      }
      std::sort(zero_based.begin(), zero_based.end());
      if (zero_based.empty()) zero_based.push_back(0);
      const auto sample = gsi::io::read_sample(samples, gsi::SubsetIndex(zero_based, p));
      const auto k = static_cast<Eigen::Index>(sample.out_dims());
      gsi::RunReport report;
      report.model = "sample:" + samples;
      report.out_dims = sample.out_dims();
      gsi::Matrix m = gsi::Matrix::Identity(k, k);
      if (!est_matrix.empty()) {
        m = gsi::io::read_matrix(est_matrix);
        if (m.rows() != k || m.cols() != k) gsi::config_error("matrix", "expected a k x k matrix");
      }
      for (Eigen::Index r = 0; r < m.rows(); ++r) report.matrix.emplace_back(m.row(r).data(), m.row(r).data() + m.cols());
      gsi::SubsetRecord rec;
      rec.subset = label;
      rec.n = sample.size();
      rec.seed = est_seed;
      rec.estimate = gsi::estimate_index(sample);
      if (!est_matrix.empty()) rec.estimate_general = gsi::estimate_index_general(sample, m);
      if (sample.size() >= 10) rec.sigma2_hat = gsi::delta_variance(sample);
      if (est_ci == "delta") {
        const auto e = gsi::delta_ci(sample, est_level);
        rec.ci = gsi::CiRecord{"delta", est_level, e.ci_low, e.ci_high, 0, 0};
      } else if (est_ci == "bootstrap") {
        const auto e = gsi::bootstrap_ci(sample, est_reps, est_level, est_seed);
        rec.ci = gsi::CiRecord{"bootstrap", est_level, e.ci_low, e.ci_high, est_reps, est_seed};
      }
      report.seed = est_seed;
      report.records.push_back(rec);
      emit(output, render(report, format, true));
      return gsi::exit_ok;
    }
  } catch (const gsi::Error& e) {
    std::cerr << "gsi: " << e.what() << '\n';
    return gsi::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "gsi: " << e.what() << '\n';
    return gsi::exit_failure;
  }
  return gsi::exit_failure;
}
