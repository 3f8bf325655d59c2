#include "gsi/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gsi/csv_io.hpp"
#include "gsi/error.hpp"

namespace gsi {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void require_finite(const ordered_json& v, const std::string& path) {
  if (v.is_number_float() && !std::isfinite(v.get<double>()))
    fail(ErrorKind::contract, "non-finite value in report at " + path);
  if (v.is_object())
    for (const auto& [key, child] : v.items()) require_finite(child, path + "." + key);
  if (v.is_array())
    for (std::size_t i = 0; i < v.size(); ++i) require_finite(v[i], path + "[" + std::to_string(i) + "]");
}

ordered_json replication_json(const ReplicationReport& r) {
  ordered_json j;
  j["n_per_rep"] = r.n_per_rep;
  j["reps"] = r.reps;
  j["seed"] = r.seed;
  j["target"] = r.target;
  j["mean"] = r.mean;
  j["std_empirical"] = r.std_empirical;
  j["normality_stat"] = r.normality_stat;
  j["coverage"] = r.coverage;
  j["ci_method"] = to_string(r.ci_method);
  j["ci_level"] = r.ci_level;
  j["mean_sigma2_hat"] = r.mean_sigma2_hat;
  if (r.std_ratio) j["std_ratio"] = *r.std_ratio;
  j["estimates"] = r.estimates;
  return j;
}

ReplicationReport replication_from(const json& j) {
  ReplicationReport r;
  r.n_per_rep = j.at("n_per_rep").get<std::size_t>();
  r.reps = j.at("reps").get<std::size_t>();
  r.seed = j.at("seed").get<Seed>();
  r.target = j.at("target").get<double>();
  r.mean = j.at("mean").get<double>();
  r.std_empirical = j.at("std_empirical").get<double>();
  r.normality_stat = j.at("normality_stat").get<double>();
  r.coverage = j.at("coverage").get<double>();
  r.ci_method = j.at("ci_method").get<std::string>() == "delta" ? CiMethod::delta : CiMethod::bootstrap;
  r.ci_level = j.at("ci_level").get<double>();
  r.mean_sigma2_hat = j.at("mean_sigma2_hat").get<double>();
  if (j.contains("std_ratio")) r.std_ratio = j["std_ratio"].get<double>();
  r.estimates = j.at("estimates").get<std::vector<double>>();
  return r;
}

}  // namespace

ordered_json to_json(const RunReport& report, bool reproducible) {
  ordered_json j;
  j["schema"] = report.schema;
  j["tool"] = report.tool;
  j["version"] = report.version;
  j["model"] = report.model;
  j["in_dims"] = report.in_dims;
  j["out_dims"] = report.out_dims;
  j["matrix"] = report.matrix;
  j["seed"] = report.seed;
  j["records"] = ordered_json::array();
  for (const auto& r : report.records) {
    ordered_json rec;
    rec["subset"] = r.subset;
    rec["n"] = r.n;
    rec["seed"] = r.seed;
    rec["estimate"] = r.estimate;
    if (r.estimate_general) rec["estimate_general"] = *r.estimate_general;
    rec["sigma2_hat"] = r.sigma2_hat;
    if (r.ci) {
      ordered_json ci;
      ci["method"] = r.ci->method;
      ci["level"] = r.ci->level;
      ci["low"] = r.ci->low;
      ci["high"] = r.ci->high;
      if (r.ci->method == "bootstrap") {
        ci["bootstrap_reps"] = r.ci->bootstrap_reps;
        ci["seed"] = r.ci->seed;
      }
      rec["ci"] = ci;
    }
    if (r.oracle) {
      ordered_json o;
      o["method"] = r.oracle->method;
      o["s_u"] = r.oracle->s_u;
      o["s_not_u"] = r.oracle->s_not_u;
      o["s_interaction"] = r.oracle->s_interaction;
      if (r.oracle->general)
        o["general"] = {{"s_u", r.oracle->general->s_u},
                        {"s_not_u", r.oracle->general->s_not_u},
                        {"s_interaction", r.oracle->general->s_interaction}};
      o["sum_residual"] = r.oracle->sum_residual;
      o["decomposition_residual"] = r.oracle->decomposition_residual;
      o["accuracy_warning"] = r.oracle->accuracy_warning;
      rec["oracle"] = o;
    }
    if (r.replication) rec["replication"] = replication_json(*r.replication);
    if (!reproducible) rec["seconds"] = r.seconds;
    j["records"].push_back(rec);
  }
  if (!reproducible) j["timing"] = {{"total_seconds", report.total_seconds}};
  return j;
}

RunReport report_from_json(const json& j) {
  RunReport report;
  try {
    report.schema = j.at("schema").get<int>();
    report.tool = j.at("tool").get<std::string>();
    report.version = j.at("version").get<std::string>();
    report.model = j.at("model").get<std::string>();
    report.in_dims = j.at("in_dims").get<std::size_t>();
    report.out_dims = j.at("out_dims").get<std::size_t>();
    report.matrix = j.at("matrix").get<std::vector<std::vector<double>>>();
    report.seed = j.at("seed").get<Seed>();
    for (const auto& rec : j.at("records")) {
      SubsetRecord r;
      r.subset = rec.at("subset").get<std::vector<std::size_t>>();
      r.n = rec.at("n").get<std::size_t>();
      r.seed = rec.at("seed").get<Seed>();
      r.estimate = rec.at("estimate").get<double>();
      if (rec.contains("estimate_general")) r.estimate_general = rec["estimate_general"].get<double>();
      r.sigma2_hat = rec.at("sigma2_hat").get<double>();
      if (rec.contains("ci")) {
        const auto& c = rec["ci"];
        CiRecord ci{c.at("method").get<std::string>(), c.at("level").get<double>(), c.at("low").get<double>(),
                    c.at("high").get<double>(), 0, 0};
        if (c.contains("bootstrap_reps")) ci.bootstrap_reps = c["bootstrap_reps"].get<std::size_t>();
        if (c.contains("seed")) ci.seed = c["seed"].get<Seed>();
        r.ci = ci;
      }
      if (rec.contains("oracle")) {
        const auto& o = rec["oracle"];
        OracleRecord rec_o{o.at("method").get<std::string>(),
                           o.at("s_u").get<double>(),
                           o.at("s_not_u").get<double>(),
                           o.at("s_interaction").get<double>(),
                           std::nullopt,
                           o.at("sum_residual").get<double>(),
                           o.at("decomposition_residual").get<double>(),
                           o.at("accuracy_warning").get<bool>()};
        if (o.contains("general")) {
          const auto& g = o["general"];
          rec_o.general = IndexTriple{g.at("s_u").get<double>(), g.at("s_not_u").get<double>(),
                                      g.at("s_interaction").get<double>()};
        }
        r.oracle = rec_o;
      }
      if (rec.contains("replication")) r.replication = replication_from(rec["replication"]);
      if (rec.contains("seconds")) r.seconds = rec["seconds"].get<double>();
      report.records.push_back(std::move(r));
    }
    if (j.contains("timing")) report.total_seconds = j["timing"].at("total_seconds").get<double>();
  } catch (const json::exception& e) {
    fail(ErrorKind::io, std::string("malformed report: ") + e.what());
  }
  return report;
}

std::string render_json(const RunReport& report, bool reproducible) {
  const ordered_json j = to_json(report, reproducible);
  require_finite(j, "report");
  return j.dump(2) + "\n";
}

std::string render_csv(const RunReport& report) {
  require_finite(to_json(report, false), "report");
  std::ostringstream out;
  out << "subset,estimate,oracle,sigma2_hat,ci_low,ci_high,n,seed\n";
  for (const auto& r : report.records) {
    out << "\"{";
    for (std::size_t i = 0; i < r.subset.size(); ++i) out << (i ? "," : "") << r.subset[i];
    out << "}\"," << io::format_double(r.estimate) << ',';
    if (r.oracle) out << io::format_double(r.oracle->s_u);
    out << ',' << io::format_double(r.sigma2_hat) << ',';
    if (r.ci) out << io::format_double(r.ci->low);
    out << ',';
    if (r.ci) out << io::format_double(r.ci->high);
    out << ',' << r.n << ',' << r.seed << '\n';
  }
  return out.str();
}

void write_report(const RunReport& report, const std::string& path, ReportFormat format, bool reproducible) {
  const std::string text = format == ReportFormat::json ? render_json(report, reproducible) : render_csv(report);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot open " + path + " for writing");
  out << text;
  if (!out) fail(ErrorKind::io, "write failed for " + path);
}

}  // namespace gsi
