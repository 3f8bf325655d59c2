#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsi/inference.hpp"
#include "gsi/rng.hpp"

namespace gsi {

inline constexpr const char* kToolName = "gsi";
inline constexpr const char* kToolVersion = "0.1.0";

// Exact indices for one projection matrix.
struct IndexTriple {
  double s_u = 0.0;
  double s_not_u = 0.0;
  double s_interaction = 0.0;
  friend bool operator==(const IndexTriple&, const IndexTriple&) = default;
};

struct OracleRecord {
  std::string method;
  double s_u = 0.0;  // M = Id, the target of `estimate`
  double s_not_u = 0.0;
  double s_interaction = 0.0;
  std::optional<IndexTriple> general;   // configured M, the target of `estimate_general`
  double sum_residual = 0.0;            // worst |s_u + s_~u + s_u~u - 1|
  double decomposition_residual = 0.0;  // max |Sigma - (C_u + C_~u + C_u~u)|
  bool accuracy_warning = false;
  friend bool operator==(const OracleRecord&, const OracleRecord&) = default;
};

struct CiRecord {
  std::string method;
  double level = 0.95;
  double low = 0.0;
  double high = 0.0;
  std::size_t bootstrap_reps = 0;
  Seed seed = 0;
  friend bool operator==(const CiRecord&, const CiRecord&) = default;
};

struct SubsetRecord {
  std::vector<std::size_t> subset;  // 1-based
  std::size_t n = 0;
  Seed seed = 0;
  double estimate = 0.0;                   // S_{u,N} (M = Id)
  std::optional<double> estimate_general;  // Tr(M C_u_hat) / Tr(M Sigma_hat), when M given
  double sigma2_hat = 0.0;
  std::optional<CiRecord> ci;
  std::optional<OracleRecord> oracle;
  std::optional<ReplicationReport> replication;
  double seconds = 0.0;
  friend bool operator==(const SubsetRecord&, const SubsetRecord&) = default;
};

struct RunReport {
  int schema = 1;
  std::string tool = kToolName;
  std::string version = kToolVersion;
  std::string model;
  std::size_t in_dims = 0;
  std::size_t out_dims = 0;
  std::vector<std::vector<double>> matrix;
  Seed seed = 0;
  std::vector<SubsetRecord> records;
  double total_seconds = 0.0;
  friend bool operator==(const RunReport&, const RunReport&) = default;
};

enum class ReportFormat { json, csv };

// Timing fields are omitted when `reproducible` is set.
nlohmann::ordered_json to_json(const RunReport& report, bool reproducible = false);
RunReport report_from_json(const nlohmann::json& doc);

std::string render_json(const RunReport& report, bool reproducible = false);
// Flat table: subset,estimate,oracle,sigma2_hat,ci_low,ci_high,n,seed.
std::string render_csv(const RunReport& report);

// Rejects reports holding non-finite numbers before writing anything.
void write_report(const RunReport& report, const std::string& path, ReportFormat format, bool reproducible = false);

}  // namespace gsi
