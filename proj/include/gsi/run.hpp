#pragma once

#include <optional>

#include "gsi/config.hpp"
#include "gsi/error.hpp"
#include "gsi/hoeffding.hpp"
#include "gsi/report.hpp"

namespace gsi {

// Exit statuses of the command-line tool.
enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_config = 2,
  exit_degenerate = 3,
  exit_io = 4,
};
int exit_code(ErrorKind kind);

// Picks an exact oracle for the model family: closed form for linear models,
// enumeration for all-discrete inputs, tensor quadrature for p <= 4.
// Returns nullopt when none applies (external tables, large p).
std::optional<CovarianceTriple> auto_oracle(const VectorModel& model, const InputSpace& space, const SubsetIndex& u);
std::size_t quadrature_nodes_for(std::size_t p);

// design -> evaluate -> estimate -> interval -> oracle, for every subset.
RunReport run(const RunConfig& config);

// Subset-level seeds used by run(); exposed for the design/sample commands.
Seed subset_seed(const RunConfig& config, std::size_t subset_position);

}  // namespace gsi
