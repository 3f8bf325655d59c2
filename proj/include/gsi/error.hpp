#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gsi {

enum class ErrorKind {
  configuration,      // bad user input; carries a field path
  contract,           // API misuse: dimension mismatch, out-of-range subset
  degenerate_model,   // output covariance not positive definite
  degenerate_sample,  // estimator denominator vanishes (constant outputs)
  ill_posed_index,    // Tr(M Sigma) too close to zero
  unsupported_oracle, // no exact oracle for this model family
  resource,           // grid or problem size over the oracle's limits
  io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string field = {});

  ErrorKind kind() const noexcept { return kind_; }
  // Offending config field path (e.g. "subsets[0]"), empty when not applicable.
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorKind kind_;
  std::string field_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);
[[noreturn]] void config_error(const std::string& field, const std::string& message);

}  // namespace gsi
