#include "gsi/error.hpp"

namespace gsi {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::configuration: return "configuration error";
    case ErrorKind::contract: return "contract error";
    case ErrorKind::degenerate_model: return "degenerate model";
    case ErrorKind::degenerate_sample: return "degenerate sample";
    case ErrorKind::ill_posed_index: return "ill-posed index";
    case ErrorKind::unsupported_oracle: return "unsupported oracle";
    case ErrorKind::resource: return "resource limit";
    case ErrorKind::io: return "I/O error";
  }
  return "error";
}

namespace {
std::string compose(ErrorKind kind, const std::string& message, const std::string& field) {
  std::string out(to_string(kind));
  if (!field.empty()) out += " at `" + field + "`";
  out += ": " + message;
  return out;
}
}  // namespace

Error::Error(ErrorKind kind, const std::string& message, std::string field)
    : std::runtime_error(compose(kind, message, field)), kind_(kind), field_(std::move(field)) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

void config_error(const std::string& field, const std::string& message) {
  throw Error(ErrorKind::configuration, message, field);
}

}  // namespace gsi
