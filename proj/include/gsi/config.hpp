#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsi/corpus.hpp"
#include "gsi/inference.hpp"
#include "gsi/input_space.hpp"
#include "gsi/linalg.hpp"
#include "gsi/model.hpp"
#include "gsi/subset.hpp"

namespace gsi {

inline constexpr int kSchemaVersion = 1;

struct ModelRef {
  std::string name;             // corpus name; empty for external models
  corpus::Parameters params;
  std::string external_path;    // x1..xp,y1..yk table
  bool external() const { return !external_path.empty(); }
};

struct CiConfig {
  enum class Kind { none, delta, bootstrap };
  Kind kind = Kind::none;
  double level = 0.95;
  std::size_t bootstrap_reps = 1000;
};

struct RunConfig {
  ModelRef model;
  InputSpace space;  // explicit, or the corpus default
  std::vector<SubsetIndex> subsets;
  std::size_t n = 0;
  Seed seed = 0;
  Matrix matrix;              // projection M; identity unless given
  bool matrix_given = false;
  std::optional<OutputTransform> transform;
  CiConfig ci;
  bool oracle_auto = true;
  std::optional<std::size_t> replications;
  std::size_t in_dims = 0;
  std::size_t out_dims = 0;
};

// Parses and validates a config document (JSON). Relative paths are
// resolved against `base_dir`. Errors carry the offending field path.
RunConfig parse_config(const nlohmann::json& doc, const std::string& base_dir = ".");
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");

// Builds the model named by `ref` (corpus entry or external table) and the
// corpus default input space (absent for external models).
struct ResolvedModel {
  VectorModel model;
  std::optional<InputSpace> default_space;
};
ResolvedModel resolve_model(const ModelRef& ref);

// Model after the configured output transform.
VectorModel configured_model(const RunConfig& config);

}  // namespace gsi
