#include "gsi/config.hpp"

#include <filesystem>
#include <set>

#include "gsi/csv_io.hpp"
#include "gsi/error.hpp"

namespace gsi {

namespace {

using nlohmann::json;

std::string join_path(const std::string& base, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute() || base.empty()) return path;
  return (std::filesystem::path(base) / p).string();
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known, const std::string& prefix) {
  for (const auto& [key, _] : obj.items())
    if (!known.count(key)) config_error(prefix.empty() ? key : prefix + "." + key, "unknown key");
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) config_error(field, "expected a number");
  return v.get<double>();
}

std::size_t count(const json& v, const std::string& field, std::size_t minimum) {
  if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(minimum))
    config_error(field, "expected an integer >= " + std::to_string(minimum));
  return v.get<std::size_t>();
}

std::vector<double> numbers(const json& v, const std::string& field) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) config_error(field, "expected a number or an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

Matrix matrix_value(const json& v, const std::string& field, const std::string& base_dir) {
  if (v.is_string()) {
    try {
      return io::read_matrix(join_path(base_dir, v.get<std::string>()));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::io) config_error(field, e.what());
      throw;
    }
  }
  if (!v.is_array() || v.empty()) config_error(field, "expected a matrix (array of rows) or a matrix file path");
  const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
  if (cols == 0) config_error(field, "matrix rows must be non-empty arrays");
  Matrix m(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < v.size(); ++r) {
    const std::string rf = field + "[" + std::to_string(r) + "]";
    if (!v[r].is_array() || v[r].size() != cols) config_error(field, "ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(v[r][c], rf + "[" + std::to_string(c) + "]");
  }
  if (!m.allFinite()) config_error(field, "non-finite matrix entry");
  return m;
}

ModelRef parse_model(const json& v, const std::string& base_dir) {
  ModelRef ref;
  if (v.is_string()) {
    ref.name = v.get<std::string>();
    return ref;
  }
  if (!v.is_object()) config_error("model", "expected a corpus name or an object");
  reject_unknown_keys(v, {"name", "params", "external"}, "model");
  if (v.contains("external")) {
    if (v.contains("name")) config_error("model", "give either `name` or `external`, not both");
    if (!v["external"].is_string()) config_error("model.external", "expected a CSV path");
    ref.external_path = join_path(base_dir, v["external"].get<std::string>());
    return ref;
  }
  if (!v.contains("name") || !v["name"].is_string()) config_error("model.name", "missing corpus model name");
  ref.name = v["name"].get<std::string>();
  if (v.contains("params")) {
    if (!v["params"].is_object()) config_error("model.params", "expected an object");
    for (const auto& [key, value] : v["params"].items())
      ref.params[key] = numbers(value, "model.params." + key);
  }
  return ref;
}

Marginal parse_marginal(const json& v, const std::string& field) {
  if (!v.is_object() || v.size() != 1) config_error(field, "expected {\"uniform\": [a,b]}, {\"normal\": [mean,sd]} or {\"discrete\": {...}}");
  const std::string kind = v.begin().key();
  const json& body = v.begin().value();
  const std::string bf = field + "." + kind;
  if (kind == "uniform" || kind == "normal") {
    const auto pair = numbers(body, bf);
    if (pair.size() != 2) config_error(bf, "expected two numbers");
    if (kind == "uniform") return Uniform{pair[0], pair[1]};
    return Normal{pair[0], pair[1]};
  }
  if (kind == "discrete") {
    if (!body.is_object()) config_error(bf, "expected {\"support\": [...], \"probabilities\": [...]}");
    reject_unknown_keys(body, {"support", "probabilities"}, bf);
    if (!body.contains("support") || !body.contains("probabilities"))
      config_error(bf, "support and probabilities are required");
    return Discrete{numbers(body["support"], bf + ".support"), numbers(body["probabilities"], bf + ".probabilities")};
  }
  config_error(field, "unsupported distribution kind '" + kind + "'");
}

InputSpace parse_space(const json& v) {
  const json* list = &v;
  std::string prefix = "space";
  if (v.is_object()) {
    reject_unknown_keys(v, {"marginals"}, "space");
    if (!v.contains("marginals")) config_error("space.marginals", "missing");
    list = &v["marginals"];
    prefix = "space.marginals";
  }
  if (!list->is_array() || list->empty()) config_error(prefix, "expected a non-empty array of marginals");
  std::vector<Marginal> marginals;
  for (std::size_t j = 0; j < list->size(); ++j) {
    const std::string field = prefix + "[" + std::to_string(j) + "]";
    marginals.push_back(parse_marginal((*list)[j], field));
    validate(marginals.back(), field);
  }
  return InputSpace(std::move(marginals));
}

std::vector<long long> subset_indices(const json& v, const std::string& field) {
  std::vector<long long> out;
  if (v.is_string()) {
    std::string text = v.get<std::string>();
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t comma = text.find(',', pos);
      const std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      try {
        std::size_t used = 0;
        out.push_back(std::stoll(tok, &used));
        if (tok.find_first_not_of(" ", used) != std::string::npos) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        config_error(field, "bad index '" + tok + "'");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return out;
  }
  if (v.is_number_integer()) return {v.get<long long>()};
  if (!v.is_array()) config_error(field, "expected an array of 1-based indices");
  for (const auto& e : v) {
    if (!e.is_number_integer()) config_error(field, "indices must be integers");
    out.push_back(e.get<long long>());
  }
  return out;
}

OutputTransform parse_transform(const json& v, std::size_t k, const std::string& base_dir) {
  if (!v.is_object() || !v.contains("kind") || !v["kind"].is_string())
    config_error("transform.kind", "expected isometry, homothety or general_linear");
  reject_unknown_keys(v, {"kind", "matrix", "lambda"}, "transform");
  const std::string kind = v["kind"].get<std::string>();
  OutputTransform t;
  if (kind == "homothety") {
    if (!v.contains("lambda")) config_error("transform.lambda", "missing");
    t = Homothety{number(v["lambda"], "transform.lambda")};
    validate(t, k, "transform.lambda");
    return t;
  }
  if (kind != "isometry" && kind != "general_linear")
    config_error("transform.kind", "expected isometry, homothety or general_linear");
  if (!v.contains("matrix")) config_error("transform.matrix", "missing");
  Matrix o = matrix_value(v["matrix"], "transform.matrix", base_dir);
  if (kind == "isometry")
    t = Isometry{std::move(o)};
  else
    t = GeneralLinear{std::move(o)};
  validate(t, k, "transform.matrix");
  return t;
}

CiConfig parse_ci(const json& v) {
  CiConfig ci;
  std::string method;
  if (v.is_string()) {
    method = v.get<std::string>();
  } else if (v.is_object()) {
    reject_unknown_keys(v, {"method", "reps", "level"}, "ci");
    if (!v.contains("method") || !v["method"].is_string()) config_error("ci.method", "missing");
    method = v["method"].get<std::string>();
    if (v.contains("reps")) ci.bootstrap_reps = count(v["reps"], "ci.reps", 200);
    if (v.contains("level")) {
      ci.level = number(v["level"], "ci.level");
      if (!(ci.level > 0.0 && ci.level < 1.0)) config_error("ci.level", "must lie in (0, 1)");
    }
  } else {
    config_error("ci", "expected none, delta, bootstrap or an object");
  }
  if (method == "none")
    ci.kind = CiConfig::Kind::none;
  else if (method == "delta")
    ci.kind = CiConfig::Kind::delta;
  else if (method == "bootstrap")
    ci.kind = CiConfig::Kind::bootstrap;
  else
    config_error(v.is_string() ? "ci" : "ci.method", "unknown interval method '" + method + "'");
  return ci;
}

}  // namespace

ResolvedModel resolve_model(const ModelRef& ref) {
  if (ref.external()) return {io::load_external_model(ref.external_path), std::nullopt};
  auto entry = corpus::make(ref.name, ref.params, "model");
  return {std::move(entry.model), std::move(entry.space)};
}

VectorModel configured_model(const RunConfig& config) {
  VectorModel model = resolve_model(config.model).model;
  return config.transform ? apply_transform(model, *config.transform) : model;
}

RunConfig parse_config(const json& doc, const std::string& base_dir) {
  if (!doc.is_object()) config_error("", "config must be a key-value object");
  reject_unknown_keys(doc, {"schema", "model", "space", "subsets", "n", "seed", "matrix", "transform", "ci", "oracle",
                            "replications"},
                      "");
  if (!doc.contains("schema")) config_error("schema", "missing schema version");
  if (!doc["schema"].is_number_integer() || doc["schema"].get<int>() != kSchemaVersion)
    config_error("schema", "unsupported schema version (expected " + std::to_string(kSchemaVersion) + ")");

  RunConfig cfg;
  if (!doc.contains("model")) config_error("model", "missing");
  cfg.model = parse_model(doc["model"], base_dir);
  ResolvedModel resolved = resolve_model(cfg.model);
  cfg.in_dims = resolved.model.in_dims();
  cfg.out_dims = resolved.model.out_dims();

  if (doc.contains("space")) {
    cfg.space = parse_space(doc["space"]);
  } else if (resolved.default_space) {
    cfg.space = *resolved.default_space;
  } else {
    config_error("space", "external models need an explicit input space");
  }
  if (cfg.space.dims() != cfg.in_dims)
    config_error("space", "space has " + std::to_string(cfg.space.dims()) + " inputs, model expects " +
                              std::to_string(cfg.in_dims));

  if (!doc.contains("subsets")) config_error("subsets", "missing");
  const json& subsets = doc["subsets"];
  if (!subsets.is_array() || subsets.empty()) config_error("subsets", "expected a non-empty list of subsets");
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    const std::string field = "subsets[" + std::to_string(i) + "]";
    cfg.subsets.push_back(SubsetIndex::from_one_based(subset_indices(subsets[i], field), cfg.in_dims, field));
  }

  if (!doc.contains("n")) config_error("n", "missing sample size");
  cfg.n = count(doc["n"], "n", 2);
  if (!doc.contains("seed")) config_error("seed", "missing");
  if (!doc["seed"].is_number_integer() || (!doc["seed"].is_number_unsigned() && doc["seed"].get<std::int64_t>() < 0))
    config_error("seed", "expected a non-negative integer");
  cfg.seed = doc["seed"].get<Seed>();

  const auto k = static_cast<Eigen::Index>(cfg.out_dims);
  cfg.matrix = Matrix::Identity(k, k);
  if (doc.contains("matrix") && !doc["matrix"].is_null()) {
    Matrix m = matrix_value(doc["matrix"], "matrix", base_dir);
    if (m.rows() != k || m.cols() != k)
      config_error("matrix", "expected " + std::to_string(k) + "x" + std::to_string(k) + ", got " +
                                 std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    cfg.matrix = std::move(m);
    cfg.matrix_given = true;
  }
  if (doc.contains("transform") && !doc["transform"].is_null())
    cfg.transform = parse_transform(doc["transform"], cfg.out_dims, base_dir);
  if (doc.contains("ci")) cfg.ci = parse_ci(doc["ci"]);
  if (doc.contains("oracle")) {
    const json& o = doc["oracle"];
    if (o == "auto")
      cfg.oracle_auto = true;
    else if (o == "none")
      cfg.oracle_auto = false;
    else
      config_error("oracle", "expected auto or none");
  }
  if (doc.contains("replications") && !doc["replications"].is_null())
    cfg.replications = count(doc["replications"], "replications", 200);
  if (cfg.ci.kind == CiConfig::Kind::delta && cfg.n < 10) config_error("n", "delta intervals need n >= 10");
  return cfg;
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error("", std::string("malformed document: ") + e.what());
  }
  return parse_config(doc, base_dir);
}

}  // namespace gsi
