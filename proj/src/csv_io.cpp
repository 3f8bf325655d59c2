#include "gsi/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "gsi/error.hpp"

namespace gsi::io {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> numbered(const std::string& prefix, std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path + " for reading");
  return in;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, const std::string& where) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) fail(ErrorKind::io, where + ": not a number: '" + std::string(text) + "'");
  return v;
}

Table read_table(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::io, path + ": empty file");
  Table t;
  for (auto& h : split(line, ',')) t.header.push_back(trim(h));
  std::vector<double> cells;
  std::size_t rows = 0, line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    const std::string where = path + ":" + std::to_string(line_no);
    if (fields.size() != t.header.size())
      fail(ErrorKind::io, where + ": expected " + std::to_string(t.header.size()) + " fields");
    for (const auto& f : fields) cells.push_back(parse_double(trim(f), where));
    ++rows;
  }
  t.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) t.values.data()[i] = cells[i];
  return t;
}

void write_table(const std::string& path, const std::vector<std::string>& header, const RowMatrix& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot open " + path + " for writing");
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) out << (j ? "," : "") << format_double(values(i, j));
    out << '\n';
  }
  if (!out) fail(ErrorKind::io, "write failed for " + path);
}

VectorModel load_external_model(const std::string& path) {
  Table t = read_table(path);
  std::size_t p = 0;
  while (p < t.header.size() && t.header[p] == "x" + std::to_string(p + 1)) ++p;
  const std::size_t k = t.header.size() - p;
  if (p == 0 || k == 0 || t.header != [&] {
        auto h = numbered("x", p);
        for (auto& y : numbered("y", k)) h.push_back(y);
        return h;
      }())
    fail(ErrorKind::io, path + ": header must be x1..xp,y1..yk");
  if (t.values.rows() == 0) fail(ErrorKind::io, path + ": no data rows");
  const RowMatrix x = t.values.leftCols(static_cast<Eigen::Index>(p));
  const RowMatrix y = t.values.rightCols(static_cast<Eigen::Index>(k));
  return VectorModel::tabulated(path, x, y);
}

void write_external_table(const std::string& path, const RowMatrix& x, const RowMatrix& y) {
  if (x.rows() != y.rows()) fail(ErrorKind::contract, "x and y row counts differ");
  auto header = numbered("x", static_cast<std::size_t>(x.cols()));
  for (auto& h : numbered("y", static_cast<std::size_t>(y.cols()))) header.push_back(h);
  RowMatrix both(x.rows(), x.cols() + y.cols());
  both << x, y;
  write_table(path, header, both);
}

void write_sample(const std::string& path, const PickFreezeSample& sample) {
  const auto k = sample.out_dims();
  auto header = numbered("y_", k);
  for (auto& h : numbered("yu_", k)) header.push_back(h);
  RowMatrix both(sample.y.rows(), 2 * sample.y.cols());
  both << sample.y, sample.y_u;
  write_table(path, header, both);
}

PickFreezeSample read_sample(const std::string& path, const SubsetIndex& u) {
  Table t = read_table(path);
  if (t.header.size() % 2 != 0 || t.header.empty()) fail(ErrorKind::io, path + ": header must be y_1..y_k,yu_1..yu_k");
  const std::size_t k = t.header.size() / 2;
  auto expected = numbered("y_", k);
  for (auto& h : numbered("yu_", k)) expected.push_back(h);
  if (t.header != expected) fail(ErrorKind::io, path + ": header must be y_1..y_k,yu_1..yu_k");
  return {t.values.leftCols(static_cast<Eigen::Index>(k)), t.values.rightCols(static_cast<Eigen::Index>(k)), u};
}

Matrix parse_matrix(const std::string& text, const std::string& where) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream fields(t);
    std::string tok;
    std::vector<double> row;
    while (fields >> tok) row.push_back(parse_double(tok, where));
    if (!rows.empty() && row.size() != rows.front().size()) fail(ErrorKind::io, where + ": ragged matrix rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorKind::io, where + ": empty matrix");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

Matrix read_matrix(const std::string& path) {
  auto in = open_in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_matrix(buf.str(), path);
}

}  // namespace gsi::io
