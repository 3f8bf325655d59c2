#pragma once

#include <string>
#include <vector>

#include "gsi/linalg.hpp"
#include "gsi/model.hpp"
#include "gsi/pickfreeze.hpp"

namespace gsi::io {

// Numeric CSV: one header line, comma-separated decimal-point floats, LF endings.
struct Table {
  std::vector<std::string> header;
  RowMatrix values;
};

Table read_table(const std::string& path);
void write_table(const std::string& path, const std::vector<std::string>& header, const RowMatrix& values);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text, const std::string& where);

// External model table with header x1..xp,y1..yk.
VectorModel load_external_model(const std::string& path);
void write_external_table(const std::string& path, const RowMatrix& x, const RowMatrix& y);

// Pick-freeze sample with header y_1..y_k,yu_1..yu_k.
void write_sample(const std::string& path, const PickFreezeSample& sample);
// The subset is not stored in the file; it is supplied by the caller.
PickFreezeSample read_sample(const std::string& path, const SubsetIndex& u);

// Whitespace-separated rows; blank lines and lines starting with '#' skipped.
Matrix read_matrix(const std::string& path);
Matrix parse_matrix(const std::string& text, const std::string& where);

}  // namespace gsi::io
