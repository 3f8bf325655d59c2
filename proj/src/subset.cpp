#include "gsi/subset.hpp"

#include <algorithm>

#include "gsi/error.hpp"

namespace gsi {

SubsetIndex::SubsetIndex(std::vector<std::size_t> indices, std::size_t p) : u_(std::move(indices)), p_(p) {
  if (u_.empty()) fail(ErrorKind::contract, "subset must be non-empty");
  for (std::size_t i = 0; i < u_.size(); ++i) {
    if (u_[i] >= p) fail(ErrorKind::contract, "subset index out of range");
    if (i > 0 && u_[i] <= u_[i - 1]) fail(ErrorKind::contract, "subset indices must be strictly increasing");
  }
  for (std::size_t j = 0; j < p; ++j)
    if (!std::binary_search(u_.begin(), u_.end(), j)) not_u_.push_back(j);
}

SubsetIndex SubsetIndex::from_one_based(const std::vector<long long>& indices, std::size_t p,
                                        const std::string& field) {
  if (indices.empty()) config_error(field, "subset must be non-empty");
  std::vector<std::size_t> zero_based;
  for (long long i : indices) {
    if (i < 1 || static_cast<unsigned long long>(i) > p)
      config_error(field, "index " + std::to_string(i) + " outside {1.." + std::to_string(p) + "}");
    zero_based.push_back(static_cast<std::size_t>(i - 1));
  }
  std::sort(zero_based.begin(), zero_based.end());
  if (std::adjacent_find(zero_based.begin(), zero_based.end()) != zero_based.end())
    config_error(field, "duplicate index");
  return SubsetIndex(std::move(zero_based), p);
}

bool SubsetIndex::contains(std::size_t j) const { return std::binary_search(u_.begin(), u_.end(), j); }

SubsetIndex SubsetIndex::complement_subset() const {
  if (not_u_.empty()) fail(ErrorKind::contract, "complement of the full set is empty");
  return SubsetIndex(not_u_, p_);
}

std::vector<std::size_t> SubsetIndex::one_based() const {
  std::vector<std::size_t> out(u_);
  for (auto& i : out) ++i;
  return out;
}

std::string SubsetIndex::to_string() const {
  std::string s = "{";
  for (std::size_t i = 0; i < u_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(u_[i] + 1);
  }
  return s + "}";
}

}  // namespace gsi
