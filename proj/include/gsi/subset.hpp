#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gsi {

// Non-empty subset u of {0..p-1} (0-based internally; 1-based only at the
// config/CLI boundary). The complement may be empty when u is the full set.
class SubsetIndex {
 public:
  SubsetIndex(std::vector<std::size_t> indices, std::size_t p);

  // Parses 1-based indices as written by users; errors name `field`.
  static SubsetIndex from_one_based(const std::vector<long long>& indices, std::size_t p,
                                    const std::string& field);

  const std::vector<std::size_t>& indices() const { return u_; }
  const std::vector<std::size_t>& complement() const { return not_u_; }
  std::size_t dims() const { return p_; }
  std::size_t size() const { return u_.size(); }
  bool is_full() const { return not_u_.empty(); }
  bool contains(std::size_t j) const;

  SubsetIndex complement_subset() const;
  std::vector<std::size_t> one_based() const;
  std::string to_string() const;  // "{1,3}"

  friend bool operator==(const SubsetIndex&, const SubsetIndex&) = default;

 private:
  std::vector<std::size_t> u_;
  std::vector<std::size_t> not_u_;
  std::size_t p_ = 0;
};

}  // namespace gsi
