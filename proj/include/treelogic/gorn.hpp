#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace treelogic {

// Path of 0-based child indices from the root; the empty path is the root.
// The derived ordering (lexicographic, with a prefix preceding its
// extensions) is total on any tree domain.
class GornAddress {
 public:
  GornAddress() = default;
  explicit GornAddress(std::vector<uint32_t> path) : path_(std::move(path)) {}

  static GornAddress root() { return GornAddress(); }

  const std::vector<uint32_t>& path() const { return path_; }
  bool is_root() const { return path_.empty(); }
  std::size_t depth() const { return path_.size(); }

  GornAddress child(uint32_t i) const;
  GornAddress parent() const;      // throws Error on the root
  uint32_t last_index() const;     // throws Error on the root

  // Reflexive: every address is a prefix of itself.
  bool is_prefix_of(const GornAddress& other) const;

  bool operator==(const GornAddress&) const = default;
  auto operator<=>(const GornAddress&) const = default;

  // Root prints as "e", other addresses as dot-separated indices ("0.1.2").
  std::string to_string() const;

 private:
  std::vector<uint32_t> path_;
};

}  // namespace treelogic
