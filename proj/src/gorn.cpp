#include "treelogic/gorn.hpp"

#include <algorithm>

#include "treelogic/error.hpp"

namespace treelogic {

GornAddress GornAddress::child(uint32_t i) const {
  std::vector<uint32_t> p = path_;
  p.push_back(i);
  return GornAddress(std::move(p));
}

GornAddress GornAddress::parent() const {
  if (is_root()) throw Error("the root address has no parent");
  return GornAddress(std::vector<uint32_t>(path_.begin(), path_.end() - 1));
}

uint32_t GornAddress::last_index() const {
  if (is_root()) throw Error("the root address has no child index");
  return path_.back();
}

bool GornAddress::is_prefix_of(const GornAddress& other) const {
  if (path_.size() > other.path_.size()) return false;
  return std::equal(path_.begin(), path_.end(), other.path_.begin());
}

std::string GornAddress::to_string() const {
  if (is_root()) return "e";
  std::string out;
  for (std::size_t i = 0; i < path_.size(); ++i) {
    if (i > 0) out += '.';
    out += std::to_string(path_[i]);
  }
  return out;
}

}  // namespace treelogic
