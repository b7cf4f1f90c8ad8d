#pragma once

#include <algorithm>
#include <initializer_list>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dicf {

// An ordered list of named single-qubit registers. names()[0] is the most
// significant bit of a computational-basis index, matching the usual
// left-to-right tensor product order.
class RegisterSpace {
 public:
  RegisterSpace() = default;  // zero registers, dimension 1

  explicit RegisterSpace(std::vector<std::string> names) : names_(std::move(names)) {
    std::set<std::string> seen;
    for (const auto& n : names_) {
      if (n.empty()) throw std::invalid_argument("register label must be non-empty");
      if (!seen.insert(n).second)
        throw std::invalid_argument("duplicate register label '" + n + "'");
    }
  }

  RegisterSpace(std::initializer_list<std::string> names)
      : RegisterSpace(std::vector<std::string>(names)) {}

  int num_registers() const { return static_cast<int>(names_.size()); }
  long dim() const { return 1L << names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  bool contains(const std::string& label) const {
    return std::find(names_.begin(), names_.end(), label) != names_.end();
  }

  int position(const std::string& label) const {
    auto it = std::find(names_.begin(), names_.end(), label);
    if (it == names_.end())
      throw std::invalid_argument("unknown register label '" + label + "'");
    return static_cast<int>(it - names_.begin());
  }

  bool disjoint(const RegisterSpace& other) const {
    for (const auto& n : other.names_)
      if (contains(n)) return false;
    return true;
  }

  // Concatenation for tensor products; throws on a label clash naming it.
  RegisterSpace concat(const RegisterSpace& other) const {
    for (const auto& n : other.names_)
      if (contains(n))
        throw std::invalid_argument("register label clash on '" + n + "'");
    std::vector<std::string> all = names_;
    all.insert(all.end(), other.names_.begin(), other.names_.end());
    return RegisterSpace(std::move(all));
  }

  RegisterSpace without(const std::set<std::string>& drop) const {
    for (const auto& d : drop)
      if (!contains(d))
        throw std::invalid_argument("unknown register label '" + d + "'");
    std::vector<std::string> kept;
    for (const auto& n : names_)
      if (!drop.count(n)) kept.push_back(n);
    return RegisterSpace(std::move(kept));
  }

  // Bit value of register `pos` inside basis index `idx`.
  int bit(long idx, int pos) const {
    return static_cast<int>((idx >> (num_registers() - 1 - pos)) & 1);
  }

  bool operator==(const RegisterSpace& other) const { return names_ == other.names_; }
  bool operator!=(const RegisterSpace& other) const { return !(*this == other); }

 private:
  std::vector<std::string> names_;
};

// The fixed global order used to compare operators built with different
// register orderings. Spaces are permuted to the relative order induced by
// this list before comparison.
inline const std::vector<std::string>& canonical_register_order() {
  static const std::vector<std::string> order = {"X", "A", "R", "G", "Y", "D",
                                                 "S", "I", "J", "H", "B", "C"};
  return order;
}

}  // namespace dicf
