#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace specqp {

using TermId = std::uint32_t;

// Variable -> term assignment, kept sorted by variable name so equality and
// hashing do not depend on insertion order.
class Binding {
 public:
  using Entry = std::pair<std::string, TermId>;

  Binding() = default;
  explicit Binding(std::vector<Entry> entries);

  // Returns false if `var` is already bound to a different term.
  bool bind(std::string_view var, TermId value);
  std::optional<TermId> get(std::string_view var) const;

  bool compatible_with(const Binding& other) const;
  // Union of two compatible bindings.
  static Binding merge(const Binding& a, const Binding& b);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t hash() const;

  friend bool operator==(const Binding&, const Binding&) = default;

 private:
  std::vector<Entry> entries_;
};

struct BindingHash {
  std::size_t operator()(const Binding& b) const { return b.hash(); }
};

}  // namespace specqp
