#include "specqp/binding.hpp"

#include <algorithm>

namespace specqp {

Binding::Binding(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end());
}

bool Binding::bind(std::string_view var, TermId value) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), var,
                             [](const Entry& e, std::string_view v) { return e.first < v; });
  if (it != entries_.end() && it->first == var) return it->second == value;
  entries_.emplace(it, std::string(var), value);
  return true;
}

std::optional<TermId> Binding::get(std::string_view var) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), var,
                             [](const Entry& e, std::string_view v) { return e.first < v; });
  if (it != entries_.end() && it->first == var) return it->second;
  return std::nullopt;
}

bool Binding::compatible_with(const Binding& other) const {
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() && b != other.entries_.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      if (a->second != b->second) return false;
      ++a;
      ++b;
    }
  }
  return true;
}

Binding Binding::merge(const Binding& a, const Binding& b) {
  Binding out;
  out.entries_.reserve(a.size() + b.size());
  std::set_union(a.entries_.begin(), a.entries_.end(), b.entries_.begin(), b.entries_.end(),
                 std::back_inserter(out.entries_),
                 [](const Entry& x, const Entry& y) { return x.first < y.first; });
  return out;
}

std::size_t Binding::hash() const {
  std::size_t h = 1469598103934665603ull;
  for (const auto& [var, value] : entries_) {
    h ^= std::hash<std::string>{}(var) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h ^= std::hash<TermId>{}(value) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

}  // namespace specqp
