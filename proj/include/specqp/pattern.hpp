#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace specqp {

inline bool is_variable(std::string_view token) {
  return !token.empty() && token.front() == '?';
}

// Subject, predicate and object of a triple pattern. Each position holds
// either a constant term or a variable ("?name").
struct TriplePattern {
  std::string subject;
  std::string predicate;
  std::string object;

  const std::string& at(std::size_t position) const;
  std::array<const std::string*, 3> positions() const { return {&subject, &predicate, &object}; }

  bool has_constant() const;
  // Distinct variable names in position order.
  std::vector<std::string> variables() const;

  friend auto operator<=>(const TriplePattern&, const TriplePattern&) = default;
  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

// Three whitespace-separated tokens. Throws ParseError (line 0) otherwise.
TriplePattern parse_pattern(std::string_view text);
std::string to_string(const TriplePattern& pattern);
std::ostream& operator<<(std::ostream& os, const TriplePattern& pattern);

// Variables renamed ?0, ?1, ... by first appearance, so that patterns that
// differ only in variable names share a key.
std::string canonical_key(const TriplePattern& pattern);
std::string canonical_key(std::span<const TriplePattern> patterns);

// Renames the variables of `pattern` through the same positional scheme
// and returns the mapping old-name -> canonical-name in first-appearance
// order.
std::vector<std::pair<std::string, std::string>> canonical_renaming(const TriplePattern& pattern);

// Conjunctive query. Patterns are kept in the order written.
struct TripleQuery {
  std::vector<TriplePattern> patterns;

  std::size_t size() const { return patterns.size(); }
  const TriplePattern& operator[](std::size_t i) const { return patterns[i]; }
  std::vector<std::string> variables() const;
};

// Throws InvalidQuery if the query is empty, contains an all-variable
// pattern, or its patterns are not connected through shared variables.
void validate_query(const TripleQuery& query);

// True if every pattern is reachable from the first through shared variables.
bool is_connected(std::span<const TriplePattern> patterns);

// One pattern per line; blank lines separate queries; '#' starts a comment
// line. Each query is validated.
std::vector<TripleQuery> parse_queries(std::istream& in);
TripleQuery parse_single_query(std::istream& in);

std::string to_string(const TripleQuery& query);

}  // namespace specqp
