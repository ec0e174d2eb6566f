#include "specqp/pattern.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "specqp/errors.hpp"

namespace specqp {

const std::string& TriplePattern::at(std::size_t position) const {
  switch (position) {
    case 0: return subject;
    case 1: return predicate;
    default: return object;
  }
}

bool TriplePattern::has_constant() const {
  return !is_variable(subject) || !is_variable(predicate) || !is_variable(object);
}

std::vector<std::string> TriplePattern::variables() const {
  std::vector<std::string> vars;
  for (const std::string* term : positions()) {
    if (is_variable(*term) && std::find(vars.begin(), vars.end(), *term) == vars.end()) {
      vars.push_back(*term);
    }
  }
  return vars;
}

TriplePattern parse_pattern(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string s, p, o, extra;
  if (!(in >> s >> p >> o) || (in >> extra)) {
    throw ParseError(0, "triple pattern needs exactly three tokens: '" + std::string(text) + "'");
  }
  for (const std::string* t : {&s, &p, &o}) {
    if (*t == "?") throw ParseError(0, "variable without a name in '" + std::string(text) + "'");
  }
  return TriplePattern{std::move(s), std::move(p), std::move(o)};
}

std::string to_string(const TriplePattern& pattern) {
  return pattern.subject + " " + pattern.predicate + " " + pattern.object;
}

std::ostream& operator<<(std::ostream& os, const TriplePattern& pattern) {
  return os << to_string(pattern);
}

namespace {

void append_canonical(const TriplePattern& pattern,
                      std::vector<std::pair<std::string, std::string>>& renaming,
                      std::string& out) {
  bool first = true;
  for (const std::string* term : pattern.positions()) {
    if (!first) out += ' ';
    first = false;
    if (!is_variable(*term)) {
      out += *term;
      continue;
    }
    auto it = std::find_if(renaming.begin(), renaming.end(),
                           [&](const auto& entry) { return entry.first == *term; });
    if (it == renaming.end()) {
      renaming.emplace_back(*term, "?" + std::to_string(renaming.size()));
      it = std::prev(renaming.end());
    }
    out += it->second;
  }
}

}  // namespace

std::string canonical_key(const TriplePattern& pattern) {
  std::vector<std::pair<std::string, std::string>> renaming;
  std::string out;
  append_canonical(pattern, renaming, out);
  return out;
}

std::string canonical_key(std::span<const TriplePattern> patterns) {
  std::vector<std::pair<std::string, std::string>> renaming;
  std::string out;
  for (const TriplePattern& p : patterns) {
    if (!out.empty()) out += " . ";
    append_canonical(p, renaming, out);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> canonical_renaming(const TriplePattern& pattern) {
  std::vector<std::pair<std::string, std::string>> renaming;
  std::string ignored;
  append_canonical(pattern, renaming, ignored);
  return renaming;
}

std::vector<std::string> TripleQuery::variables() const {
  std::vector<std::string> vars;
  for (const TriplePattern& p : patterns) {
    for (std::string& v : p.variables()) {
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(std::move(v));
    }
  }
  return vars;
}

bool is_connected(std::span<const TriplePattern> patterns) {
  if (patterns.empty()) return true;
  std::vector<bool> reached(patterns.size(), false);
  std::vector<std::string> vars = patterns[0].variables();
  reached[0] = true;
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      if (reached[i]) continue;
      auto pv = patterns[i].variables();
      bool shares = std::any_of(pv.begin(), pv.end(), [&](const std::string& v) {
        return std::find(vars.begin(), vars.end(), v) != vars.end();
      });
      if (!shares) continue;
      reached[i] = true;
      grew = true;
      for (auto& v : pv) {
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(std::move(v));
      }
    }
  }
  return std::all_of(reached.begin(), reached.end(), [](bool r) { return r; });
}

void validate_query(const TripleQuery& query) {
  if (query.patterns.empty()) throw InvalidQuery("query has no triple patterns");
  for (const TriplePattern& p : query.patterns) {
    if (!p.has_constant()) {
      throw InvalidQuery("pattern '" + to_string(p) + "' has no constant position");
    }
  }
  if (!is_connected(query.patterns)) {
    throw InvalidQuery("query patterns are not connected through shared variables");
  }
}

std::vector<TripleQuery> parse_queries(std::istream& in) {
  std::vector<TripleQuery> queries;
  TripleQuery current;
  std::string line;
  std::size_t line_no = 0;
  auto flush = [&] {
    if (current.patterns.empty()) return;
    validate_query(current);
    queries.push_back(std::move(current));
    current = {};
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) {
      flush();
      continue;
    }
    if (line[first] == '#') continue;
    try {
      current.patterns.push_back(parse_pattern(line));
    } catch (const ParseError& e) {
      throw ParseError(line_no, e.detail());
    }
  }
  flush();
  return queries;
}

TripleQuery parse_single_query(std::istream& in) {
  auto queries = parse_queries(in);
  if (queries.empty()) throw InvalidQuery("query file contains no query");
  if (queries.size() > 1) throw InvalidQuery("expected one query, found " + std::to_string(queries.size()));
  return std::move(queries.front());
}

std::string to_string(const TripleQuery& query) {
  std::string out;
  for (const TriplePattern& p : query.patterns) {
    if (!out.empty()) out += " . ";
    out += to_string(p);
  }
  return out;
}

}  // namespace specqp
