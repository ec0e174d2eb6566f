#include "specqp/rules.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "specqp/errors.hpp"
#include "specqp/store.hpp"

namespace specqp {

namespace {

using Renaming = std::vector<std::pair<std::string, std::string>>;

std::string lookup(const Renaming& renaming, const std::string& term, bool forward) {
  for (const auto& [from, to] : renaming) {
    if ((forward ? from : to) == term) return forward ? to : from;
  }
  return {};
}

TriplePattern rename(const TriplePattern& p, const Renaming& renaming, bool forward) {
  TriplePattern out = p;
  for (std::string* term : {&out.subject, &out.predicate, &out.object}) {
    if (!is_variable(*term)) continue;
    std::string mapped = lookup(renaming, *term, forward);
    if (mapped.empty()) throw InvalidRule("variable " + *term + " is not bound by the rule domain");
    *term = std::move(mapped);
  }
  return out;
}

}  // namespace

RuleSet::RuleSet(std::vector<WeightedRelaxationRule> rules) {
  for (WeightedRelaxationRule& rule : rules) {
    if (!(rule.weight >= 0.0 && rule.weight <= 1.0)) {
      throw InvalidRule("rule weight " + format_score(rule.weight) + " outside [0, 1]");
    }
    if (!rule.domain.has_constant() || !rule.range.has_constant()) {
      throw InvalidRule("rule patterns need at least one constant position");
    }
    auto dv = rule.domain.variables();
    auto rv = rule.range.variables();
    std::sort(dv.begin(), dv.end());
    std::sort(rv.begin(), rv.end());
    if (dv != rv) {
      throw InvalidRule("rule '" + to_string(rule.domain) + "' -> '" + to_string(rule.range) +
                        "' must use the same variables on both sides");
    }
    Renaming renaming = canonical_renaming(rule.domain);
    TriplePattern canonical_domain = rename(rule.domain, renaming, true);
    TriplePattern canonical_range = rename(rule.range, renaming, true);
    if (canonical_domain == canonical_range) {
      throw InvalidRule("rule domain equals range: '" + to_string(rule.domain) + "'");
    }
    auto& list = by_domain_[to_string(canonical_domain)];
    std::string range_text = to_string(canonical_range);
    auto it = std::find_if(list.begin(), list.end(), [&](const Entry& e) { return e.range_text == range_text; });
    if (it != list.end()) {
      it->weight = std::max(it->weight, rule.weight);
    } else {
      list.push_back(Entry{std::move(canonical_range), std::move(range_text), rule.weight});
      ++size_;
    }
  }
  for (auto& [key, list] : by_domain_) {
    std::sort(list.begin(), list.end(), [](const Entry& a, const Entry& b) {
      if (a.weight != b.weight) return a.weight > b.weight;
      return a.range_text < b.range_text;
    });
  }
}

std::vector<Relaxation> RuleSet::relaxations_for(const TriplePattern& pattern) const {
  auto it = by_domain_.find(canonical_key(pattern));
  if (it == by_domain_.end()) return {};
  Renaming renaming = canonical_renaming(pattern);
  std::vector<Relaxation> out;
  out.reserve(it->second.size());
  for (const Entry& e : it->second) out.push_back(Relaxation{rename(e.range, renaming, false), e.weight});
  return out;
}

std::optional<Relaxation> RuleSet::top_relaxation(const TriplePattern& pattern) const {
  auto it = by_domain_.find(canonical_key(pattern));
  if (it == by_domain_.end() || it->second.empty()) return std::nullopt;
  Renaming renaming = canonical_renaming(pattern);
  const Entry& e = it->second.front();
  return Relaxation{rename(e.range, renaming, false), e.weight};
}

std::vector<WeightedRelaxationRule> RuleSet::rules() const {
  std::vector<WeightedRelaxationRule> out;
  out.reserve(size_);
  for (const auto& [key, list] : by_domain_) {
    TriplePattern domain = parse_pattern(key);
    for (const Entry& e : list) out.push_back(WeightedRelaxationRule{domain, e.range, e.weight});
  }
  return out;
}

RuleSet parse_rules(std::istream& in) {
  std::vector<WeightedRelaxationRule> rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      throw ParseError(line_no, "expected domain<TAB>range<TAB>weight");
    }
    try {
      WeightedRelaxationRule rule;
      rule.domain = parse_pattern(std::string_view(line).substr(0, t1));
      rule.range = parse_pattern(std::string_view(line).substr(t1 + 1, t2 - t1 - 1));
      std::size_t used = 0;
      std::string weight_text = line.substr(t2 + 1);
      rule.weight = std::stod(weight_text, &used);
      if (used != weight_text.size()) throw ParseError(line_no, "bad weight '" + weight_text + "'");
      rules.push_back(std::move(rule));
    } catch (const ParseError& e) {
      throw ParseError(line_no, e.detail());
    } catch (const std::logic_error&) {
      throw ParseError(line_no, "bad weight '" + line.substr(t2 + 1) + "'");
    }
  }
  try {
    return RuleSet(std::move(rules));
  } catch (const InvalidRule& e) {
    throw ParseError(0, e.what());
  }
}

void write_rules(std::ostream& out, const RuleSet& rules) {
  for (const WeightedRelaxationRule& r : rules.rules()) {
    out << to_string(r.domain) << '\t' << to_string(r.range) << '\t' << format_score(r.weight) << '\n';
  }
}

RuleSet mine_cooccurrence_rules(const TripleStore& store, double min_weight, std::string_view tag_predicate) {
  if (!(min_weight >= 0.0 && min_weight <= 1.0)) throw ArgumentError("min weight must lie in [0, 1]");
  auto tag = store.find_term(tag_predicate);
  std::unordered_map<TermId, std::vector<TermId>> terms_by_item;
  std::unordered_map<TermId, std::uint64_t> items_with_term;
  for (const Triple& t : store.triples()) {
    if (!tag || t.predicate != *tag) {
      throw UnsupportedShape("co-occurrence mining needs every triple to use predicate '" +
                             std::string(tag_predicate) + "', found '" + store.term(t.predicate) + "'");
    }
    terms_by_item[t.subject].push_back(t.object);
    ++items_with_term[t.object];
  }
  std::unordered_map<std::uint64_t, std::uint64_t> together;
  for (auto& [item, terms] : terms_by_item) {
    for (TermId a : terms) {
      for (TermId b : terms) {
        if (a != b) ++together[(static_cast<std::uint64_t>(a) << 32) | b];
      }
    }
  }
  std::vector<WeightedRelaxationRule> rules;
  for (const auto& [pair, count] : together) {
    TermId a = static_cast<TermId>(pair >> 32);
    TermId b = static_cast<TermId>(pair & 0xffffffffu);
    double w = static_cast<double>(count) / static_cast<double>(items_with_term.at(a));
    if (w <= 0.0 || w < min_weight) continue;
    const std::string pred(tag_predicate);
    rules.push_back(WeightedRelaxationRule{TriplePattern{"?s", pred, store.term(a)},
                                           TriplePattern{"?s", pred, store.term(b)}, w});
  }
  return RuleSet(std::move(rules));
}

}  // namespace specqp
