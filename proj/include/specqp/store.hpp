#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "specqp/binding.hpp"
#include "specqp/pattern.hpp"

namespace specqp {

// One row of the triples TSV, before interning.
struct TripleRecord {
  std::string subject;
  std::string predicate;
  std::string object;
  double score = 0.0;
};

struct Triple {
  TermId subject;
  TermId predicate;
  TermId object;
  double raw_score;

  TermId at(std::size_t position) const {
    return position == 0 ? subject : position == 1 ? predicate : object;
  }
};

struct ScoredMatch {
  Binding binding;
  std::uint32_t triple = 0;  // index into the store
  double norm_score = 0.0;
};

// Pull interface over matches sorted by non-increasing norm_score.
class MatchStream {
 public:
  virtual ~MatchStream() = default;
  virtual std::optional<ScoredMatch> next() = 0;
};

// A pattern resolved against a store's dictionary. Variable positions
// carry a slot index into `variables`; constant positions carry the term.
struct ResolvedPattern {
  std::array<std::optional<TermId>, 3> constants;
  std::array<int, 3> slots{-1, -1, -1};
  std::array<std::string, 3> var_names;
  bool unsatisfiable = false;  // a constant is not in the store

  unsigned constant_mask() const;
};

struct SelectivityResult {
  double value = 0.0;
  bool zero_denominator = false;
  std::uint64_t joined = 0;
  std::uint64_t left_answers = 0;
  std::uint64_t right_matches = 0;
};

class PatternScan;

// Immutable scored triple store. Every pattern with at least one constant
// position is served by a hash index whose posting lists are pre-sorted by
// (raw score desc, lexicographic subject/predicate/object).
class TripleStore {
 public:
  // Duplicate (s, p, o) rows keep the maximum score. Throws RejectedRecord
  // on a negative or non-finite score.
  static TripleStore build(std::vector<TripleRecord> records);

  TripleStore();
  TripleStore(TripleStore&&) noexcept;
  TripleStore& operator=(TripleStore&&) noexcept;
  ~TripleStore();

  std::size_t size() const { return triples_.size(); }
  const Triple& triple(std::uint32_t index) const { return triples_[index]; }
  std::span<const Triple> triples() const { return triples_; }

  const std::string& term(TermId id) const { return terms_[id]; }
  std::optional<TermId> find_term(std::string_view text) const;
  // Position of the term in lexicographic order of all term strings.
  std::uint32_t lex_rank(TermId id) const { return lex_rank_[id]; }

  // Throws InvalidQuery for an all-variable pattern.
  ResolvedPattern resolve(const TriplePattern& pattern) const;
  ResolvedPattern resolve(const TriplePattern& pattern, std::vector<std::string>& shared_vars) const;

  // Posting list for the constant positions of `pattern`, not yet filtered
  // for repeated variables.
  std::span<const std::uint32_t> postings(const ResolvedPattern& pattern) const;
  // Posting list for a fully or partially instantiated id-level pattern;
  // unset positions are wildcards. At least one position must be set.
  std::span<const std::uint32_t> postings(const std::array<std::optional<TermId>, 3>& key) const;
  bool satisfies_repeats(const ResolvedPattern& pattern, const Triple& t) const;

  PatternScan scan_sorted(const TriplePattern& pattern) const;
  std::vector<ScoredMatch> matches(const TriplePattern& pattern) const;
  std::size_t match_count(const TriplePattern& pattern) const;
  // Max raw score among matches, 0 when there are none.
  double max_raw_score(const TriplePattern& pattern) const;

  // Number of answers (variable bindings) of the conjunctive query.
  std::uint64_t count_answers(std::span<const TriplePattern> patterns) const;

  // |answers(left + right)| / (|answers(left)| * match_count(right)),
  // computed exactly and cached on the canonical key of the pattern list.
  SelectivityResult join_selectivity(std::span<const TriplePattern> left,
                                     const TriplePattern& right) const;

  // FNV-1a 64 over the canonical TSV serialization.
  std::uint64_t checksum() const { return checksum_; }
  // Rows in canonical (lexicographic s, p, o) order.
  std::vector<TripleRecord> records() const;

  Binding bind(const ResolvedPattern& pattern, const Triple& t) const;

 private:
  struct Key3Hash {
    std::size_t operator()(const std::array<TermId, 3>& k) const;
  };
  using Postings = std::unordered_map<std::array<TermId, 3>, std::vector<std::uint32_t>, Key3Hash>;
  struct SelectivityCache;

  std::vector<Triple> triples_;
  std::vector<std::string> terms_;
  std::unordered_map<std::string, TermId> term_ids_;
  std::vector<std::uint32_t> lex_rank_;
  std::array<Postings, 8> index_;  // by constant mask 1..7
  std::uint64_t checksum_ = 0;
  std::unique_ptr<SelectivityCache> selectivity_cache_;
};

// Cursor over one pattern's matches in non-increasing norm_score order.
// Holds private state only; any number may be open over the same store.
class PatternScan : public MatchStream {
 public:
  PatternScan(const TripleStore& store, ResolvedPattern pattern);
  std::optional<ScoredMatch> next() override;
  std::size_t consumed() const { return consumed_; }

 private:
  const TripleStore* store_;
  ResolvedPattern pattern_;
  std::span<const std::uint32_t> postings_;
  std::size_t position_ = 0;
  std::size_t consumed_ = 0;
  double max_raw_ = -1.0;
};

// Parses `subject<TAB>predicate<TAB>object<TAB>score` lines. Blank lines are
// skipped. Throws ParseError / RejectedRecord carrying the 1-based line.
std::vector<TripleRecord> parse_triples(std::istream& in);
TripleStore load_triples(std::istream& in);

// Shortest decimal text that round-trips the double.
std::string format_score(double value);

}  // namespace specqp
