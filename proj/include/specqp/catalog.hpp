#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "specqp/pattern.hpp"
#include "specqp/score_model.hpp"

namespace specqp {

class TripleStore;

struct PatternStats {
  std::int64_t m = 0;
  // Absent when the pattern has no matches or all its scores are zero.
  std::optional<TwoBucketHistogram> histogram;
};

PatternStats compute_pattern_stats(const TripleStore& store, const TriplePattern& pattern);

// Histograms keyed by canonical pattern key, filled lazily on first lookup.
// Concurrent lookups share a reader lock; inserts take it exclusively.
class PatternStatsCatalog {
 public:
  explicit PatternStatsCatalog(const TripleStore& store);

  PatternStats get(const TriplePattern& pattern) const;
  bool contains(const TriplePattern& pattern) const;

  // Builds every missing entry; the parallel path spreads patterns over
  // OpenMP threads. Returns how many entries were added.
  std::size_t prebuild(std::span<const TriplePattern> patterns, bool parallel = true);

  std::size_t size() const;
  std::vector<std::pair<std::string, PatternStats>> entries() const;

  // Sidecar: "# checksum <hex>" header, then
  // key<TAB>m<TAB>sigma_r<TAB>S_r<TAB>S_m<TAB>U per entry.
  void save(std::ostream& out) const;
  // Loads entries only if the header checksum matches the store; returns
  // whether anything was loaded.
  bool load(std::istream& in);

 private:
  const TripleStore* store_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::string, PatternStats> entries_;
};

}  // namespace specqp
