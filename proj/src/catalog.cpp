#include "specqp/catalog.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>

#include "specqp/errors.hpp"
#include "specqp/store.hpp"

namespace specqp {

PatternStats compute_pattern_stats(const TripleStore& store, const TriplePattern& pattern) {
  PatternStats stats;
  std::vector<double> scores;
  PatternScan scan = store.scan_sorted(pattern);
  while (auto m = scan.next()) scores.push_back(m->norm_score);
  stats.m = static_cast<std::int64_t>(scores.size());
  if (scores.empty() || scores.front() <= 0.0) return stats;
  stats.histogram = build_histogram(scores, 1.0);
  return stats;
}

PatternStatsCatalog::PatternStatsCatalog(const TripleStore& store) : store_(&store) {}

PatternStats PatternStatsCatalog::get(const TriplePattern& pattern) const {
  const std::string key = canonical_key(pattern);
  {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
  }
  PatternStats stats = compute_pattern_stats(*store_, pattern);
  std::unique_lock lock(mutex_);
  return entries_.emplace(key, std::move(stats)).first->second;
}

bool PatternStatsCatalog::contains(const TriplePattern& pattern) const {
  std::shared_lock lock(mutex_);
  return entries_.count(canonical_key(pattern)) > 0;
}

std::size_t PatternStatsCatalog::prebuild(std::span<const TriplePattern> patterns, bool parallel) {
  std::vector<std::pair<std::string, const TriplePattern*>> missing;
  {
    std::shared_lock lock(mutex_);
    std::map<std::string, const TriplePattern*> unique;
    for (const TriplePattern& p : patterns) {
      std::string key = canonical_key(p);
      if (!entries_.count(key)) unique.emplace(std::move(key), &p);
    }
    missing.assign(unique.begin(), unique.end());
  }
  std::vector<PatternStats> built(missing.size());
  const long n = static_cast<long>(missing.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long i = 0; i < n; ++i) {
    built[i] = compute_pattern_stats(*store_, *missing[i].second);
  }
  std::unique_lock lock(mutex_);
  std::size_t added = 0;
  for (std::size_t i = 0; i < missing.size(); ++i) {
    added += entries_.emplace(missing[i].first, std::move(built[i])).second ? 1 : 0;
  }
  return added;
}

std::size_t PatternStatsCatalog::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::vector<std::pair<std::string, PatternStats>> PatternStatsCatalog::entries() const {
  std::shared_lock lock(mutex_);
  return {entries_.begin(), entries_.end()};
}

namespace {

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void PatternStatsCatalog::save(std::ostream& out) const {
  std::shared_lock lock(mutex_);
  out << "# checksum " << hex(store_->checksum()) << '\n';
  for (const auto& [key, stats] : entries_) {
    out << key << '\t' << stats.m;
    if (stats.histogram) {
      const TwoBucketHistogram& h = *stats.histogram;
      out << '\t' << format_score(h.sigma_r) << '\t' << format_score(h.S_r) << '\t' << format_score(h.S_m) << '\t'
          << format_score(h.U);
    } else {
      out << "\t0\t0\t0\t1";
    }
    out << '\n';
  }
}

bool PatternStatsCatalog::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return false;
  if (line != "# checksum " + hex(store_->checksum())) return false;
  std::map<std::string, PatternStats> loaded;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (fields.size() != 6) throw ParseError(line_no, "catalog record needs 6 fields");
    try {
      PatternStats stats;
      stats.m = std::stoll(fields[1]);
      TwoBucketHistogram h{stats.m, std::stod(fields[2]), std::stod(fields[3]), std::stod(fields[4]),
                           std::stod(fields[5])};
      if (h.S_m > 0.0) stats.histogram = h;
      loaded.emplace(fields[0], stats);
    } catch (const std::logic_error&) {
      throw ParseError(line_no, "bad number in catalog record");
    }
  }
  std::unique_lock lock(mutex_);
  for (auto& [key, stats] : loaded) entries_.insert_or_assign(key, stats);
  return true;
}

}  // namespace specqp
