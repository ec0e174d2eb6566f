#include "specqp/operators.hpp"

#include <algorithm>

#include "specqp/errors.hpp"

namespace specqp {

namespace {

// Tolerance for "non-increasing" on inputs whose scores went through
// floating-point sums.
constexpr double kOrderSlack = 1e-12;

void check_order(double previous, double current, const char* where) {
  if (current > previous + kOrderSlack) {
    throw ContractViolation(std::string(where) + ": input score rose from " + format_score(previous) + " to " +
                            format_score(current));
  }
}

}  // namespace

ScanSource::ScanSource(std::unique_ptr<MatchStream> input, std::size_t pattern, OperatorStats& stats)
    : input_(std::move(input)), pattern_(pattern), stats_(&stats) {}

std::optional<ScoredBinding> ScanSource::next() {
  auto m = input_->next();
  if (!m) return std::nullopt;
  ++pulls_;
  check_order(last_, m->norm_score, "scan");
  last_ = m->norm_score;
  ++stats_->answers_created;
  ScoredBinding out;
  out.binding = std::move(m->binding);
  out.score = m->norm_score;
  out.provenance.push_back(ProvenanceEntry{pattern_, -1, 1.0, m->norm_score, m->triple});
  return out;
}

void ScanSource::report(std::vector<OperatorReport>& out) const {
  out.push_back(OperatorReport{"scan q" + std::to_string(pattern_ + 1), pulls_, pulls_});
}

IncrementalMerge::IncrementalMerge(std::vector<MergeInput> inputs, std::size_t pattern, OperatorStats& stats)
    : inputs_(std::move(inputs)), pattern_(pattern), stats_(&stats) {
  std::stable_sort(inputs_.begin(), inputs_.end(),
                   [](const MergeInput& a, const MergeInput& b) { return a.weight > b.weight; });
  last_.assign(inputs_.size(), std::numeric_limits<double>::infinity());
}

void IncrementalMerge::advance(std::size_t input) {
  MergeInput& in = inputs_[input];
  auto m = in.stream->next();
  if (!m) return;
  ++pulls_;
  check_order(last_[input], m->norm_score, "incremental merge");
  last_[input] = m->norm_score;
  ++stats_->answers_created;
  ScoredBinding item;
  item.binding = std::move(m->binding);
  item.score = in.weight * m->norm_score;
  item.provenance.push_back(ProvenanceEntry{pattern_, in.relaxation, in.weight, m->norm_score, m->triple});
  heads_.push(Head{std::move(item), input, seq_++});
}

std::optional<ScoredBinding> IncrementalMerge::next() {
  while (true) {
    while (next_unopened_ < inputs_.size() &&
           (heads_.empty() || heads_.top().item.score < inputs_[next_unopened_].weight)) {
      advance(next_unopened_++);
    }
    if (heads_.empty()) return std::nullopt;
    Head head = heads_.top();
    heads_.pop();
    advance(head.input);
    if (!emitted_.insert(head.item.binding).second) continue;
    ++emitted_count_;
    return std::move(head.item);
  }
}

void IncrementalMerge::report(std::vector<OperatorReport>& out) const {
  out.push_back(OperatorReport{"incremental_merge q" + std::to_string(pattern_ + 1), pulls_, emitted_count_});
}

std::size_t RankJoin::KeyHash::operator()(const Key& k) const {
  std::size_t h = 0x84222325cbf29ce4ull;
  for (TermId id : k) h = (h ^ id) * 0x100000001b3ull;
  return h;
}

RankJoin::RankJoin(std::unique_ptr<BindingStream> left, std::unique_ptr<BindingStream> right,
                   std::vector<std::string> join_vars, std::size_t k_hint, OperatorStats& stats)
    : join_vars_(std::move(join_vars)), k_hint_(k_hint), stats_(&stats) {
  sides_[0].input = std::move(left);
  sides_[1].input = std::move(right);
}

RankJoin::Key RankJoin::key_of(const Binding& b) const {
  Key key;
  key.reserve(join_vars_.size());
  for (const std::string& v : join_vars_) {
    auto value = b.get(v);
    if (!value) throw ContractViolation("rank join input lacks join variable " + v);
    key.push_back(*value);
  }
  return key;
}

double RankJoin::threshold() const {
  const Side& l = sides_[0];
  const Side& r = sides_[1];
  if ((!l.started && !l.done) || (!r.started && !r.done)) return std::numeric_limits<double>::infinity();
  double t = -std::numeric_limits<double>::infinity();
  if (!l.done) t = std::max(t, l.last + r.top);
  if (!r.done) t = std::max(t, l.top + r.last);
  return t;
}

void RankJoin::pull(std::size_t s) {
  Side& side = sides_[s];
  Side& other = sides_[1 - s];
  auto item = side.input->next();
  if (!item) {
    side.done = true;
    return;
  }
  ++side.pulls;
  if (!side.started) {
    side.started = true;
    side.top = item->score;
  } else {
    check_order(side.last, item->score, "rank join");
  }
  side.last = item->score;
  Key key = key_of(item->binding);
  auto match = other.by_key.find(key);
  if (match != other.by_key.end()) {
    for (std::size_t idx : match->second) {
      const ScoredBinding& o = other.seen[idx];
      const ScoredBinding& l = s == 0 ? *item : o;
      const ScoredBinding& r = s == 0 ? o : *item;
      if (!l.binding.compatible_with(r.binding)) continue;
      ScoredBinding joined;
      joined.binding = Binding::merge(l.binding, r.binding);
      joined.score = l.score + r.score;
      joined.provenance = l.provenance;
      joined.provenance.insert(joined.provenance.end(), r.provenance.begin(), r.provenance.end());
      std::sort(joined.provenance.begin(), joined.provenance.end(),
                [](const ProvenanceEntry& a, const ProvenanceEntry& b) { return a.pattern < b.pattern; });
      ++stats_->answers_created;
      buffer_.push(Pending{std::move(joined), seq_++});
    }
  }
  side.by_key[std::move(key)].push_back(side.seen.size());
  side.seen.push_back(std::move(*item));
}

std::optional<ScoredBinding> RankJoin::next() {
  if (k_hint_ > 0 && emitted_ >= k_hint_) return std::nullopt;
  Side& l = sides_[0];
  Side& r = sides_[1];
  while (true) {
    if ((l.done && !l.started) || (r.done && !r.started)) return std::nullopt;
    if (!buffer_.empty() && buffer_.top().item.score >= threshold()) {
      ScoredBinding out = buffer_.top().item;
      buffer_.pop();
      ++emitted_;
      return out;
    }
    if (l.done && r.done) return std::nullopt;
    std::size_t side;
    if (!l.started && !l.done) {
      side = 0;
    } else if (!r.started && !r.done) {
      side = 1;
    } else if (l.done) {
      side = 1;
    } else if (r.done) {
      side = 0;
    } else {
      side = (l.last + r.top >= l.top + r.last) ? 0 : 1;
    }
    pull(side);
  }
}

void RankJoin::report(std::vector<OperatorReport>& out) const {
  out.push_back(OperatorReport{"rank_join", sides_[0].pulls + sides_[1].pulls, emitted_});
  sides_[0].input->report(out);
  sides_[1].input->report(out);
}

std::vector<ScoredBinding> top_k_sink(BindingStream& input, std::size_t k) {
  if (k < 1) throw ArgumentError("k must be at least 1");
  std::vector<ScoredBinding> out;
  std::unordered_set<Binding, BindingHash> seen;
  while (out.size() < k) {
    auto item = input.next();
    if (!item) break;
    if (!seen.insert(item->binding).second) continue;
    out.push_back(std::move(*item));
  }
  return out;
}

std::optional<ScoredMatch> VectorMatchStream::next() {
  if (pos_ >= items_.size()) return std::nullopt;
  return items_[pos_++];
}

std::optional<ScoredBinding> VectorBindingStream::next() {
  if (pos_ >= items_.size()) return std::nullopt;
  return items_[pos_++];
}

void VectorBindingStream::report(std::vector<OperatorReport>& out) const {
  out.push_back(OperatorReport{name_, pos_, pos_});
}

}  // namespace specqp
