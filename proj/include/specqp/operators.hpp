#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "specqp/binding.hpp"
#include "specqp/store.hpp"

namespace specqp {

// Which triple (and which rule, if any) a pattern's contribution came from.
struct ProvenanceEntry {
  std::size_t pattern = 0;
  int relaxation = -1;  // -1: the original pattern; else index into its relaxation list
  double weight = 1.0;
  double norm_score = 0.0;
  std::uint32_t triple = 0;
};

// Partial or complete answer. score = sum over provenance of weight * norm_score.
struct ScoredBinding {
  Binding binding;
  double score = 0.0;
  std::vector<ProvenanceEntry> provenance;
};

// Shared by all operators of one execution. Every ScoredBinding an operator
// materializes bumps answers_created.
struct OperatorStats {
  std::uint64_t answers_created = 0;
};

struct OperatorReport {
  std::string name;
  std::uint64_t pulls = 0;    // items taken from inputs
  std::uint64_t emitted = 0;  // items handed to the consumer
};

class BindingStream {
 public:
  virtual ~BindingStream() = default;
  virtual std::optional<ScoredBinding> next() = 0;
  // Appends this operator's report, then its inputs'.
  virtual void report(std::vector<OperatorReport>& out) const = 0;
};

// Leaf for a pattern that is not relaxed.
class ScanSource : public BindingStream {
 public:
  ScanSource(std::unique_ptr<MatchStream> input, std::size_t pattern, OperatorStats& stats);
  std::optional<ScoredBinding> next() override;
  void report(std::vector<OperatorReport>& out) const override;

 private:
  std::unique_ptr<MatchStream> input_;
  std::size_t pattern_;
  OperatorStats* stats_;
  std::uint64_t pulls_ = 0;
  double last_ = std::numeric_limits<double>::infinity();
};

struct MergeInput {
  std::unique_ptr<MatchStream> stream;
  double weight = 1.0;
  int relaxation = -1;
};

// Union of a pattern's matches and its relaxations' matches in weighted
// score order. A binding seen on several inputs is emitted once, with its
// best weighted score. An input is only opened once the best pending score
// drops to its weight, the most any of its matches can score.
class IncrementalMerge : public BindingStream {
 public:
  IncrementalMerge(std::vector<MergeInput> inputs, std::size_t pattern, OperatorStats& stats);
  std::optional<ScoredBinding> next() override;
  void report(std::vector<OperatorReport>& out) const override;
  std::size_t opened_inputs() const { return next_unopened_; }

 private:
  struct Head {
    ScoredBinding item;
    std::size_t input;
    std::uint64_t seq;
  };
  struct HeadOrder {
    bool operator()(const Head& a, const Head& b) const {
      if (a.item.score != b.item.score) return a.item.score < b.item.score;
      return a.seq > b.seq;
    }
  };

  void advance(std::size_t input);

  std::vector<MergeInput> inputs_;
  std::vector<double> last_;
  std::size_t pattern_;
  OperatorStats* stats_;
  std::size_t next_unopened_ = 0;
  std::priority_queue<Head, std::vector<Head>, HeadOrder> heads_;
  std::unordered_set<Binding, BindingHash> emitted_;
  std::uint64_t seq_ = 0;
  std::uint64_t pulls_ = 0;
  std::uint64_t emitted_count_ = 0;
};

// Hash rank join over two score-sorted inputs. Pulls from the side whose
// corner bound is larger and releases a buffered result once its score
// reaches max(top_left + last_right, last_left + top_right). k_hint = 0
// means unlimited; otherwise the operator stops after k_hint results.
class RankJoin : public BindingStream {
 public:
  RankJoin(std::unique_ptr<BindingStream> left, std::unique_ptr<BindingStream> right,
           std::vector<std::string> join_vars, std::size_t k_hint, OperatorStats& stats);
  std::optional<ScoredBinding> next() override;
  void report(std::vector<OperatorReport>& out) const override;

  std::uint64_t left_pulls() const { return sides_[0].pulls; }
  std::uint64_t right_pulls() const { return sides_[1].pulls; }

 private:
  using Key = std::vector<TermId>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };
  struct Side {
    std::unique_ptr<BindingStream> input;
    std::vector<ScoredBinding> seen;
    std::unordered_map<Key, std::vector<std::size_t>, KeyHash> by_key;
    bool started = false;
    bool done = false;
    double top = 0.0;
    double last = 0.0;
    std::uint64_t pulls = 0;
  };
  struct Pending {
    ScoredBinding item;
    std::uint64_t seq;
  };
  struct PendingOrder {
    bool operator()(const Pending& a, const Pending& b) const {
      if (a.item.score != b.item.score) return a.item.score < b.item.score;
      return a.seq > b.seq;
    }
  };

  double threshold() const;
  void pull(std::size_t side);
  Key key_of(const Binding& b) const;

  Side sides_[2];
  std::vector<std::string> join_vars_;
  std::size_t k_hint_;
  OperatorStats* stats_;
  std::priority_queue<Pending, std::vector<Pending>, PendingOrder> buffer_;
  std::uint64_t seq_ = 0;
  std::uint64_t emitted_ = 0;
};

// First k distinct bindings of a sorted stream. Throws ArgumentError if k < 1.
std::vector<ScoredBinding> top_k_sink(BindingStream& input, std::size_t k);

// In-memory streams for tests and fixtures.
class VectorMatchStream : public MatchStream {
 public:
  explicit VectorMatchStream(std::vector<ScoredMatch> items) : items_(std::move(items)) {}
  std::optional<ScoredMatch> next() override;
  std::size_t pulls() const { return pos_; }

 private:
  std::vector<ScoredMatch> items_;
  std::size_t pos_ = 0;
};

class VectorBindingStream : public BindingStream {
 public:
  explicit VectorBindingStream(std::vector<ScoredBinding> items, std::string name = "vector")
      : items_(std::move(items)), name_(std::move(name)) {}
  std::optional<ScoredBinding> next() override;
  void report(std::vector<OperatorReport>& out) const override;
  std::size_t pulls() const { return pos_; }

 private:
  std::vector<ScoredBinding> items_;
  std::string name_;
  std::size_t pos_ = 0;
};

}  // namespace specqp
