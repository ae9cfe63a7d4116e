#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace recmax {

struct RecordSummary {
  int dim = 0;
  long long n = 0;
  std::vector<long long> simple_record_times;    // 1-based indices
  std::vector<long long> complete_record_times;  // subset of the simple times
  std::optional<long long> champion_index;       // 1-based, absent if none
  // Waiting times between consecutive simple records.
  std::vector<long long> simple_gaps() const;
};

// Streaming record detector.  An observation is a simple record when some
// coordinate strictly exceeds the running componentwise maximum, a complete
// record when all coordinates do.  The champion, if any, is the unique
// observation strictly dominating every other; per-coordinate top-two
// tracking decides this in one pass.
class RecordScan {
 public:
  explicit RecordScan(int d, bool keep_times = true);

  struct Flags {
    bool simple = false;
    bool complete = false;
  };
  Flags push(std::span<const double> x);

  int dim() const { return d_; }
  long long count() const { return n_; }
  long long simple_count() const { return simple_count_; }
  long long complete_count() const { return complete_count_; }
  std::span<const double> running_max() const { return running_max_; }

  // Throws if two observations mutually claim strict dominance, which only
  // exact ties / non-continuous input can produce.
  std::optional<long long> champion() const;

  RecordSummary summary() const;  // requires keep_times

 private:
  int d_;
  bool keep_times_;
  long long n_ = 0;
  long long simple_count_ = 0;
  long long complete_count_ = 0;
  std::vector<double> running_max_;
  std::vector<double> second_max_;
  std::vector<long long> argmax_;
  std::vector<long long> simple_times_;
  std::vector<long long> complete_times_;
};

// One-shot scan over rows stored row-major (n x d).
RecordSummary scan_records(std::span<const double> rows, long long n, int d);

// Champion of a row-major batch, absent when no observation dominates.
std::optional<long long> champion_index(std::span<const double> rows, long long n, int d);

}  // namespace recmax
