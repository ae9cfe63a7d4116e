#include "records/scan.hpp"

#include <limits>
#include <stdexcept>

namespace recmax {

std::vector<long long> RecordSummary::simple_gaps() const {
  std::vector<long long> g;
  if (simple_record_times.size() > 1) {
    g.reserve(simple_record_times.size() - 1);
    for (std::size_t i = 1; i < simple_record_times.size(); ++i) {
      g.push_back(simple_record_times[i] - simple_record_times[i - 1]);
    }
  }
  return g;
}

RecordScan::RecordScan(int d, bool keep_times) : d_(d), keep_times_(keep_times) {
  if (d < 1) throw std::invalid_argument("RecordScan: dimension must be >= 1");
  running_max_.assign(d, -std::numeric_limits<double>::infinity());
  second_max_.assign(d, -std::numeric_limits<double>::infinity());
  argmax_.assign(d, 0);
}

RecordScan::Flags RecordScan::push(std::span<const double> x) {
  if (static_cast<int>(x.size()) != d_) {
    throw std::invalid_argument("RecordScan: observation dimension drift (expected " +
                                std::to_string(d_) + ", got " + std::to_string(x.size()) + ")");
  }
  ++n_;
  bool any = false;
  bool all = true;
  for (int i = 0; i < d_; ++i) {
    if (x[i] > running_max_[i]) {
      any = true;
      second_max_[i] = running_max_[i];
      running_max_[i] = x[i];
      argmax_[i] = n_;
    } else {
      all = false;
      if (x[i] > second_max_[i]) second_max_[i] = x[i];
    }
  }
  if (n_ == 1) {
    any = true;  // the first observation is a record by convention
    all = true;
  }
  if (any) {
    ++simple_count_;
    if (keep_times_) simple_times_.push_back(n_);
  }
  if (all) {
    ++complete_count_;
    if (keep_times_) complete_times_.push_back(n_);
  }
  return Flags{any, all};
}

std::optional<long long> RecordScan::champion() const {
  if (n_ == 0) throw std::invalid_argument("champion: empty stream");
  if (n_ == 1) return 1;
  // A champion must hold the strict per-coordinate maximum everywhere; at
  // most one observation can, so it suffices to test the coordinate-0
  // leader.  Exact ties at the top of a coordinate leave dominance
  // undecidable between the claimants and are reported as an error rather
  // than silently resolved (continuous input has none a.s.).
  const long long cand = argmax_[0];
  bool ok = true;
  bool blocked_by_tie_only = true;
  for (int i = 0; i < d_; ++i) {
    const bool tied_top = running_max_[i] == second_max_[i];
    if (argmax_[i] == cand && !tied_top) continue;
    ok = false;
    if (!tied_top) blocked_by_tie_only = false;
  }
  if (ok) return cand;
  if (blocked_by_tie_only) {
    throw std::runtime_error("champion: tied maxima (non-continuous input)");
  }
  return std::nullopt;
}

RecordSummary RecordScan::summary() const {
  if (!keep_times_) throw std::logic_error("summary: scan was built without time tracking");
  if (n_ == 0) throw std::invalid_argument("summary: empty stream");
  RecordSummary s;
  s.dim = d_;
  s.n = n_;
  s.simple_record_times = simple_times_;
  s.complete_record_times = complete_times_;
  s.champion_index = champion();
  return s;
}

RecordSummary scan_records(std::span<const double> rows, long long n, int d) {
  if (n < 1) throw std::invalid_argument("scan_records: empty stream");
  if (static_cast<long long>(rows.size()) != n * d) {
    throw std::invalid_argument("scan_records: row buffer size mismatch");
  }
  RecordScan scan(d);
  for (long long i = 0; i < n; ++i) {
    scan.push(rows.subspan(static_cast<std::size_t>(i) * d, d));
  }
  return scan.summary();
}

std::optional<long long> champion_index(std::span<const double> rows, long long n, int d) {
  if (n < 1) throw std::invalid_argument("champion_index: empty stream");
  if (static_cast<long long>(rows.size()) != n * d) {
    throw std::invalid_argument("champion_index: row buffer size mismatch");
  }
  RecordScan scan(d, /*keep_times=*/false);
  for (long long i = 0; i < n; ++i) {
    scan.push(rows.subspan(static_cast<std::size_t>(i) * d, d));
  }
  return scan.champion();
}

}  // namespace recmax
