#pragma once

#include "seamforge/carver.hpp"
#include "seamforge/raster.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace seamforge {

class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct MetricReport {
  double accuracy = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  double mcc = 0;
  bool buffered = false;
  Index p = 0;
  std::optional<double> sls;
  ConfusionCounts counts;
};

/// Ground-truth seam path in final-image coordinates, one column per row.
/// Horizontal trajectories index rows by column instead.
struct SeamTrajectory {
  std::vector<Index> columns;
  Orientation orientation = Orientation::vertical;

  friend bool operator==(const SeamTrajectory&, const SeamTrajectory&) = default;
};

ConfusionCounts confusion_plain(const BitPlane& pred, const BitPlane& gt);

/// Buffered confusion counts. Predicted positives are visited in raster
/// order; each consumes the nearest unconsumed ground-truth positive within
/// Chebyshev distance p (ties: smaller row, then smaller column) and scores a
/// TP, or scores an FP if there is none. Predicted negatives on a consumed
/// ground-truth positive count as TN, on an unconsumed one as FN.
ConfusionCounts confusion_buffered(const BitPlane& pred, const BitPlane& gt, Index p);

/// Accuracy, precision, recall, F1 and MCC. A zero denominator yields 0, and
/// when there are no ground-truth positives (tp + fn == 0) everything except
/// accuracy is 0.
MetricReport derive_metrics(const ConfusionCounts& c);

/// Sums the counts, then derives metrics.
MetricReport dataset_aggregate(std::span<const ConfusionCounts> counts);

/// Mean over rows of the distance from the trajectory to the nearest
/// predicted positive in that row, or the image width for rows without one.
double sls_seam(const SeamTrajectory& traj, const BitPlane& pred);

/// Mean of sls_seam over all trajectories.
double sls_image(std::span<const SeamTrajectory> trajs, const BitPlane& pred);

/// One `key=value` line per field, prefixed by `label`. Reals are printed
/// with 17 significant digits so they round-trip.
std::string to_records(const MetricReport& report, std::string_view label);

}  // namespace seamforge
