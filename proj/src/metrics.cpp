#include "seamforge/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace seamforge {

namespace {

void check_shapes(const BitPlane& pred, const BitPlane& gt) {
  if (pred.rows() != gt.rows() || pred.cols() != gt.cols())
    throw MetricError("prediction and ground truth differ in shape");
}

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ConfusionCounts confusion_plain(const BitPlane& pred, const BitPlane& gt) {
  check_shapes(pred, gt);
  ConfusionCounts c;
  for (Index r = 0; r < pred.rows(); ++r) {
    for (Index col = 0; col < pred.cols(); ++col) {
      const bool p = pred(r, col) != 0;
      const bool g = gt(r, col) != 0;
      if (p && g) ++c.tp;
      else if (p) ++c.fp;
      else if (g) ++c.fn;
      else ++c.tn;
    }
  }
  return c;
}

ConfusionCounts confusion_buffered(const BitPlane& pred, const BitPlane& gt, Index p) {
  check_shapes(pred, gt);
  if (p < 0) throw MetricError("buffer radius must be non-negative");
  const Index h = pred.rows();
  const Index w = pred.cols();
  BitPlane consumed = BitPlane::Zero(h, w);
  ConfusionCounts c;

  for (Index r = 0; r < h; ++r) {
    for (Index col = 0; col < w; ++col) {
      if (!pred(r, col)) continue;
      Index best_r = -1;
      Index best_c = -1;
      Index best_d = std::numeric_limits<Index>::max();
      // Raster scan of the window already yields the (row, col) tie-break.
      for (Index rr = std::max<Index>(0, r - p); rr <= std::min(h - 1, r + p); ++rr) {
        for (Index cc = std::max<Index>(0, col - p); cc <= std::min(w - 1, col + p); ++cc) {
          if (!gt(rr, cc) || consumed(rr, cc)) continue;
          const Index d = std::max(std::abs(rr - r), std::abs(cc - col));
          if (d < best_d) {
            best_d = d;
            best_r = rr;
            best_c = cc;
          }
        }
      }
      if (best_r >= 0) {
        consumed(best_r, best_c) = 1;
        ++c.tp;
      } else {
        ++c.fp;
      }
    }
  }

  for (Index r = 0; r < h; ++r) {
    for (Index col = 0; col < w; ++col) {
      if (pred(r, col)) continue;
      if (gt(r, col) && !consumed(r, col)) ++c.fn;
      else ++c.tn;
    }
  }
  return c;
}

MetricReport derive_metrics(const ConfusionCounts& c) {
  MetricReport m;
  m.counts = c;
  const double tp = static_cast<double>(c.tp);
  const double fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn);
  const double tn = static_cast<double>(c.tn);
  m.accuracy = ratio(tp + tn, tp + tn + fp + fn);
  if (c.tp + c.fn == 0) return m;
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
  const double den = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
  m.mcc = ratio(tp * tn - fp * fn, den);
  return m;
}

MetricReport dataset_aggregate(std::span<const ConfusionCounts> counts) {
  if (counts.empty()) throw MetricError("cannot aggregate an empty dataset");
  ConfusionCounts sum;
  for (const auto& c : counts) sum += c;
  return derive_metrics(sum);
}

double sls_seam(const SeamTrajectory& traj, const BitPlane& pred_in) {
  const BitPlane pred = traj.orientation == Orientation::vertical ? pred_in : BitPlane(pred_in.transpose());
  const Index h = pred.rows();
  const Index w = pred.cols();
  if (traj.columns.size() != static_cast<std::size_t>(h))
    throw MetricError("trajectory length does not match the prediction height");
  if (h == 0) throw MetricError("empty prediction");
  double total = 0.0;
  for (Index r = 0; r < h; ++r) {
    const Index c = traj.columns[static_cast<std::size_t>(r)];
    if (c < 0 || c >= w) throw MetricError("trajectory column outside the prediction");
    Index d = w;
    for (Index j = 0; j < w; ++j)
      if (pred(r, j)) d = std::min(d, std::abs(c - j));
    total += static_cast<double>(d);
  }
  return total / static_cast<double>(h);
}

double sls_image(std::span<const SeamTrajectory> trajs, const BitPlane& pred) {
  if (trajs.empty()) throw MetricError("SLS needs at least one seam");
  double sum = 0.0;
  for (const auto& t : trajs) sum += sls_seam(t, pred);
  return sum / static_cast<double>(trajs.size());
}

std::string to_records(const MetricReport& r, std::string_view label) {
  const std::string p(label);
  std::string out;
  auto line = [&](std::string_view key, const std::string& value) {
    out += p + "." + std::string(key) + "=" + value + "\n";
  };
  line("buffered", r.buffered ? "true" : "false");
  line("p", std::to_string(r.p));
  line("tp", std::to_string(r.counts.tp));
  line("fp", std::to_string(r.counts.fp));
  line("fn", std::to_string(r.counts.fn));
  line("tn", std::to_string(r.counts.tn));
  line("accuracy", fmt_real(r.accuracy));
  line("precision", fmt_real(r.precision));
  line("recall", fmt_real(r.recall));
  line("f1", fmt_real(r.f1));
  line("mcc", fmt_real(r.mcc));
  if (r.sls) line("sls", fmt_real(*r.sls));
  return out;
}

}  // namespace seamforge
