#pragma once

#include "seamforge/energy.hpp"
#include "seamforge/raster.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace seamforge {

class CarveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Variant { backward, forward, saliency, merge };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

enum class Orientation { vertical, horizontal };

/// One column index per row. 8-connected: consecutive rows differ by at most
/// one column. Horizontal seams are vertical seams of the transposed image.
struct Seam {
  std::vector<Index> columns;
  Orientation orientation = Orientation::vertical;

  Index length() const { return static_cast<Index>(columns.size()); }
  friend bool operator==(const Seam&, const Seam&) = default;
};

bool is_connected(const Seam& seam);
bool fits(const Seam& seam, Index height, Index width);

// ---------------------------------------------------------------------------
// Dynamic programming

enum class DpMode { backward, saliency, forward };

/// Minimum cumulative energy table. `parent` holds the column offset
/// (-1, 0, +1) of the predecessor that attained the minimum.
struct CumulativeMatrix {
  Plane<double> values;
  Plane<std::int8_t> parent;
};

/// Fills M row by row, left to right. In forward mode each candidate adds the
/// matching forward cost before the minimum is taken and row 0 carries the
/// up cost. Ties prefer offset 0, then -1, then +1.
template <typename Scalar>
CumulativeMatrix cumulative_matrix(const EnergyMap<Scalar>& e, DpMode mode,
                                   const ForwardCosts<Scalar>* fc = nullptr) {
  if ((mode == DpMode::forward) != (fc != nullptr))
    throw CarveError("forward costs must be supplied exactly in forward mode");
  const Index h = e.rows();
  const Index w = e.cols();
  if (fc && (fc->up.rows() != h || fc->up.cols() != w))
    throw CarveError("forward costs do not match the energy map");

  CumulativeMatrix m{Plane<double>(h, w), Plane<std::int8_t>::Zero(h, w)};
  if (h == 0 || w == 0) return m;
  for (Index c = 0; c < w; ++c)
    m.values(0, c) = fc ? double(e(0, c)) + double(fc->up(0, c)) : double(e(0, c));

  for (Index r = 1; r < h; ++r) {
    for (Index c = 0; c < w; ++c) {
      double best = m.values(r - 1, c) + (fc ? double(fc->up(r, c)) : 0.0);
      std::int8_t offset = 0;
      if (c > 0) {
        const double cand = m.values(r - 1, c - 1) + (fc ? double(fc->left(r, c)) : 0.0);
        if (cand < best) {
          best = cand;
          offset = -1;
        }
      }
      if (c + 1 < w) {
        const double cand = m.values(r - 1, c + 1) + (fc ? double(fc->right(r, c)) : 0.0);
        if (cand < best) {
          best = cand;
          offset = 1;
        }
      }
      m.values(r, c) = double(e(r, c)) + best;
      m.parent(r, c) = offset;
    }
  }
  return m;
}

/// Backtracks from the leftmost minimum of the last row.
Seam optimal_seam(const CumulativeMatrix& m);

/// Minimum of the last row of M, i.e. the cost of optimal_seam(m).
double optimal_cost(const CumulativeMatrix& m);

// ---------------------------------------------------------------------------
// Provenance

using PixelId = std::int64_t;
inline constexpr PixelId kNoPixel = -1;

enum class SynthKind : std::uint8_t { inserted, merged };

/// A pixel that did not exist in the source: the mean of `first` and `second`.
struct SynthRecord {
  PixelId first = kNoPixel;
  PixelId second = kNoPixel;
  SynthKind kind = SynthKind::inserted;
};

/// Maps every pixel of the current image to a stable id. Ids below
/// source_height * source_width are source pixels (row-major, in the source
/// frame); larger ids index `synthesized`.
struct ProvenanceGrid {
  Plane<PixelId> ids;
  Index source_height = 0;
  Index source_width = 0;
  std::vector<SynthRecord> synthesized;
  bool transposed = false;

  static ProvenanceGrid identity(Index height, Index width);

  Index height() const { return ids.rows(); }
  Index width() const { return ids.cols(); }
  PixelId source_count() const { return source_height * source_width; }
  bool is_source(PixelId id) const { return id >= 0 && id < source_count(); }
  bool is_synthesized(PixelId id) const { return id >= source_count(); }
  const SynthRecord& synth(PixelId id) const {
    return synthesized.at(static_cast<std::size_t>(id - source_count()));
  }

  /// (row, col) of a source pixel in the source frame, swapped while the grid
  /// is transposed.
  std::pair<Index, Index> origin(PixelId id) const;

  PixelId add_synth(SynthRecord rec);

  /// Source mask pushed into the current frame; synthesized pixels are 0.
  BitPlane project(const BitPlane& source_mask) const;
};

ProvenanceGrid transpose(const ProvenanceGrid& prov);

// ---------------------------------------------------------------------------
// Single-seam edits

enum class EditKind : std::uint8_t { removal, insertion, merge };

/// Per-row record of one seam edit. For a removal `target` is the removed
/// pixel and `left`/`right` its surviving neighbours; for an insertion or a
/// merge `target` is the synthesized pixel and `left`/`right` its parents.
struct EditEvent {
  EditKind kind = EditKind::removal;
  std::vector<PixelId> target;
  std::vector<PixelId> left;
  std::vector<PixelId> right;
};

struct EditOutcome {
  RasterImage image;
  ProvenanceGrid provenance;
  EditEvent event;
  /// Position of the synthesized pixels (insertion and merge only).
  Seam synthesized;
};

/// Deletes the seam pixel from every row.
EditOutcome remove_seam(const RasterImage& img, const Seam& seam, const ProvenanceGrid& prov);

/// Adds the mean of each seam pixel and its right neighbour directly after the
/// seam pixel. At the last column the left neighbour is averaged instead and
/// the new pixel goes between the two. The seam need not be connected: seams
/// picked on a shrinking scratch image lose connectivity once mapped back.
EditOutcome insert_seam(const RasterImage& img, const Seam& seam, const ProvenanceGrid& prov);

/// Replaces each seam pixel and its right neighbour (left at the last column)
/// by their mean.
EditOutcome merge_seam(const RasterImage& img, const Seam& seam, const ProvenanceGrid& prov);

/// Drops one element per row of any grid; used to keep auxiliary per-pixel
/// fields aligned with a carved image.
template <typename T>
Plane<T> remove_seam_from(const Plane<T>& grid, const Seam& seam) {
  const Index h = grid.rows();
  const Index w = grid.cols();
  if (!fits(seam, h, w) || w < 1) throw CarveError("seam does not fit grid");
  Plane<T> out(h, w - 1);
  for (Index r = 0; r < h; ++r) {
    const Index c = seam.columns[static_cast<std::size_t>(r)];
    out.row(r).head(c) = grid.row(r).head(c);
    out.row(r).tail(w - 1 - c) = grid.row(r).tail(w - 1 - c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Carving sessions

/// An image, its provenance, and the ordered list of edits applied since the
/// session started. The session's starting image defines the source frame.
class CarvingSession {
 public:
  explicit CarvingSession(RasterImage source);

  const RasterImage& image() const { return image_; }
  const ProvenanceGrid& provenance() const { return provenance_; }
  const std::vector<EditEvent>& history() const { return history_; }
  Index source_height() const { return provenance_.source_height; }
  Index source_width() const { return provenance_.source_width; }

  void remove(const Seam& seam);
  /// Returns the positions of the inserted pixels.
  Seam insert(const Seam& seam);
  void merge(const Seam& seam);

 private:
  void apply(EditOutcome outcome);

  RasterImage image_;
  ProvenanceGrid provenance_;
  std::vector<EditEvent> history_;
};

/// Masks in the session's source frame.
struct SeamMasks {
  std::optional<BitPlane> removal;
  std::optional<BitPlane> protective;
};

struct RemovalRun {
  /// Seams in the coordinates of the image at the moment each was applied.
  std::vector<Seam> seams;
  std::vector<double> costs;
  /// Full energy-map computations performed (saliency computes exactly one).
  int energy_evaluations = 0;
};

/// k rounds of energy, bias, cumulative matrix, optimal seam, removal (or
/// merge for Variant::merge).
RemovalRun remove_k_seams(CarvingSession& session, Index k, Variant variant, const SeamMasks& masks = {});

/// Removes seams until no removal-mask pixel of the source survives.
RemovalRun remove_until_clear(CarvingSession& session, const BitPlane& removal, Variant variant,
                              const std::optional<BitPlane>& protective = std::nullopt);

struct InsertionRun {
  /// Positions of the inserted pixels at the moment each was inserted.
  std::vector<Seam> seams;
  int energy_evaluations = 0;
};

/// Picks the k cheapest disjoint seams by successive removal on a scratch
/// copy, then inserts them into the session image, cheapest first.
InsertionRun insert_k_seams(CarvingSession& session, Index k, Variant variant,
                            const std::optional<BitPlane>& protective = std::nullopt);

struct CarveResult {
  RasterImage image;
  std::vector<Seam> seams;
  ProvenanceGrid provenance;
  std::vector<double> costs;
  int energy_evaluations = 0;
};

CarveResult remove_k_seams(const RasterImage& img, Index k, Variant variant, const SeamMasks& masks = {});

struct InsertResult {
  RasterImage image;
  std::vector<Seam> seams;
  ProvenanceGrid provenance;
};

InsertResult insert_k_seams(const RasterImage& img, Index k, Variant variant,
                            const std::optional<BitPlane>& protective = std::nullopt);

/// Horizontal-seam operations are vertical operations on the transpose.
inline RasterImage transpose_for_horizontal(const RasterImage& img) { return transpose(img); }

/// Resize to (height, width) by vertical then horizontal seam removal or
/// insertion.
RasterImage retarget(const RasterImage& img, Index height, Index width, Variant variant);

}  // namespace seamforge
