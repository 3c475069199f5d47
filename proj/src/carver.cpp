#include "seamforge/carver.hpp"

#include <algorithm>
#include <cstdlib>

namespace seamforge {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::backward: return "backward";
    case Variant::forward: return "forward";
    case Variant::saliency: return "saliency";
    case Variant::merge: return "merge";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  if (name == "backward") return Variant::backward;
  if (name == "forward") return Variant::forward;
  if (name == "saliency") return Variant::saliency;
  if (name == "merge") return Variant::merge;
  throw CarveError("unknown seam carving variant '" + std::string(name) + "'");
}

bool is_connected(const Seam& seam) {
  for (std::size_t i = 1; i < seam.columns.size(); ++i)
    if (std::abs(seam.columns[i] - seam.columns[i - 1]) > 1) return false;
  return true;
}

bool fits(const Seam& seam, Index height, Index width) {
  if (seam.length() != height) return false;
  for (Index c : seam.columns)
    if (c < 0 || c >= width) return false;
  return is_connected(seam);
}

Seam optimal_seam(const CumulativeMatrix& m) {
  const Index h = m.values.rows();
  const Index w = m.values.cols();
  Seam seam;
  if (h == 0 || w == 0) return seam;
  seam.columns.resize(static_cast<std::size_t>(h));
  Index col = 0;
  m.values.row(h - 1).minCoeff(&col);  // first occurrence on ties
  for (Index r = h - 1; r >= 0; --r) {
    seam.columns[static_cast<std::size_t>(r)] = col;
    col += m.parent(r, col);
  }
  return seam;
}

double optimal_cost(const CumulativeMatrix& m) {
  if (m.values.size() == 0) return 0.0;
  return m.values.row(m.values.rows() - 1).minCoeff();
}

// ---------------------------------------------------------------------------

ProvenanceGrid ProvenanceGrid::identity(Index height, Index width) {
  ProvenanceGrid p;
  p.ids.resize(height, width);
  for (Index r = 0; r < height; ++r)
    for (Index c = 0; c < width; ++c) p.ids(r, c) = r * width + c;
  p.source_height = height;
  p.source_width = width;
  return p;
}

std::pair<Index, Index> ProvenanceGrid::origin(PixelId id) const {
  if (!is_source(id)) throw CarveError("pixel id is not a source pixel");
  const Index r = id / source_width;
  const Index c = id % source_width;
  return transposed ? std::pair{c, r} : std::pair{r, c};
}

PixelId ProvenanceGrid::add_synth(SynthRecord rec) {
  synthesized.push_back(rec);
  return source_count() + static_cast<PixelId>(synthesized.size()) - 1;
}

BitPlane ProvenanceGrid::project(const BitPlane& source_mask) const {
  const Index mh = transposed ? source_width : source_height;
  const Index mw = transposed ? source_height : source_width;
  if (source_mask.rows() != mh || source_mask.cols() != mw)
    throw CarveError("mask does not match the source image dimensions");
  BitPlane out = BitPlane::Zero(height(), width());
  for (Index r = 0; r < height(); ++r) {
    for (Index c = 0; c < width(); ++c) {
      const PixelId id = ids(r, c);
      if (!is_source(id)) continue;
      const auto [sr, sc] = origin(id);
      out(r, c) = source_mask(sr, sc) != 0;
    }
  }
  return out;
}

ProvenanceGrid transpose(const ProvenanceGrid& prov) {
  ProvenanceGrid out = prov;
  out.ids = prov.ids.transpose();
  out.transposed = !prov.transposed;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void check_seam(const Seam& seam, Index height, Index width, Index prov_h, Index prov_w,
                bool connected = true) {
  if (prov_h != height || prov_w != width) throw CarveError("provenance does not match image");
  if (seam.length() != height) throw CarveError("seam does not fit image");
  for (Index c : seam.columns)
    if (c < 0 || c >= width) throw CarveError("seam does not fit image");
  if (connected && !is_connected(seam)) throw CarveError("seam is not 8-connected");
}

RasterImage remove_from_raster(const RasterImage& img, const Seam& seam) {
  std::vector<Plane<double>> planes;
  planes.reserve(static_cast<std::size_t>(img.channels()));
  for (const auto& p : img.planes()) planes.push_back(remove_seam_from(p, seam));
  return RasterImage(std::move(planes), img.bit_depth());
}

}  // namespace

EditOutcome remove_seam(const RasterImage& img, const Seam& seam, const ProvenanceGrid& prov) {
  check_seam(seam, img.height(), img.width(), prov.height(), prov.width());
  if (img.width() < 2) throw CarveError("cannot remove a seam from a one-pixel-wide image");
  const Index h = img.height();
  const Index w = img.width();

  EditOutcome out{remove_from_raster(img, seam), prov, {EditKind::removal, {}, {}, {}}, {}};
  out.provenance.ids = remove_seam_from(prov.ids, seam);
  auto& ev = out.event;
  ev.target.resize(static_cast<std::size_t>(h));
  ev.left.resize(static_cast<std::size_t>(h));
  ev.right.resize(static_cast<std::size_t>(h));
  for (Index r = 0; r < h; ++r) {
    const Index c = seam.columns[static_cast<std::size_t>(r)];
    ev.target[r] = prov.ids(r, c);
    ev.left[r] = c > 0 ? prov.ids(r, c - 1) : kNoPixel;
    ev.right[r] = c + 1 < w ? prov.ids(r, c + 1) : kNoPixel;
  }
  return out;
}

EditOutcome insert_seam(const RasterImage& img, const Seam& seam, const ProvenanceGrid& prov) {
  check_seam(seam, img.height(), img.width(), prov.height(), prov.width(), false);
  const Index h = img.height();
  const Index w = img.width();

  std::vector<Plane<double>> planes(static_cast<std::size_t>(img.channels()), Plane<double>(h, w + 1));
  EditOutcome out{RasterImage{}, prov, {EditKind::insertion, {}, {}, {}}, {}};
  out.provenance.ids.resize(h, w + 1);
  auto& ev = out.event;
  ev.target.resize(static_cast<std::size_t>(h));
  ev.left.resize(static_cast<std::size_t>(h));
  ev.right.resize(static_cast<std::size_t>(h));
  out.synthesized.columns.resize(static_cast<std::size_t>(h));

  for (Index r = 0; r < h; ++r) {
    const Index c = seam.columns[static_cast<std::size_t>(r)];
    // Averaged pair (a, b) with a left of b; the new pixel goes at `pos`.
    Index a = c;
    Index b = c + 1;
    if (c + 1 >= w) {
      a = w >= 2 ? c - 1 : c;
      b = c;
    }
    const Index pos = (a == b) ? c + 1 : a + 1;

    const PixelId id = out.provenance.add_synth({prov.ids(r, a), prov.ids(r, b), SynthKind::inserted});
    ev.target[r] = id;
    ev.left[r] = prov.ids(r, a);
    ev.right[r] = prov.ids(r, b);
    out.synthesized.columns[static_cast<std::size_t>(r)] = pos;

    for (int ch = 0; ch < img.channels(); ++ch) {
      const auto& src = img.plane(ch);
      auto& dst = planes[static_cast<std::size_t>(ch)];
      dst.row(r).head(pos) = src.row(r).head(pos);
      dst(r, pos) = (src(r, a) + src(r, b)) / 2.0;
      dst.row(r).tail(w - pos) = src.row(r).tail(w - pos);
    }
    out.provenance.ids.row(r).head(pos) = prov.ids.row(r).head(pos);
    out.provenance.ids(r, pos) = id;
    out.provenance.ids.row(r).tail(w - pos) = prov.ids.row(r).tail(w - pos);
  }
  out.image = RasterImage(std::move(planes), img.bit_depth());
  return out;
}

EditOutcome merge_seam(const RasterImage& img, const Seam& seam, const ProvenanceGrid& prov) {
  check_seam(seam, img.height(), img.width(), prov.height(), prov.width());
  const Index h = img.height();
  const Index w = img.width();
  if (w < 2) throw CarveError("merging needs an image at least two pixels wide");

  std::vector<Plane<double>> planes(static_cast<std::size_t>(img.channels()), Plane<double>(h, w - 1));
  EditOutcome out{RasterImage{}, prov, {EditKind::merge, {}, {}, {}}, {}};
  out.provenance.ids.resize(h, w - 1);
  auto& ev = out.event;
  ev.target.resize(static_cast<std::size_t>(h));
  ev.left.resize(static_cast<std::size_t>(h));
  ev.right.resize(static_cast<std::size_t>(h));
  out.synthesized.columns.resize(static_cast<std::size_t>(h));

  for (Index r = 0; r < h; ++r) {
    const Index c = seam.columns[static_cast<std::size_t>(r)];
    const Index a = c + 1 < w ? c : c - 1;
    const Index b = a + 1;
    const PixelId id = out.provenance.add_synth({prov.ids(r, a), prov.ids(r, b), SynthKind::merged});
    ev.target[r] = id;
    ev.left[r] = prov.ids(r, a);
    ev.right[r] = prov.ids(r, b);
    out.synthesized.columns[static_cast<std::size_t>(r)] = a;

    for (int ch = 0; ch < img.channels(); ++ch) {
      const auto& src = img.plane(ch);
      auto& dst = planes[static_cast<std::size_t>(ch)];
      dst.row(r).head(a) = src.row(r).head(a);
      dst(r, a) = (src(r, a) + src(r, b)) / 2.0;
      dst.row(r).tail(w - 2 - a) = src.row(r).tail(w - 2 - a);
    }
    out.provenance.ids.row(r).head(a) = prov.ids.row(r).head(a);
    out.provenance.ids(r, a) = id;
    out.provenance.ids.row(r).tail(w - 2 - a) = prov.ids.row(r).tail(w - 2 - a);
  }
  out.image = RasterImage(std::move(planes), img.bit_depth());
  return out;
}

// ---------------------------------------------------------------------------

CarvingSession::CarvingSession(RasterImage source)
    : image_(std::move(source)), provenance_(ProvenanceGrid::identity(image_.height(), image_.width())) {}

void CarvingSession::apply(EditOutcome outcome) {
  image_ = std::move(outcome.image);
  provenance_ = std::move(outcome.provenance);
  history_.push_back(std::move(outcome.event));
}

void CarvingSession::remove(const Seam& seam) { apply(remove_seam(image_, seam, provenance_)); }

Seam CarvingSession::insert(const Seam& seam) {
  EditOutcome out = insert_seam(image_, seam, provenance_);
  Seam placed = std::move(out.synthesized);
  apply(std::move(out));
  return placed;
}

void CarvingSession::merge(const Seam& seam) { apply(merge_seam(image_, seam, provenance_)); }

namespace {

/// Energy, bias and DP for one variant. Saliency keeps a single map for the
/// lifetime of the finder and contracts it alongside the image.
class SeamFinder {
 public:
  explicit SeamFinder(Variant variant) : variant_(variant) {}

  std::pair<Seam, double> find(const RasterImage& img, const BitPlane* removal, const BitPlane* protective) {
    CumulativeMatrix m;
    switch (variant_) {
      case Variant::backward: {
        ++evaluations;
        m = cumulative_matrix(apply_mask_bias(backward_energy(img), removal, protective), DpMode::backward);
        break;
      }
      case Variant::saliency: {
        if (!static_map_) {
          ++evaluations;
          static_map_ = saliency_energy(img);
        }
        m = cumulative_matrix(apply_mask_bias(*static_map_, removal, protective), DpMode::saliency);
        break;
      }
      case Variant::forward:
      case Variant::merge: {
        ++evaluations;
        const ForwardCosts<double> fc = forward_costs(img);
        EnergyMap<double> e = EnergyMap<double>::Zero(img.height(), img.width());
        m = cumulative_matrix(apply_mask_bias(std::move(e), removal, protective), DpMode::forward, &fc);
        break;
      }
    }
    return {optimal_seam(m), optimal_cost(m)};
  }

  void contract(const Seam& seam) {
    if (static_map_) static_map_ = remove_seam_from(*static_map_, seam);
  }

  int evaluations = 0;

 private:
  Variant variant_;
  std::optional<EnergyMap<double>> static_map_;
};

void check_disjoint(const std::optional<BitPlane>& a, const std::optional<BitPlane>& b) {
  if (a && b && a->rows() == b->rows() && a->cols() == b->cols() && ((*a != 0) && (*b != 0)).any())
    throw CarveError("removal and protective masks overlap");
}

void step(CarvingSession& session, SeamFinder& finder, Variant variant, const SeamMasks& masks,
          RemovalRun& run) {
  std::optional<BitPlane> removal;
  std::optional<BitPlane> protective;
  if (masks.removal) removal = session.provenance().project(*masks.removal);
  if (masks.protective) protective = session.provenance().project(*masks.protective);
  auto [seam, cost] = finder.find(session.image(), removal ? &*removal : nullptr,
                                  protective ? &*protective : nullptr);
  finder.contract(seam);
  if (variant == Variant::merge)
    session.merge(seam);
  else
    session.remove(seam);
  run.seams.push_back(std::move(seam));
  run.costs.push_back(cost);
}

}  // namespace

RemovalRun remove_k_seams(CarvingSession& session, Index k, Variant variant, const SeamMasks& masks) {
  if (k < 0) throw CarveError("seam count must be non-negative");
  if (k >= session.image().width()) throw CarveError("cannot remove as many seams as the image is wide");
  check_disjoint(masks.removal, masks.protective);
  SeamFinder finder(variant);
  RemovalRun run;
  for (Index i = 0; i < k; ++i) step(session, finder, variant, masks, run);
  run.energy_evaluations = finder.evaluations;
  return run;
}

RemovalRun remove_until_clear(CarvingSession& session, const BitPlane& removal, Variant variant,
                              const std::optional<BitPlane>& protective) {
  if (variant == Variant::merge) throw CarveError("seam merging cannot remove masked pixels");
  const SeamMasks masks{removal, protective};
  check_disjoint(masks.removal, masks.protective);
  SeamFinder finder(variant);
  RemovalRun run;
  while (session.provenance().project(removal).any()) {
    if (session.image().width() <= 1)
      throw CarveError("removal mask cannot be exhausted before the image width is");
    step(session, finder, variant, masks, run);
  }
  run.energy_evaluations = finder.evaluations;
  return run;
}

InsertionRun insert_k_seams(CarvingSession& session, Index k, Variant variant,
                            const std::optional<BitPlane>& protective) {
  if (k < 0) throw CarveError("seam count must be non-negative");
  InsertionRun run;
  if (k == 0) return run;
  const RasterImage& current = session.image();
  const Index h = current.height();
  const Index w = current.width();
  if (k >= w) throw CarveError("cannot insert as many seams as the image is wide");

  RasterImage scratch = current;
  Plane<Index> columns(h, w);
  for (Index r = 0; r < h; ++r) columns.row(r).setLinSpaced(w, 0, w - 1);
  std::optional<BitPlane> guard;
  if (protective) guard = session.provenance().project(*protective);

  SeamFinder finder(variant == Variant::merge ? Variant::forward : variant);
  std::vector<std::vector<Index>> picks;
  picks.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    const Seam seam = finder.find(scratch, nullptr, guard ? &*guard : nullptr).first;
    std::vector<Index> cols(static_cast<std::size_t>(h));
    for (Index r = 0; r < h; ++r) cols[r] = columns(r, seam.columns[static_cast<std::size_t>(r)]);
    picks.push_back(std::move(cols));
    scratch = remove_from_raster(scratch, seam);
    columns = remove_seam_from(columns, seam);
    if (guard) guard = remove_seam_from(*guard, seam);
    finder.contract(seam);
  }
  run.energy_evaluations = finder.evaluations;

  for (std::size_t i = 0; i < picks.size(); ++i) {
    Seam placed = session.insert(Seam{picks[i], Orientation::vertical});
    for (std::size_t j = i + 1; j < picks.size(); ++j)
      for (Index r = 0; r < h; ++r)
        if (picks[j][r] >= placed.columns[r]) ++picks[j][r];
    run.seams.push_back(std::move(placed));
  }
  return run;
}

CarveResult remove_k_seams(const RasterImage& img, Index k, Variant variant, const SeamMasks& masks) {
  CarvingSession session(img);
  RemovalRun run = remove_k_seams(session, k, variant, masks);
  return {session.image(), std::move(run.seams), session.provenance(), std::move(run.costs),
          run.energy_evaluations};
}

InsertResult insert_k_seams(const RasterImage& img, Index k, Variant variant,
                            const std::optional<BitPlane>& protective) {
  CarvingSession session(img);
  InsertionRun run = insert_k_seams(session, k, variant, protective);
  return {session.image(), std::move(run.seams), session.provenance()};
}

namespace {

RasterImage resize_width(const RasterImage& img, Index width, Variant variant) {
  if (width < 1) throw CarveError("target size must be positive");
  CarvingSession session(img);
  while (session.image().width() > width)
    remove_k_seams(session, std::min(session.image().width() - width, session.image().width() - 1), variant);
  while (session.image().width() < width)
    insert_k_seams(session, std::min(width - session.image().width(), session.image().width() - 1), variant);
  return session.image();
}

}  // namespace

RasterImage retarget(const RasterImage& img, Index height, Index width, Variant variant) {
  if (img.width() == 1 && width > 1) throw CarveError("cannot grow a one-pixel-wide image");
  if (img.height() == 1 && height > 1) throw CarveError("cannot grow a one-pixel-tall image");
  RasterImage out = resize_width(img, width, variant);
  if (height != out.height())
    out = transpose(resize_width(transpose_for_horizontal(out), height, variant));
  return out;
}

}  // namespace seamforge
