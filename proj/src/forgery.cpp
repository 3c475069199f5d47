#include "seamforge/forgery.hpp"

#include <algorithm>
#include <cmath>

namespace seamforge {

std::string_view to_string(ForgeryKind k) {
  switch (k) {
    case ForgeryKind::retarget: return "retarget";
    case ForgeryKind::object_removal: return "object_removal";
    case ForgeryKind::object_displacement: return "object_displacement";
  }
  return "?";
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::left: return "left";
    case Direction::right: return "right";
    case Direction::up: return "up";
    case Direction::down: return "down";
  }
  return "?";
}

ForgeryKind parse_forgery_kind(std::string_view name) {
  if (name == "retarget") return ForgeryKind::retarget;
  if (name == "object_removal" || name == "removal") return ForgeryKind::object_removal;
  if (name == "object_displacement" || name == "displacement") return ForgeryKind::object_displacement;
  throw ForgeryError("unknown forgery kind '" + std::string(name) + "'");
}

Direction parse_direction(std::string_view name) {
  if (name == "left") return Direction::left;
  if (name == "right") return Direction::right;
  if (name == "up") return Direction::up;
  if (name == "down") return Direction::down;
  throw ForgeryError("unknown direction '" + std::string(name) + "'");
}

namespace {

/// Flat final position (row * width + col) of every id, or -1 if gone.
std::vector<Index> final_positions(const ProvenanceGrid& prov) {
  std::vector<Index> pos(static_cast<std::size_t>(prov.source_count()) + prov.synthesized.size(), -1);
  for (Index r = 0; r < prov.height(); ++r)
    for (Index c = 0; c < prov.width(); ++c) pos[static_cast<std::size_t>(prov.ids(r, c))] = r * prov.width() + c;
  return pos;
}

void mark(BitPlane& layer, const std::vector<Index>& pos, PixelId id) {
  if (id == kNoPixel) return;
  const Index p = pos[static_cast<std::size_t>(id)];
  if (p >= 0) layer(p / layer.cols(), p % layer.cols()) = 1;
}

}  // namespace

SeamMask build_gt_masks(const ProvenanceGrid& prov, const std::vector<EditEvent>& history) {
  SeamMask gt(prov.height(), prov.width());
  const std::vector<Index> pos = final_positions(prov);
  const auto known = static_cast<PixelId>(pos.size());
  for (const auto& ev : history) {
    for (std::size_t r = 0; r < ev.target.size(); ++r) {
      if (ev.target[r] < 0 || ev.target[r] >= known) throw ForgeryError("edit history refers to unknown pixels");
      switch (ev.kind) {
        case EditKind::removal:
          mark(gt.removed, pos, ev.left[r]);
          mark(gt.removed, pos, ev.right[r]);
          break;
        case EditKind::merge:
          mark(gt.removed, pos, ev.target[r]);
          break;
        case EditKind::insertion:
          mark(gt.inserted, pos, ev.target[r]);
          break;
      }
    }
  }
  return gt;
}

Trajectories seam_trajectories(const ProvenanceGrid& prov, const std::vector<EditEvent>& history) {
  const std::vector<Index> pos = final_positions(prov);
  std::vector<PixelId> successor(pos.size(), kNoPixel);
  for (const auto& ev : history) {
    for (std::size_t r = 0; r < ev.target.size(); ++r) {
      if (ev.kind == EditKind::removal)
        successor[static_cast<std::size_t>(ev.target[r])] = ev.right[r] != kNoPixel ? ev.right[r] : ev.left[r];
      else if (ev.kind == EditKind::merge) {
        successor[static_cast<std::size_t>(ev.left[r])] = ev.target[r];
        successor[static_cast<std::size_t>(ev.right[r])] = ev.target[r];
      }
    }
  }
  auto resolve = [&](PixelId id) {
    while (id != kNoPixel && pos[static_cast<std::size_t>(id)] < 0) id = successor[static_cast<std::size_t>(id)];
    if (id == kNoPixel) throw ForgeryError("seam cannot be located in the final image");
    return pos[static_cast<std::size_t>(id)] % prov.width();
  };

  const Orientation orient = prov.transposed ? Orientation::horizontal : Orientation::vertical;
  Trajectories out;
  for (const auto& ev : history) {
    SeamTrajectory t{std::vector<Index>(ev.target.size()), orient};
    for (std::size_t r = 0; r < ev.target.size(); ++r) {
      const PixelId anchor =
          ev.kind == EditKind::removal ? (ev.right[r] != kNoPixel ? ev.right[r] : ev.left[r]) : ev.target[r];
      t.columns[r] = resolve(anchor);
    }
    (ev.kind == EditKind::insertion ? out.inserted : out.removed).push_back(std::move(t));
  }
  return out;
}

Index seams_for_ratio(double ratio, Index width) {
  return static_cast<Index>(std::lround(ratio * static_cast<double>(width)));
}

namespace {

/// insert_k_seams in batches small enough for the scratch search.
void insert_batched(CarvingSession& session, Index k, Variant variant, const std::optional<BitPlane>& protective) {
  while (k > 0) {
    const Index batch = std::min(k, session.image().width() - 1);
    if (batch <= 0) throw ForgeryError("image too narrow to insert seams");
    insert_k_seams(session, batch, variant, protective);
    k -= batch;
  }
}

ForgeryResult finish(const CarvingSession& session, const ForgeryRecipe& recipe, bool transposed) {
  ForgeryResult res;
  res.recipe = recipe;
  res.gt = build_gt_masks(session.provenance(), session.history());
  Trajectories t = seam_trajectories(session.provenance(), session.history());
  res.forged = session.image();
  res.provenance = session.provenance();
  if (transposed) {
    res.forged = transpose(res.forged);
    res.provenance = transpose(res.provenance);
    res.gt = transpose(res.gt);
    for (auto* list : {&t.removed, &t.inserted})
      for (auto& s : *list) s.orientation = Orientation::horizontal;
  }
  res.seams_removed = std::move(t.removed);
  res.seams_inserted = std::move(t.inserted);
  return res;
}

void check_mask(const PixelMask& m, const RasterImage& img, const char* what) {
  if (m.height() != img.height() || m.width() != img.width())
    throw ForgeryError(std::string(what) + " mask does not match the image dimensions");
}

}  // namespace

ForgeryResult retarget_forgery(const RasterImage& img, double ratio, Variant variant, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio <= 0.5)) throw ForgeryError("retarget ratio must lie in (0, 0.5]");
  const Index k = seams_for_ratio(ratio, img.width());
  if (k < 1) throw ForgeryError("ratio removes no seams at this width");
  CarvingSession session(img);
  remove_k_seams(session, k, variant);
  insert_batched(session, k, variant, std::nullopt);
  ForgeryRecipe recipe;
  recipe.kind = ForgeryKind::retarget;
  recipe.ratio = ratio;
  recipe.variant = variant;
  recipe.seed = seed;
  return finish(session, recipe, false);
}

ForgeryResult object_removal_forgery(const RasterImage& img, const PixelMask& removal,
                                     const std::optional<PixelMask>& protective, Variant variant) {
  check_mask(removal, img, "removal");
  if (protective) {
    check_mask(*protective, img, "protective");
    if (((removal.bits != 0) && (protective->bits != 0)).any())
      throw ForgeryError("removal and protective masks overlap");
  }
  if (variant == Variant::merge) throw ForgeryError("object removal needs a removing variant, not merge");

  std::optional<BitPlane> guard;
  if (protective) guard = protective->bits;
  CarvingSession session(img);
  const RemovalRun run = remove_until_clear(session, removal.bits, variant, guard);
  insert_batched(session, static_cast<Index>(run.seams.size()), variant, guard);

  ForgeryRecipe recipe;
  recipe.kind = ForgeryKind::object_removal;
  recipe.variant = variant;
  recipe.removal = removal;
  recipe.protective = protective;
  return finish(session, recipe, false);
}

ForgeryResult object_displacement_forgery(const RasterImage& img, const PixelMask& object, Direction direction,
                                          Index shift, Variant variant) {
  check_mask(object, img, "object");
  if (shift < 1) throw ForgeryError("displacement shift must be at least one pixel");
  if (variant == Variant::merge) throw ForgeryError("object displacement needs a removing variant, not merge");
  if (object.empty()) throw ForgeryError("object mask is empty");

  const bool transposed = direction == Direction::up || direction == Direction::down;
  const bool toward_left = direction == Direction::left || direction == Direction::up;
  const RasterImage work = transposed ? transpose(img) : img;
  const BitPlane obj = transposed ? BitPlane(object.bits.transpose()) : object.bits;
  const Index h = work.height();
  const Index w = work.width();

  Index first = w;
  Index last = -1;
  for (Index c = 0; c < w; ++c) {
    if (obj.col(c).any()) {
      first = std::min(first, c);
      last = std::max(last, c);
    }
  }
  // Removal happens in the band on the displacement side, insertion in the
  // band on the opposite side.
  const Index removal_band = toward_left ? first : w - 1 - last;
  const Index insertion_band = toward_left ? w - 1 - last : first;
  if (removal_band == 0) throw ForgeryError("object touches the image border on the removal side");
  if (shift > removal_band || shift > insertion_band)
    throw ForgeryError("shift does not fit beside the object");

  BitPlane corridor = BitPlane::Zero(h, w);
  BitPlane fence = BitPlane::Zero(h, w);
  if (toward_left) {
    corridor.leftCols(first).setOnes();
    fence.leftCols(last + 1).setOnes();
  } else {
    corridor.rightCols(w - 1 - last).setOnes();
    fence.rightCols(w - first).setOnes();
  }

  CarvingSession session(work);
  remove_k_seams(session, shift, variant, SeamMasks{corridor, obj});
  insert_batched(session, shift, variant, fence);

  // Every object pixel must have moved by exactly `shift` columns.
  const Index offset = toward_left ? -shift : shift;
  const ProvenanceGrid& prov = session.provenance();
  for (Index r = 0; r < prov.height(); ++r) {
    for (Index c = 0; c < prov.width(); ++c) {
      const PixelId id = prov.ids(r, c);
      if (!prov.is_source(id)) continue;
      const auto [sr, sc] = prov.origin(id);
      if (obj(sr, sc) && (sr != r || sc + offset != c))
        throw ForgeryError("seams escaped the displacement corridor");
    }
  }

  ForgeryRecipe recipe;
  recipe.kind = ForgeryKind::object_displacement;
  recipe.variant = variant;
  recipe.object = object;
  recipe.direction = direction;
  recipe.shift = shift;
  return finish(session, recipe, transposed);
}

ForgeryResult forge(const RasterImage& img, const ForgeryRecipe& recipe) {
  ForgeryResult res;
  switch (recipe.kind) {
    case ForgeryKind::retarget:
      res = retarget_forgery(img, recipe.ratio, recipe.variant, recipe.seed);
      break;
    case ForgeryKind::object_removal:
      if (!recipe.removal) throw ForgeryError("object removal needs a removal mask");
      res = object_removal_forgery(img, *recipe.removal, recipe.protective, recipe.variant);
      break;
    case ForgeryKind::object_displacement:
      if (!recipe.object) throw ForgeryError("object displacement needs an object mask");
      res = object_displacement_forgery(img, *recipe.object, recipe.direction, recipe.shift, recipe.variant);
      break;
  }
  res.recipe = recipe;
  return res;
}

}  // namespace seamforge
