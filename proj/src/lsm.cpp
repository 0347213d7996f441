// Copyright 2026 The lsmrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "lsmrec/lsm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "lsmrec/error.hpp"

namespace lsmrec {

std::string_view to_string(MovieGroup group) {
  switch (group) {
    case MovieGroup::kLike: return "like";
    case MovieGroup::kDislike: return "dislike";
    case MovieGroup::kNeutral: return "neutral";
    case MovieGroup::kRecommendable: return "recommendable";
    case MovieGroup::kNotRecommendable: return "not_recommendable";
  }
  return "unknown";
}

double weight_of(const MovieWeights& weights, std::size_t movie) {
  const auto it = weights.find(movie);
  return it == weights.end() ? 1.0 : it->second;
}

MovieGroups partition_groups(std::span<const int> ratings, const UserNeighborhood& nb,
                             const ThumbSets& thumbs, const GroupThresholds& thresholds) {
  if (thresholds.dislike > thresholds.like) {
    throw Error(ErrorCode::kInvalidArgument, "dislike threshold exceeds like threshold");
  }
  MovieGroups groups;
  groups.user = nb.user;
  groups.thresholds = thresholds;
  groups.group_of.resize(ratings.size());

  for (std::size_t i = 0; i < ratings.size(); ++i) {
    const int r = ratings[i];
    if (r != 0) groups.rated.push_back(i);

    MovieGroup g;
    if (thumbs.down.contains(i)) {
      g = MovieGroup::kNotRecommendable;
    } else if (thumbs.up.contains(i)) {
      g = MovieGroup::kLike;
    } else if (r != 0) {
      if (r >= thresholds.like) {
        g = MovieGroup::kLike;
      } else if (r < thresholds.dislike) {
        g = MovieGroup::kDislike;
      } else {
        g = MovieGroup::kNeutral;
      }
    } else {
      const auto degree = nb.degree(i);
      g = degree && *degree >= thresholds.recommend ? MovieGroup::kRecommendable
                                                    : MovieGroup::kNotRecommendable;
    }
    groups.group_of[i] = g;
    switch (g) {
      case MovieGroup::kLike: groups.like.push_back(i); break;
      case MovieGroup::kDislike: groups.dislike.push_back(i); break;
      case MovieGroup::kNeutral: groups.neutral.push_back(i); break;
      case MovieGroup::kRecommendable: groups.recommendable.push_back(i); break;
      case MovieGroup::kNotRecommendable: groups.not_recommendable.push_back(i); break;
    }
  }
  return groups;
}

namespace {

std::vector<double> project(const LatentSpace& space, int p, std::span<const std::size_t> movies) {
  std::vector<double> out;
  out.reserve(movies.size());
  for (std::size_t i : movies) out.push_back(space.projection(i, p));
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::ranges::sort(values);
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double population_std(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

bool in_range(const std::optional<Interval>& range, double x) {
  return range && range->contains(x);
}

}  // namespace

FamiliarityZone DimensionLayout::familiarity(double x) const {
  if (familiar) {
    if (familiar->contains(x)) return FamiliarityZone::kFamiliar;
    return x < familiar->lo ? FamiliarityZone::kDiverseLeft : FamiliarityZone::kDiverseRight;
  }
  return x < 0.0 ? FamiliarityZone::kDiverseLeft : FamiliarityZone::kDiverseRight;
}

TypicalityZone DimensionLayout::typicality(double x) const {
  if (std::abs(x) <= untypical_boundary) return TypicalityZone::kUntypical;
  return x < 0.0 ? TypicalityZone::kTypicalLeft : TypicalityZone::kTypicalRight;
}

DimensionLayout layout_dimension(const LatentSpace& space, int p, const MovieGroups& groups,
                                 double untypical_quantile) {
  if (p < 0 || p >= space.k) throw Error(ErrorCode::kInvalidArgument, "dimension out of range");
  DimensionLayout layout;
  layout.dimension = p;

  std::vector<double> all(space.movies());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = space.projection(i, p);
  layout.extent = hull_of(all).value_or(Interval{});

  const auto like_x = project(space, p, groups.like);
  const auto dislike_x = project(space, p, groups.dislike);
  layout.like = hull_of(like_x);
  layout.dislike = hull_of(dislike_x);
  if (layout.like && layout.dislike) {
    layout.overlap = intersect(*layout.like, *layout.dislike);
    layout.combined = hull(*layout.like, *layout.dislike);
  } else {
    layout.combined = layout.like ? layout.like : layout.dislike;
  }

  auto familiar_x = project(space, p, groups.rated);
  familiar_x.insert(familiar_x.end(), like_x.begin(), like_x.end());
  familiar_x.insert(familiar_x.end(), dislike_x.begin(), dislike_x.end());
  layout.familiar = hull_of(familiar_x);

  const Interval& ext = layout.extent;
  if (layout.familiar) {
    if (layout.familiar->lo > ext.lo) layout.diverse_left = Interval{ext.lo, layout.familiar->lo};
    if (layout.familiar->hi < ext.hi) layout.diverse_right = Interval{layout.familiar->hi, ext.hi};
  } else {
    if (ext.lo < 0.0) layout.diverse_left = Interval{ext.lo, std::min(0.0, ext.hi)};
    if (ext.hi >= 0.0) layout.diverse_right = Interval{std::max(0.0, ext.lo), ext.hi};
  }

  std::vector<double> magnitudes(all.size());
  std::ranges::transform(all, magnitudes.begin(), [](double x) { return std::abs(x); });
  layout.untypical_boundary = quantile(std::move(magnitudes), untypical_quantile);

  if (layout.like) {
    layout.degenerate = false;
    layout.like_center = layout.like->midpoint();
    std::vector<double> inside;
    for (std::size_t i : groups.recommendable) {
      const double x = space.projection(i, p);
      if (layout.like->contains(x)) inside.push_back(x);
    }
    layout.recommendable_spread = population_std(inside);
  }
  return layout;
}

double score_dimension(const DimensionLayout& layout, const ScoreWeights& weights) {
  if (layout.degenerate || !layout.like || !layout.combined) return 0.0;
  const double like_len = layout.like->length();
  const double total_len = layout.combined->length();
  if (like_len <= 0.0 || total_len <= 0.0 || layout.recommendable_spread <= 0.0) return 0.0;

  // (1 - |R_o| / |R_x|)^w_o; a nonempty overlap with a point range means containment.
  auto overlap_factor = [&](const std::optional<Interval>& range) {
    if (!range || !layout.overlap) return 1.0;
    const double len = range->length();
    if (len <= 0.0) return 0.0;
    return std::pow(1.0 - layout.overlap->length() / len, weights.overlap);
  };

  return std::pow(like_len / total_len, weights.like_share) * overlap_factor(layout.like) *
         overlap_factor(layout.dislike) *
         std::pow(like_len / layout.recommendable_spread, weights.spread);
}

LayoutCase classify_layout(const DimensionLayout& layout) {
  if (!layout.like || !layout.dislike) return LayoutCase::kUndefined;
  if (!layout.overlap) return LayoutCase::kSeparated;
  if (layout.dislike->contains(*layout.like)) return LayoutCase::kLikeInsideDislike;
  if (layout.like->contains(*layout.dislike)) return LayoutCase::kDislikeInsideLike;
  return LayoutCase::kPartialOverlap;
}

double dimension_disagreement(const LatentSpace& space, const DimensionLayout& p,
                              const DimensionLayout& q, std::span<const std::size_t> movies,
                              const MovieWeights& weights) {
  double total = 0.0;
  for (std::size_t i : movies) {
    const double xp = space.projection(i, p.dimension);
    const double xq = space.projection(i, q.dimension);
    const int like_diff = in_range(p.like, xp) != in_range(q.like, xq) ? 1 : 0;
    const int dislike_diff = in_range(p.dislike, xp) != in_range(q.dislike, xq) ? 1 : 0;
    total += weight_of(weights, i) * (like_diff + dislike_diff);
  }
  return total;
}

double normalized_disagreement(const LatentSpace& space, const DimensionLayout& p,
                               const DimensionLayout& q, std::span<const std::size_t> movies,
                               const MovieWeights& weights) {
  double max_total = 0.0;
  for (std::size_t i : movies) max_total += 2.0 * weight_of(weights, i);
  if (max_total <= 0.0) return 0.0;
  return dimension_disagreement(space, p, q, movies, weights) / max_total;
}

double interactive_score(double base_score, const LatentSpace& space,
                         const DimensionLayout& layout, const ThumbSets& thumbs,
                         const UserNeighborhood& nb, double interaction_weight) {
  double aligned = 0.0;
  double misaligned = 0.0;
  auto visit = [&](std::size_t movie, bool up) {
    const double b = nb.degree(movie).value_or(0.0);
    const double x = space.projection(movie, layout.dimension);
    const bool in_like = in_range(layout.like, x);
    const bool in_dislike = in_range(layout.dislike, x);
    if (up) {
      if (in_like) aligned += b;
      if (in_dislike) misaligned += b;
    } else {
      if (in_dislike) aligned += b;
      if (in_like) misaligned += b;
    }
  };
  for (std::size_t movie : thumbs.up) visit(movie, true);
  for (std::size_t movie : thumbs.down) visit(movie, false);
  return base_score + interaction_weight * (aligned - misaligned);
}

DimensionSelection select_dimensions(const LatentSpace& space,
                                     std::span<const DimensionLayout> layouts,
                                     std::span<const double> scores,
                                     std::span<const double> interactive_scores,
                                     std::span<const std::size_t> recommendable,
                                     const MovieWeights& weights, const SelectionParams& params) {
  const int k = static_cast<int>(scores.size());
  DimensionSelection result;
  if (k == 0) return result;

  // Rank by D_v (ties by index) so the retained set does not depend on scan order.
  std::vector<int> by_score(static_cast<std::size_t>(k));
  std::iota(by_score.begin(), by_score.end(), 0);
  std::ranges::stable_sort(by_score, [&](int a, int b) {
    return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
  });

  const double best = scores[static_cast<std::size_t>(by_score.front())];
  result.score_threshold = params.score_ratio * best;
  const int max_dims = std::max(1, params.max_dims);
  const int min_dims = std::clamp(params.min_dims, 1, max_dims);

  std::vector<int> kept;
  auto similar_to_kept = [&](int d) {
    return std::ranges::any_of(kept, [&](int other) {
      return normalized_disagreement(space, layouts[static_cast<std::size_t>(d)],
                                     layouts[static_cast<std::size_t>(other)], recommendable,
                                     weights) < params.similarity_threshold;
    });
  };
  auto contains = [&](int d) { return std::ranges::find(kept, d) != kept.end(); };

  for (int d : by_score) {
    if (!(best > 0.0) || !(scores[static_cast<std::size_t>(d)] > result.score_threshold)) break;
    if (!similar_to_kept(d)) kept.push_back(d);
  }
  if (kept.empty()) {
    result.fallback = true;
    for (int d : by_score) {
      if (static_cast<int>(kept.size()) >= max_dims) break;
      kept.push_back(d);
    }
  } else if (static_cast<int>(kept.size()) < min_dims) {
    result.backfilled = true;
    for (int d : by_score) {
      if (static_cast<int>(kept.size()) >= min_dims) break;
      if (!contains(d) && !similar_to_kept(d)) kept.push_back(d);
    }
    for (int d : by_score) {
      if (static_cast<int>(kept.size()) >= min_dims) break;
      if (!contains(d)) kept.push_back(d);
    }
  }

  std::ranges::stable_sort(kept, [&](int a, int b) {
    const double sa = interactive_scores[static_cast<std::size_t>(a)];
    const double sb = interactive_scores[static_cast<std::size_t>(b)];
    if (sa != sb) return sa > sb;
    return a < b;
  });
  if (static_cast<int>(kept.size()) > max_dims) kept.resize(static_cast<std::size_t>(max_dims));
  result.dimensions = std::move(kept);
  return result;
}

std::vector<GroupThresholds> threshold_ladder(const GroupThresholds& base) {
  struct Step {
    int distance;
    int dislike_shift;
    int like_shift;
  };
  std::vector<Step> steps;
  for (int dd = -4; dd <= 4; ++dd) {
    for (int dl = -4; dl <= 4; ++dl) {
      const double like = base.like + dl;
      const double dislike = base.dislike + dd;
      if (like > 5.0 || dislike < 2.0 || dislike > like) continue;
      steps.push_back({std::abs(dd) + std::abs(dl), dd, dl});
    }
  }
  // Nearest first; among equals prefer widening the dislike group, then
  // narrowing the like group.
  std::ranges::sort(steps, [](const Step& a, const Step& b) {
    return std::tuple(a.distance, -a.dislike_shift, -a.like_shift) <
           std::tuple(b.distance, -b.dislike_shift, -b.like_shift);
  });
  std::vector<GroupThresholds> ladder{base};
  for (const auto& s : steps) {
    if (s.distance == 0) continue;
    ladder.push_back({base.like + s.like_shift, base.dislike + s.dislike_shift, base.recommend});
  }
  return ladder;
}

namespace {

struct Evaluation {
  MovieGroups groups;
  std::vector<DimensionLayout> layouts;
  std::vector<double> scores;
};

Evaluation evaluate(const LatentSpace& space, const UserNeighborhood& nb,
                    std::span<const int> ratings, const ThumbSets& thumbs,
                    const GroupThresholds& thresholds, const ModelParams& params) {
  Evaluation ev;
  ev.groups = partition_groups(ratings, nb, thumbs, thresholds);
  ev.layouts.reserve(static_cast<std::size_t>(space.k));
  ev.scores.reserve(static_cast<std::size_t>(space.k));
  for (int p = 0; p < space.k; ++p) {
    ev.layouts.push_back(layout_dimension(space, p, ev.groups, params.untypical_quantile));
    ev.scores.push_back(score_dimension(ev.layouts.back(), params.weights));
  }
  return ev;
}

bool usable(const Evaluation& ev, int min_group_size) {
  const auto min_size = static_cast<std::size_t>(std::max(0, min_group_size));
  return ev.groups.like.size() >= min_size && ev.groups.dislike.size() >= min_size &&
         std::ranges::any_of(ev.scores, [](double s) { return s > 0.0; });
}

}  // namespace

UserModel build_user_model(const LatentSpace& space, const UserNeighborhood& nb,
                           std::span<const int> ratings, const ThumbSets& thumbs,
                           const MovieWeights& weights, const ModelParams& params) {
  std::optional<Evaluation> chosen;
  bool adjusted = false;
  if (params.adapt_thresholds) {
    for (const auto& t : threshold_ladder(params.thresholds)) {
      auto ev = evaluate(space, nb, ratings, thumbs, t, params);
      if (usable(ev, params.min_group_size)) {
        adjusted = !(t == params.thresholds);
        chosen = std::move(ev);
        break;
      }
    }
  }
  if (!chosen) chosen = evaluate(space, nb, ratings, thumbs, params.thresholds, params);

  UserModel model;
  model.thresholds_adjusted = adjusted;
  model.groups = std::move(chosen->groups);
  model.layouts = std::move(chosen->layouts);
  model.scores = std::move(chosen->scores);

  if (thumbs.up.empty() && thumbs.down.empty()) {
    model.base_layouts = model.layouts;
  } else {
    const auto base_groups = partition_groups(ratings, nb, {}, model.groups.thresholds);
    for (int p = 0; p < space.k; ++p) {
      model.base_layouts.push_back(
          layout_dimension(space, p, base_groups, params.untypical_quantile));
    }
  }

  model.interactive_scores.resize(model.scores.size());
  for (std::size_t p = 0; p < model.scores.size(); ++p) {
    model.interactive_scores[p] = interactive_score(model.scores[p], space, model.base_layouts[p],
                                                    thumbs, nb, params.interaction_weight);
  }
  model.selection = select_dimensions(space, model.layouts, model.scores, model.interactive_scores,
                                      nb.recommendable, weights, params.selection);
  return model;
}

}  // namespace lsmrec
