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


#include "lsmrec/story.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lsmrec/error.hpp"

namespace lsmrec {

std::string_view to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::kFamiliarToDiverse: return "familiar_to_diverse";
    case StructureKind::kDiverseToFamiliar: return "diverse_to_familiar";
    case StructureKind::kTypicalToUntypical: return "typical_to_untypical";
    case StructureKind::kUntypicalToTypical: return "untypical_to_typical";
  }
  return "unknown";
}

std::string_view to_string(ZoneKind kind) {
  switch (kind) {
    case ZoneKind::kFamiliar: return "familiar";
    case ZoneKind::kDiverse: return "diverse";
    case ZoneKind::kTypical: return "typical";
    case ZoneKind::kUntypical: return "untypical";
  }
  return "unknown";
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kLikedSimilar: return "liked-similar";
    case Role::kFamiliar: return "familiar";
    case Role::kDiverse: return "diverse";
    case Role::kTypical: return "typical";
    case Role::kUntypical: return "un-typical";
  }
  return "unknown";
}

bool is_familiarity_axis(StructureKind kind) {
  return kind == StructureKind::kFamiliarToDiverse || kind == StructureKind::kDiverseToFamiliar;
}

void check_preferences(const Preferences& prefs) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(prefs.familiar) || !in_unit(prefs.typical)) {
    throw Error(ErrorCode::kInvalidArgument, "preferences f and t must lie in [0, 1]");
  }
}

std::pair<StructureKind, StructureKind> structure_candidates(const Preferences& prefs) {
  check_preferences(prefs);
  return {prefs.familiar >= 0.5 ? StructureKind::kFamiliarToDiverse
                                : StructureKind::kDiverseToFamiliar,
          prefs.typical >= 0.5 ? StructureKind::kTypicalToUntypical
                               : StructureKind::kUntypicalToTypical};
}

StructureKind choose_structure(const Preferences& prefs, Rng& rng) {
  const auto [familiarity, typicality] = structure_candidates(prefs);
  std::uniform_int_distribution<int> coin(0, 1);
  return coin(rng) == 0 ? familiarity : typicality;
}

SampleCounts sample_counts(const Preferences& prefs, int length, StructureKind kind) {
  if (length < 1) throw Error(ErrorCode::kInvalidArgument, "story length must be >= 1");
  const double share = is_familiarity_axis(kind) ? prefs.familiar : prefs.typical;
  // Guard against 0.6 * 5 = 3.0000000000000004 style ceilings.
  const double scaled = share * length;
  const double rounded = std::round(scaled);
  const int preferred = std::abs(scaled - rounded) < 1e-9 ? static_cast<int>(rounded)
                                                          : static_cast<int>(std::ceil(scaled));
  return {preferred, length - preferred};
}

namespace {

bool zone_member(ZoneKind kind, int side, const DimensionLayout& layout, double x) {
  switch (kind) {
    case ZoneKind::kFamiliar:
      return layout.familiarity(x) == FamiliarityZone::kFamiliar;
    case ZoneKind::kDiverse: {
      const auto z = layout.familiarity(x);
      if (side > 0) return z == FamiliarityZone::kDiverseRight;
      if (side < 0) return z == FamiliarityZone::kDiverseLeft;
      return z != FamiliarityZone::kFamiliar;
    }
    case ZoneKind::kTypical: {
      const auto z = layout.typicality(x);
      if (side > 0) return z == TypicalityZone::kTypicalRight;
      if (side < 0) return z == TypicalityZone::kTypicalLeft;
      return z != TypicalityZone::kUntypical;
    }
    case ZoneKind::kUntypical:
      return layout.typicality(x) == TypicalityZone::kUntypical;
  }
  return false;
}

std::vector<Interval> zone_spans(ZoneKind kind, int side, const DimensionLayout& layout) {
  std::vector<Interval> spans;
  const Interval& ext = layout.extent;
  const double theta = layout.untypical_boundary;
  switch (kind) {
    case ZoneKind::kFamiliar:
      if (layout.familiar) spans.push_back(*layout.familiar);
      break;
    case ZoneKind::kDiverse:
      if (side <= 0 && layout.diverse_left) spans.push_back(*layout.diverse_left);
      if (side >= 0 && layout.diverse_right) spans.push_back(*layout.diverse_right);
      break;
    case ZoneKind::kTypical:
      if (side <= 0 && ext.lo < -theta) spans.push_back({ext.lo, -theta});
      if (side >= 0 && ext.hi > theta) spans.push_back({theta, ext.hi});
      break;
    case ZoneKind::kUntypical: {
      const double lo = std::max(-theta, ext.lo);
      const double hi = std::min(theta, ext.hi);
      if (lo <= hi) spans.push_back({lo, hi});
      break;
    }
  }
  return spans;
}

StoryZone make_zone(ZoneKind kind, int side, std::optional<ZoneKind> orthogonal,
                    const DimensionLayout& layout) {
  StoryZone zone{kind, side, orthogonal, zone_spans(kind, side, layout)};
  if (orthogonal) {
    std::vector<Interval> clipped;
    for (const auto& a : zone.spans) {
      for (const auto& b : zone_spans(*orthogonal, 0, layout)) {
        if (auto both = intersect(a, b)) clipped.push_back(*both);
      }
    }
    zone.spans = std::move(clipped);
  }
  return zone;
}

}  // namespace

bool StoryZone::contains(const DimensionLayout& layout, double x) const {
  if (!zone_member(kind, side, layout, x)) return false;
  return !orthogonal || zone_member(*orthogonal, 0, layout, x);
}

int like_side(StructureKind kind, const DimensionLayout& layout) {
  if (!layout.like_center) return 0;
  if (is_familiarity_axis(kind)) {
    if (!layout.familiar) return 0;
    return *layout.like_center >= layout.familiar->midpoint() ? 1 : -1;
  }
  return *layout.like_center >= 0.0 ? 1 : -1;
}

ZonePlan plan_zones(StructureKind kind, const DimensionLayout& layout, SampleCounts counts,
                    const Preferences& prefs, int preferred_side) {
  const int side = preferred_side >= 0 ? 1 : -1;
  std::optional<ZoneKind> orthogonal;
  if (is_familiarity_axis(kind)) {
    if (prefs.typical >= 1.0) orthogonal = ZoneKind::kTypical;
    if (prefs.typical <= 0.0) orthogonal = ZoneKind::kUntypical;
  } else {
    if (prefs.familiar >= 1.0) orthogonal = ZoneKind::kFamiliar;
    if (prefs.familiar <= 0.0) orthogonal = ZoneKind::kDiverse;
  }

  ZonePlan plan;
  switch (kind) {
    case StructureKind::kFamiliarToDiverse:
      plan.first = make_zone(ZoneKind::kFamiliar, 0, orthogonal, layout);
      plan.second = make_zone(ZoneKind::kDiverse, side, orthogonal, layout);
      plan.first_count = counts.preferred;
      plan.second_count = counts.other;
      plan.ascending = side > 0;
      break;
    case StructureKind::kDiverseToFamiliar:
      plan.first = make_zone(ZoneKind::kDiverse, side, orthogonal, layout);
      plan.second = make_zone(ZoneKind::kFamiliar, 0, orthogonal, layout);
      plan.first_count = counts.other;
      plan.second_count = counts.preferred;
      plan.ascending = side < 0;
      break;
    case StructureKind::kTypicalToUntypical:
      plan.first = make_zone(ZoneKind::kTypical, side, orthogonal, layout);
      plan.second = make_zone(ZoneKind::kUntypical, 0, orthogonal, layout);
      plan.first_count = counts.preferred;
      plan.second_count = counts.other;
      plan.ascending = side < 0;
      break;
    case StructureKind::kUntypicalToTypical:
      plan.first = make_zone(ZoneKind::kUntypical, 0, orthogonal, layout);
      plan.second = make_zone(ZoneKind::kTypical, side, orthogonal, layout);
      plan.first_count = counts.other;
      plan.second_count = counts.preferred;
      plan.ascending = side > 0;
      break;
  }
  return plan;
}

double thumb_factor(double distance, bool up, double radius, const SelectionTuning& tuning) {
  if (distance > radius || radius <= 0.0) return 1.0;
  const double sigma = radius / 2.0;
  const double g = std::exp(-(distance * distance) / (2.0 * sigma * sigma));
  return up ? 1.0 + tuning.thumb_up_boost * g : 1.0 - tuning.thumb_down_damping * g;
}

double candidate_score(const Candidate& candidate, double location,
                       std::span<const ThumbMarker> thumbs, double radius, double epsilon,
                       const SelectionTuning& tuning) {
  double factor = 1.0;
  for (const auto& t : thumbs) {
    factor *= thumb_factor(std::abs(t.position - candidate.projection), t.up, radius, tuning);
  }
  return candidate.degree * factor / std::max(std::abs(candidate.projection - location), epsilon);
}

std::optional<std::size_t> select_movie(const StoryZone& zone, std::span<const Candidate> pool,
                                        std::span<const ThumbMarker> thumbs, double extent_length,
                                        const SelectionTuning& tuning, Rng& rng) {
  if (pool.empty()) return std::nullopt;

  double total = 0.0;
  for (const auto& s : zone.spans) total += s.length();
  double location;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (zone.spans.empty()) {
    const auto [lo, hi] = std::ranges::minmax(pool, {}, &Candidate::projection);
    location = lo.projection + unit(rng) * (hi.projection - lo.projection);
  } else if (total <= 0.0) {
    location = zone.spans.front().lo;
  } else {
    double u = unit(rng) * total;
    location = zone.spans.back().hi;
    for (const auto& s : zone.spans) {
      if (u <= s.length()) {
        location = s.lo + u;
        break;
      }
      u -= s.length();
    }
  }

  const double scale = extent_length > 0.0 ? extent_length : 1.0;
  const double epsilon = tuning.epsilon_fraction * scale;
  const double radius = tuning.thumb_radius_fraction * extent_length;
  double window = tuning.window_fraction * total;
  if (window <= 0.0) window = epsilon;

  while (true) {
    std::optional<std::size_t> best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < pool.size(); ++j) {
      if (std::abs(pool[j].projection - location) > window) continue;
      const double s = candidate_score(pool[j], location, thumbs, radius, epsilon, tuning);
      if (!best || s > best_score) {
        best = j;
        best_score = s;
      }
    }
    if (best) return best;
    window *= 2.0;
  }
}

double typicality_value(double x, double max_abs) {
  return max_abs > 0.0 ? std::abs(x) / max_abs : 0.0;
}

double familiarity_value(double x, double like_center, const Interval& extent) {
  const double reach = std::max(like_center - extent.lo, extent.hi - like_center);
  if (reach <= 0.0) return 1.0;
  return std::clamp(1.0 - std::abs(x - like_center) / reach, 0.0, 1.0);
}

bool admit_candidate(double attribute, const AdmissionState& selected, double target) {
  if (selected.count == 0) return true;
  const double current = selected.sum / selected.count;
  const double next = (selected.sum + attribute) / (selected.count + 1);
  return std::abs(next - target) < std::abs(current - target);
}

std::vector<Role> assign_roles(double x, const DimensionLayout& layout) {
  std::vector<Role> roles;
  if (layout.like && layout.like->contains(x)) roles.push_back(Role::kLikedSimilar);
  roles.push_back(layout.familiarity(x) == FamiliarityZone::kFamiliar ? Role::kFamiliar
                                                                      : Role::kDiverse);
  roles.push_back(layout.typicality(x) == TypicalityZone::kUntypical ? Role::kUntypical
                                                                     : Role::kTypical);
  return roles;
}

std::optional<std::pair<Anchor, Anchor>> anchor_examples(const LatentSpace& space, int p,
                                                         std::span<const int> ratings,
                                                         std::span<const std::size_t> popularity) {
  std::optional<Anchor> left, right;
  auto better = [&](const Anchor& a, const Anchor& b) {
    if (a.rating != b.rating) return a.rating > b.rating;
    const auto pa = a.movie < popularity.size() ? popularity[a.movie] : 0;
    const auto pb = b.movie < popularity.size() ? popularity[b.movie] : 0;
    if (pa != pb) return pa > pb;
    return a.movie < b.movie;
  };
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    if (ratings[i] == 0) continue;
    const Anchor a{i, space.projection(i, p), ratings[i]};
    if (!left || a.projection < left->projection ||
        (a.projection == left->projection && better(a, *left))) {
      left = a;
    }
    if (!right || a.projection > right->projection ||
        (a.projection == right->projection && better(a, *right))) {
      right = a;
    }
  }
  if (!left || left->projection == right->projection) return std::nullopt;
  return std::pair(*left, *right);
}

std::vector<int> rotation_order(const UserModel& model, const StoryRequest& request) {
  const auto& selected = model.selection.dimensions;
  std::vector<int> order;
  if (!selected.empty()) {
    std::size_t start = 0;
    if (request.previous_dimension) {
      const auto it = std::ranges::find(selected, *request.previous_dimension);
      if (request.restart_rotation) {
        start = (selected.size() > 1 && it == selected.begin()) ? 1 : 0;
      } else if (it != selected.end()) {
        start = (static_cast<std::size_t>(it - selected.begin()) + 1) % selected.size();
      }
    }
    for (std::size_t j = 0; j < selected.size(); ++j) {
      order.push_back(selected[(start + j) % selected.size()]);
    }
  }
  std::vector<int> rest;
  for (int p = 0; p < static_cast<int>(model.scores.size()); ++p) {
    if (std::ranges::find(order, p) == order.end()) rest.push_back(p);
  }
  std::ranges::stable_sort(rest, [&](int a, int b) {
    return model.interactive_scores[static_cast<std::size_t>(a)] >
           model.interactive_scores[static_cast<std::size_t>(b)];
  });
  order.insert(order.end(), rest.begin(), rest.end());
  return order;
}

namespace {

struct DimensionChoice {
  int dimension = 0;
  ZonePlan plan;
  std::vector<Candidate> first_pool;
  std::vector<Candidate> second_pool;
  std::optional<std::pair<Anchor, Anchor>> anchors;
};

std::optional<Story> attempt_story(const StoryInputs& in, const StoryRequest& request,
                                   const UserModel& model) {
  Rng rng(request.seed);
  const auto& prefs = request.preferences;
  const int length = in.story.length;
  StructureKind structure = choose_structure(prefs, rng);
  const bool has_history = std::ranges::any_of(in.ratings, [](int r) { return r != 0; });

  // (pass, choice): pass 0 fills both quotas, pass 1 only the story length.
  using Fit = std::pair<int, DimensionChoice>;
  auto scan = [&](StructureKind kind) -> std::optional<Fit> {
    const SampleCounts counts = sample_counts(prefs, length, kind);
    std::optional<Fit> fallback;
    for (int p : rotation_order(model, request)) {
      const auto& layout = model.layouts[static_cast<std::size_t>(p)];
      DimensionChoice choice;
      choice.dimension = p;
      if (has_history) {
        choice.anchors = anchor_examples(in.space, p, in.ratings, in.popularity);
        if (!choice.anchors) continue;
      }

      std::vector<Candidate> candidates;
      for (std::size_t movie : model.groups.recommendable) {
        candidates.push_back({movie, in.space.projection(movie, p),
                              in.neighborhood.degree(movie).value_or(0.0)});
      }
      auto pools_for = [&](const ZonePlan& plan) {
        std::pair<std::vector<Candidate>, std::vector<Candidate>> pools;
        for (const auto& c : candidates) {
          if (plan.first.contains(layout, c.projection)) pools.first.push_back(c);
          else if (plan.second.contains(layout, c.projection)) pools.second.push_back(c);
        }
        return pools;
      };

      int side = like_side(kind, layout);
      if (side == 0) {
        const auto right = pools_for(plan_zones(kind, layout, counts, prefs, 1));
        const auto left = pools_for(plan_zones(kind, layout, counts, prefs, -1));
        side = right.first.size() + right.second.size() >= left.first.size() + left.second.size()
                   ? 1 : -1;
      }
      for (int s : {side, -side}) {
        auto plan = plan_zones(kind, layout, counts, prefs, s);
        auto [first, second] = pools_for(plan);
        const bool exact = static_cast<int>(first.size()) >= plan.first_count &&
                           static_cast<int>(second.size()) >= plan.second_count;
        const bool enough = static_cast<int>(first.size() + second.size()) >= length;
        if (!exact && !enough) continue;
        choice.plan = std::move(plan);
        choice.first_pool = std::move(first);
        choice.second_pool = std::move(second);
        if (exact) return Fit{0, std::move(choice)};
        if (!fallback) fallback = Fit{1, choice};
      }
    }
    return fallback;
  };

  std::optional<Fit> fit = scan(structure);
  if (!fit || fit->first != 0) {
    // The drawn structure cannot meet its quotas anywhere; the other one may.
    const auto [a, b] = structure_candidates(prefs);
    const StructureKind other = structure == a ? b : a;
    auto alternative = scan(other);
    if (alternative && (!fit || alternative->first < fit->first)) {
      fit = std::move(alternative);
      structure = other;
    }
  }
  if (!fit) return std::nullopt;

  DimensionChoice choice = std::move(fit->second);
  const auto& layout = model.layouts[static_cast<std::size_t>(choice.dimension)];

  Story story;
  story.dimension = choice.dimension;
  story.structure = structure;
  story.seed = request.seed;
  story.length = length;
  story.preferences = prefs;
  story.layout = layout;
  story.plan = choice.plan;
  story.thresholds = model.groups.thresholds;
  if (choice.anchors) {
    story.anchor_left = choice.anchors->first;
    story.anchor_right = choice.anchors->second;
  }

  std::vector<ThumbMarker> markers;
  for (std::size_t m : in.thumbs.up) markers.push_back({in.space.projection(m, story.dimension), true});
  for (std::size_t m : in.thumbs.down) markers.push_back({in.space.projection(m, story.dimension), false});

  const double max_abs = std::max(std::abs(layout.extent.lo), std::abs(layout.extent.hi));
  const double center = layout.like_center.value_or(0.0);
  const bool familiarity_axis = is_familiarity_axis(structure);
  const double target = familiarity_axis ? prefs.typical : prefs.familiar;
  auto attribute = [&](double x) {
    return familiarity_axis ? typicality_value(x, max_abs)
                            : familiarity_value(x, center, layout.extent);
  };

  AdmissionState state;
  auto fill_slot = [&](const StoryZone& zone, std::vector<Candidate>& pool, ZoneKind kind) {
    struct Rejected {
      std::size_t index;
      double gap;
    };
    std::optional<Rejected> best_rejected;
    for (int attempt = 0; attempt <= in.story.max_retries; ++attempt) {
      const auto pick = select_movie(zone, pool, markers, layout.extent.length(), in.story.tuning, rng);
      if (!pick) return false;
      const double attr = attribute(pool[*pick].projection);
      std::optional<std::size_t> take;
      if (admit_candidate(attr, state, target)) {
        take = *pick;
      } else {
        const double gap = std::abs((state.sum + attr) / (state.count + 1) - target);
        if (!best_rejected || gap < best_rejected->gap) best_rejected = Rejected{*pick, gap};
        if (attempt == in.story.max_retries) take = best_rejected->index;
      }
      if (take) {
        const Candidate c = pool[*take];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(*take));
        state.sum += attribute(c.projection);
        ++state.count;
        StoryEvent ev;
        ev.movie = c.movie;
        ev.projection = c.projection;
        ev.degree = c.degree;
        ev.zone = kind;
        story.events.push_back(std::move(ev));
        return true;
      }
    }
    return false;
  };

  auto fill = [&](const StoryZone& zone, std::vector<Candidate>& pool, int wanted) {
    int got = 0;
    while (got < wanted && fill_slot(zone, pool, zone.kind)) ++got;
    return got;
  };

  const int first_got = fill(choice.plan.first, choice.first_pool, choice.plan.first_count);
  int second_wanted = choice.plan.second_count + (choice.plan.first_count - first_got);
  const int second_got = fill(choice.plan.second, choice.second_pool, second_wanted);
  int extra_first = 0;
  if (second_got < second_wanted) {
    extra_first = fill(choice.plan.first, choice.first_pool, second_wanted - second_got);
  }
  story.first_zone_selected = first_got + extra_first;
  story.second_zone_selected = second_got;
  story.rebalanced = story.first_zone_selected != choice.plan.first_count;
  if (static_cast<int>(story.events.size()) < length) return std::nullopt;

  for (auto& ev : story.events) {
    ev.roles = assign_roles(ev.projection, layout);
    std::vector<std::size_t> liked = model.groups.like;
    std::ranges::stable_sort(liked, [&](std::size_t a, std::size_t b) {
      return std::abs(in.space.projection(a, story.dimension) - ev.projection) <
             std::abs(in.space.projection(b, story.dimension) - ev.projection);
    });
    if (liked.size() > 4) liked.resize(4);
    ev.similar_liked = std::move(liked);
  }
  std::ranges::stable_sort(story.events, [&](const StoryEvent& a, const StoryEvent& b) {
    if (a.projection != b.projection) {
      return story.plan.ascending ? a.projection < b.projection : a.projection > b.projection;
    }
    return a.movie < b.movie;
  });
  return story;
}

}  // namespace

Story generate_story(const StoryInputs& in, const StoryRequest& request) {
  check_preferences(request.preferences);
  if (in.story.length < 1) throw Error(ErrorCode::kInvalidArgument, "story length must be >= 1");

  const auto model =
      build_user_model(in.space, in.neighborhood, in.ratings, in.thumbs, in.weights, in.model);
  if (auto story = attempt_story(in, request, model)) return std::move(*story);

  // Relax once: widen the like group and admit lower degrees.
  ModelParams relaxed = in.model;
  relaxed.adapt_thresholds = false;
  relaxed.thresholds = model.groups.thresholds;
  relaxed.thresholds.like -= 1.0;
  relaxed.thresholds.dislike = std::min(relaxed.thresholds.dislike, relaxed.thresholds.like);
  relaxed.thresholds.recommend -= 0.1;
  const auto relaxed_model =
      build_user_model(in.space, in.neighborhood, in.ratings, in.thumbs, in.weights, relaxed);
  if (auto story = attempt_story(in, request, relaxed_model)) {
    story->relaxed = true;
    return std::move(*story);
  }
  throw Error(ErrorCode::kPoolExhausted,
              "recommendable pool exhausted: no dimension can supply " +
                  std::to_string(in.story.length) + " movies");
}

}  // namespace lsmrec
