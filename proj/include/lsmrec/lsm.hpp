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


#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "lsmrec/interval.hpp"
#include "lsmrec/latentspace.hpp"

namespace lsmrec {

// Rating thresholds tau_+, tau_- and degree threshold tau_r.
struct GroupThresholds {
  double like = 4.0;
  double dislike = 2.0;
  double recommend = 0.0;

  // Values a fresh session starts from before any validation-style tuning.
  static constexpr GroupThresholds initial() { return {3.0, 3.0, 0.0}; }
  friend bool operator==(const GroupThresholds&, const GroupThresholds&) = default;
};

enum class MovieGroup : std::uint8_t {
  kLike,
  kDislike,
  kNeutral,
  kRecommendable,
  kNotRecommendable,
};

std::string_view to_string(MovieGroup group);

// Explicit feedback, as movie indices. A movie is never in both sets.
struct ThumbSets {
  std::set<std::size_t> up;
  std::set<std::size_t> down;
};

// Per-movie interaction weight w_i; absent entries weigh 1.
using MovieWeights = std::map<std::size_t, double>;
double weight_of(const MovieWeights& weights, std::size_t movie);

struct MovieGroups {
  std::optional<std::size_t> user;
  GroupThresholds thresholds;
  std::vector<MovieGroup> group_of;  // one entry per movie
  std::vector<std::size_t> like;
  std::vector<std::size_t> dislike;
  std::vector<std::size_t> neutral;
  std::vector<std::size_t> recommendable;
  std::vector<std::size_t> not_recommendable;
  std::vector<std::size_t> rated;  // every movie the user rated
};

// `ratings` holds one entry per movie, 0 meaning "not rated". Thumb-up moves a
// movie into the like group, thumb-down into not-recommendable.
MovieGroups partition_groups(std::span<const int> ratings, const UserNeighborhood& nb,
                             const ThumbSets& thumbs, const GroupThresholds& thresholds);

enum class FamiliarityZone { kFamiliar, kDiverseLeft, kDiverseRight };
enum class TypicalityZone { kTypicalLeft, kUntypical, kTypicalRight };

// Geometry of the semantic zones on one latent dimension.
struct DimensionLayout {
  int dimension = 0;
  Interval extent;                      // all movie projections
  std::optional<Interval> like;         // R_+
  std::optional<Interval> dislike;      // R_-
  std::optional<Interval> overlap;      // R_o
  std::optional<Interval> combined;     // R
  std::optional<Interval> familiar;     // hull of rated and like/dislike movies
  std::optional<Interval> diverse_left;
  std::optional<Interval> diverse_right;
  double untypical_boundary = 0.0;      // |x| <= boundary is un-typical
  double recommendable_spread = 0.0;    // theta_+
  std::optional<double> like_center;    // c_+
  bool degenerate = true;               // no like group

  FamiliarityZone familiarity(double x) const;
  TypicalityZone typicality(double x) const;
};

DimensionLayout layout_dimension(const LatentSpace& space, int p, const MovieGroups& groups,
                                 double untypical_quantile);

struct ScoreWeights {
  double like_share = 5.0;  // w_+
  double overlap = 10.0;    // w_o
  double spread = 10.0;     // w_theta
};

// D_v. Zero for degenerate layouts, zero-length ranges, a zero spread, and
// whenever one group's range lies inside the other's.
double score_dimension(const DimensionLayout& layout, const ScoreWeights& weights);

// Relative position of the like and dislike ranges.
enum class LayoutCase : int {
  kUndefined = 0,
  kSeparated = 1,
  kPartialOverlap = 2,
  kLikeInsideDislike = 3,
  kDislikeInsideLike = 4,
};

LayoutCase classify_layout(const DimensionLayout& layout);

// D_s: weighted count of membership disagreements over `movies`.
double dimension_disagreement(const LatentSpace& space, const DimensionLayout& p,
                              const DimensionLayout& q, std::span<const std::size_t> movies,
                              const MovieWeights& weights);

// D_s divided by its maximum, sum of 2 w_i.
double normalized_disagreement(const LatentSpace& space, const DimensionLayout& p,
                               const DimensionLayout& q, std::span<const std::size_t> movies,
                               const MovieWeights& weights);

// D'_v = D_v + w_int * (aligned degrees - misaligned degrees).
double interactive_score(double base_score, const LatentSpace& space,
                         const DimensionLayout& layout, const ThumbSets& thumbs,
                         const UserNeighborhood& nb, double interaction_weight);

struct SelectionParams {
  double score_ratio = 0.5;           // tau_v as a fraction of the best D_v
  double similarity_threshold = 0.1;  // tau_s on normalized D_s
  int max_dims = 8;
  int min_dims = 2;                   // backfill so stories can rotate
};

struct DimensionSelection {
  std::vector<int> dimensions;  // ordered by D'_v, descending
  double score_threshold = 0.0;
  bool fallback = false;    // nothing passed tau_v
  bool backfilled = false;  // fewer than min_dims passed tau_v
};

DimensionSelection select_dimensions(const LatentSpace& space,
                                     std::span<const DimensionLayout> layouts,
                                     std::span<const double> scores,
                                     std::span<const double> interactive_scores,
                                     std::span<const std::size_t> recommendable,
                                     const MovieWeights& weights, const SelectionParams& params);

struct ModelParams {
  GroupThresholds thresholds;
  bool adapt_thresholds = true;
  int min_group_size = 2;
  double untypical_quantile = 1.0 / 3.0;  // rho
  ScoreWeights weights;
  double interaction_weight = 1.0;  // w_int
  SelectionParams selection;
};

// Everything the latent semantic model knows about one user in one feedback
// state.
struct UserModel {
  MovieGroups groups;
  std::vector<DimensionLayout> layouts;       // current groups, thumbs applied
  std::vector<DimensionLayout> base_layouts;  // ratings only; feedback alignment
  std::vector<double> scores;                 // D_v
  std::vector<double> interactive_scores;     // D'_v
  DimensionSelection selection;
  bool thresholds_adjusted = false;
};

// Candidate (like, dislike) threshold pairs, nearest to `base` first.
std::vector<GroupThresholds> threshold_ladder(const GroupThresholds& base);

UserModel build_user_model(const LatentSpace& space, const UserNeighborhood& nb,
                           std::span<const int> ratings, const ThumbSets& thumbs,
                           const MovieWeights& weights, const ModelParams& params);

}  // namespace lsmrec
