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
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "lsmrec/interval.hpp"
#include "lsmrec/latentspace.hpp"
#include "lsmrec/lsm.hpp"

namespace lsmrec {

using Rng = std::mt19937_64;

enum class StructureKind {
  kFamiliarToDiverse,
  kDiverseToFamiliar,
  kTypicalToUntypical,
  kUntypicalToTypical,
};

std::string_view to_string(StructureKind kind);
bool is_familiarity_axis(StructureKind kind);

// User preference for familiar (f) and typical (t) movies, both in [0, 1].
struct Preferences {
  double familiar = 0.5;
  double typical = 0.5;
  friend bool operator==(const Preferences&, const Preferences&) = default;
};

void check_preferences(const Preferences& prefs);

// The familiarity-axis and typicality-axis options implied by (f, t).
std::pair<StructureKind, StructureKind> structure_candidates(const Preferences& prefs);
StructureKind choose_structure(const Preferences& prefs, Rng& rng);

// Zone quotas. `preferred` is the familiar (or typical) zone count, computed
// as ceil(f * T) (or ceil(t * T)); `other` is the remainder.
struct SampleCounts {
  int preferred = 0;
  int other = 0;
};

SampleCounts sample_counts(const Preferences& prefs, int length, StructureKind kind);

enum class ZoneKind { kFamiliar, kDiverse, kTypical, kUntypical };
std::string_view to_string(ZoneKind kind);

// A zone of a story on one dimension. `side` picks a diverse or typical side
// (-1 left, +1 right, 0 either). `orthogonal` optionally restricts the zone to
// one zone of the other axis; it is set when the other preference is at 0 or 1.
struct StoryZone {
  ZoneKind kind = ZoneKind::kFamiliar;
  int side = 0;
  std::optional<ZoneKind> orthogonal;
  std::vector<Interval> spans;  // where random locations are drawn

  bool contains(const DimensionLayout& layout, double x) const;
};

struct ZonePlan {
  StoryZone first;  // traversal starts here
  StoryZone second;
  int first_count = 0;
  int second_count = 0;
  bool ascending = true;  // event projections increase along the story
};

ZonePlan plan_zones(StructureKind kind, const DimensionLayout& layout, SampleCounts counts,
                    const Preferences& prefs, int preferred_side);

// Side (+1 right, -1 left) of the diverse or typical zone nearer the like group.
int like_side(StructureKind kind, const DimensionLayout& layout);

struct SelectionTuning {
  double window_fraction = 0.10;        // delta_w as a share of the zone length
  double thumb_radius_fraction = 0.15;  // delta as a share of the dimension extent
  double thumb_up_boost = 1.0;          // alpha_up
  double thumb_down_damping = 0.9;      // alpha_down
  double epsilon_fraction = 1e-6;       // epsilon as a share of the dimension extent
};

struct ThumbMarker {
  double position = 0.0;
  bool up = true;
};

struct Candidate {
  std::size_t movie = 0;
  double projection = 0.0;
  double degree = 0.0;
};

// Truncated Gaussian G_q(d); exactly 1 beyond `radius`.
double thumb_factor(double distance, bool up, double radius, const SelectionTuning& tuning);

// b_ui * prod_q G_q(|V_p(u_q) - V_p(i)|) / max(|V_p(i) - l|, epsilon).
double candidate_score(const Candidate& candidate, double location,
                       std::span<const ThumbMarker> thumbs, double radius, double epsilon,
                       const SelectionTuning& tuning);

// Local-window pick around a random location in the zone. Returns an index
// into `pool`, or nullopt when the pool is empty (zone exhausted).
std::optional<std::size_t> select_movie(const StoryZone& zone, std::span<const Candidate> pool,
                                        std::span<const ThumbMarker> thumbs, double extent_length,
                                        const SelectionTuning& tuning, Rng& rng);

// t(i) = |x| / max|x|.
double typicality_value(double x, double max_abs);
// 1 - |x - c_+| / H, H the largest distance from c_+ within the extent.
double familiarity_value(double x, double like_center, const Interval& extent);

struct AdmissionState {
  double sum = 0.0;
  int count = 0;
};

// Accept iff adding `attribute` moves the running mean strictly closer to
// `target`. An empty selection always accepts.
bool admit_candidate(double attribute, const AdmissionState& selected, double target);

enum class Role { kLikedSimilar, kFamiliar, kDiverse, kTypical, kUntypical };
std::string_view to_string(Role role);

std::vector<Role> assign_roles(double x, const DimensionLayout& layout);

struct Anchor {
  std::size_t movie = 0;
  double projection = 0.0;
  int rating = 0;
};

// Leftmost and rightmost rated movies. Ties prefer higher user rating, then
// higher popularity, then lower index. nullopt with fewer than two distinct
// rated projections.
std::optional<std::pair<Anchor, Anchor>> anchor_examples(const LatentSpace& space, int p,
                                                         std::span<const int> ratings,
                                                         std::span<const std::size_t> popularity);

struct StoryEvent {
  std::size_t movie = 0;
  double projection = 0.0;
  double degree = 0.0;
  ZoneKind zone = ZoneKind::kFamiliar;
  std::vector<Role> roles;
  std::vector<std::size_t> similar_liked;  // up to 4, nearest first
};

struct Story {
  int dimension = 0;
  StructureKind structure = StructureKind::kFamiliarToDiverse;
  std::uint64_t seed = 0;
  int length = 0;
  Preferences preferences;
  std::optional<Anchor> anchor_left;
  std::optional<Anchor> anchor_right;
  DimensionLayout layout;
  ZonePlan plan;
  std::vector<StoryEvent> events;
  int first_zone_selected = 0;
  int second_zone_selected = 0;
  bool rebalanced = false;  // a zone ran dry and its quota moved
  bool relaxed = false;     // thresholds were relaxed to refill the pool
  GroupThresholds thresholds;
};

struct StoryParams {
  int length = 5;  // T
  int max_retries = 20;
  SelectionTuning tuning;
};

struct StoryInputs {
  const LatentSpace& space;
  const UserNeighborhood& neighborhood;
  std::span<const int> ratings;             // per movie, 0 = unrated
  std::span<const std::size_t> popularity;  // rater count per movie
  const ThumbSets& thumbs;
  const MovieWeights& weights;
  const ModelParams& model;
  const StoryParams& story;
};

struct StoryRequest {
  Preferences preferences;
  std::optional<int> previous_dimension;
  bool restart_rotation = false;  // user input since the previous story
  std::uint64_t seed = 0;
};

// Dimensions in the order a story tries them: the rotation of the selected
// list, then every remaining dimension by D'_v.
std::vector<int> rotation_order(const UserModel& model, const StoryRequest& request);

// Throws Error(kPoolExhausted) when no dimension can supply `length` movies
// even after one threshold relaxation.
Story generate_story(const StoryInputs& inputs, const StoryRequest& request);

}  // namespace lsmrec
