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


#include <doctest.h>

#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "lsmrec/error.hpp"
#include "lsmrec/story.hpp"

using namespace lsmrec;

TEST_CASE("structure candidates follow the preferences") {
  auto [a, b] = structure_candidates({0.5, 0.5});
  CHECK(a == StructureKind::kFamiliarToDiverse);
  CHECK(b == StructureKind::kTypicalToUntypical);
  std::tie(a, b) = structure_candidates({0.2, 0.1});
  CHECK(a == StructureKind::kDiverseToFamiliar);
  CHECK(b == StructureKind::kUntypicalToTypical);
  CHECK_THROWS_AS(structure_candidates({1.5, 0.5}), Error);

  Rng rng(1);
  std::set<StructureKind> seen;
  for (int j = 0; j < 50; ++j) seen.insert(choose_structure({0.5, 0.5}, rng));
  CHECK(seen.size() == 2);
}

TEST_CASE("sample counts") {
  auto c = sample_counts({0.5, 0.5}, 5, StructureKind::kTypicalToUntypical);
  CHECK(c.preferred == 3);
  CHECK(c.other == 2);
  c = sample_counts({1.0, 0.5}, 5, StructureKind::kFamiliarToDiverse);
  CHECK(c.preferred == 5);
  CHECK(c.other == 0);
  c = sample_counts({0.5, 0.0}, 5, StructureKind::kUntypicalToTypical);
  CHECK(c.preferred == 0);
  CHECK(c.other == 5);
  c = sample_counts({0.6, 0.5}, 5, StructureKind::kFamiliarToDiverse);
  CHECK(c.preferred == 3);
  c = sample_counts({0.61, 0.5}, 5, StructureKind::kFamiliarToDiverse);
  CHECK(c.preferred == 4);
  CHECK_THROWS_AS(sample_counts({0.5, 0.5}, 0, StructureKind::kFamiliarToDiverse), Error);
}

TEST_CASE("thumb factor") {
  const SelectionTuning tune;
  const double radius = 0.3;
  CHECK(thumb_factor(0.0, true, radius, tune) == doctest::Approx(2.0));
  CHECK(thumb_factor(0.0, false, radius, tune) == doctest::Approx(0.1));
  CHECK(thumb_factor(0.31, true, radius, tune) == 1.0);
  CHECK(thumb_factor(0.31, false, radius, tune) == 1.0);
  // d = sigma: exp(-1/2).
  CHECK(thumb_factor(0.15, false, radius, tune) == doctest::Approx(1.0 - 0.9 * std::exp(-0.5)));
}

TEST_CASE("candidate score with a thumb-down on top of the candidate") {
  const SelectionTuning tune;
  const Candidate c{3, 0.2, 0.7};
  const std::vector<ThumbMarker> down{{0.2, false}};
  const double plain = candidate_score(c, 0.5, {}, 0.3, 1e-6, tune);
  CHECK(plain == doctest::Approx(0.7 / 0.3));
  CHECK(candidate_score(c, 0.5, down, 0.3, 1e-6, tune) == doctest::Approx(plain * (1 - 0.9)));
  // The distance floor.
  CHECK(candidate_score(c, 0.2, {}, 0.3, 1e-6, tune) == doctest::Approx(0.7 / 1e-6));
}

TEST_CASE("local-window selection") {
  const SelectionTuning tune;
  Rng rng(3);
  StoryZone zone{ZoneKind::kFamiliar, 0, std::nullopt, {{0.5, 0.5}}};
  SUBCASE("singleton") {
    const std::vector<Candidate> pool{{9, -3.0, 0.1}};
    CHECK(select_movie(zone, pool, {}, 1.0, tune, rng) == 0u);
  }
  SUBCASE("equal distance, degree decides") {
    const std::vector<Candidate> pool{{1, 0.25, 0.4}, {2, 0.75, 0.9}};
    CHECK(select_movie(zone, pool, {}, 1.0, tune, rng) == 1u);
  }
  SUBCASE("thumb-up nearby flips the choice") {
    const std::vector<Candidate> pool{{1, 0.25, 0.4}, {2, 0.75, 0.9}};
    const std::vector<ThumbMarker> up{{0.25, true}};
    // 0.4 * 2 = 0.8 < 0.9: still the second.
    CHECK(select_movie(zone, pool, up, 1.0, tune, rng) == 1u);
    const std::vector<ThumbMarker> down{{0.75, false}};
    CHECK(select_movie(zone, pool, down, 1.0, tune, rng) == 0u);
  }
  SUBCASE("empty pool") {
    CHECK_FALSE(select_movie(zone, {}, {}, 1.0, tune, rng));
  }
  SUBCASE("window only sees nearby candidates") {
    StoryZone wide{ZoneKind::kFamiliar, 0, std::nullopt, {{0.0, 1.0}}};
    const std::vector<Candidate> pool{{1, 0.0, 1.0}, {2, 1.0, 1.0}};
    int left = 0;
    for (int j = 0; j < 200; ++j) left += *select_movie(wide, pool, {}, 1.0, tune, rng) == 0u;
    CHECK(left > 60);
    CHECK(left < 140);
  }
}

TEST_CASE("admission test") {
  CHECK(admit_candidate(0.3, {}, 0.5));
  CHECK(admit_candidate(0.2, {0.9, 1}, 0.5));
  CHECK_FALSE(admit_candidate(0.5, {0.5, 1}, 0.5));
  CHECK_FALSE(admit_candidate(0.95, {0.9, 1}, 0.5));
}

TEST_CASE("attribute normalization") {
  CHECK(typicality_value(-0.4, 0.8) == doctest::Approx(0.5));
  CHECK(typicality_value(0.4, 0.0) == 0.0);
  const Interval ext{-1.0, 1.0};
  CHECK(familiarity_value(0.5, 0.5, ext) == 1.0);
  CHECK(familiarity_value(-1.0, 0.5, ext) == doctest::Approx(0.0));
  CHECK(familiarity_value(1.0, 0.5, ext) == doctest::Approx(1.0 - 0.5 / 1.5));
}

TEST_CASE("roles") {
  DimensionLayout L;
  L.extent = {-1, 1};
  L.familiar = Interval{-0.2, 0.6};
  L.like = Interval{0.3, 0.5};
  L.untypical_boundary = 0.25;
  CHECK(assign_roles(0.4, L) == std::vector<Role>{Role::kLikedSimilar, Role::kFamiliar, Role::kTypical});
  CHECK(assign_roles(-0.1, L) == std::vector<Role>{Role::kFamiliar, Role::kUntypical});
  CHECK(assign_roles(0.8, L) == std::vector<Role>{Role::kDiverse, Role::kTypical});
  CHECK(assign_roles(0.25, L) == std::vector<Role>{Role::kFamiliar, Role::kUntypical});
  CHECK(to_string(Role::kUntypical) == "un-typical");
}

TEST_CASE("anchors") {
  LatentSpace s;
  s.k = 1;
  s.movie_features = Matrix(5, 1);
  s.movie_features << -0.6, 0.0, 0.7, -0.6, 0.7;
  std::vector<std::size_t> popularity{10, 10, 10, 10, 50};
  SUBCASE("extremes") {
    const std::vector<int> ratings{4, 4, 4, 0, 0};
    const auto a = anchor_examples(s, 0, ratings, popularity);
    REQUIRE(a);
    CHECK(a->first.movie == 0);
    CHECK(a->second.movie == 2);
  }
  SUBCASE("tie at the left goes to the higher rating") {
    const std::vector<int> ratings{3, 4, 4, 5, 0};
    CHECK(anchor_examples(s, 0, ratings, popularity)->first.movie == 3);
  }
  SUBCASE("rating tie goes to popularity") {
    const std::vector<int> ratings{0, 4, 4, 0, 4};
    CHECK(anchor_examples(s, 0, ratings, popularity)->second.movie == 4);
  }
  SUBCASE("one distinct projection is degenerate") {
    const std::vector<int> ratings{5, 0, 0, 4, 0};
    CHECK_FALSE(anchor_examples(s, 0, ratings, popularity));
  }
}

namespace {

struct Harness {
  std::unique_ptr<Engine> engine = fixture::clustered_engine();
  std::size_t user = 0;
  std::shared_ptr<const UserNeighborhood> nb = engine->neighborhood(user);
  std::vector<int> ratings = engine->rating_row(user);
  ThumbSets thumbs;
  MovieWeights weights;

  Story tell(Preferences prefs, std::uint64_t seed, std::optional<int> previous = std::nullopt,
             bool restart = false) {
    const auto& c = engine->config();
    const StoryInputs in{engine->space(), *nb, ratings, engine->popularity(), thumbs, weights,
                         c.model, c.story};
    return generate_story(in, {prefs, previous, restart, seed});
  }
};

bool inside(const std::optional<Interval>& r, double x) { return r && r->lo <= x && x <= r->hi; }

}  // namespace

TEST_CASE("story contracts on the clustered fixture") {
  Harness h;
  int rebalanced = 0;
  for (const Preferences prefs : {Preferences{0.5, 0.5}, Preferences{1.0, 0.5}, Preferences{0.0, 0.3},
                                  Preferences{0.7, 1.0}, Preferences{0.2, 0.0}}) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const Story s = h.tell(prefs, seed);
      CAPTURE(seed);
      REQUIRE(s.events.size() == 5);
      const auto counts = sample_counts(prefs, 5, s.structure);
      const bool fam_axis = is_familiarity_axis(s.structure);
      int preferred = 0;
      std::set<std::size_t> seen;
      for (const auto& ev : s.events) {
        CHECK(seen.insert(ev.movie).second);
        CHECK(h.ratings[ev.movie] == 0);
        CHECK(h.nb->is_recommendable(ev.movie));
        const bool in_familiar = inside(s.layout.familiar, ev.projection);
        const bool typical = std::abs(ev.projection) > s.layout.untypical_boundary;
        preferred += fam_axis ? in_familiar : typical;
        if (prefs.familiar == 1.0) CHECK(in_familiar);
        if (prefs.familiar == 0.0) CHECK_FALSE(in_familiar);
        if (prefs.typical == 1.0) CHECK(typical);
        if (prefs.typical == 0.0) CHECK_FALSE(typical);
        CHECK(ev.similar_liked.size() <= 4);
        for (std::size_t j = 1; j < ev.similar_liked.size(); ++j) {
          const double a = std::abs(h.engine->space().projection(ev.similar_liked[j - 1], s.dimension) - ev.projection);
          const double b = std::abs(h.engine->space().projection(ev.similar_liked[j], s.dimension) - ev.projection);
          CHECK(a <= b);
        }
        for (std::size_t m : ev.similar_liked) CHECK(h.ratings[m] >= s.thresholds.like);
      }
      rebalanced += s.rebalanced;
      CHECK(preferred == counts.preferred);
      for (std::size_t j = 1; j < s.events.size(); ++j) {
        if (s.plan.ascending) CHECK(s.events[j - 1].projection <= s.events[j].projection);
        else CHECK(s.events[j - 1].projection >= s.events[j].projection);
      }
      REQUIRE(s.anchor_left);
      CHECK(s.anchor_left->projection < s.anchor_right->projection);
    }
  }
  CHECK(rebalanced == 0);
}

TEST_CASE("stories are reproducible from the seed and vary across seeds") {
  Harness h;
  const Story a = h.tell({}, 77);
  const Story b = h.tell({}, 77);
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t j = 0; j < a.events.size(); ++j) CHECK(a.events[j].movie == b.events[j].movie);
  std::set<std::vector<std::size_t>> distinct;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<std::size_t> ids;
    for (const auto& ev : h.tell({}, seed).events) ids.push_back(ev.movie);
    distinct.insert(ids);
  }
  CHECK(distinct.size() > 5);
}

TEST_CASE("thumbed-down movies never appear") {
  Harness h;
  const Story first = h.tell({}, 5);
  for (const auto& ev : first.events) h.thumbs.down.insert(ev.movie);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    for (const auto& ev : h.tell({}, seed).events) CHECK_FALSE(h.thumbs.down.contains(ev.movie));
  }
}

TEST_CASE("rotation") {
  Harness h;
  const auto model = build_user_model(h.engine->space(), *h.nb, h.ratings, {}, {}, h.engine->config().model);
  const auto& sel = model.selection.dimensions;
  REQUIRE(sel.size() >= 2);
  auto order = rotation_order(model, {{}, std::nullopt, false, 0});
  CHECK(order.front() == sel[0]);
  CHECK(order.size() == static_cast<std::size_t>(h.engine->space().k));
  order = rotation_order(model, {{}, sel[0], false, 0});
  CHECK(order.front() == sel[1]);
  order = rotation_order(model, {{}, sel.back(), false, 0});
  CHECK(order.front() == sel[0]);
  order = rotation_order(model, {{}, sel[0], true, 0});
  CHECK(order.front() == sel[1]);
  order = rotation_order(model, {{}, sel[1], true, 0});
  CHECK(order.front() == sel[0]);
  const Story s1 = h.tell({}, 1);
  const Story s2 = h.tell({}, 2, s1.dimension);
  CHECK(s1.dimension != s2.dimension);
}

TEST_CASE("typicality preference steers the mean typicality") {
  Harness h;
  auto mean_typicality = [&](double t) {
    double sum = 0.0;
    int n = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const Story s = h.tell({0.5, t}, seed);
      const double max_abs = std::max(std::abs(s.layout.extent.lo), std::abs(s.layout.extent.hi));
      for (const auto& ev : s.events) sum += std::abs(ev.projection) / max_abs, ++n;
    }
    return sum / n;
  };
  CHECK(mean_typicality(0.9) > mean_typicality(0.1));
}

TEST_CASE("exhausted pool") {
  Harness h;
  Config c = h.engine->config();
  c.story.length = 100000;
  const StoryInputs in{h.engine->space(), *h.nb, h.ratings, h.engine->popularity(), h.thumbs, h.weights,
                       c.model, c.story};
  try {
    generate_story(in, {{}, std::nullopt, false, 1});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kPoolExhausted);
  }
}

TEST_CASE("zero-history user gets a story without anchors") {
  Harness h;
  h.nb = h.engine->neighborhood(std::nullopt);
  h.ratings.assign(h.ratings.size(), 0);
  CHECK(h.nb->similar_users.size() == h.engine->dataset().user_count());
  const Story s = h.tell({}, 9);
  CHECK(s.events.size() == 5);
  CHECK_FALSE(s.anchor_left);
}

TEST_CASE("a side that meets the quotas beats one that needs rebalancing") {
  // One dimension. Rated: like at 0.5 and 0.6, dislike at 0.3; the like side
  // is the right, where only two diverse movies sit. The left has plenty.
  const std::vector<double> xs{0.5, 0.6, 0.3, 0.7, 0.8, 0.35, 0.4, 0.45,
                               -0.6, -0.5, -0.4, -0.3, -0.2, -0.1, -0.15, -0.05};
  LatentSpace space;
  space.k = 1;
  space.movie_features = Matrix(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) space.movie_features(static_cast<Eigen::Index>(i), 0) = xs[i];
  space.singular_values = Vector::Ones(1);
  space.user_features = Matrix::Zero(1, 1);
  space.user_coords = Matrix::Zero(1, 1);

  std::vector<int> ratings(xs.size(), 0);
  ratings[0] = ratings[1] = 5;
  ratings[2] = 1;
  UserNeighborhood nb;
  nb.user = 0;
  for (std::size_t i = 3; i < xs.size(); ++i) nb.recommendable.push_back(i);
  nb.raw_degrees.assign(nb.recommendable.size(), 1.0);
  nb.degrees = nb.raw_degrees;
  const std::vector<std::size_t> popularity(xs.size(), 1);
  ModelParams model;
  model.adapt_thresholds = false;
  const StoryParams params;
  const ThumbSets thumbs;
  const MovieWeights weights;
  const StoryInputs in{space, nb, ratings, popularity, thumbs, weights, model, params};

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Story s = generate_story(in, {{0.0, 0.5}, std::nullopt, false, seed});
    CAPTURE(seed);
    CHECK_FALSE(s.rebalanced);
    for (const auto& ev : s.events) CHECK(ev.projection < 0.3);
  }
}
