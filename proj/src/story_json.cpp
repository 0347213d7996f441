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


#include "lsmrec/story_json.hpp"

#include <cmath>

namespace lsmrec {

using nlohmann::json;

double round6(double x) { return std::round(x * 1e6) / 1e6; }

std::string_view group_color(MovieGroup group) {
  switch (group) {
    case MovieGroup::kLike: return "green";
    case MovieGroup::kDislike: return "orange";
    case MovieGroup::kRecommendable: return "blue";
    case MovieGroup::kNotRecommendable: return "black";
    case MovieGroup::kNeutral: return "gray";
  }
  return "gray";
}

json interval_json(const std::optional<Interval>& interval) {
  if (!interval) return nullptr;
  return json::array({round6(interval->lo), round6(interval->hi)});
}

json zones_json(const DimensionLayout& layout) {
  return {
      {"extent", interval_json(layout.extent)},
      {"like", interval_json(layout.like)},
      {"dislike", interval_json(layout.dislike)},
      {"overlap", interval_json(layout.overlap)},
      {"combined", interval_json(layout.combined)},
      {"familiar", interval_json(layout.familiar)},
      {"diverse_left", interval_json(layout.diverse_left)},
      {"diverse_right", interval_json(layout.diverse_right)},
      {"untypical_boundary", round6(layout.untypical_boundary)},
      {"like_center", layout.like_center ? json(round6(*layout.like_center)) : json(nullptr)},
  };
}

json movie_ref_json(const Engine& engine, std::size_t movie, int p) {
  const auto& record = engine.dataset().movie_at(movie);
  return {
      {"movie_id", record.movie_id},
      {"title", record.title},
      {"poster_key", "movie-" + std::to_string(record.movie_id)},
      {"genres", record.genres},
      {"projection", round6(engine.space().projection(movie, p))},
  };
}

namespace {

json anchor_json(const Engine& engine, const std::optional<Anchor>& anchor, int p) {
  if (!anchor) return nullptr;
  json out = movie_ref_json(engine, anchor->movie, p);
  out["rating"] = anchor->rating;
  return out;
}

json zone_plan_json(const StoryZone& zone, int count, int selected) {
  json spans = json::array();
  for (const auto& s : zone.spans) spans.push_back(interval_json(s));
  return {
      {"zone", to_string(zone.kind)},
      {"side", zone.side},
      {"restricted_to", zone.orthogonal ? json(to_string(*zone.orthogonal)) : json(nullptr)},
      {"spans", spans},
      {"count", count},
      {"selected", selected},
  };
}

}  // namespace

json story_to_json(const Story& story, const Engine& engine, int user_id) {
  const int p = story.dimension;
  json events = json::array();
  for (std::size_t j = 0; j < story.events.size(); ++j) {
    const auto& ev = story.events[j];
    json roles = json::array();
    for (Role r : ev.roles) roles.push_back(to_string(r));
    json similar = json::array();
    for (std::size_t m : ev.similar_liked) similar.push_back(movie_ref_json(engine, m, p));
    json event = movie_ref_json(engine, ev.movie, p);
    event["order"] = j;
    event["degree"] = round6(ev.degree);
    event["zone"] = to_string(ev.zone);
    event["roles"] = roles;
    event["similar_liked"] = similar;
    event["level1"] = {
        {"projection", event["projection"]},
        {"group", to_string(MovieGroup::kRecommendable)},
        {"color", group_color(MovieGroup::kRecommendable)},
        {"genres", event["genres"]},
    };
    event["level2"] = {{"degree", event["degree"]}, {"height", event["degree"]}};
    json links = json::array();
    for (const auto& s : similar) {
      links.push_back({{"from", s["movie_id"]}, {"to", event["movie_id"]}, {"genres", s["genres"]}});
    }
    event["level3"] = {{"similar_liked", similar}, {"links", links}};
    events.push_back(std::move(event));
  }

  const auto& t = story.thresholds;
  return {
      {"user_id", user_id},
      {"dimension", p},
      {"structure", to_string(story.structure)},
      {"seed", story.seed},
      {"length", story.length},
      {"preferences", {{"f", story.preferences.familiar}, {"t", story.preferences.typical}}},
      {"thresholds", {{"tau_plus", t.like}, {"tau_minus", t.dislike}, {"tau_r", t.recommend}}},
      {"relaxed", story.relaxed},
      {"rebalanced", story.rebalanced},
      {"anchors",
       {{"left", anchor_json(engine, story.anchor_left, p)},
        {"right", anchor_json(engine, story.anchor_right, p)}}},
      {"zones", zones_json(story.layout)},
      {"plan",
       {{"first", zone_plan_json(story.plan.first, story.plan.first_count, story.first_zone_selected)},
        {"second", zone_plan_json(story.plan.second, story.plan.second_count, story.second_zone_selected)},
        {"ascending", story.plan.ascending}}},
      {"events", events},
  };
}

}  // namespace lsmrec
