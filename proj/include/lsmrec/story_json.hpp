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

#include <json.hpp>

#include "lsmrec/engine.hpp"
#include "lsmrec/lsm.hpp"
#include "lsmrec/story.hpp"

namespace lsmrec {

// Projections and other coordinates leave the engine with 6 decimals.
double round6(double x);

nlohmann::json interval_json(const std::optional<Interval>& interval);
nlohmann::json zones_json(const DimensionLayout& layout);
nlohmann::json movie_ref_json(const Engine& engine, std::size_t movie, int p);

// Wire form of a story: anchors, zones, ordered events with their level 1, 2
// and 3 payloads, and the seed that reproduces it.
nlohmann::json story_to_json(const Story& story, const Engine& engine, int user_id);

// Node color for a movie group, as the interface shows it.
std::string_view group_color(MovieGroup group);

}  // namespace lsmrec
