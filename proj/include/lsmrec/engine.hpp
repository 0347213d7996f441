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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lsmrec/config.hpp"
#include "lsmrec/dataset.hpp"
#include "lsmrec/latentspace.hpp"
#include "lsmrec/snapshot.hpp"

namespace lsmrec {

// Hover information for one movie.
struct DetailView {
  int movie_id = 0;
  std::string title;
  std::vector<std::string> genres;
  std::optional<int> user_rating;       // nullopt: not rated by the user
  std::optional<double> average_rating; // nullopt: nobody rated it
  std::size_t popularity = 0;           // number of raters
  std::string poster_key;
};

// Read-only model state shared by every session. The neighborhood cache is
// the only mutable part and is internally synchronized.
class Engine {
 public:
  Engine(RatingDataset dataset, LatentSpace space, Config config);
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  // Adjusts ratings and factorizes with config.k.
  static std::unique_ptr<Engine> build(RatingDataset dataset, Config config);
  static std::unique_ptr<Engine> from_snapshot(Snapshot snapshot, Config config);

  const RatingDataset& dataset() const { return dataset_; }
  const AdjustedMatrix& adjusted() const { return adjusted_; }
  const LatentSpace& space() const { return space_; }
  const Config& config() const { return config_; }
  const std::vector<std::size_t>& popularity() const { return popularity_; }

  // User id 0 is the zero-history user. Unknown ids throw kNotFound in strict
  // mode and map to the zero-history user otherwise.
  std::optional<std::size_t> resolve_user(int user_id) const;
  std::size_t resolve_movie(int movie_id) const;  // throws kNotFound

  std::shared_ptr<const UserNeighborhood> neighborhood(std::optional<std::size_t> user) const;
  // One entry per movie, 0 where unrated.
  std::vector<int> rating_row(std::optional<std::size_t> user) const;

  DetailView movie_details(int movie_id, std::optional<int> user_id) const;

 private:
  RatingDataset dataset_;
  AdjustedMatrix adjusted_;
  LatentSpace space_;
  Config config_;
  std::vector<std::size_t> popularity_;
  std::vector<std::optional<double>> average_;

  mutable std::mutex cache_mutex_;
  mutable std::map<std::optional<std::size_t>, std::shared_ptr<const UserNeighborhood>> cache_;
};

}  // namespace lsmrec
