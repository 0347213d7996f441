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


#include "lsmrec/engine.hpp"

#include "lsmrec/error.hpp"

namespace lsmrec {

Engine::Engine(RatingDataset dataset, LatentSpace space, Config config)
    : dataset_(std::move(dataset)),
      adjusted_(adjust_ratings(dataset_)),
      space_(std::move(space)),
      config_(std::move(config)) {
  if (space_.movies() != dataset_.movie_count() || space_.users() != dataset_.user_count()) {
    throw Error(ErrorCode::kCorrupt, "latent space shape does not match the dataset");
  }
  popularity_.resize(dataset_.movie_count());
  average_.resize(dataset_.movie_count());
  for (std::size_t i = 0; i < dataset_.movie_count(); ++i) {
    const auto rs = dataset_.movie_ratings(i);
    popularity_[i] = rs.size();
    if (!rs.empty()) {
      double sum = 0.0;
      for (const auto& r : rs) sum += r.rating;
      average_[i] = sum / static_cast<double>(rs.size());
    }
  }
}

std::unique_ptr<Engine> Engine::build(RatingDataset dataset, Config config) {
  auto space = factorize(adjust_ratings(dataset), config.k);
  return std::make_unique<Engine>(std::move(dataset), std::move(space), std::move(config));
}

std::unique_ptr<Engine> Engine::from_snapshot(Snapshot snapshot, Config config) {
  return std::make_unique<Engine>(std::move(snapshot.dataset), std::move(snapshot.space),
                                  std::move(config));
}

std::optional<std::size_t> Engine::resolve_user(int user_id) const {
  if (user_id == 0) return std::nullopt;
  if (auto index = dataset_.user_index(user_id)) return index;
  if (config_.strict_users) {
    throw Error(ErrorCode::kNotFound, "unknown user " + std::to_string(user_id));
  }
  return std::nullopt;
}

std::size_t Engine::resolve_movie(int movie_id) const {
  if (auto index = dataset_.movie_index(movie_id)) return *index;
  throw Error(ErrorCode::kNotFound, "unknown movie " + std::to_string(movie_id));
}

std::shared_ptr<const UserNeighborhood> Engine::neighborhood(std::optional<std::size_t> user) const {
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(user); it != cache_.end()) return it->second;
  }
  auto nb = std::make_shared<const UserNeighborhood>(
      build_neighborhood(space_, adjusted_, user, config_.neighborhood));
  std::lock_guard lock(cache_mutex_);
  return cache_.try_emplace(user, std::move(nb)).first->second;
}

std::vector<int> Engine::rating_row(std::optional<std::size_t> user) const {
  std::vector<int> row(dataset_.movie_count(), 0);
  if (user) {
    for (const auto& r : dataset_.user_ratings(*user)) row[r.movie] = r.rating;
  }
  return row;
}

DetailView Engine::movie_details(int movie_id, std::optional<int> user_id) const {
  const std::size_t movie = resolve_movie(movie_id);
  const auto& record = dataset_.movie_at(movie);
  DetailView view;
  view.movie_id = record.movie_id;
  view.title = record.title;
  view.genres = record.genres;
  if (user_id) {
    if (auto user = resolve_user(*user_id)) view.user_rating = dataset_.rating(*user, movie);
  }
  view.average_rating = average_[movie];
  view.popularity = popularity_[movie];
  view.poster_key = "movie-" + std::to_string(record.movie_id);
  return view;
}

}  // namespace lsmrec
