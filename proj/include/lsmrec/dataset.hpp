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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lsmrec {

// The fixed MovieLens genre vocabulary, in u.item flag order.
inline constexpr std::array<std::string_view, 19> kGenreLabels = {
    "unknown", "Action",  "Adventure", "Animation", "Children's",
    "Comedy",  "Crime",   "Documentary", "Drama",   "Fantasy",
    "Film-Noir", "Horror", "Musical",  "Mystery",   "Romance",
    "Sci-Fi",  "Thriller", "War",      "Western"};

struct MovieRecord {
  int movie_id = 0;
  std::string title;
  std::optional<int> release_year;
  // Labels from kGenreLabels; {"unknown"} when no flag is set.
  std::vector<std::string> genres;
  // Raw 19-character flag string as read ("0"/"1" per genre), kept verbatim.
  std::string genre_flags;
};

struct UserRecord {
  int user_id = 0;
  std::optional<int> age;
  std::optional<std::string> gender;
  std::optional<std::string> occupation;
};

struct RatingRecord {
  int user_id = 0;
  int movie_id = 0;
  int rating = 0;
  std::int64_t timestamp = 0;
};

// A rating addressed by dense indices.
struct IndexedRating {
  std::size_t user = 0;
  std::size_t movie = 0;
  int rating = 0;
};

// Immutable, validated rating data. Users and movies are addressed by dense
// indices (sorted by id); rated-ness is the presence of a rating record, never
// a sentinel value.
class RatingDataset {
 public:
  RatingDataset() = default;
  RatingDataset(std::vector<UserRecord> users, std::vector<MovieRecord> movies,
                std::vector<RatingRecord> ratings);

  // Builds a dataset with placeholder metadata for ids 1..num_users and
  // 1..num_movies. Handy for fixtures.
  static RatingDataset synthetic(int num_users, int num_movies,
                                 std::vector<RatingRecord> ratings);

  std::size_t user_count() const { return users_.size(); }
  std::size_t movie_count() const { return movies_.size(); }
  std::size_t rating_count() const { return ratings_.size(); }

  std::span<const UserRecord> users() const { return users_; }
  std::span<const MovieRecord> movies() const { return movies_; }
  std::span<const RatingRecord> ratings() const { return ratings_; }

  std::optional<std::size_t> user_index(int user_id) const;
  std::optional<std::size_t> movie_index(int movie_id) const;
  const UserRecord& user_at(std::size_t index) const { return users_.at(index); }
  const MovieRecord& movie_at(std::size_t index) const { return movies_.at(index); }

  // Ratings of one user, sorted by movie index.
  std::span<const IndexedRating> user_ratings(std::size_t user) const;
  // Ratings of one movie, sorted by user index.
  std::span<const IndexedRating> movie_ratings(std::size_t movie) const;

  std::optional<int> rating(std::size_t user, std::size_t movie) const;
  bool is_rated(std::size_t user, std::size_t movie) const {
    return rating(user, movie).has_value();
  }

  friend bool operator==(const RatingDataset& a, const RatingDataset& b);

 private:
  void build_indices();

  std::vector<UserRecord> users_;
  std::vector<MovieRecord> movies_;
  std::vector<RatingRecord> ratings_;
  std::unordered_map<int, std::size_t> user_lookup_;
  std::unordered_map<int, std::size_t> movie_lookup_;
  std::vector<IndexedRating> by_user_;
  std::vector<std::size_t> user_offsets_;
  std::vector<IndexedRating> by_movie_;
  std::vector<std::size_t> movie_offsets_;
};

// Loads u.data, u.item and u.user from a MovieLens 100K style directory.
RatingDataset load_movielens(const std::filesystem::path& data_dir);

struct StatsReport {
  std::vector<std::size_t> user_rating_count;
  std::vector<double> user_average;  // NaN for users with no ratings
  std::vector<std::size_t> movie_rating_count;
  std::vector<double> movie_average;  // NaN for movies with no ratings
  double sparsity = 0.0;              // fraction of unrated cells
};

StatsReport dataset_stats(const RatingDataset& ds);

std::vector<std::string> genres_from_flags(std::string_view flags);

}  // namespace lsmrec
