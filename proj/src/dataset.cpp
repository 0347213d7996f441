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


#include "lsmrec/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include "lsmrec/error.hpp"

namespace lsmrec {
namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view text) {
  while (!text.empty() && (text.front() == ' ')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

[[noreturn]] void fail_line(const std::filesystem::path& file, std::size_t line_no,
                            const std::string& what) {
  std::ostringstream msg;
  msg << file.filename().string() << ":" << line_no << ": " << what;
  throw Error(ErrorCode::kDataFormat, msg.str());
}

std::ifstream open_required(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "missing file: " + file.string());
  return in;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::optional<int> year_from_date(std::string_view date) {
  // MovieLens dates look like 01-Jan-1995.
  if (date.size() < 4) return std::nullopt;
  return parse_int<int>(date.substr(date.size() - 4));
}

std::vector<MovieRecord> read_items(const std::filesystem::path& file) {
  auto in = open_required(file);
  std::vector<MovieRecord> movies;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(std::move(line));
    if (line.empty()) continue;
    const auto fields = split(line, '|');
    if (fields.size() != 5 + kGenreLabels.size()) {
      fail_line(file, line_no, "expected 24 pipe-separated fields");
    }
    MovieRecord movie;
    const auto id = parse_int<int>(fields[0]);
    if (!id || *id < 1) fail_line(file, line_no, "bad movie id");
    movie.movie_id = *id;
    movie.title = std::string(fields[1]);
    movie.release_year = year_from_date(fields[2]);
    for (std::size_t g = 0; g < kGenreLabels.size(); ++g) {
      const auto flag = fields[5 + g];
      if (flag != "0" && flag != "1") fail_line(file, line_no, "genre flag must be 0 or 1");
      movie.genre_flags += flag;
    }
    movie.genres = genres_from_flags(movie.genre_flags);
    movies.push_back(std::move(movie));
  }
  return movies;
}

std::vector<UserRecord> read_users(const std::filesystem::path& file) {
  auto in = open_required(file);
  std::vector<UserRecord> users;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(std::move(line));
    if (line.empty()) continue;
    const auto fields = split(line, '|');
    if (fields.size() < 4) fail_line(file, line_no, "expected user_id|age|gender|occupation|zip");
    UserRecord user;
    const auto id = parse_int<int>(fields[0]);
    if (!id || *id < 1) fail_line(file, line_no, "bad user id");
    user.user_id = *id;
    user.age = parse_int<int>(fields[1]);
    if (!fields[2].empty()) user.gender = std::string(fields[2]);
    if (!fields[3].empty()) user.occupation = std::string(fields[3]);
    users.push_back(std::move(user));
  }
  return users;
}

std::vector<RatingRecord> read_ratings(const std::filesystem::path& file) {
  auto in = open_required(file);
  std::vector<RatingRecord> ratings;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(std::move(line));
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 4) fail_line(file, line_no, "expected 4 tab-separated fields");
    const auto user = parse_int<int>(fields[0]);
    const auto movie = parse_int<int>(fields[1]);
    const auto value = parse_int<int>(fields[2]);
    const auto ts = parse_int<std::int64_t>(fields[3]);
    if (!user || !movie || !value || !ts) fail_line(file, line_no, "non-integer field");
    if (*value < 1 || *value > 5) {
      fail_line(file, line_no, "rating " + std::to_string(*value) + " outside 1..5");
    }
    ratings.push_back({*user, *movie, *value, *ts});
  }
  return ratings;
}

}  // namespace

std::vector<std::string> genres_from_flags(std::string_view flags) {
  std::vector<std::string> out;
  for (std::size_t g = 0; g < flags.size() && g < kGenreLabels.size(); ++g) {
    if (flags[g] == '1') out.emplace_back(kGenreLabels[g]);
  }
  if (out.empty()) out.emplace_back("unknown");
  return out;
}

RatingDataset::RatingDataset(std::vector<UserRecord> users, std::vector<MovieRecord> movies,
                             std::vector<RatingRecord> ratings)
    : users_(std::move(users)), movies_(std::move(movies)), ratings_(std::move(ratings)) {
  build_indices();
}

RatingDataset RatingDataset::synthetic(int num_users, int num_movies,
                                       std::vector<RatingRecord> ratings) {
  std::vector<UserRecord> users;
  for (int u = 1; u <= num_users; ++u) {
    UserRecord user;
    user.user_id = u;
    users.push_back(std::move(user));
  }
  std::vector<MovieRecord> movies;
  for (int i = 1; i <= num_movies; ++i) {
    MovieRecord movie;
    movie.movie_id = i;
    movie.title = "Movie " + std::to_string(i);
    movie.genre_flags = std::string(kGenreLabels.size(), '0');
    movie.genres = {"unknown"};
    movies.push_back(std::move(movie));
  }
  return RatingDataset(std::move(users), std::move(movies), std::move(ratings));
}

void RatingDataset::build_indices() {
  std::ranges::sort(users_, {}, &UserRecord::user_id);
  std::ranges::sort(movies_, {}, &MovieRecord::movie_id);
  for (std::size_t u = 0; u < users_.size(); ++u) {
    if (!user_lookup_.emplace(users_[u].user_id, u).second) {
      throw Error(ErrorCode::kDataFormat,
                  "duplicate user id " + std::to_string(users_[u].user_id));
    }
  }
  for (std::size_t i = 0; i < movies_.size(); ++i) {
    if (!movie_lookup_.emplace(movies_[i].movie_id, i).second) {
      throw Error(ErrorCode::kDataFormat,
                  "duplicate movie id " + std::to_string(movies_[i].movie_id));
    }
  }

  by_user_.clear();
  by_user_.reserve(ratings_.size());
  for (const auto& r : ratings_) {
    if (r.rating < 1 || r.rating > 5) {
      throw Error(ErrorCode::kDataFormat, "rating " + std::to_string(r.rating) + " outside 1..5");
    }
    const auto u = user_lookup_.find(r.user_id);
    const auto i = movie_lookup_.find(r.movie_id);
    if (u == user_lookup_.end()) {
      throw Error(ErrorCode::kDataFormat, "rating references unknown user " + std::to_string(r.user_id));
    }
    if (i == movie_lookup_.end()) {
      throw Error(ErrorCode::kDataFormat,
                  "rating references unknown movie " + std::to_string(r.movie_id));
    }
    by_user_.push_back({u->second, i->second, r.rating});
  }

  std::ranges::sort(by_user_, [](const IndexedRating& a, const IndexedRating& b) {
    return std::pair(a.user, a.movie) < std::pair(b.user, b.movie);
  });
  for (std::size_t k = 1; k < by_user_.size(); ++k) {
    if (by_user_[k].user == by_user_[k - 1].user && by_user_[k].movie == by_user_[k - 1].movie) {
      throw Error(ErrorCode::kDataFormat,
                  "duplicate rating for (user " + std::to_string(users_[by_user_[k].user].user_id) +
                      ", movie " + std::to_string(movies_[by_user_[k].movie].movie_id) + ")");
    }
  }

  by_movie_ = by_user_;
  std::ranges::sort(by_movie_, [](const IndexedRating& a, const IndexedRating& b) {
    return std::pair(a.movie, a.user) < std::pair(b.movie, b.user);
  });

  user_offsets_.assign(users_.size() + 1, 0);
  for (const auto& r : by_user_) ++user_offsets_[r.user + 1];
  for (std::size_t u = 0; u < users_.size(); ++u) user_offsets_[u + 1] += user_offsets_[u];

  movie_offsets_.assign(movies_.size() + 1, 0);
  for (const auto& r : by_movie_) ++movie_offsets_[r.movie + 1];
  for (std::size_t i = 0; i < movies_.size(); ++i) movie_offsets_[i + 1] += movie_offsets_[i];
}

std::optional<std::size_t> RatingDataset::user_index(int user_id) const {
  const auto it = user_lookup_.find(user_id);
  if (it == user_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> RatingDataset::movie_index(int movie_id) const {
  const auto it = movie_lookup_.find(movie_id);
  if (it == movie_lookup_.end()) return std::nullopt;
  return it->second;
}

std::span<const IndexedRating> RatingDataset::user_ratings(std::size_t user) const {
  return std::span(by_user_).subspan(user_offsets_.at(user),
                                     user_offsets_.at(user + 1) - user_offsets_[user]);
}

std::span<const IndexedRating> RatingDataset::movie_ratings(std::size_t movie) const {
  return std::span(by_movie_).subspan(movie_offsets_.at(movie),
                                      movie_offsets_.at(movie + 1) - movie_offsets_[movie]);
}

std::optional<int> RatingDataset::rating(std::size_t user, std::size_t movie) const {
  const auto row = user_ratings(user);
  const auto it = std::ranges::lower_bound(row, movie, {}, &IndexedRating::movie);
  if (it == row.end() || it->movie != movie) return std::nullopt;
  return it->rating;
}

bool operator==(const RatingDataset& a, const RatingDataset& b) {
  auto same_users = std::ranges::equal(a.users_, b.users_, [](const auto& x, const auto& y) {
    return x.user_id == y.user_id && x.age == y.age && x.gender == y.gender &&
           x.occupation == y.occupation;
  });
  auto same_movies = std::ranges::equal(a.movies_, b.movies_, [](const auto& x, const auto& y) {
    return x.movie_id == y.movie_id && x.title == y.title && x.release_year == y.release_year &&
           x.genres == y.genres && x.genre_flags == y.genre_flags;
  });
  auto same_ratings = std::ranges::equal(a.ratings_, b.ratings_, [](const auto& x, const auto& y) {
    return x.user_id == y.user_id && x.movie_id == y.movie_id && x.rating == y.rating &&
           x.timestamp == y.timestamp;
  });
  return same_users && same_movies && same_ratings;
}

RatingDataset load_movielens(const std::filesystem::path& data_dir) {
  if (!std::filesystem::is_directory(data_dir)) {
    throw Error(ErrorCode::kIo, "data directory not found: " + data_dir.string());
  }
  auto ratings = read_ratings(data_dir / "u.data");
  if (ratings.empty()) throw Error(ErrorCode::kDataFormat, "no ratings in " + (data_dir / "u.data").string());
  auto movies = read_items(data_dir / "u.item");
  auto users = read_users(data_dir / "u.user");
  return RatingDataset(std::move(users), std::move(movies), std::move(ratings));
}

StatsReport dataset_stats(const RatingDataset& ds) {
  StatsReport report;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  report.user_rating_count.resize(ds.user_count());
  report.user_average.assign(ds.user_count(), nan);
  for (std::size_t u = 0; u < ds.user_count(); ++u) {
    const auto row = ds.user_ratings(u);
    report.user_rating_count[u] = row.size();
    if (row.empty()) continue;
    double sum = 0.0;
    for (const auto& r : row) sum += r.rating;
    report.user_average[u] = sum / static_cast<double>(row.size());
  }
  report.movie_rating_count.resize(ds.movie_count());
  report.movie_average.assign(ds.movie_count(), nan);
  for (std::size_t i = 0; i < ds.movie_count(); ++i) {
    const auto col = ds.movie_ratings(i);
    report.movie_rating_count[i] = col.size();
    if (col.empty()) continue;
    double sum = 0.0;
    for (const auto& r : col) sum += r.rating;
    report.movie_average[i] = sum / static_cast<double>(col.size());
  }
  const double cells = static_cast<double>(ds.user_count()) * static_cast<double>(ds.movie_count());
  report.sparsity = cells > 0 ? 1.0 - static_cast<double>(ds.rating_count()) / cells : 1.0;
  return report;
}

}  // namespace lsmrec
