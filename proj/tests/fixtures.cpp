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


#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <random>

#include <unistd.h>

namespace fixture {

std::vector<std::vector<int>> pinned_grid() {
  return {
      {5, 4, 0, 1, 0, 2, 5, 0},
      {4, 0, 5, 2, 1, 0, 0, 3},
      {0, 5, 4, 0, 2, 1, 4, 0},
      {1, 2, 0, 5, 4, 0, 0, 5},
      {2, 0, 1, 4, 5, 3, 0, 4},
      {0, 1, 2, 0, 4, 5, 1, 0},
  };
}

lsmrec::RatingDataset pinned() {
  const auto grid = pinned_grid();
  std::vector<lsmrec::RatingRecord> ratings;
  for (std::size_t u = 0; u < grid.size(); ++u) {
    for (std::size_t i = 0; i < grid[u].size(); ++i) {
      if (grid[u][i] != 0) {
        ratings.push_back({static_cast<int>(u + 1), static_cast<int>(i + 1), grid[u][i],
                           static_cast<std::int64_t>(880000000 + u * 100 + i)});
      }
    }
  }
  return lsmrec::RatingDataset::synthetic(6, 8, std::move(ratings));
}

lsmrec::RatingDataset clustered(unsigned seed, int users, int movies) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<double, double>> traits(static_cast<std::size_t>(movies));
  for (auto& t : traits) t = {unit(rng) * 2 - 1, unit(rng) * 2 - 1};
  std::vector<lsmrec::RatingRecord> ratings;
  for (int u = 0; u < users; ++u) {
    const double sign = u % 2 == 0 ? 1.0 : -1.0;
    const double taste_a = sign * (0.6 + 0.4 * unit(rng));
    const double taste_b = unit(rng) * 2 - 1;
    for (int i = 0; i < movies; ++i) {
      if (unit(rng) > 0.3) continue;
      const auto& [a, b] = traits[static_cast<std::size_t>(i)];
      const double score = 3.0 + 1.8 * taste_a * a + 0.8 * taste_b * b + noise(rng);
      const int r = std::clamp(static_cast<int>(std::lround(score)), 1, 5);
      ratings.push_back({u + 1, i + 1, r, 880000000 + u * 1000 + i});
    }
  }
  return lsmrec::RatingDataset::synthetic(users, movies, std::move(ratings));
}

std::unique_ptr<lsmrec::Engine> clustered_engine(lsmrec::Config config) {
  config.k = std::min(config.k, 10);
  return lsmrec::Engine::build(clustered(), std::move(config));
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("lsmrec-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

void write_movielens(const std::filesystem::path& dir, const lsmrec::RatingDataset& ds) {
  std::filesystem::create_directories(dir);
  std::ofstream data(dir / "u.data");
  for (const auto& r : ds.ratings()) {
    data << r.user_id << '\t' << r.movie_id << '\t' << r.rating << '\t' << r.timestamp << '\n';
  }
  std::ofstream item(dir / "u.item");
  for (const auto& m : ds.movies()) {
    item << m.movie_id << '|' << m.title << "|01-Jan-1995||";
    for (std::size_t g = 0; g < m.genre_flags.size(); ++g) item << '|' << m.genre_flags[g];
    item << '\n';
  }
  std::ofstream user(dir / "u.user");
  for (const auto& u : ds.users()) {
    user << u.user_id << '|' << u.age.value_or(30) << '|' << u.gender.value_or("M") << '|'
         << u.occupation.value_or("other") << "|00000\n";
  }
}

}  // namespace fixture
