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

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "lsmrec/config.hpp"
#include "lsmrec/dataset.hpp"
#include "lsmrec/engine.hpp"

namespace fixture {

// 6 users x 8 movies, every user and movie rated at least twice.
std::vector<std::vector<int>> pinned_grid();
lsmrec::RatingDataset pinned();

// Users drawn from two taste clusters over movies with two latent traits;
// big enough for zones to fill. Deterministic in `seed`.
lsmrec::RatingDataset clustered(unsigned seed = 7, int users = 80, int movies = 160);

std::unique_ptr<lsmrec::Engine> clustered_engine(lsmrec::Config config = {});

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Writes u.data, u.item and u.user in MovieLens 100K layout.
void write_movielens(const std::filesystem::path& dir, const lsmrec::RatingDataset& ds);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fixture
