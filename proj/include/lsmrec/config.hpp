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

#include <cstdint>
#include <filesystem>
#include <string>

#include "lsmrec/latentspace.hpp"
#include "lsmrec/lsm.hpp"
#include "lsmrec/story.hpp"

namespace lsmrec {

// Every tunable of the engine, the story generator and the operator tools.
struct Config {
  std::filesystem::path data_dir = "data/ml-100k";
  std::filesystem::path snapshot = "lsmrec.snapshot";
  int k = 20;
  NeighborhoodParams neighborhood;
  ModelParams model;
  StoryParams story;
  std::uint64_t seed = 42;
  std::string listen = "127.0.0.1:8080";
  // Reject unknown user ids instead of treating them as zero-history users.
  bool strict_users = true;

  // Throws Error(kInvalidArgument) naming the first out-of-range parameter.
  void validate() const;
  // One "name = value" line per parameter.
  std::string describe() const;
};

}  // namespace lsmrec
