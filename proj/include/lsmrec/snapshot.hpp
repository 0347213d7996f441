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

#include "lsmrec/dataset.hpp"
#include "lsmrec/latentspace.hpp"

namespace lsmrec {

inline constexpr std::uint32_t kSnapshotVersion = 1;

// Preprocessed state: the dataset and its latent space. Adjusted ratings are
// recomputed from the dataset on load.
struct Snapshot {
  RatingDataset dataset;
  LatentSpace space;
};

// Binary layout: 8-byte magic "LSMRSNAP", u32 version, u64 payload size,
// payload, u64 FNV-1a checksum of the payload. Doubles are stored verbatim.
void save_snapshot(const RatingDataset& ds, const LatentSpace& space,
                   const std::filesystem::path& path);
Snapshot load_snapshot(const std::filesystem::path& path);

}  // namespace lsmrec
