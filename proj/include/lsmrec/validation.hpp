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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lsmrec/dataset.hpp"
#include "lsmrec/latentspace.hpp"
#include "lsmrec/lsm.hpp"

namespace lsmrec {

// Sums of normalized recommendation degrees of recommendable movies on one
// user's best dimension.
struct ValidationRow {
  int user_id = 0;
  int best_dim = 0;
  LayoutCase layout_case = LayoutCase::kUndefined;
  double best_score = 0.0;
  double sum_like = 0.0;          // inside R_+
  double sum_dislike = 0.0;       // inside R_-
  double sum_like_only = 0.0;     // inside R_+ but not R_o
  double sum_dislike_only = 0.0;  // inside R_- but not R_o
  GroupThresholds thresholds;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  double avg_like = 0.0;
  double avg_dislike = 0.0;
  double avg_like_only = 0.0;
  double avg_dislike_only = 0.0;
  double pearson_before = 0.0;  // NaN when undefined
  double pearson_after = 0.0;
  std::array<int, 5> case_counts{};  // indexed by LayoutCase
  int adjusted_users = 0;

  double separated_or_partial_share() const;
};

ValidationRow validate_user(const RatingDataset& ds, const AdjustedMatrix& adj,
                            const LatentSpace& space, std::size_t user,
                            const NeighborhoodParams& nb_params, const ModelParams& params);

ValidationReport validate_model(const RatingDataset& ds, const AdjustedMatrix& adj,
                                const LatentSpace& space, const NeighborhoodParams& nb_params,
                                const ModelParams& params);

// Pearson correlation; NaN for fewer than two points or zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

// Columns: user_id,best_dim,case,sum_R+,sum_R-,sum_R+_minus_Ro,sum_R-_minus_Ro
void write_validation_csv(std::ostream& out, const ValidationReport& report);
std::string validation_summary(const ValidationReport& report);

}  // namespace lsmrec
