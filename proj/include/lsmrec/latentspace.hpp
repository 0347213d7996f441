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
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lsmrec/dataset.hpp"

namespace lsmrec {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Ratings with global user/movie effects removed:
//   adjusted(u, i) = r(u, i) - (a_u - A) - (a_i - B)
// on rated cells, 0 elsewhere. A and B are the means of the per-user and
// per-movie averages.
struct AdjustedMatrix {
  Matrix values;                 // m x n adjusted ratings
  Matrix raw;                    // m x n raw ratings, 0 where unrated
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> rated;
  std::vector<double> user_average;
  std::vector<double> movie_average;
  double global_user_average = 0.0;
  double global_movie_average = 0.0;

  std::size_t users() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t movies() const { return static_cast<std::size_t>(values.cols()); }
};

AdjustedMatrix adjust_ratings(const RatingDataset& ds);

// Truncated SVD of the adjusted matrix plus the user coordinates C = M * V_k.
struct LatentSpace {
  int k = 0;
  Matrix user_features;   // U_k, m x k
  Vector singular_values; // S_k, non-increasing
  Matrix movie_features;  // V_k, n x k
  Matrix user_coords;     // C, m x k

  // Position of a movie on latent dimension p.
  double projection(std::size_t movie, int p) const { return movie_features(static_cast<Eigen::Index>(movie), p); }
  std::size_t movies() const { return static_cast<std::size_t>(movie_features.rows()); }
  std::size_t users() const { return static_cast<std::size_t>(user_coords.rows()); }
};

LatentSpace factorize(const AdjustedMatrix& adj, int k);
LatentSpace factorize(const Matrix& values, int k);

// Frobenius norm of values - U_k diag(S_k) V_k^T.
double reconstruction_error(const LatentSpace& space, const Matrix& values);

// Cosine of two coordinate vectors; 0 when either is all-zero.
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double user_similarity(const LatentSpace& space, std::size_t u, std::size_t v);

enum class DegreeNormalization {
  kRatingSum,      // divide by the sum of ratings, as the degree is defined
  kSimilaritySum,  // divide by the sum of similarities (weighted-average reading)
};

struct NeighborhoodParams {
  double positive_threshold = 3.0;  // w_c, compared against adjusted ratings
  DegreeNormalization normalization = DegreeNormalization::kRatingSum;
};

// Per-user quantities: similarities to every user, the similar set, the list
// of recommendable movies and their recommendation degrees.
struct UserNeighborhood {
  std::optional<std::size_t> user;        // nullopt: zero-history user
  std::vector<double> coords;             // C_u
  std::vector<double> similarities;       // s_uv for every v
  std::vector<std::size_t> similar_users; // S_u, ascending
  std::vector<std::size_t> recommendable; // L_u, ascending movie indices
  std::vector<double> raw_degrees;        // aligned with recommendable
  std::vector<double> degrees;            // min-max normalized to [0, 1]

  // Normalized degree of a movie in L_u.
  std::optional<double> degree(std::size_t movie) const;
  bool is_recommendable(std::size_t movie) const;
};

// S_u = {v | s_uv >= 0}.
std::vector<std::size_t> similar_set(std::span<const double> similarities);

// L_u: movies unrated by the user that some similar user rated with an
// adjusted rating >= w_c.
std::vector<std::size_t> recommendable_list(const AdjustedMatrix& adj,
                                            std::optional<std::size_t> user,
                                            std::span<const std::size_t> similar_users,
                                            double positive_threshold);

// Raw degree of one movie; nullopt when no similar user rated it.
std::optional<double> recommendation_degree(const AdjustedMatrix& adj,
                                            std::span<const double> similarities,
                                            std::span<const std::size_t> similar_users,
                                            std::size_t movie,
                                            DegreeNormalization normalization);

UserNeighborhood build_neighborhood(const LatentSpace& space, const AdjustedMatrix& adj,
                                    std::optional<std::size_t> user,
                                    const NeighborhoodParams& params = {});

// Min-max normalization; a constant (or singleton) set maps to all ones.
std::vector<double> normalize_degrees(std::span<const double> raw);

}  // namespace lsmrec
