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


#include "lsmrec/latentspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/SVD>

#include "lsmrec/error.hpp"

namespace lsmrec {

AdjustedMatrix adjust_ratings(const RatingDataset& ds) {
  if (ds.rating_count() == 0) throw Error(ErrorCode::kPrecondition, "no ratings");
  const auto m = static_cast<Eigen::Index>(ds.user_count());
  const auto n = static_cast<Eigen::Index>(ds.movie_count());

  AdjustedMatrix adj;
  adj.raw = Matrix::Zero(m, n);
  adj.rated = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(m, n, false);
  for (std::size_t u = 0; u < ds.user_count(); ++u) {
    for (const auto& r : ds.user_ratings(u)) {
      adj.raw(static_cast<Eigen::Index>(r.user), static_cast<Eigen::Index>(r.movie)) = r.rating;
      adj.rated(static_cast<Eigen::Index>(r.user), static_cast<Eigen::Index>(r.movie)) = true;
    }
  }

  const auto stats = dataset_stats(ds);
  auto mean_of_defined = [](const std::vector<double>& xs) {
    double sum = 0.0;
    std::size_t count = 0;
    for (double x : xs) {
      if (std::isnan(x)) continue;
      sum += x;
      ++count;
    }
    return sum / static_cast<double>(count);
  };
  adj.global_user_average = mean_of_defined(stats.user_average);
  adj.global_movie_average = mean_of_defined(stats.movie_average);

  // Users/movies without ratings take the global average, so their effect is 0.
  adj.user_average = stats.user_average;
  for (double& a : adj.user_average) {
    if (std::isnan(a)) a = adj.global_user_average;
  }
  adj.movie_average = stats.movie_average;
  for (double& a : adj.movie_average) {
    if (std::isnan(a)) a = adj.global_movie_average;
  }

  adj.values = Matrix::Zero(m, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double movie_effect = adj.movie_average[static_cast<std::size_t>(i)] - adj.global_movie_average;
    for (Eigen::Index u = 0; u < m; ++u) {
      if (!adj.rated(u, i)) continue;
      const double user_effect = adj.user_average[static_cast<std::size_t>(u)] - adj.global_user_average;
      adj.values(u, i) = adj.raw(u, i) - user_effect - movie_effect;
    }
  }
  return adj;
}

LatentSpace factorize(const AdjustedMatrix& adj, int k) { return factorize(adj.values, k); }

LatentSpace factorize(const Matrix& values, int k) {
  const auto max_rank = std::min(values.rows(), values.cols());
  if (k < 1 || k > max_rank) {
    throw Error(ErrorCode::kInvalidArgument,
                "rank k=" + std::to_string(k) + " outside [1, " + std::to_string(max_rank) + "]");
  }
  Eigen::BDCSVD<Matrix> svd(values, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw Error(ErrorCode::kNumerical, "SVD did not converge (divide-and-conquer, default iteration budget)");
  }

  LatentSpace space;
  space.k = k;
  space.singular_values = svd.singularValues().head(k);
  space.user_features = svd.matrixU().leftCols(k);
  space.movie_features = svd.matrixV().leftCols(k);

  // Canonical signs: the largest-magnitude entry of each movie column is positive.
  for (int p = 0; p < k; ++p) {
    Eigen::Index arg = 0;
    space.movie_features.col(p).cwiseAbs().maxCoeff(&arg);
    if (space.movie_features(arg, p) < 0) {
      space.movie_features.col(p) *= -1.0;
      space.user_features.col(p) *= -1.0;
    }
  }
  space.user_coords = values * space.movie_features;
  return space;
}

double reconstruction_error(const LatentSpace& space, const Matrix& values) {
  const Matrix approx =
      space.user_features * space.singular_values.asDiagonal() * space.movie_features.transpose();
  return (values - approx).norm();
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    dot += a[l] * b[l];
    na += a[l] * a[l];
    nb += b[l] * b[l];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

namespace {

std::vector<double> row_of(const Matrix& mat, std::size_t row) {
  std::vector<double> out(static_cast<std::size_t>(mat.cols()));
  for (Eigen::Index c = 0; c < mat.cols(); ++c) out[static_cast<std::size_t>(c)] = mat(static_cast<Eigen::Index>(row), c);
  return out;
}

}  // namespace

double user_similarity(const LatentSpace& space, std::size_t u, std::size_t v) {
  const auto cu = row_of(space.user_coords, u);
  const auto cv = row_of(space.user_coords, v);
  return cosine_similarity(cu, cv);
}

std::vector<std::size_t> similar_set(std::span<const double> similarities) {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < similarities.size(); ++v) {
    if (similarities[v] >= 0.0) out.push_back(v);
  }
  return out;
}

std::vector<std::size_t> recommendable_list(const AdjustedMatrix& adj,
                                            std::optional<std::size_t> user,
                                            std::span<const std::size_t> similar_users,
                                            double positive_threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < adj.movies(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    if (user && adj.rated(static_cast<Eigen::Index>(*user), col)) continue;
    for (std::size_t v : similar_users) {
      const auto row = static_cast<Eigen::Index>(v);
      if (adj.rated(row, col) && adj.values(row, col) >= positive_threshold) {
        out.push_back(i);
        break;
      }
    }
  }
  return out;
}

std::optional<double> recommendation_degree(const AdjustedMatrix& adj,
                                            std::span<const double> similarities,
                                            std::span<const std::size_t> similar_users,
                                            std::size_t movie,
                                            DegreeNormalization normalization) {
  const auto col = static_cast<Eigen::Index>(movie);
  double numerator = 0.0;
  double denominator = 0.0;
  bool any = false;
  for (std::size_t v : similar_users) {
    const auto row = static_cast<Eigen::Index>(v);
    if (!adj.rated(row, col)) continue;
    any = true;
    const double r = adj.raw(row, col);
    numerator += r * similarities[v];
    denominator += normalization == DegreeNormalization::kRatingSum ? r : similarities[v];
  }
  if (!any) return std::nullopt;
  if (denominator == 0.0) return 0.0;
  return numerator / denominator;
}

std::vector<double> normalize_degrees(std::span<const double> raw) {
  std::vector<double> out(raw.size(), 1.0);
  if (raw.empty()) return out;
  const auto [lo, hi] = std::ranges::minmax(raw);
  if (hi == lo) return out;
  for (std::size_t j = 0; j < raw.size(); ++j) out[j] = (raw[j] - lo) / (hi - lo);
  return out;
}

std::optional<double> UserNeighborhood::degree(std::size_t movie) const {
  const auto it = std::ranges::lower_bound(recommendable, movie);
  if (it == recommendable.end() || *it != movie) return std::nullopt;
  return degrees[static_cast<std::size_t>(it - recommendable.begin())];
}

bool UserNeighborhood::is_recommendable(std::size_t movie) const {
  return std::ranges::binary_search(recommendable, movie);
}

UserNeighborhood build_neighborhood(const LatentSpace& space, const AdjustedMatrix& adj,
                                    std::optional<std::size_t> user,
                                    const NeighborhoodParams& params) {
  UserNeighborhood nb;
  nb.user = user;
  if (user) {
    if (*user >= space.users()) throw Error(ErrorCode::kNotFound, "user index out of range");
    nb.coords = row_of(space.user_coords, *user);
  } else {
    nb.coords.assign(static_cast<std::size_t>(space.k), 0.0);
  }

  nb.similarities.resize(space.users());
  for (std::size_t v = 0; v < space.users(); ++v) {
    nb.similarities[v] = cosine_similarity(nb.coords, row_of(space.user_coords, v));
  }
  nb.similar_users = similar_set(nb.similarities);

  const auto candidates =
      recommendable_list(adj, user, nb.similar_users, params.positive_threshold);
  for (std::size_t movie : candidates) {
    const auto raw =
        recommendation_degree(adj, nb.similarities, nb.similar_users, movie, params.normalization);
    if (!raw) continue;
    nb.recommendable.push_back(movie);
    nb.raw_degrees.push_back(*raw);
  }
  nb.degrees = normalize_degrees(nb.raw_degrees);
  return nb;
}

}  // namespace lsmrec
