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


#include "lsmrec/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace lsmrec {
namespace {

std::vector<int> rating_row(const RatingDataset& ds, std::size_t user) {
  std::vector<int> row(ds.movie_count(), 0);
  for (const auto& r : ds.user_ratings(user)) row[r.movie] = r.rating;
  return row;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

}  // namespace

double ValidationReport::separated_or_partial_share() const {
  if (rows.empty()) return 0.0;
  const int good = case_counts[static_cast<int>(LayoutCase::kSeparated)] +
                   case_counts[static_cast<int>(LayoutCase::kPartialOverlap)];
  return static_cast<double>(good) / static_cast<double>(rows.size());
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (xs.size() != ys.size() || xs.size() < 2) return nan;
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    sxy += (xs[j] - mx) * (ys[j] - my);
    sxx += (xs[j] - mx) * (xs[j] - mx);
    syy += (ys[j] - my) * (ys[j] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return nan;
  return sxy / std::sqrt(sxx * syy);
}

ValidationRow validate_user(const RatingDataset& ds, const AdjustedMatrix& adj,
                            const LatentSpace& space, std::size_t user,
                            const NeighborhoodParams& nb_params, const ModelParams& params) {
  const auto nb = build_neighborhood(space, adj, user, nb_params);
  const auto ratings = rating_row(ds, user);
  const auto model = build_user_model(space, nb, ratings, {}, {}, params);

  ValidationRow row;
  row.user_id = ds.user_at(user).user_id;
  row.thresholds = model.groups.thresholds;
  row.best_dim = model.selection.dimensions.empty() ? 0 : model.selection.dimensions.front();
  const auto& layout = model.layouts[static_cast<std::size_t>(row.best_dim)];
  row.best_score = model.scores[static_cast<std::size_t>(row.best_dim)];
  row.layout_case = classify_layout(layout);

  for (std::size_t movie : model.groups.recommendable) {
    const double b = nb.degree(movie).value_or(0.0);
    const double x = space.projection(movie, row.best_dim);
    const bool in_like = layout.like && layout.like->contains(x);
    const bool in_dislike = layout.dislike && layout.dislike->contains(x);
    const bool in_overlap = layout.overlap && layout.overlap->contains(x);
    if (in_like) row.sum_like += b;
    if (in_dislike) row.sum_dislike += b;
    if (in_like && !in_overlap) row.sum_like_only += b;
    if (in_dislike && !in_overlap) row.sum_dislike_only += b;
  }
  return row;
}

ValidationReport validate_model(const RatingDataset& ds, const AdjustedMatrix& adj,
                                const LatentSpace& space, const NeighborhoodParams& nb_params,
                                const ModelParams& params) {
  ValidationReport report;
  report.rows.resize(ds.user_count());

  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t u = w; u < ds.user_count(); u += workers) {
          report.rows[u] = validate_user(ds, adj, space, u, nb_params, params);
        }
      });
    }
  }

  std::vector<double> like, dislike, like_only, dislike_only;
  for (const auto& row : report.rows) {
    like.push_back(row.sum_like);
    dislike.push_back(row.sum_dislike);
    like_only.push_back(row.sum_like_only);
    dislike_only.push_back(row.sum_dislike_only);
    ++report.case_counts[static_cast<std::size_t>(row.layout_case)];
    if (!(row.thresholds == params.thresholds)) ++report.adjusted_users;
  }
  report.avg_like = mean(like);
  report.avg_dislike = mean(dislike);
  report.avg_like_only = mean(like_only);
  report.avg_dislike_only = mean(dislike_only);
  report.pearson_before = pearson(like, dislike);
  report.pearson_after = pearson(like_only, dislike_only);
  return report;
}

void write_validation_csv(std::ostream& out, const ValidationReport& report) {
  out << "user_id,best_dim,case,sum_R+,sum_R-,sum_R+_minus_Ro,sum_R-_minus_Ro\n";
  for (const auto& row : report.rows) {
    out << row.user_id << ',' << row.best_dim << ',' << static_cast<int>(row.layout_case) << ','
        << row.sum_like << ',' << row.sum_dislike << ',' << row.sum_like_only << ','
        << row.sum_dislike_only << '\n';
  }
}

std::string validation_summary(const ValidationReport& report) {
  std::ostringstream out;
  out.precision(4);
  out << "users: " << report.rows.size() << " (thresholds adjusted for " << report.adjusted_users
      << ")\n";
  out << "avg sum b_ui  R+: " << report.avg_like << "  R-: " << report.avg_dislike
      << "  pearson: " << report.pearson_before << '\n';
  out << "overlap removed  R+: " << report.avg_like_only << "  R-: " << report.avg_dislike_only
      << "  pearson: " << report.pearson_after << '\n';
  out << "best-dimension cases:";
  for (int c = 0; c < 5; ++c) out << ' ' << c << '=' << report.case_counts[static_cast<std::size_t>(c)];
  out << "  (case 1/2 share " << report.separated_or_partial_share() << ")\n";
  return out.str();
}

}  // namespace lsmrec
