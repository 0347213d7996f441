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


#include "lsmrec/config.hpp"

#include <sstream>

#include "lsmrec/error.hpp"

namespace lsmrec {
namespace {

void require(bool ok, const char* name, const char* range) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, std::string(name) + " must be " + range);
}

}  // namespace

void Config::validate() const {
  const auto& t = model.thresholds;
  require(k >= 1, "k", ">= 1");
  require(t.like >= 1.0 && t.like <= 5.0, "tau-plus", "in [1, 5]");
  require(t.dislike >= 1.0 && t.dislike <= 5.0, "tau-minus", "in [1, 5]");
  require(t.dislike <= t.like, "tau-minus", "<= tau-plus");
  require(t.recommend >= 0.0 && t.recommend <= 1.0, "tau-r", "in [0, 1]");
  require(neighborhood.positive_threshold >= -5.0 && neighborhood.positive_threshold <= 5.0,
          "wc", "in [-5, 5]");
  require(model.weights.like_share >= 0.0, "w-plus", ">= 0");
  require(model.weights.overlap >= 0.0, "w-o", ">= 0");
  require(model.weights.spread >= 0.0, "w-theta", ">= 0");
  require(model.interaction_weight >= 0.0, "w-int", ">= 0");
  require(model.selection.score_ratio >= 0.0 && model.selection.score_ratio <= 1.0, "tau-v",
          "in [0, 1]");
  require(model.selection.similarity_threshold >= 0.0 &&
              model.selection.similarity_threshold <= 1.0,
          "tau-s", "in [0, 1]");
  require(model.selection.max_dims >= 1, "max-dims", ">= 1");
  require(model.untypical_quantile > 0.0 && model.untypical_quantile < 1.0, "rho", "in (0, 1)");
  require(story.length >= 1, "T", ">= 1");
  require(story.max_retries >= 0, "max-retries", ">= 0");
  require(story.tuning.window_fraction > 0.0 && story.tuning.window_fraction <= 1.0, "delta-w",
          "in (0, 1]");
  require(story.tuning.thumb_radius_fraction > 0.0, "delta", "> 0");
  require(story.tuning.thumb_up_boost >= 0.0, "alpha-up", ">= 0");
  require(story.tuning.thumb_down_damping >= 0.0 && story.tuning.thumb_down_damping < 1.0,
          "alpha-down", "in [0, 1)");
  require(story.tuning.epsilon_fraction > 0.0, "epsilon", "> 0");
}

std::string Config::describe() const {
  std::ostringstream out;
  const auto& t = model.thresholds;
  out << "data_dir = " << data_dir.string() << '\n'
      << "snapshot = " << snapshot.string() << '\n'
      << "k = " << k << '\n'
      << "tau_plus = " << t.like << '\n'
      << "tau_minus = " << t.dislike << '\n'
      << "tau_r = " << t.recommend << '\n'
      << "wc = " << neighborhood.positive_threshold << '\n'
      << "w_plus = " << model.weights.like_share << '\n'
      << "w_o = " << model.weights.overlap << '\n'
      << "w_theta = " << model.weights.spread << '\n'
      << "w_int = " << model.interaction_weight << '\n'
      << "tau_v = " << model.selection.score_ratio << '\n'
      << "tau_s = " << model.selection.similarity_threshold << '\n'
      << "max_dims = " << model.selection.max_dims << '\n'
      << "rho = " << model.untypical_quantile << '\n'
      << "adapt_thresholds = " << (model.adapt_thresholds ? "true" : "false") << '\n'
      << "T = " << story.length << '\n'
      << "delta_w = " << story.tuning.window_fraction << '\n'
      << "delta = " << story.tuning.thumb_radius_fraction << '\n'
      << "alpha_up = " << story.tuning.thumb_up_boost << '\n'
      << "alpha_down = " << story.tuning.thumb_down_damping << '\n'
      << "epsilon = " << story.tuning.epsilon_fraction << '\n'
      << "max_retries = " << story.max_retries << '\n'
      << "seed = " << seed << '\n'
      << "listen = " << listen << '\n'
      << "strict_users = " << (strict_users ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace lsmrec
