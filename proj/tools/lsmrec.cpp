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


#include <pthread.h>

#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include "lsmrec/config.hpp"
#include "lsmrec/dataset.hpp"
#include "lsmrec/engine.hpp"
#include "lsmrec/error.hpp"
#include "lsmrec/service.hpp"
#include "lsmrec/session.hpp"
#include "lsmrec/snapshot.hpp"
#include "lsmrec/story_json.hpp"
#include "lsmrec/validation.hpp"

// After Eigen: httplib pulls in <resolv.h>, whose _res macro breaks Eigen.
#include <CLI11.hpp>
#include <httplib.h>

namespace {

using namespace lsmrec;
using Clock = std::chrono::steady_clock;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInternal = 2;

struct Options {
  Config config;
  int user = 1;
  int stories = 1;
  double familiar = 0.5;
  double typical = 0.5;
  std::string csv = "validation.csv";
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Snapshot read_snapshot(const Config& config) {
  if (!std::filesystem::exists(config.snapshot)) {
    throw Error(ErrorCode::kIo,
                "snapshot " + config.snapshot.string() + " not found; run preprocess first");
  }
  return load_snapshot(config.snapshot);
}

int cmd_preprocess(const Options& opt) {
  const auto start = Clock::now();
  const auto ds = load_movielens(opt.config.data_dir);
  std::cerr << "loaded " << ds.user_count() << " users, " << ds.movie_count() << " movies, "
            << ds.rating_count() << " ratings\n";
  const auto space = factorize(adjust_ratings(ds), opt.config.k);
  save_snapshot(ds, space, opt.config.snapshot);
  std::cout << "snapshot written to " << opt.config.snapshot.string() << " in "
            << seconds_since(start) << " s\n";
  return kExitOk;
}

int cmd_validate(const Options& opt) {
  const auto start = Clock::now();
  const auto snap = read_snapshot(opt.config);
  const auto adj = adjust_ratings(snap.dataset);
  const auto report =
      validate_model(snap.dataset, adj, snap.space, opt.config.neighborhood, opt.config.model);
  std::ofstream csv(opt.csv);
  if (!csv) throw Error(ErrorCode::kIo, "cannot write " + opt.csv);
  write_validation_csv(csv, report);
  std::cout << validation_summary(report);
  std::cout << "rows written to " << opt.csv << " in " << seconds_since(start) << " s\n";
  return kExitOk;
}

int cmd_recommend(const Options& opt) {
  auto engine = Engine::from_snapshot(read_snapshot(opt.config), opt.config);
  Session session(*engine, "cli", opt.user, opt.config.seed);
  session.set_preferences({opt.familiar, opt.typical});
  for (int j = 0; j < opt.stories; ++j) {
    const Story story = session.next_story();
    std::cout << story_to_json(story, *engine, opt.user).dump() << '\n';
  }
  return kExitOk;
}

std::pair<std::string, int> split_listen(const std::string& listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "listen must be host:port");
  const std::string host = listen.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(listen.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "bad port in " + listen);
  }
  return {host, port};
}

int cmd_serve(const Options& opt) {
  const auto [host, port] = split_listen(opt.config.listen);
  auto engine = Engine::from_snapshot(read_snapshot(opt.config), opt.config);
  Service service(*engine);
  httplib::Server server;
  // httplib defaults to SO_REUSEPORT, which lets a second server share the port.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  service.bind(server);

  // Signals are taken by a dedicated thread; every other thread inherits the mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGUSR1);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::jthread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });

  if (!server.bind_to_port(host, port)) {
    pthread_kill(waiter.native_handle(), SIGUSR1);
    throw Error(ErrorCode::kIo, "cannot listen on " + opt.config.listen + " (port in use?)");
  }
  std::cerr << "listening on " << opt.config.listen << '\n';
  server.listen_after_bind();
  std::cerr << "shut down\n";
  return kExitOk;
}

int exit_code(ErrorCode code) {
  return code == ErrorCode::kNumerical ? kExitInternal : kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  auto& c = opt.config;
  auto& t = c.model.thresholds;
  auto& sel = c.model.selection;
  auto& tune = c.story.tuning;
  std::string data_dir = c.data_dir.string();
  std::string snapshot = c.snapshot.string();
  bool no_adapt = false;
  bool lenient = false;

  CLI::App app{"Latent semantic model recommender with storytelling"};
  app.require_subcommand(1);
  app.fallthrough();
  auto env = [](const char* name) { return std::string("LSMREC_") + name; };
  app.add_option("--data-dir", data_dir, "MovieLens 100K directory")->envname(env("DATA_DIR"));
  app.add_option("--snapshot", snapshot, "Preprocessed snapshot path")->envname(env("SNAPSHOT"));
  app.add_option("--k", c.k, "Latent dimensions")->envname(env("K"));
  app.add_option("--tau-plus", t.like, "Like threshold")->envname(env("TAU_PLUS"));
  app.add_option("--tau-minus", t.dislike, "Dislike threshold")->envname(env("TAU_MINUS"));
  app.add_option("--tau-r", t.recommend, "Recommendation degree threshold")->envname(env("TAU_R"));
  app.add_option("--wc", c.neighborhood.positive_threshold, "Adjusted rating a similar user must reach")
      ->envname(env("WC"));
  app.add_option("--w-plus", c.model.weights.like_share, "Like share exponent")->envname(env("W_PLUS"));
  app.add_option("--w-o", c.model.weights.overlap, "Overlap exponent")->envname(env("W_O"));
  app.add_option("--w-theta", c.model.weights.spread, "Spread exponent")->envname(env("W_THETA"));
  app.add_option("--w-int", c.model.interaction_weight, "Feedback weight")->envname(env("W_INT"));
  app.add_option("--tau-v", sel.score_ratio, "Score cut as a fraction of the best score")
      ->envname(env("TAU_V"));
  app.add_option("--tau-s", sel.similarity_threshold, "Minimum normalized disagreement")
      ->envname(env("TAU_S"));
  app.add_option("--max-dims", sel.max_dims, "Most dimensions kept")->envname(env("MAX_DIMS"));
  app.add_option("--rho", c.model.untypical_quantile, "Un-typical quantile")->envname(env("RHO"));
  app.add_flag("--no-adapt-thresholds", no_adapt, "Keep tau-plus/tau-minus fixed for every user")
      ->envname(env("NO_ADAPT_THRESHOLDS"));
  app.add_option("--T", c.story.length, "Movies per story")->envname(env("T"));
  app.add_option("--delta-w", tune.window_fraction, "Window as a share of the zone")
      ->envname(env("DELTA_W"));
  app.add_option("--delta", tune.thumb_radius_fraction, "Thumb radius as a share of the extent")
      ->envname(env("DELTA"));
  app.add_option("--alpha-up", tune.thumb_up_boost, "Thumb-up boost")->envname(env("ALPHA_UP"));
  app.add_option("--alpha-down", tune.thumb_down_damping, "Thumb-down damping")
      ->envname(env("ALPHA_DOWN"));
  app.add_option("--epsilon", tune.epsilon_fraction, "Distance floor as a share of the extent")
      ->envname(env("EPSILON"));
  app.add_option("--max-retries", c.story.max_retries, "Admission retries")->envname(env("MAX_RETRIES"));
  app.add_option("--seed", c.seed, "Random seed")->envname(env("SEED"));
  app.add_option("--listen", c.listen, "host:port to serve on")->envname(env("LISTEN"));
  app.add_flag("--lenient-users", lenient, "Treat unknown user ids as new users")
      ->envname(env("LENIENT_USERS"));

  auto* preprocess = app.add_subcommand("preprocess", "Factorize the dataset into a snapshot");
  auto* validate = app.add_subcommand("validate", "Per-user zone statistics of the model");
  validate->add_option("--csv", opt.csv, "Output CSV")->envname(env("CSV"));
  auto* recommend = app.add_subcommand("recommend", "Print stories as JSON lines");
  recommend->add_option("--user", opt.user, "User id, 0 for a new user")->envname(env("USER"));
  recommend->add_option("--stories", opt.stories, "Number of stories")->envname(env("STORIES"));
  recommend->add_option("--f", opt.familiar, "Familiar preference")->envname(env("FAMILIAR"));
  recommend->add_option("--t", opt.typical, "Typical preference")->envname(env("TYPICAL"));
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  c.data_dir = data_dir;
  c.snapshot = snapshot;
  c.model.adapt_thresholds = !no_adapt;
  c.strict_users = !lenient;

  try {
    c.validate();
    if (opt.stories < 0) throw Error(ErrorCode::kInvalidArgument, "stories must be >= 0");
    std::cerr << c.describe();
    if (preprocess->parsed()) return cmd_preprocess(opt);
    if (validate->parsed()) return cmd_validate(opt);
    if (recommend->parsed()) return cmd_recommend(opt);
    if (serve->parsed()) return cmd_serve(opt);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
