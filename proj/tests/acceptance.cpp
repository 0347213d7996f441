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


// Acceptance gate. Prints one PASS/FAIL line per criterion and exits non-zero
// if any fails. Needs MovieLens 100K at LSMREC_DATA_DIR (or the first argument).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "api_schema.hpp"
#include "lsmrec/dataset.hpp"
#include "lsmrec/engine.hpp"
#include "lsmrec/error.hpp"
#include "lsmrec/service.hpp"
#include "lsmrec/session.hpp"
#include "lsmrec/story_json.hpp"
#include "lsmrec/validation.hpp"
#include "oracle_checks.hpp"

// After Eigen: httplib pulls in <resolv.h>, whose _res macro breaks Eigen.
#include <httplib.h>

namespace {

using namespace lsmrec;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

// Tolerances and budgets.
constexpr double kSeparationMinRatio = 2.0;
constexpr double kValidationMaxSeconds = 15 * 60;
constexpr double kMinGoodCaseShare = 0.95;
constexpr double kOracleTolerance = 1e-9;
constexpr double kOracleMaxSeconds = 1.0;
constexpr double kFullRankTolerance = 1e-6;
constexpr double kMonotoneSlack = 1e-9;
constexpr int kStoriesPerConfig = 500;
constexpr int kStoryLength = 5;
constexpr double kStoryMaxSeconds = 30.0;
constexpr int kHttpSessions = 50;

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << "  " << name << "  " << detail << std::endl;
  if (!pass) ++failures;
}

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void separation(const Engine& e) {
  const auto start = Clock::now();
  ModelParams mp = e.config().model;
  mp.thresholds = {4, 2, mp.thresholds.recommend};
  mp.weights = {5.0, 10.0, 10.0};
  const auto r = validate_model(e.dataset(), e.adjusted(), e.space(), e.config().neighborhood, mp);
  const double secs = since(start);
  const double ratio = r.avg_like_only / r.avg_dislike_only;
  const bool pass = r.avg_like > r.avg_dislike && ratio >= kSeparationMinRatio &&
                    std::abs(r.pearson_after) < std::abs(r.pearson_before) && secs <= kValidationMaxSeconds;
  report("degree-separation", pass,
         fmt("R+ %.2f > R- %.2f; without overlap %.2f / %.2f = %.2f (>= %.1f); |pearson| %.3f -> %.3f; %.1f s",
             r.avg_like, r.avg_dislike, r.avg_like_only, r.avg_dislike_only, ratio, kSeparationMinRatio,
             std::abs(r.pearson_before), std::abs(r.pearson_after), secs));

  const double share = r.separated_or_partial_share();
  report("best-dimension-case", share >= kMinGoodCaseShare,
         fmt("case 1/2 share %.4f (>= %.2f); cases 0..4 = %d %d %d %d %d", share, kMinGoodCaseShare,
             r.case_counts[0], r.case_counts[1], r.case_counts[2], r.case_counts[3], r.case_counts[4]));
}

void oracles() {
  const auto start = Clock::now();
  const auto cmp = checks::oracle_comparisons();
  const double secs = since(start);
  double worst = 0.0;
  int sets = 0, n = 0;
  std::string names;
  for (const auto& [name, c] : cmp) {
    worst = std::max(worst, c.max_error);
    sets += c.mismatched_sets;
    n += c.compared;
    names += name + ":" + std::to_string(c.compared) + " ";
  }
  const bool all_compared = cmp.size() == 7 && std::ranges::all_of(cmp, [](auto& kv) { return kv.second.compared > 0; });
  report("oracle-equivalence", worst <= kOracleTolerance && sets == 0 && all_compared && secs < kOracleMaxSeconds,
         fmt("max rel err %.2e over %d values (%s), %d list mismatches, %.3f s", worst, n, names.c_str(), sets, secs));
}

void svd() {
  const auto s = checks::svd_properties(8);
  report("svd-properties", s.non_increasing && s.full_rank_error < kFullRankTolerance && s.error_monotone,
         fmt("non-increasing %d, full-rank error %.2e, monotone over k=1..8 %d (k=1 %.3f, k=8 %.2e)",
             s.non_increasing, s.full_rank_error, s.error_monotone, s.errors_by_k.front(), s.errors_by_k.back()));
}

struct ContractTally {
  int stories = 0;
  int wrong_length = 0;
  int wrong_counts = 0;
  int rebalanced = 0;
  int unordered = 0;
  int thumbed_down = 0;
  int outside_familiar = 0;
  int errors = 0;
  double typicality_sum = 0.0;
  int typicality_n = 0;
};

// Zone count of the familiar (or typical) zone, recomputed here.
int preferred_quota(double pref) { return static_cast<int>(std::ceil(pref * kStoryLength - 1e-9)); }

void tally_story(const Story& s, const ThumbSets& thumbs, const Preferences& prefs, ContractTally& t) {
  ++t.stories;
  if (static_cast<int>(s.events.size()) != kStoryLength) ++t.wrong_length;
  const bool fam_axis = s.structure == StructureKind::kFamiliarToDiverse ||
                        s.structure == StructureKind::kDiverseToFamiliar;
  const auto& L = s.layout;
  int preferred = 0;
  for (const auto& ev : s.events) {
    const bool familiar = L.familiar && L.familiar->lo <= ev.projection && ev.projection <= L.familiar->hi;
    const bool typical = std::abs(ev.projection) > L.untypical_boundary;
    preferred += fam_axis ? familiar : typical;
    if (thumbs.down.contains(ev.movie)) ++t.thumbed_down;
    if (prefs.familiar == 1.0 && !familiar) ++t.outside_familiar;
    const double max_abs = std::max(std::abs(L.extent.lo), std::abs(L.extent.hi));
    t.typicality_sum += std::abs(ev.projection) / max_abs;
    ++t.typicality_n;
  }
  const int want = preferred_quota(fam_axis ? prefs.familiar : prefs.typical);
  if (preferred != want) ++t.wrong_counts;
  if (s.rebalanced) ++t.rebalanced;
  bool up = true, down = true;
  for (std::size_t j = 1; j < s.events.size(); ++j) {
    up = up && s.events[j].projection >= s.events[j - 1].projection - kMonotoneSlack;
    down = down && s.events[j].projection <= s.events[j - 1].projection + kMonotoneSlack;
  }
  if (!(s.plan.ascending ? up : down)) ++t.unordered;
}

void story_contracts(const Engine& e) {
  const auto start = Clock::now();
  const std::vector<std::pair<std::string, Preferences>> configs{
      {"f.5t.5", {0.5, 0.5}}, {"f1", {1.0, 0.5}}, {"f0", {0.0, 0.5}}, {"t.9", {0.5, 0.9}}, {"t.1", {0.5, 0.1}}};
  std::mt19937_64 rng(2024);
  std::vector<ContractTally> tallies(configs.size());
  Config config = e.config();
  config.story.length = kStoryLength;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (int j = 0; j < kStoriesPerConfig; ++j) {
      const std::size_t user = rng() % e.dataset().user_count();
      const auto nb = e.neighborhood(user);
      const auto ratings = e.rating_row(user);
      ThumbSets thumbs;
      for (int d = 0; d < 3 && !nb->recommendable.empty(); ++d)
        thumbs.down.insert(nb->recommendable[rng() % nb->recommendable.size()]);
      const MovieWeights weights;
      const StoryInputs in{e.space(), *nb, ratings, e.popularity(), thumbs, weights, config.model, config.story};
      try {
        tally_story(generate_story(in, {configs[c].second, std::nullopt, false, rng() >> 11}), thumbs,
                    configs[c].second, tallies[c]);
      } catch (const Error&) {
        ++tallies[c].errors;
      }
    }
  }
  const double secs = since(start);
  auto mean_typ = [](const ContractTally& t) { return t.typicality_sum / std::max(1, t.typicality_n); };
  bool pass = secs < kStoryMaxSeconds;
  std::string detail;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const auto& t = tallies[c];
    pass = pass && t.stories == kStoriesPerConfig && t.wrong_length == 0 && t.wrong_counts == 0 &&
           t.unordered == 0 && t.thumbed_down == 0 && t.outside_familiar == 0 && t.errors == 0;
    detail += fmt("[%s n=%d len!=%d counts!=%d (rebalanced %d) unordered %d down %d outside-fam %d errors %d] ",
                  configs[c].first.c_str(), t.stories, t.wrong_length, t.wrong_counts, t.rebalanced, t.unordered,
                  t.thumbed_down, t.outside_familiar, t.errors);
  }
  const double hi = mean_typ(tallies[3]), lo = mean_typ(tallies[4]);
  pass = pass && hi > lo;
  detail += fmt("typicality t=.9 %.3f > t=.1 %.3f; %.1f s", hi, lo, secs);
  report("story-contracts", pass, detail);
}

int rank_in(const std::vector<double>& v, std::size_t p) {
  int r = 1;
  for (std::size_t j = 0; j < v.size(); ++j) r += v[j] > v[p] || (v[j] == v[p] && j < p);
  return r;
}

std::vector<std::string> drive(Session& s, const json& script, const Engine& e) {
  std::vector<std::string> told;
  for (const auto& step : script) {
    if (step["op"] == "story") told.push_back(story_to_json(s.next_story(), e, s.state().user_id).dump());
    else if (step["op"] == "thumb") s.apply_thumb(step["movie_id"], *parse_thumb(step["thumb"].get<std::string>()));
    else s.set_preferences({step["f"], step["t"]});
  }
  return told;
}

void interaction(const Engine& e) {
  // Scripted user: the first dimension below the top that has a recommendable
  // movie inside its like range.
  const int user_id = 1;
  Session s(e, "acc", user_id, 31337);
  const auto before = s.model();
  const auto nb = s.neighborhood();
  std::optional<std::pair<std::size_t, std::size_t>> pick;
  for (std::size_t p = 0; p < before.scores.size() && !pick; ++p) {
    const auto& L = before.base_layouts[p];
    if (!L.like || rank_in(before.scores, p) == 1) continue;
    for (std::size_t j = 0; j < nb->recommendable.size(); ++j) {
      const double x = e.space().projection(nb->recommendable[j], static_cast<int>(p));
      if (L.like->contains(x) && !(L.dislike && L.dislike->contains(x)) && nb->degrees[j] > 0.5) {
        pick = std::pair{p, nb->recommendable[j]};
        break;
      }
    }
  }
  if (!pick) {
    report("interaction-causality", false, "no dimension with a recommendable movie inside its like range");
    return;
  }
  const auto [p, up_movie] = *pick;
  const int up_id = e.dataset().movie_at(up_movie).movie_id;

  json script = json::array({{{"op", "story"}}});
  s.next_story();
  s.apply_thumb(up_id, Thumb::kUp);
  script.push_back({{"op", "thumb"}, {"movie_id", up_id}, {"thumb", "up"}});
  const auto after = s.model();
  const int d_rank = rank_in(after.scores, p), dprime_rank = rank_in(after.interactive_scores, p);
  const bool rank_ok = dprime_rank <= d_rank;

  const Story second = s.next_story();
  script.push_back({{"op", "story"}});
  std::set<int> downed;
  for (const auto& ev : second.events) {
    const int id = e.dataset().movie_at(ev.movie).movie_id;
    s.apply_thumb(id, Thumb::kDown);
    script.push_back({{"op", "thumb"}, {"movie_id", id}, {"thumb", "down"}});
    downed.insert(id);
  }
  s.set_preferences({0.8, 0.3});
  script.push_back({{"op", "prefs"}, {"f", 0.8}, {"t", 0.3}});
  int reappeared = 0;
  for (int j = 0; j < 8; ++j) {
    for (const auto& ev : s.next_story().events) reappeared += downed.contains(e.dataset().movie_at(ev.movie).movie_id);
    script.push_back({{"op", "story"}});
  }

  // Byte-for-byte: drive a fresh session with the same script, and replay the log.
  Session again(e, "acc", user_id, 31337);
  Session original(e, "acc", user_id, 31337);
  const auto a = drive(original, script, e);
  const auto b = drive(again, script, e);
  std::stringstream log;
  original.write_log(log);
  bool replay_ok = true;
  try {
    const auto replayed = Session::replay(e, log);
    replay_ok = replayed->state().history.size() == original.state().history.size() &&
                story_to_json(replayed->next_story(), e, user_id).dump() ==
                    story_to_json(original.next_story(), e, user_id).dump();
  } catch (const Error& err) {
    replay_ok = false;
  }
  const bool same = a == b && a.size() == 10;
  report("interaction-causality", rank_ok && reappeared == 0 && same && replay_ok,
         fmt("dim %zu: D' rank %d vs D rank %d; thumbed-down reappearances %d; scripted re-run identical %d "
             "(%zu stories); log replay %d",
             p, dprime_rank, d_rank, reappeared, same, a.size(), replay_ok));
}

void new_user(const Engine& e) {
  const auto nb = e.neighborhood(std::nullopt);
  bool story_ok = false;
  std::string why;
  try {
    Session s(e, "new", 0, 5);
    const Story st = s.next_story();
    const auto j = story_to_json(st, e, 0);
    story_ok = st.events.size() == static_cast<std::size_t>(e.config().story.length) &&
               api_schema::check(j, [] {
                 auto schema = api_schema::story_schema();
                 schema["required"].erase(std::remove(schema["required"].begin(), schema["required"].end(), "cues"),
                                          schema["required"].end());
                 schema["required"].erase(std::remove(schema["required"].begin(), schema["required"].end(), "session_id"),
                                          schema["required"].end());
                 schema["required"].erase(std::remove(schema["required"].begin(), schema["required"].end(), "story_id"),
                                          schema["required"].end());
                 return schema;
               }()).empty();
  } catch (const std::exception& err) {
    why = err.what();
  }
  report("new-user", nb->similar_users.size() == e.dataset().user_count() && !nb->recommendable.empty() && story_ok,
         fmt("similar %zu of %zu users, recommendable %zu, story ok %d %s", nb->similar_users.size(),
             e.dataset().user_count(), nb->recommendable.size(), story_ok, why.c_str()));
}

double space_checksum(const Engine& e) {
  return e.space().movie_features.sum() + e.space().user_coords.sum() + e.adjusted().values.sum();
}

void service(const Engine& e) {
  using namespace api_schema;
  Service svc(e);
  std::vector<std::string> schema_errors;
  auto expect = [&](const std::string& what, const ApiResponse& r, int status, const json& schema) {
    if (r.status != status) schema_errors.push_back(what + ": status " + std::to_string(r.status));
    for (const auto& err : check(r.body, schema)) schema_errors.push_back(what + " " + err);
  };
  const auto created = svc.handle({"POST", "/sessions", {}, R"({"user_id": 1})"});
  expect("create", created, 201, summary_schema());
  const std::string id = created.body.value("session_id", "");
  const auto story = svc.handle({"GET", "/sessions/" + id + "/story", {}, ""});
  expect("story", story, 200, story_schema());
  const int movie = story.body["events"][0].value("movie_id", 1);
  expect("feedback",
         svc.handle({"POST", "/sessions/" + id + "/feedback", {}, json{{"movie_id", movie}, {"thumb", "up"}}.dump()}),
         200, summary_schema());
  expect("preferences", svc.handle({"POST", "/sessions/" + id + "/preferences", {}, R"({"f": 0.7})"}), 200,
         summary_schema());
  expect("dimension", svc.handle({"GET", "/sessions/" + id + "/dimension/0", {}, ""}), 200, dimension_schema());
  expect("movie", svc.handle({"GET", "/movies/1", {{"user", "1"}}, ""}), 200, movie_schema());
  expect("history", svc.handle({"GET", "/users/1/history", {}, ""}), 200, history_schema());
  expect("error", svc.handle({"GET", "/movies/999999", {}, ""}), 404, error_schema());
  const auto events = svc.handle({"GET", "/sessions/" + id + "/events", {}, ""});
  std::istringstream lines(events.raw);
  for (std::string line; std::getline(lines, line);)
    for (const auto& err : check(json::parse(line), event_line_schema())) schema_errors.push_back("events " + err);

  // Concurrency over HTTP.
  const double checksum = space_checksum(e);
  httplib::Server server;
  svc.bind(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  std::vector<std::vector<std::string>> streams(kHttpSessions);
  std::vector<int> users(kHttpSessions);
  {
    std::vector<std::jthread> clients;
    for (int c = 0; c < kHttpSessions; ++c) {
      clients.emplace_back([&, c] {
        httplib::Client client("127.0.0.1", port);
        users[c] = 1 + (c * 37) % static_cast<int>(e.dataset().user_count());
        const auto r = client.Post("/sessions", json{{"user_id", users[c]}, {"seed", 1000 + c}}.dump(),
                                   "application/json");
        if (!r || r->status != 201) return;
        const std::string sid = json::parse(r->body)["session_id"];
        for (int j = 0; j < 3; ++j) {
          const auto s = client.Get("/sessions/" + sid + "/story");
          if (!s || s->status != 200) return;
          auto body = json::parse(s->body);
          std::string ids;
          for (const auto& ev : body["events"]) ids += std::to_string(ev["movie_id"].get<int>()) + ",";
          streams[c].push_back(ids);
        }
      });
    }
  }
  server.stop();
  listener.join();

  int complete = 0, contaminated = 0;
  std::set<std::vector<std::string>> distinct;
  for (int c = 0; c < kHttpSessions; ++c) {
    if (streams[c].size() != 3) continue;
    ++complete;
    distinct.insert(streams[c]);
    // The same user and seed alone must tell the same stream.
    Session alone(e, "alone", users[c], 1000 + c);
    std::vector<std::string> solo;
    for (int j = 0; j < 3; ++j) {
      std::string ids;
      for (const auto& ev : alone.next_story().events) ids += std::to_string(e.dataset().movie_at(ev.movie).movie_id) + ",";
      solo.push_back(ids);
    }
    contaminated += solo != streams[c];
  }
  const bool unchanged = space_checksum(e) == checksum;
  std::string first_error = schema_errors.empty() ? "" : "; first: " + schema_errors.front();
  report("service-conformance",
         schema_errors.empty() && complete == kHttpSessions && contaminated == 0 &&
             static_cast<int>(distinct.size()) == kHttpSessions && unchanged,
         fmt("schema errors %zu%s; %d/%d sessions complete, %zu distinct streams, %d contaminated, engine unchanged %d",
             schema_errors.size(), first_error.c_str(), complete, kHttpSessions, distinct.size(), contaminated,
             unchanged));
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path data = argc > 1 ? argv[1] : LSMREC_DATA_DIR;
  std::unique_ptr<Engine> engine;
  try {
    const auto start = Clock::now();
    engine = Engine::build(load_movielens(data), Config{});
    std::cout << "loaded " << data.string() << " and factorized in " << since(start) << " s" << std::endl;
  } catch (const std::exception& err) {
    std::cout << "FAIL  dataset  cannot load MovieLens 100K from " << data.string() << ": " << err.what() << std::endl;
    return 1;
  }
  separation(*engine);
  oracles();
  svd();
  story_contracts(*engine);
  interaction(*engine);
  new_user(*engine);
  service(*engine);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
