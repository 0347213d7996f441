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


#include "lsmrec/service.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <thread>
#include <vector>

#include <httplib.h>

#include "lsmrec/story_json.hpp"

namespace lsmrec {
namespace {

using nlohmann::json;

ApiResponse ok(json body, int status = 200) { return {status, std::move(body), {}, "application/json"}; }

ApiResponse error_response(int status, std::string_view code, const std::string& message) {
  return {status, json{{"error", {{"code", code}, {"message", message}}}}, {}, "application/json"};
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(path);
  while (std::getline(in, part, '/')) {
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

int parse_int(const std::string& text, const char* what) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad ") + what + ": " + text);
  }
  return value;
}

json parse_body(const std::string& body) {
  json parsed = json::parse(body.empty() ? "{}" : body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "request body must be a JSON object");
  }
  return parsed;
}

double number_field(const json& body, const char* key, double fallback) {
  if (!body.contains(key)) return fallback;
  if (!body[key].is_number()) throw Error(ErrorCode::kInvalidArgument, std::string(key) + " must be a number");
  return body[key].get<double>();
}

int int_field(const json& body, const char* key) {
  if (!body.contains(key)) throw Error(ErrorCode::kInvalidArgument, std::string("missing ") + key);
  if (!body[key].is_number_integer()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(key) + " must be an integer");
  }
  return body[key].get<int>();
}

json id_list(const Engine& engine, const std::set<std::size_t>& movies) {
  json out = json::array();
  for (std::size_t m : movies) out.push_back(engine.dataset().movie_at(m).movie_id);
  return out;
}

json session_summary(const Engine& engine, const SessionState& s) {
  json weights = json::object();
  for (const auto& [movie, w] : s.weights) {
    weights[std::to_string(engine.dataset().movie_at(movie).movie_id)] = w;
  }
  return {
      {"session_id", s.session_id},
      {"user_id", s.user_id},
      {"seed", s.seed},
      {"preferences", {{"f", s.preferences.familiar}, {"t", s.preferences.typical}}},
      {"thumbs_up", id_list(engine, s.thumbs.up)},
      {"thumbs_down", id_list(engine, s.thumbs.down)},
      {"weights", weights},
      {"stories_told", s.history.size()},
  };
}

json cue(int set, std::string_view step, std::optional<std::size_t> event = std::nullopt) {
  json c{{"set", set}, {"step", step}};
  if (event) c["event"] = *event;
  return c;
}

json cue_list(const Story& story) {
  json cues = json::array();
  for (const char* step : {"history", "color_code", "recommendation_degree", "liked_zone"}) {
    cues.push_back(cue(1, step));
  }
  cues.push_back(cue(2, "narrative"));
  if (story.anchor_left) cues.push_back(cue(2, "anchor_left"));
  if (story.anchor_right) cues.push_back(cue(2, "anchor_right"));
  for (std::size_t j = 0; j < story.events.size(); ++j) {
    cues.push_back(cue(3, "focus", j));
    cues.push_back(cue(3, "level1", j));
    cues.push_back(cue(3, "level2", j));
    cues.push_back(cue(3, "level3", j));
  }
  for (std::size_t j = 0; j < cues.size(); ++j) cues[j]["seq"] = j;
  return cues;
}

template <typename T>
std::size_t rank_of(std::span<const T> values, std::size_t index) {
  std::size_t rank = 1;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] > values[index] || (values[j] == values[index] && j < index)) ++rank;
  }
  return rank;
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kPoolExhausted: return 409;
    case ErrorCode::kPrecondition: return 409;
    case ErrorCode::kDataFormat:
    case ErrorCode::kIo:
    case ErrorCode::kVersionMismatch:
    case ErrorCode::kCorrupt:
    case ErrorCode::kNumerical: return 500;
  }
  return 500;
}

Service::Service(const Engine& engine) : engine_(engine) {}

std::shared_ptr<Session> Service::find_session(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::kNotFound, "unknown session " + id);
  return it->second;
}

std::size_t Service::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

ApiResponse Service::handle(const ApiRequest& request) {
  try {
    const auto parts = split_path(request.path);
    const auto& m = request.method;
    const std::size_t n = parts.size();
    auto is = [&](std::size_t size, std::initializer_list<const char*> fixed) {
      if (n != size) return false;
      std::size_t j = 0;
      for (const char* f : fixed) {
        if (f != nullptr && parts[j] != f) return false;
        ++j;
      }
      return true;
    };

    if (m == "POST" && is(1, {"sessions"})) return create_session(parse_body(request.body));
    if (n >= 3 && parts[0] == "sessions") {
      if (m == "GET" && is(3, {"sessions", nullptr, "story"})) return story(*find_session(parts[1]));
      if (m == "POST" && is(3, {"sessions", nullptr, "feedback"})) {
        return feedback(*find_session(parts[1]), parse_body(request.body));
      }
      if (m == "POST" && is(3, {"sessions", nullptr, "preferences"})) {
        return preferences(*find_session(parts[1]), parse_body(request.body));
      }
      if (m == "GET" && is(3, {"sessions", nullptr, "events"})) return events(*find_session(parts[1]));
      if (m == "GET" && is(4, {"sessions", nullptr, "dimension", nullptr})) {
        return dimension_view(*find_session(parts[1]), parts[3]);
      }
    }
    if (m == "GET" && is(2, {"movies", nullptr})) return movie(parts[1], request);
    if (m == "GET" && is(3, {"users", nullptr, "history"})) return history(parts[1]);
    return error_response(404, "not_found", "no route for " + m + " " + request.path);
  } catch (const Error& e) {
    return error_response(http_status(e.code()), to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

ApiResponse Service::create_session(const json& body) {
  const int user_id = int_field(body, "user_id");
  std::uint64_t seed = 0;
  const std::uint64_t number = next_session_.fetch_add(1);
  if (body.contains("seed")) {
    if (!body["seed"].is_number_unsigned() && !body["seed"].is_number_integer()) {
      throw Error(ErrorCode::kInvalidArgument, "seed must be a non-negative integer");
    }
    if (body["seed"].is_number_integer() && body["seed"].get<std::int64_t>() < 0) {
      throw Error(ErrorCode::kInvalidArgument, "seed must be a non-negative integer");
    }
    seed = body["seed"].get<std::uint64_t>();
  } else {
    seed = engine_.config().seed + number * 0x9e3779b97f4a7c15ULL;
  }
  const std::string id = "s" + std::to_string(number);
  auto session = std::make_shared<Session>(engine_, id, user_id, seed);
  {
    std::lock_guard lock(mutex_);
    sessions_.emplace(id, session);
  }
  json out = session_summary(engine_, session->state());
  const Preferences defaults;
  out["defaults"] = {{"f", defaults.familiar}, {"t", defaults.typical}};
  return ok(std::move(out), 201);
}

ApiResponse Service::story(Session& session) {
  const Story story = session.next_story();
  const auto state = session.state();
  json out = story_to_json(story, engine_, state.user_id);
  out["session_id"] = state.session_id;
  out["story_id"] = state.session_id + "-" + std::to_string(state.history.size());
  out["cues"] = cue_list(story);
  return ok(std::move(out));
}

ApiResponse Service::feedback(Session& session, const json& body) {
  const int movie_id = int_field(body, "movie_id");
  if (!body.contains("thumb") || !body["thumb"].is_string()) {
    throw Error(ErrorCode::kInvalidArgument, "thumb must be \"up\" or \"down\"");
  }
  const auto thumb = parse_thumb(body["thumb"].get<std::string>());
  if (!thumb) throw Error(ErrorCode::kInvalidArgument, "thumb must be \"up\" or \"down\"");
  const ThumbResult result = session.apply_thumb(movie_id, *thumb);
  json out = session_summary(engine_, session.state());
  out["movie_id"] = result.movie_id;
  out["thumb"] = to_string(result.thumb);
  out["weight"] = result.weight;
  out["group"] = to_string(result.group);
  return ok(std::move(out));
}

ApiResponse Service::preferences(Session& session, const json& body) {
  const auto current = session.state().preferences;
  const Preferences next{number_field(body, "f", current.familiar),
                         number_field(body, "t", current.typical)};
  const bool changed = session.set_preferences(next);
  json out = session_summary(engine_, session.state());
  out["changed"] = changed;
  return ok(std::move(out));
}

ApiResponse Service::dimension_view(Session& session, const std::string& p_text) {
  const int p = parse_int(p_text, "dimension");
  if (p < 0 || p >= engine_.space().k) {
    throw Error(ErrorCode::kNotFound, "dimension " + p_text + " out of range");
  }
  const auto model = session.model();
  const auto nb = session.neighborhood();
  const auto pi = static_cast<std::size_t>(p);
  const auto& layout = model.layouts[pi];
  const auto& t = model.groups.thresholds;

  json nodes = json::array();
  for (std::size_t i = 0; i < engine_.dataset().movie_count(); ++i) {
    const MovieGroup g = model.groups.group_of[i];
    const auto degree = nb->degree(i);
    nodes.push_back({
        {"movie_id", engine_.dataset().movie_at(i).movie_id},
        {"projection", round6(engine_.space().projection(i, p))},
        {"group", to_string(g)},
        {"color", group_color(g)},
        {"degree", degree ? json(round6(*degree)) : json(nullptr)},
    });
  }
  json color_key = json::object();
  for (MovieGroup g : {MovieGroup::kLike, MovieGroup::kDislike, MovieGroup::kNeutral,
                       MovieGroup::kRecommendable, MovieGroup::kNotRecommendable}) {
    color_key[std::string(to_string(g))] = group_color(g);
  }
  const auto& selected = model.selection.dimensions;
  return ok({
      {"session_id", session.state().session_id},
      {"dimension", p},
      {"score", model.scores[pi]},
      {"interactive_score", model.interactive_scores[pi]},
      {"score_rank", rank_of<double>(model.scores, pi)},
      {"interactive_rank", rank_of<double>(model.interactive_scores, pi)},
      {"selected", std::ranges::find(selected, p) != selected.end()},
      {"case", static_cast<int>(classify_layout(layout))},
      {"thresholds", {{"tau_plus", t.like}, {"tau_minus", t.dislike}, {"tau_r", t.recommend}}},
      {"zones", zones_json(layout)},
      {"color_key", color_key},
      {"nodes", nodes},
  });
}

ApiResponse Service::movie(const std::string& id, const ApiRequest& request) const {
  std::optional<int> user_id;
  if (const auto it = request.query.find("user"); it != request.query.end()) {
    user_id = parse_int(it->second, "user id");
  }
  const DetailView v = engine_.movie_details(parse_int(id, "movie id"), user_id);
  return ok({
      {"movie_id", v.movie_id},
      {"title", v.title},
      {"genres", v.genres},
      {"user_rating", v.user_rating ? json(*v.user_rating) : json(nullptr)},
      {"average_rating", v.average_rating ? json(*v.average_rating) : json(nullptr)},
      {"popularity", v.popularity},
      {"poster_key", v.poster_key},
  });
}

ApiResponse Service::history(const std::string& id) const {
  const int user_id = parse_int(id, "user id");
  const auto user = engine_.resolve_user(user_id);
  std::vector<const RatingRecord*> rated;
  if (user) {
    for (const auto& r : engine_.dataset().ratings()) {
      if (r.user_id == user_id) rated.push_back(&r);
    }
  }
  std::ranges::stable_sort(rated, {}, &RatingRecord::timestamp);
  json items = json::array();
  for (const auto* r : rated) {
    const auto& movie = engine_.dataset().movie_at(*engine_.dataset().movie_index(r->movie_id));
    items.push_back({{"movie_id", r->movie_id},
                     {"title", movie.title},
                     {"poster_key", "movie-" + std::to_string(r->movie_id)},
                     {"rating", r->rating},
                     {"timestamp", r->timestamp}});
  }
  return ok({{"user_id", user_id}, {"count", items.size()}, {"ratings", items}});
}

ApiResponse Service::events(Session& session) const {
  std::ostringstream out;
  session.write_log(out);
  ApiResponse r;
  r.raw = out.str();
  r.content_type = "application/x-ndjson";
  return r;
}

void Service::bind(httplib::Server& server) {
  server.new_task_queue = [] {
    return new httplib::ThreadPool(std::max(32u, std::thread::hardware_concurrency()));
  };
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest request{req.method, req.path, {}, req.body};
    for (const auto& [k, v] : req.params) request.query.emplace(k, v);
    const ApiResponse response = handle(request);
    res.status = response.status;
    if (response.raw.empty() && response.content_type == "application/json") {
      res.set_content(response.body.dump(), "application/json");
    } else {
      res.set_content(response.raw, response.content_type);
    }
  };
  server.Get(R"(.*)", route);
  server.Post(R"(.*)", route);
  server.Put(R"(.*)", route);
  server.Delete(R"(.*)", route);
  server.Patch(R"(.*)", route);
}

}  // namespace lsmrec
