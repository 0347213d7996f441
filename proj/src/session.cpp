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


#include "lsmrec/session.hpp"

#include <chrono>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "lsmrec/error.hpp"

namespace lsmrec {
namespace {

using nlohmann::json;

std::int64_t now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

}  // namespace

std::string_view to_string(Thumb thumb) { return thumb == Thumb::kUp ? "up" : "down"; }

std::optional<Thumb> parse_thumb(std::string_view text) {
  if (text == "up") return Thumb::kUp;
  if (text == "down") return Thumb::kDown;
  return std::nullopt;
}

Session::Session(const Engine& engine, std::string session_id, int user_id, std::uint64_t seed)
    : engine_(engine), rng_(seed) {
  state_.session_id = std::move(session_id);
  state_.user_id = user_id;
  state_.user = engine.resolve_user(user_id);
  state_.seed = seed;
  state_.created_ms = state_.updated_ms = now_ms();
  ratings_ = engine.rating_row(state_.user);
  record("create", json{{"session_id", state_.session_id}, {"user_id", user_id}, {"seed", seed}}.dump());
}

SessionState Session::state() const {
  std::lock_guard lock(mutex_);
  return state_;
}

void Session::record(std::string type, std::string payload) {
  state_.updated_ms = now_ms();
  log_.push_back({std::move(type), std::move(payload), state_.updated_ms});
}

bool Session::set_preferences(const Preferences& prefs) {
  check_preferences(prefs);
  std::lock_guard lock(mutex_);
  if (prefs == state_.preferences) return false;
  state_.preferences = prefs;
  state_.input_since_story = true;
  record("preferences", json{{"f", prefs.familiar}, {"t", prefs.typical}}.dump());
  return true;
}

ThumbResult Session::apply_thumb(int movie_id, Thumb thumb) {
  const std::size_t movie = engine_.resolve_movie(movie_id);
  std::lock_guard lock(mutex_);
  auto& thumbs = state_.thumbs;
  if (thumb == Thumb::kUp) {
    thumbs.down.erase(movie);
    thumbs.up.insert(movie);
  } else {
    thumbs.up.erase(movie);
    thumbs.down.insert(movie);
  }
  const double weight = weight_of(state_.weights, movie) * 2.0;
  state_.weights[movie] = weight;
  state_.input_since_story = true;
  record("thumb", json{{"movie_id", movie_id}, {"thumb", to_string(thumb)}}.dump());
  return {movie_id, thumb, weight, model_locked().groups.group_of[movie]};
}

std::shared_ptr<const UserNeighborhood> Session::neighborhood() const {
  return engine_.neighborhood(state_.user);
}

UserModel Session::model() const {
  std::lock_guard lock(mutex_);
  return model_locked();
}

UserModel Session::model_locked() const {
  const auto nb = engine_.neighborhood(state_.user);
  return build_user_model(engine_.space(), *nb, ratings_, state_.thumbs, state_.weights,
                          engine_.config().model);
}

Story Session::next_story() {
  std::lock_guard lock(mutex_);
  const auto nb = engine_.neighborhood(state_.user);
  const auto& config = engine_.config();
  const StoryInputs inputs{engine_.space(),     *nb,           ratings_,     engine_.popularity(),
                           state_.thumbs,       state_.weights, config.model, config.story};
  StoryRequest request;
  request.preferences = state_.preferences;
  if (!state_.history.empty()) request.previous_dimension = state_.history.back().dimension;
  request.restart_rotation = state_.input_since_story;
  // 53 bits keep the seed exact in JSON numbers.
  auto rng = rng_;
  request.seed = rng() >> 11;

  Story story = generate_story(inputs, request);
  rng_ = rng;

  StoryRecord rec{story.seed, story.dimension, {}};
  for (const auto& ev : story.events) {
    rec.movie_ids.push_back(engine_.dataset().movie_at(ev.movie).movie_id);
  }
  record("story", json{{"seed", rec.seed}, {"dimension", rec.dimension}, {"movie_ids", rec.movie_ids}}.dump());
  state_.history.push_back(std::move(rec));
  if (state_.history.size() > kHistoryLimit) state_.history.pop_front();
  state_.input_since_story = false;
  return story;
}

std::vector<LogRecord> Session::log() const {
  std::lock_guard lock(mutex_);
  return log_;
}

void Session::write_log(std::ostream& out) const {
  for (const auto& r : log()) {
    out << json{{"type", r.type}, {"payload", json::parse(r.payload)}, {"timestamp", r.timestamp_ms}}.dump()
        << '\n';
  }
}

std::unique_ptr<Session> Session::replay(const Engine& engine, std::istream& in) {
  std::unique_ptr<Session> session;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kCorrupt, "event log line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
      const auto type = rec.at("type").get<std::string>();
      const auto& p = rec.at("payload");
      if (type == "create") {
        if (session) fail("second create record");
        session = std::make_unique<Session>(engine, p.at("session_id").get<std::string>(),
                                            p.at("user_id").get<int>(), p.at("seed").get<std::uint64_t>());
        continue;
      }
      if (!session) fail("log must start with a create record");
      if (type == "preferences") {
        session->set_preferences({p.at("f").get<double>(), p.at("t").get<double>()});
      } else if (type == "thumb") {
        const auto thumb = parse_thumb(p.at("thumb").get<std::string>());
        if (!thumb) fail("bad thumb value");
        session->apply_thumb(p.at("movie_id").get<int>(), *thumb);
      } else if (type == "story") {
        session->next_story();
        const auto& told = session->state_.history.back();
        if (told.seed != p.at("seed").get<std::uint64_t>() ||
            told.dimension != p.at("dimension").get<int>() ||
            told.movie_ids != p.at("movie_ids").get<std::vector<int>>()) {
          fail("replayed story differs from the record");
        }
      } else {
        fail("unknown record type " + type);
      }
    } catch (const json::exception& e) {
      fail(e.what());
    }
  }
  if (!session) throw Error(ErrorCode::kCorrupt, "event log has no create record");
  return session;
}

}  // namespace lsmrec
