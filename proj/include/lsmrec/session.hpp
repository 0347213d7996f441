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
#include <deque>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "lsmrec/engine.hpp"
#include "lsmrec/lsm.hpp"
#include "lsmrec/story.hpp"

namespace lsmrec {

enum class Thumb { kUp, kDown };
std::string_view to_string(Thumb thumb);
std::optional<Thumb> parse_thumb(std::string_view text);

// What the history keeps of a told story.
struct StoryRecord {
  std::uint64_t seed = 0;
  int dimension = 0;
  std::vector<int> movie_ids;
};

inline constexpr std::size_t kHistoryLimit = 100;

struct SessionState {
  std::string session_id;
  int user_id = 0;
  std::optional<std::size_t> user;  // nullopt: zero-history user
  Preferences preferences;
  ThumbSets thumbs;
  MovieWeights weights;
  std::deque<StoryRecord> history;  // oldest first
  std::uint64_t seed = 0;
  bool input_since_story = false;
  std::int64_t created_ms = 0;
  std::int64_t updated_ms = 0;
};

struct ThumbResult {
  int movie_id = 0;
  Thumb thumb = Thumb::kUp;
  double weight = 1.0;
  MovieGroup group = MovieGroup::kNeutral;
};

// One line of the session event log.
struct LogRecord {
  std::string type;  // create | preferences | thumb | story
  std::string payload;  // compact JSON object
  std::int64_t timestamp_ms = 0;
};

// Interactive state of one user. Every public member locks the session, so
// calls on one session are serialized while distinct sessions run freely.
class Session {
 public:
  Session(const Engine& engine, std::string session_id, int user_id, std::uint64_t seed);

  SessionState state() const;
  const Engine& engine() const { return engine_; }

  // False when (f, t) already had these values; nothing is recorded then.
  bool set_preferences(const Preferences& prefs);
  ThumbResult apply_thumb(int movie_id, Thumb thumb);
  // Throws Error(kPoolExhausted) and leaves the session unchanged on failure.
  Story next_story();

  // The model the next story will be built from.
  UserModel model() const;
  std::shared_ptr<const UserNeighborhood> neighborhood() const;

  std::vector<LogRecord> log() const;
  void write_log(std::ostream& out) const;
  // Rebuilds a session from a written log, re-telling every recorded story.
  // Throws Error(kCorrupt) when a re-told story differs from the record.
  static std::unique_ptr<Session> replay(const Engine& engine, std::istream& in);

 private:
  UserModel model_locked() const;
  void record(std::string type, std::string payload);

  const Engine& engine_;
  mutable std::mutex mutex_;
  SessionState state_;
  std::mt19937_64 rng_;
  std::vector<int> ratings_;
  std::vector<LogRecord> log_;
};

}  // namespace lsmrec
