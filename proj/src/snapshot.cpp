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


#include "lsmrec/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>

#include "lsmrec/error.hpp"

namespace lsmrec {
namespace {

static_assert(std::endian::native == std::endian::little, "snapshot encoding assumes little-endian");

constexpr std::string_view kMagic = "LSMRSNAP";

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

class Writer {
 public:
  template <typename T>
  void put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    char raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    buf_.append(raw, sizeof(T));
  }
  void put_string(std::string_view s) {
    put<std::uint64_t>(s.size());
    buf_.append(s);
  }
  template <typename T>
  void put_optional(const std::optional<T>& v) {
    put<std::uint8_t>(v.has_value());
    if constexpr (std::is_same_v<T, std::string>) {
      put_string(v.value_or(std::string{}));
    } else {
      put<T>(v.value_or(T{}));
    }
  }
  void put_matrix(const Matrix& m) {
    put<std::int64_t>(m.rows());
    put<std::int64_t>(m.cols());
    buf_.append(reinterpret_cast<const char*>(m.data()),
                static_cast<std::size_t>(m.size()) * sizeof(double));
  }
  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::string get_string() {
    const auto n = get<std::uint64_t>();
    need(n);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  template <typename T>
  std::optional<T> get_optional() {
    const bool present = get<std::uint8_t>() != 0;
    T value;
    if constexpr (std::is_same_v<T, std::string>) {
      value = get_string();
    } else {
      value = get<T>();
    }
    return present ? std::optional<T>(std::move(value)) : std::nullopt;
  }
  Matrix get_matrix() {
    const auto rows = get<std::int64_t>();
    const auto cols = get<std::int64_t>();
    if (rows < 0 || cols < 0) throw Error(ErrorCode::kCorrupt, "negative matrix shape in snapshot");
    const auto n = static_cast<std::size_t>(rows * cols);
    need(n * sizeof(double));
    Matrix m(rows, cols);
    std::memcpy(m.data(), bytes_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
    return m;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorCode::kCorrupt, "snapshot truncated");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_snapshot(const RatingDataset& ds, const LatentSpace& space,
                   const std::filesystem::path& path) {
  Writer w;
  w.put<std::uint64_t>(ds.user_count());
  for (const auto& u : ds.users()) {
    w.put<std::int32_t>(u.user_id);
    w.put_optional(u.age);
    w.put_optional(u.gender);
    w.put_optional(u.occupation);
  }
  w.put<std::uint64_t>(ds.movie_count());
  for (const auto& m : ds.movies()) {
    w.put<std::int32_t>(m.movie_id);
    w.put_string(m.title);
    w.put_optional(m.release_year);
    w.put_string(m.genre_flags);
    w.put<std::uint64_t>(m.genres.size());
    for (const auto& g : m.genres) w.put_string(g);
  }
  w.put<std::uint64_t>(ds.rating_count());
  for (const auto& r : ds.ratings()) {
    w.put<std::int32_t>(r.user_id);
    w.put<std::int32_t>(r.movie_id);
    w.put<std::int32_t>(r.rating);
    w.put<std::int64_t>(r.timestamp);
  }
  w.put<std::int32_t>(space.k);
  w.put_matrix(space.user_features);
  w.put_matrix(space.singular_values);
  w.put_matrix(space.movie_features);
  w.put_matrix(space.user_coords);

  const auto& payload = w.bytes();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write snapshot: " + path.string());
  Writer header;
  header.put<std::uint32_t>(kSnapshotVersion);
  header.put<std::uint64_t>(payload.size());
  out.write(kMagic.data(), static_cast<std::streamsize>(kMagic.size()));
  out.write(header.bytes().data(), static_cast<std::streamsize>(header.bytes().size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  Writer trailer;
  trailer.put<std::uint64_t>(fnv1a(payload));
  out.write(trailer.bytes().data(), static_cast<std::streamsize>(trailer.bytes().size()));
  if (!out) throw Error(ErrorCode::kIo, "failed writing snapshot: " + path.string());
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "snapshot not found: " + path.string());
  const std::string file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string_view bytes(file);

  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    throw Error(ErrorCode::kVersionMismatch, "not a snapshot file (bad magic header): " + path.string());
  }
  Reader head(bytes.substr(kMagic.size()));
  const auto version = head.get<std::uint32_t>();
  if (version != kSnapshotVersion) {
    throw Error(ErrorCode::kVersionMismatch, "snapshot version " + std::to_string(version) +
                                                 ", expected " + std::to_string(kSnapshotVersion));
  }
  const auto size = head.get<std::uint64_t>();
  const std::size_t offset = kMagic.size() + sizeof(std::uint32_t) + sizeof(std::uint64_t);
  if (bytes.size() != offset + size + sizeof(std::uint64_t)) {
    throw Error(ErrorCode::kCorrupt, "snapshot size mismatch");
  }
  const auto payload = bytes.substr(offset, size);
  Reader tail(bytes.substr(offset + size));
  if (tail.get<std::uint64_t>() != fnv1a(payload)) {
    throw Error(ErrorCode::kCorrupt, "snapshot checksum mismatch");
  }

  Reader r(payload);
  std::vector<UserRecord> users(r.get<std::uint64_t>());
  for (auto& u : users) {
    u.user_id = r.get<std::int32_t>();
    u.age = r.get_optional<int>();
    u.gender = r.get_optional<std::string>();
    u.occupation = r.get_optional<std::string>();
  }
  std::vector<MovieRecord> movies(r.get<std::uint64_t>());
  for (auto& m : movies) {
    m.movie_id = r.get<std::int32_t>();
    m.title = r.get_string();
    m.release_year = r.get_optional<int>();
    m.genre_flags = r.get_string();
    m.genres.resize(r.get<std::uint64_t>());
    for (auto& g : m.genres) g = r.get_string();
  }
  std::vector<RatingRecord> ratings(r.get<std::uint64_t>());
  for (auto& rec : ratings) {
    rec.user_id = r.get<std::int32_t>();
    rec.movie_id = r.get<std::int32_t>();
    rec.rating = r.get<std::int32_t>();
    rec.timestamp = r.get<std::int64_t>();
  }

  Snapshot snap;
  snap.space.k = r.get<std::int32_t>();
  snap.space.user_features = r.get_matrix();
  snap.space.singular_values = r.get_matrix();
  snap.space.movie_features = r.get_matrix();
  snap.space.user_coords = r.get_matrix();
  if (!r.done()) throw Error(ErrorCode::kCorrupt, "trailing bytes in snapshot payload");
  snap.dataset = RatingDataset(std::move(users), std::move(movies), std::move(ratings));
  return snap;
}

}  // namespace lsmrec
