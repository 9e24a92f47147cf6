/*
 * Copyright (C) 2026 The ODBR Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "odbr/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <mutex>
#include <sstream>

#include <json.hpp>

namespace odbr {
namespace fs = std::filesystem;

namespace {

std::optional<std::string> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw StoreIoError("read failed: " + path.string());
  return ss.str();
}

std::optional<std::uint64_t> parse_revision(std::string_view text) {
  while (!text.empty() && (text.back() == '\n' || text.back() == ' ')) text.remove_suffix(1);
  std::uint64_t n = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (ec != std::errc{} || p != text.data() + text.size() || text.empty()) return std::nullopt;
  return n;
}

// Cross-process exclusion on one document directory.
class FileLock {
 public:
  explicit FileLock(const fs::path& path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw StoreIoError("cannot open lock " + path.string());
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw StoreIoError("cannot lock " + path.string());
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

std::atomic<std::uint64_t> temp_counter{0};

}  // namespace

struct FileStore::Locks {
  std::mutex table_mutex;
  std::map<std::string, std::shared_ptr<std::mutex>> by_id;

  std::shared_ptr<std::mutex> for_id(const std::string& id) {
    std::lock_guard lock(table_mutex);
    auto& m = by_id[id];
    if (!m) m = std::make_shared<std::mutex>();
    return m;
  }
};

FileStore::FileStore(fs::path root) : root_(std::move(root)), locks_(std::make_unique<Locks>()) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw StoreIoError("cannot create store root " + root_.string() + ": " + ec.message());
}

FileStore::~FileStore() = default;

void FileStore::set_fault_hook(FaultHook hook) { fault_hook_ = std::move(hook); }

bool FileStore::valid_id(std::string_view id) {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
           c == '.';
  });
}

bool FileStore::valid_attachment_name(std::string_view name) { return valid_id(name); }

void FileStore::commit(const fs::path& target, std::string_view bytes) {
  const fs::path temp =
      target.string() + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(temp_counter.fetch_add(1));
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreIoError("cannot create " + temp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw StoreIoError("short write to " + temp.string());
  }
  if (fault_hook_) fault_hook_(temp, target);
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp, ec);
    throw StoreIoError("cannot rename into " + target.string());
  }
}

std::uint64_t FileStore::revision(const std::string& id) const {
  if (!valid_id(id)) return 0;
  const auto text = slurp(dir(id) / "rev");
  if (!text) return 0;
  const auto n = parse_revision(*text);
  if (!n) throw StoreIoError("corrupt revision pointer for " + id);
  return *n;
}

std::uint64_t FileStore::put(const std::string& id, std::string_view json, std::uint64_t expected_revision) {
  if (!valid_id(id)) throw Error("invalid document id '" + id + "'");
  auto mutex = locks_->for_id(id);
  std::lock_guard guard(*mutex);
  std::error_code ec;
  fs::create_directories(dir(id) / "revs", ec);
  if (ec) throw StoreIoError("cannot create " + (dir(id) / "revs").string() + ": " + ec.message());
  FileLock flock(dir(id) / ".lock");

  const std::uint64_t current = revision(id);
  if (current != expected_revision) {
    if (current == 0) throw NotFoundError("no document " + id);
    throw ConflictError("revision conflict on " + id + ": expected " + std::to_string(expected_revision) +
                            ", current " + std::to_string(current),
                        current);
  }
  const std::uint64_t next = current + 1;
  commit(dir(id) / "revs" / (std::to_string(next) + ".json"), json);
  commit(dir(id) / "rev", std::to_string(next) + "\n");
  return next;
}

std::optional<StoredDocument> FileStore::get(const std::string& id) const {
  const std::uint64_t rev = revision(id);
  if (rev == 0) return std::nullopt;
  auto text = slurp(dir(id) / "revs" / (std::to_string(rev) + ".json"));
  if (!text) throw StoreIoError("revision " + std::to_string(rev) + " of " + id + " is missing");
  StoredDocument doc{id, rev, std::move(*text), {}};
  std::error_code ec;
  for (fs::directory_iterator it(dir(id) / "attachment-meta", ec), end; !ec && it != end; it.increment(ec)) {
    const auto file = it->path().filename().string();
    if (file.size() <= 5 || file.compare(file.size() - 5, 5, ".json") != 0) continue;
    const auto meta = slurp(it->path());
    if (!meta) continue;
    const auto j = nlohmann::json::parse(*meta, nullptr, false);
    if (j.is_discarded()) throw StoreIoError("corrupt attachment metadata " + it->path().string());
    doc.attachments[file.substr(0, file.size() - 5)] = {j.value("content_type", ""), j.value("revision", 0ull)};
  }
  return doc;
}

std::vector<std::string> FileStore::ids() const {
  std::vector<std::string> out;
  std::error_code ec;
  for (fs::directory_iterator it(root_, ec), end; !ec && it != end; it.increment(ec)) {
    const auto name = it->path().filename().string();
    if (valid_id(name) && revision(name) > 0) out.push_back(name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t FileStore::put_attachment(const std::string& id, const std::string& name, std::string_view bytes,
                                        const std::string& content_type) {
  if (!valid_attachment_name(name)) throw Error("invalid attachment name '" + name + "'");
  if (revision(id) == 0) throw NotFoundError("no document " + id);
  auto mutex = locks_->for_id(id);
  std::lock_guard guard(*mutex);
  FileLock flock(dir(id) / ".lock");

  const std::uint64_t rev = revision(id);
  const fs::path meta_path = dir(id) / "attachment-meta" / (name + ".json");
  if (const auto meta = slurp(meta_path)) {
    const auto j = nlohmann::json::parse(*meta, nullptr, false);
    if (!j.is_discarded() && j.value("revision", 0ull) == rev) {
      throw ConflictError("attachment " + name + " already written at revision " + std::to_string(rev), rev);
    }
  }
  std::error_code ec;
  fs::create_directories(dir(id) / "attachments", ec);
  fs::create_directories(dir(id) / "attachment-meta", ec);
  if (ec) throw StoreIoError("cannot create attachment directories for " + id);
  commit(dir(id) / "attachments" / name, bytes);
  commit(meta_path, nlohmann::json{{"content_type", content_type}, {"revision", rev}}.dump());
  return rev;
}

std::optional<StoredAttachment> FileStore::get_attachment(const std::string& id, const std::string& name) const {
  if (!valid_id(id) || !valid_attachment_name(name)) return std::nullopt;
  const auto meta = slurp(dir(id) / "attachment-meta" / (name + ".json"));
  if (!meta) return std::nullopt;
  const auto j = nlohmann::json::parse(*meta, nullptr, false);
  if (j.is_discarded()) throw StoreIoError("corrupt attachment metadata for " + name);
  auto bytes = slurp(dir(id) / "attachments" / name);
  if (!bytes) throw StoreIoError("attachment " + name + " of " + id + " is missing");
  return StoredAttachment{std::move(*bytes), {j.value("content_type", ""), j.value("revision", 0ull)}};
}

}  // namespace odbr
