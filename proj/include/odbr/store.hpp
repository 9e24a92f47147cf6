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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "odbr/error.hpp"

namespace odbr {

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class ConflictError : public Error {
 public:
  ConflictError(std::string what, std::uint64_t current) : Error(std::move(what)), current_(current) {}
  std::uint64_t current_revision() const { return current_; }

 private:
  std::uint64_t current_;
};

// Filesystem failure inside the store.
class StoreIoError : public IoError {
 public:
  using IoError::IoError;
};

struct AttachmentInfo {
  std::string content_type;
  std::uint64_t revision = 0;  // document revision current when it was written
};

struct StoredAttachment {
  std::string bytes;
  AttachmentInfo info;
};

struct StoredDocument {
  std::string id;
  std::uint64_t revision = 0;
  std::string json;
  std::map<std::string, AttachmentInfo> attachments;
};

// One directory per id:
//   {id}/rev               committed revision number
//   {id}/revs/{N}.json     document text of revision N
//   {id}/attachments/{name}
//   {id}/attachment-meta/{name}.json
// Every file is written to a temp name and renamed into place; `rev` is
// renamed last so readers only ever see complete revisions.
class FileStore {
 public:
  explicit FileStore(std::filesystem::path root);
  ~FileStore();

  const std::filesystem::path& root() const { return root_; }

  // Compare-and-set: expected_revision 0 creates. Returns the new revision.
  // Throws ConflictError when the current revision differs.
  std::uint64_t put(const std::string& id, std::string_view json, std::uint64_t expected_revision);

  std::optional<StoredDocument> get(const std::string& id) const;
  std::uint64_t revision(const std::string& id) const;  // 0 when absent
  std::vector<std::string> ids() const;

  // Throws NotFoundError for an unknown id and ConflictError when `name` was
  // already written at the current revision.
  std::uint64_t put_attachment(const std::string& id, const std::string& name, std::string_view bytes,
                               const std::string& content_type);
  std::optional<StoredAttachment> get_attachment(const std::string& id, const std::string& name) const;

  // Runs after a temp file is complete and before it is renamed over
  // `target`. Tests use it to simulate a crash.
  using FaultHook = std::function<void(const std::filesystem::path& temp, const std::filesystem::path& target)>;
  void set_fault_hook(FaultHook hook);

  static bool valid_id(std::string_view id);
  static bool valid_attachment_name(std::string_view name);

 private:
  struct Locks;

  void commit(const std::filesystem::path& target, std::string_view bytes);
  std::filesystem::path dir(const std::string& id) const { return root_ / id; }

  std::filesystem::path root_;
  std::unique_ptr<Locks> locks_;
  FaultHook fault_hook_;
};

}  // namespace odbr
