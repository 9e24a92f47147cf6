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

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "odbr/store.hpp"

namespace odbr {

inline constexpr int kDefaultPort = 8477;

struct ServiceOptions {
  std::filesystem::path store_root;
  std::string bind = "127.0.0.1";
  int port = kDefaultPort;  // 0 picks a free port
  std::optional<std::filesystem::path> ui_dir;  // served under /ui/
};

// HTTP front end over a FileStore.
class ReportService {
 public:
  explicit ReportService(ServiceOptions options);
  ~ReportService();

  FileStore& store();

  // Binds the listening socket and returns the port in use. Throws Error
  // when binding fails.
  int bind();
  // Serves until stop(); call bind() first.
  void serve();
  // bind() and serve() on a background thread.
  int start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace odbr
