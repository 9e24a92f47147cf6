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

#include <chrono>
#include <map>
#include <memory>
#include <string>

namespace odbr {

struct HttpResponse {
  int status = 0;
  std::string body;
  std::string content_type;
  std::map<std::string, std::string> headers;
};

// Minimal blocking HTTP client for the report service. Connection failures
// throw BridgeError.
class ServiceClient {
 public:
  explicit ServiceClient(const std::string& base_url,
                         std::chrono::milliseconds timeout = std::chrono::milliseconds(5000));
  ~ServiceClient();

  HttpResponse request(const std::string& method, const std::string& path, const std::string& body = {},
                       const std::string& content_type = {}, const std::map<std::string, std::string>& headers = {});

  HttpResponse get(const std::string& path) { return request("GET", path); }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace odbr
