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

#include "odbr/client.hpp"

#include <httplib.h>

#include "odbr/error.hpp"

namespace odbr {

struct ServiceClient::Impl {
  httplib::Client client;
  std::string base;
  explicit Impl(const std::string& url) : client(url), base(url) {}
};

ServiceClient::ServiceClient(const std::string& base_url, std::chrono::milliseconds timeout)
    : impl_(std::make_unique<Impl>(base_url)) {
  if (!impl_->client.is_valid()) throw BridgeError("invalid server url '" + base_url + "'");
  impl_->client.set_connection_timeout(timeout);
  impl_->client.set_read_timeout(timeout);
  impl_->client.set_write_timeout(timeout);
}

ServiceClient::~ServiceClient() = default;

HttpResponse ServiceClient::request(const std::string& method, const std::string& path, const std::string& body,
                                    const std::string& content_type,
                                    const std::map<std::string, std::string>& headers) {
  httplib::Headers h(headers.begin(), headers.end());
  httplib::Result result{nullptr, httplib::Error::Unknown};
  const std::string type = content_type.empty() ? "application/octet-stream" : content_type;
  if (method == "GET") {
    result = impl_->client.Get(path, h);
  } else if (method == "POST") {
    result = impl_->client.Post(path, h, body, type);
  } else if (method == "PUT") {
    result = impl_->client.Put(path, h, body, type);
  } else if (method == "PATCH") {
    result = impl_->client.Patch(path, h, body, type);
  } else if (method == "DELETE") {
    result = impl_->client.Delete(path, h);
  } else {
    throw Error("unsupported method " + method);
  }
  if (!result) {
    throw BridgeError("cannot reach " + impl_->base + ": " + httplib::to_string(result.error()));
  }
  HttpResponse out;
  out.status = result->status;
  out.body = result->body;
  out.content_type = result->get_header_value("Content-Type");
  for (const auto& [k, v] : result->headers) out.headers[k] = v;
  return out;
}

}  // namespace odbr
