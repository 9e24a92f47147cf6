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

#include "odbr/service.hpp"

#include <charconv>
#include <thread>

// Clients that leave curl's default form content type on a JSON body would
// otherwise hit httplib's 8 KiB form limit.
#define CPPHTTPLIB_FORM_URL_ENCODED_PAYLOAD_MAX_LENGTH (std::size_t{64} << 20)
#include <httplib.h>
#include <json.hpp>

#include "odbr/pipeline.hpp"
#include "odbr/report.hpp"

namespace odbr {
namespace {

using nlohmann::json;

constexpr const char* kJson = "application/json";
constexpr const char* kShell = "text/x-shellscript";

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", kJson);
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, json{{"error", message}});
}

void send_violations(httplib::Response& res, const ValidationError& e) {
  json list = json::array();
  for (const auto& v : e.violations()) list.push_back({{"path", v.path}, {"message", v.message}});
  send_json(res, 422, json{{"error", "validation failed"}, {"violations", list}});
}

std::optional<std::uint64_t> parse_if_match(std::string value) {
  if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
  std::uint64_t n = 0;
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
  if (value.empty() || ec != std::errc{} || p != value.data() + value.size()) return std::nullopt;
  return n;
}

std::string etag(std::uint64_t revision) { return "\"" + std::to_string(revision) + "\""; }

}  // namespace

struct ReportService::Impl {
  ServiceOptions options;
  FileStore store;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  explicit Impl(ServiceOptions o) : options(std::move(o)), store(options.store_root) { routes(); }

  // Runs `body`, mapping store and validation failures to statuses.
  template <typename F>
  void guarded(httplib::Response& res, F&& body) {
    try {
      body();
    } catch (const ValidationError& e) {
      send_violations(res, e);
    } catch (const NotFoundError& e) {
      send_error(res, 404, e.what());
    } catch (const ConflictError& e) {
      send_json(res, 409, json{{"error", e.what()}, {"current_revision", e.current_revision()}});
    } catch (const StoreIoError& e) {
      send_error(res, 500, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
      send_error(res, 500, e.what());
    } catch (const Error& e) {
      send_error(res, 422, e.what());
    }
  }

  StoredDocument load(const std::string& id) {
    auto doc = store.get(id);
    if (!doc) throw NotFoundError("no report " + id);
    return std::move(*doc);
  }

  AssetResolver resolver(const BugReport& r) {
    const std::string base = "/reports/" + httplib::detail::encode_url(r.id);
    return [base, attachments = r.attachments](std::string_view name) -> std::optional<std::string> {
      if (name == kSendeventScriptName) return base + "/replay/sendevent";
      if (name == kAdbScriptName) return base + "/replay/adb";
      if (attachments.count(std::string(name))) {
        return base + "/attachments/" + httplib::detail::encode_url(std::string(name));
      }
      return std::nullopt;
    };
  }

  void routes() {
    server.Post("/reports", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        BugReport r = from_json(req.body);
        if (r.id.empty()) r.id = content_id(r);
        const auto rev = store.put(r.id, to_json(r), 0);
        res.set_header("ETag", etag(rev));
        send_json(res, 201, json{{"id", r.id}, {"revision", rev}});
      });
    });

    server.Put(R"(/reports/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        if (!req.has_header("If-Match")) {
          send_error(res, 428, "If-Match with the current revision is required");
          return;
        }
        const auto expected = parse_if_match(req.get_header_value("If-Match"));
        if (!expected) {
          send_error(res, 400, "If-Match must be a revision number");
          return;
        }
        BugReport r = from_json(req.body);
        if (!r.id.empty() && r.id != id) {
          throw ValidationError(std::vector<Violation>{{"id", "id '" + r.id + "' does not match the request path"}});
        }
        r.id = id;
        if (store.revision(id) == 0) throw NotFoundError("no report " + id);
        const auto rev = store.put(id, to_json(r), *expected);
        res.set_header("ETag", etag(rev));
        send_json(res, 200, json{{"id", id}, {"revision", rev}});
      });
    });

    server.Get("/reports", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        json list = json::array();
        for (const auto& id : store.ids()) {
          const auto doc = store.get(id);
          if (!doc) continue;
          const auto j = json::parse(doc->json, nullptr, false);
          if (j.is_discarded()) throw StoreIoError("stored document " + id + " is not JSON");
          list.push_back({{"id", id},
                          {"title", j.value("title", "")},
                          {"created_at", j.value("created_at", "")},
                          {"step_count", j.contains("steps") && j["steps"].is_array() ? j["steps"].size() : 0},
                          {"revision", doc->revision}});
        }
        send_json(res, 200, list);
      });
    });

    server.Get(R"(/reports/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto doc = load(req.matches[1]);
        res.set_header("ETag", etag(doc.revision));
        res.status = 200;
        res.set_content(doc.json, kJson);
      });
    });

    server.Patch(R"(/reports/([^/]+)/annotations)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        const auto doc = load(id);
        if (req.has_header("If-Match")) {
          const auto expected = parse_if_match(req.get_header_value("If-Match"));
          if (!expected) {
            send_error(res, 400, "If-Match must be a revision number");
            return;
          }
          if (*expected != doc.revision) {
            throw ConflictError("revision conflict on " + id, doc.revision);
          }
        }
        const auto patch = json::parse(req.body, nullptr, false);
        std::vector<Violation> violations;
        if (patch.is_discarded() || !patch.is_object()) {
          violations.push_back({"$", "body must be a JSON object"});
        } else {
          for (const auto& [key, value] : patch.items()) {
            if (key != "title" && key != "expected_behavior" && key != "actual_behavior") {
              violations.push_back({key, "not an annotation field"});
            } else if (!value.is_string()) {
              violations.push_back({key, "must be a string"});
            }
          }
        }
        if (!violations.empty()) throw ValidationError(std::move(violations));
        BugReport r = from_json(doc.json);
        if (patch.contains("title")) r.title = patch["title"];
        if (patch.contains("expected_behavior")) r.expected_behavior = patch["expected_behavior"];
        if (patch.contains("actual_behavior")) r.actual_behavior = patch["actual_behavior"];
        const auto rev = store.put(id, to_json(r), doc.revision);
        res.set_header("ETag", etag(rev));
        send_json(res, 200, json{{"id", id}, {"revision", rev}});
      });
    });

    server.Post(R"(/reports/([^/]+)/attachments/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        const std::string name = req.matches[2];
        if (!FileStore::valid_attachment_name(name)) {
          send_error(res, 400, "invalid attachment name");
          return;
        }
        std::string type = req.get_header_value("Content-Type");
        if (type.empty()) type = "application/octet-stream";
        const auto rev = store.put_attachment(id, name, req.body, type);
        send_json(res, 201, json{{"id", id}, {"name", name}, {"revision", rev}, {"content_type", type}});
      });
    });

    server.Get(R"(/reports/([^/]+)/attachments/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        load(id);
        const auto a = store.get_attachment(id, req.matches[2]);
        if (!a) throw NotFoundError("no attachment " + std::string(req.matches[2]) + " on " + id);
        res.status = 200;
        res.set_content(a->bytes, a->info.content_type);
      });
    });

    server.Get(R"(/reports/([^/]+)/html)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto doc = load(req.matches[1]);
        const BugReport r = from_json(doc.json);
        res.status = 200;
        res.set_content(render_html(r, resolver(r)), "text/html; charset=utf-8");
      });
    });

    server.Get(R"(/reports/([^/]+)/replay/(sendevent|adb))", [this](const httplib::Request& req,
                                                                    httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        const auto doc = load(id);
        const BugReport r = from_json(doc.json);
        if (req.matches[2] == "adb") {
          res.status = 200;
          res.set_content(adb_script_for(r), kShell);
          return;
        }
        const auto raw = store.get_attachment(id, r.raw_events_ref);
        if (!raw) throw NotFoundError("raw event log " + r.raw_events_ref + " has not been uploaded");
        res.status = 200;
        res.set_content(sendevent_script_for(r, raw->bytes), kShell);
      });
    });

    if (options.ui_dir) {
      if (!server.set_mount_point("/ui", options.ui_dir->string())) {
        throw Error("cannot serve " + options.ui_dir->string() + " under /ui");
      }
    }
  }
};

ReportService::ReportService(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

ReportService::~ReportService() { stop(); }

FileStore& ReportService::store() { return impl_->store; }

int ReportService::bind() {
  auto& o = impl_->options;
  if (o.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(o.bind);
    if (impl_->port < 0) throw Error("cannot bind " + o.bind);
  } else {
    if (!impl_->server.bind_to_port(o.bind, o.port)) {
      throw Error("cannot bind " + o.bind + ":" + std::to_string(o.port));
    }
    impl_->port = o.port;
  }
  return impl_->port;
}

void ReportService::serve() { impl_->server.listen_after_bind(); }

int ReportService::start() {
  const int port = bind();
  impl_->thread = std::thread([this] { serve(); });
  impl_->server.wait_until_ready();
  return port;
}

void ReportService::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace odbr
