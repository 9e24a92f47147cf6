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

#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <json.hpp>

#include "odbr/client.hpp"
#include "odbr/fixture_bridge.hpp"
#include "odbr/pipeline.hpp"
#include "odbr/service.hpp"
#include "odbr/store.hpp"
#include "support.hpp"

namespace odbr {
namespace {

using nlohmann::json;

const std::string kId = "0123456789abcdef";

struct Crash {};

TEST(Store, CreateGetAndCompareAndSet) {
  testing::TempDir root("odbr-store");
  FileStore store(root.path());
  EXPECT_EQ(store.revision(kId), 0u);
  EXPECT_FALSE(store.get(kId));
  EXPECT_EQ(store.put(kId, "{\"v\":1}", 0), 1u);
  EXPECT_EQ(store.put(kId, "{\"v\":2}", 1), 2u);
  const auto doc = store.get(kId);
  ASSERT_TRUE(doc);
  EXPECT_EQ(doc->revision, 2u);
  EXPECT_EQ(doc->json, "{\"v\":2}");
  try {
    store.put(kId, "{\"v\":3}", 1);
    FAIL();
  } catch (const ConflictError& e) {
    EXPECT_EQ(e.current_revision(), 2u);
  }
  EXPECT_THROW(store.put(kId, "{}", 0), ConflictError);
  EXPECT_THROW(store.put("fedcba9876543210", "{}", 3), NotFoundError);
  EXPECT_THROW(store.put("../escape", "{}", 0), Error);
  EXPECT_EQ(store.ids(), std::vector<std::string>{kId});
  EXPECT_TRUE(std::filesystem::is_directory(root.path() / kId));
}

TEST(Store, ExternalBumpConflicts) {
  testing::TempDir root("odbr-store");
  FileStore a(root.path());
  FileStore b(root.path());
  a.put(kId, "{}", 0);
  b.put(kId, "{}", 1);  // another writer on the same root
  EXPECT_THROW(a.put(kId, "{}", 1), ConflictError);
  EXPECT_EQ(a.revision(kId), 2u);
}

TEST(Store, CrashBeforeDocumentRename) {
  testing::TempDir root("odbr-store");
  FileStore store(root.path());
  store.put(kId, "first", 0);
  store.set_fault_hook([](const auto& temp, const auto&) {
    std::filesystem::remove(temp);
    throw Crash{};
  });
  EXPECT_THROW(store.put(kId, "second", 1), Crash);
  store.set_fault_hook({});
  EXPECT_EQ(store.get(kId)->json, "first");
  EXPECT_EQ(store.get(kId)->revision, 1u);
  EXPECT_EQ(store.put(kId, "second", 1), 2u);
}

TEST(Store, CrashBeforeRevisionPointerRename) {
  testing::TempDir root("odbr-store");
  FileStore store(root.path());
  store.put(kId, "first", 0);
  store.set_fault_hook([](const std::filesystem::path& temp, const std::filesystem::path& target) {
    if (target.filename() == "rev") {
      std::filesystem::remove(temp);
      throw Crash{};
    }
  });
  EXPECT_THROW(store.put(kId, "second", 1), Crash);
  store.set_fault_hook({});
  EXPECT_EQ(store.get(kId)->json, "first");
  EXPECT_EQ(store.put(kId, "third", 1), 2u);
  EXPECT_EQ(store.get(kId)->json, "third");
}

TEST(Store, LostTempFileIsAnIoError) {
  testing::TempDir root("odbr-store");
  FileStore store(root.path());
  store.put(kId, "first", 0);
  store.set_fault_hook([](const auto& temp, const auto&) { std::filesystem::remove(temp); });
  EXPECT_THROW(store.put(kId, "second", 1), StoreIoError);
  EXPECT_EQ(store.get(kId)->json, "first");
}

TEST(Store, Attachments) {
  testing::TempDir root("odbr-store");
  FileStore store(root.path());
  EXPECT_THROW(store.put_attachment(kId, "a.png", "x", "image/png"), NotFoundError);
  store.put(kId, "{}", 0);
  EXPECT_EQ(store.put_attachment(kId, "a.png", std::string("\x89PNG\0\1", 6), "image/png"), 1u);
  EXPECT_THROW(store.put_attachment(kId, "a.png", "y", "image/png"), ConflictError);
  const auto a = store.get_attachment(kId, "a.png");
  ASSERT_TRUE(a);
  EXPECT_EQ(a->bytes, std::string("\x89PNG\0\1", 6));
  EXPECT_EQ(a->info.content_type, "image/png");
  EXPECT_EQ(store.get(kId)->attachments.at("a.png").revision, 1u);
  store.put(kId, "{}", 1);
  EXPECT_EQ(store.put_attachment(kId, "a.png", "z", "text/plain"), 2u);  // new revision, may replace
  EXPECT_EQ(store.get_attachment(kId, "a.png")->bytes, "z");
  EXPECT_FALSE(store.get_attachment(kId, "b.png"));
  EXPECT_FALSE(FileStore::valid_attachment_name(".hidden"));
  EXPECT_FALSE(FileStore::valid_attachment_name("a/b"));
  EXPECT_FALSE(FileStore::valid_attachment_name(""));
  EXPECT_TRUE(FileStore::valid_attachment_name("screen-000.png"));
}

TEST(Store, ConcurrentWritersOneWinner) {
  testing::TempDir root("odbr-store");
  FileStore store(root.path());
  store.put(kId, "{}", 0);
  std::atomic<int> ok{0};
  std::atomic<int> conflicts{0};
  std::vector<std::jthread> writers;
  for (int i = 0; i < 16; ++i) {
    writers.emplace_back([&, i] {
      try {
        store.put(kId, "{\"w\":" + std::to_string(i) + "}", 1);
        ++ok;
      } catch (const ConflictError&) {
        ++conflicts;
      }
    });
  }
  writers.clear();
  EXPECT_EQ(ok, 1);
  EXPECT_EQ(conflicts, 15);
  EXPECT_EQ(store.revision(kId), 2u);
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ServiceOptions options;
    options.store_root = root.path() / "store";
    options.port = 0;
    service = std::make_unique<ReportService>(options);
    base_url = "http://127.0.0.1:" + std::to_string(service->start());
    client = std::make_unique<ServiceClient>(base_url);
    bundle = build_report(capture_from_scenario(load_scenario(testing::fixture_dir("three-action"))),
                          {"Note is lost", "Saved note stays", "List is empty"}, {});
  }

  void TearDown() override { service->stop(); }

  std::string post_report() {
    const auto res = client->request("POST", "/reports", to_json(bundle.report), "application/json");
    EXPECT_EQ(res.status, 201) << res.body;
    return json::parse(res.body)["id"];
  }

  void post_attachments(const std::string& id) {
    for (const auto& [name, type] : bundle.report.attachments) {
      const auto res = client->request("POST", "/reports/" + id + "/attachments/" + name, bundle.blobs.at(name), type);
      EXPECT_EQ(res.status, 201) << name << ": " << res.body;
    }
  }

  testing::TempDir root{"odbr-service"};
  std::string base_url;
  std::unique_ptr<ReportService> service;
  std::unique_ptr<ServiceClient> client;
  ReportBundle bundle;
};

TEST_F(ServiceTest, PostThenGet) {
  const auto id = post_report();
  EXPECT_EQ(id, content_id(bundle.report));
  const auto res = client->get("/reports/" + id);
  EXPECT_EQ(res.status, 200);
  EXPECT_EQ(res.content_type, "application/json");
  EXPECT_EQ(res.headers.at("ETag"), "\"1\"");
  EXPECT_EQ(json::parse(res.body), report_to_json_value(bundle.report));
  EXPECT_EQ(client->get("/reports/ffffffffffffffff").status, 404);
  // same document again: already stored
  EXPECT_EQ(client->request("POST", "/reports", to_json(bundle.report), "application/json").status, 409);
}

TEST_F(ServiceTest, PostAssignsIdWhenAbsent) {
  json doc = report_to_json_value(bundle.report);
  doc.erase("id");
  const auto res = client->request("POST", "/reports", doc.dump(), "application/json");
  ASSERT_EQ(res.status, 201);
  EXPECT_EQ(json::parse(res.body)["id"], content_id(bundle.report));
  EXPECT_EQ(json::parse(res.body)["revision"], 1);
}

TEST_F(ServiceTest, InvalidDocumentListsViolations) {
  json doc = report_to_json_value(bundle.report);
  doc.erase("title");
  doc["steps"][1]["index"] = 7;
  const auto res = client->request("POST", "/reports", doc.dump(), "application/json");
  EXPECT_EQ(res.status, 422);
  const auto body = json::parse(res.body);
  EXPECT_EQ(body["violations"].size(), 2u);
  EXPECT_EQ(client->request("POST", "/reports", "nope", "application/json").status, 422);
}

TEST_F(ServiceTest, PutRevisions) {
  const auto id = post_report();
  BugReport edited = bundle.report;
  edited.id = id;
  edited.title = "Edited";
  const auto body = to_json(edited);
  EXPECT_EQ(client->request("PUT", "/reports/" + id, body, "application/json").status, 428);
  EXPECT_EQ(client->request("PUT", "/reports/" + id, body, "application/json", {{"If-Match", "one"}}).status, 400);
  const auto ok = client->request("PUT", "/reports/" + id, body, "application/json", {{"If-Match", "1"}});
  EXPECT_EQ(ok.status, 200);
  EXPECT_EQ(json::parse(ok.body)["revision"], 2);
  const auto stale = client->request("PUT", "/reports/" + id, body, "application/json", {{"If-Match", "\"1\""}});
  EXPECT_EQ(stale.status, 409);
  EXPECT_EQ(json::parse(stale.body)["current_revision"], 2);
  EXPECT_EQ(json::parse(client->get("/reports/" + id).body)["title"], "Edited");
  EXPECT_EQ(client->request("PUT", "/reports/ffffffffffffffff", body, "application/json", {{"If-Match", "1"}}).status,
            422);  // body id differs from the path
  json other = json::parse(body);
  other.erase("id");
  EXPECT_EQ(client->request("PUT", "/reports/ffffffffffffffff", other.dump(), "application/json", {{"If-Match", "1"}})
                .status,
            404);
}

TEST_F(ServiceTest, SixteenConcurrentPuts) {
  const auto id = post_report();
  BugReport edited = bundle.report;
  edited.id = id;
  std::atomic<int> ok{0};
  std::atomic<int> conflicts{0};
  {
    std::vector<std::jthread> writers;
    for (int i = 0; i < 16; ++i) {
      writers.emplace_back([&, i] {
        BugReport mine = edited;
        mine.title = "writer " + std::to_string(i);
        ServiceClient c(base_url);
        const auto res = c.request("PUT", "/reports/" + id, to_json(mine), "application/json", {{"If-Match", "1"}});
        if (res.status == 200) ++ok;
        if (res.status == 409) ++conflicts;
      });
    }
  }
  EXPECT_EQ(ok, 1);
  EXPECT_EQ(conflicts, 15);
}

TEST_F(ServiceTest, ListReports) {
  EXPECT_EQ(json::parse(client->get("/reports").body), json::array());
  const auto id = post_report();
  const auto list = json::parse(client->get("/reports").body);
  ASSERT_EQ(list.size(), 1u);
  EXPECT_EQ(list[0]["id"], id);
  EXPECT_EQ(list[0]["title"], "Note is lost");
  EXPECT_EQ(list[0]["created_at"], "2026-03-02T14:30:00Z");
  EXPECT_EQ(list[0]["step_count"], 3);
}

TEST_F(ServiceTest, PatchAnnotations) {
  const auto id = post_report();
  const auto res = client->request("PATCH", "/reports/" + id + "/annotations", R"({"title":"Renamed"})",
                                   "application/json", {{"If-Match", "1"}});
  EXPECT_EQ(res.status, 200);
  EXPECT_EQ(json::parse(res.body)["revision"], 2);
  const auto doc = json::parse(client->get("/reports/" + id).body);
  EXPECT_EQ(doc["title"], "Renamed");
  EXPECT_EQ(doc["actual_behavior"], "List is empty");
  EXPECT_EQ(client->request("PATCH", "/reports/" + id + "/annotations", R"({"title":"x"})", "application/json",
                            {{"If-Match", "1"}})
                .status,
            409);
  EXPECT_EQ(
      client->request("PATCH", "/reports/" + id + "/annotations", R"({"steps":[]})", "application/json").status, 422);
  EXPECT_EQ(client->request("PATCH", "/reports/" + id + "/annotations", R"({"title":3})", "application/json").status,
            422);
  EXPECT_EQ(client->request("PATCH", "/reports/ffffffffffffffff/annotations", "{}", "application/json").status, 404);
}

TEST_F(ServiceTest, Attachments) {
  const auto id = post_report();
  post_attachments(id);
  const auto png = client->get("/reports/" + id + "/attachments/screen-000.png");
  EXPECT_EQ(png.status, 200);
  EXPECT_EQ(png.content_type, "image/png");
  EXPECT_EQ(png.body, bundle.blobs.at("screen-000.png"));
  EXPECT_EQ(client->request("POST", "/reports/" + id + "/attachments/screen-000.png", "x", "image/png").status, 409);
  EXPECT_EQ(client->get("/reports/" + id + "/attachments/none.png").status, 404);
  EXPECT_EQ(client->request("POST", "/reports/ffffffffffffffff/attachments/a.png", "x", "image/png").status, 404);
  EXPECT_EQ(client->request("POST", "/reports/" + id + "/attachments/.hidden", "x", "image/png").status, 400);
}

TEST_F(ServiceTest, HtmlMatchesRenderer) {
  const auto id = post_report();
  const auto res = client->get("/reports/" + id + "/html");
  EXPECT_EQ(res.status, 200);
  EXPECT_EQ(res.content_type, "text/html; charset=utf-8");
  const auto stored = from_json(service->store().get(id)->json);
  const std::string base = "/reports/" + id;
  const auto expected = render_html(stored, [&](std::string_view name) -> std::optional<std::string> {
    if (name == kSendeventScriptName) return base + "/replay/sendevent";
    if (name == kAdbScriptName) return base + "/replay/adb";
    if (stored.attachments.count(std::string(name))) return base + "/attachments/" + std::string(name);
    return std::nullopt;
  });
  EXPECT_EQ(res.body, expected);
}

TEST_F(ServiceTest, ReplayEndpoints) {
  const auto id = post_report();
  EXPECT_EQ(client->get("/reports/" + id + "/replay/sendevent").status, 404);  // raw events not uploaded yet
  post_attachments(id);
  const auto a = client->get("/reports/" + id + "/replay/sendevent");
  const auto b = client->get("/reports/" + id + "/replay/sendevent");
  EXPECT_EQ(a.status, 200);
  EXPECT_EQ(a.content_type, "text/x-shellscript");
  EXPECT_EQ(a.body, b.body);
  BugReport with_id = bundle.report;
  with_id.id = id;
  EXPECT_EQ(a.body, sendevent_script_for(with_id, bundle.blobs.at(std::string(kRawEventsName))));
  const auto adb1 = client->get("/reports/" + id + "/replay/adb");
  EXPECT_EQ(adb1.status, 200);
  EXPECT_EQ(adb1.body, client->get("/reports/" + id + "/replay/adb").body);
  EXPECT_EQ(adb1.body, adb_script_for(with_id));
}

TEST_F(ServiceTest, StoreFaultIs500AndPriorRevisionSurvives) {
  const auto id = post_report();
  service->store().set_fault_hook([](const auto& temp, const auto&) { std::filesystem::remove(temp); });
  const auto res = client->request("PATCH", "/reports/" + id + "/annotations", R"({"title":"lost"})", "application/json");
  EXPECT_EQ(res.status, 500);
  service->store().set_fault_hook({});
  const auto doc = client->get("/reports/" + id);
  EXPECT_EQ(doc.headers.at("ETag"), "\"1\"");
  EXPECT_EQ(json::parse(doc.body)["title"], "Note is lost");
}

TEST(Client, UnreachableServer) {
  ServiceClient c("http://127.0.0.1:1", std::chrono::milliseconds(500));
  EXPECT_THROW(c.get("/reports"), BridgeError);
}

}  // namespace
}  // namespace odbr
