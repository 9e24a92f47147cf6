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

#include "mutations.hpp"

#include "odbr/fixture_bridge.hpp"
#include "odbr/pipeline.hpp"
#include "support.hpp"

namespace odbr::testing {

using nlohmann::json;

namespace {

json& accel_trace(json& doc) {
  for (auto& t : doc["sensor_traces"]) {
    if (t["name"] == "accelerometer") return t;
  }
  throw std::runtime_error("document has no accelerometer trace");
}

Mutation remove(const std::string& key) {
  return {"missing " + key, key, [key](json& d) { d.erase(key); }};
}

}  // namespace

std::vector<Mutation> report_mutations() {
  std::vector<Mutation> out;
  for (const char* key : {"title", "expected_behavior", "actual_behavior", "app_package", "device_info", "created_at",
                          "steps", "sensor_traces", "raw_events_ref", "hit_policy", "attachments", "schema_version"}) {
    out.push_back(remove(key));
  }
  out.push_back({"future schema_version", "schema_version", [](json& d) { d["schema_version"] = 2; }});
  out.push_back({"schema_version zero", "schema_version", [](json& d) { d["schema_version"] = 0; }});
  out.push_back({"malformed id", "id", [](json& d) { d["id"] = "NOT-AN-ID"; }});
  out.push_back({"title not a string", "title", [](json& d) { d["title"] = 7; }});
  out.push_back({"created_at not a timestamp", "created_at", [](json& d) { d["created_at"] = "yesterday"; }});
  out.push_back({"axis ranges inverted", "device_info.axis_ranges",
                 [](json& d) { d["device_info"]["axis_ranges"]["x_max"] = -1; }});
  out.push_back({"step index gap", "steps[1].index", [](json& d) { d["steps"][1]["index"] = 2; }});
  out.push_back({"step index missing", "steps[0].index", [](json& d) { d["steps"][0].erase("index"); }});
  out.push_back({"unknown kind", "steps[0].kind", [](json& d) { d["steps"][0]["kind"] = "Pinch"; }});
  out.push_back({"end before start", "steps[0].end_time_us", [](json& d) {
                   d["steps"][0]["end_time_us"] = d["steps"][0]["start_time_us"].get<std::uint64_t>() - 1;
                 }});
  out.push_back({"duration mismatch", "steps[0].duration_ms",
                 [](json& d) { d["steps"][0]["duration_ms"] = d["steps"][0]["duration_ms"].get<std::int64_t>() + 1; }});
  out.push_back({"unlisted screenshot", "steps[0].screenshot_ref",
                 [](json& d) { d["steps"][0]["screenshot_ref"] = "missing.png"; }});
  out.push_back({"unlisted dump", "steps[0].ui_dump_ref", [](json& d) { d["steps"][0]["ui_dump_ref"] = "missing.xml"; }});
  out.push_back({"unlisted raw events", "raw_events_ref", [](json& d) { d["raw_events_ref"] = "nope.getevent"; }});
  out.push_back({"attachment type not a string", "attachments.extra.bin", [](json& d) { d["attachments"]["extra.bin"] = 1; }});
  out.push_back({"bad target bounds", "steps[0].target.bounds", [](json& d) { d["steps"][0]["target"]["bounds"] = "[1,1]"; }});
  out.push_back({"step not an object", "steps[1]", [](json& d) { d["steps"][1] = 3; }});
  out.push_back({"sensor arity", "sensor_traces[0].samples[1]", [](json& d) {
                   auto& t = accel_trace(d);
                   t["samples"][1] = json::array({t["samples"][1][0], 1.0, 2.0});
                 }});
  out.push_back({"sensor timestamps not increasing", "sensor_traces[0].samples[1]", [](json& d) {
                   auto& t = accel_trace(d);
                   t["samples"][1][0] = t["samples"][0][0];
                 }});
  out.push_back({"sensor samples under floor", "sensor_traces[0].samples[1]", [](json& d) {
                   auto& t = accel_trace(d);
                   t["samples"][1][0] = t["samples"][0][0].get<std::uint64_t>() + 1000;
                 }});
  out.push_back({"sensor kind mismatch", "sensor_traces[0].kind", [](json& d) { accel_trace(d)["kind"] = "gps"; }});
  return out;
}

json three_action_document() {
  const auto scenario = load_scenario(fixture_dir("three-action"));
  const auto raw = capture_from_scenario(scenario);
  const auto bundle = build_report(raw, {"Note is lost", "Saved note stays in the list", "List is empty"}, {});
  json doc = report_to_json_value(bundle.report);
  // mutations address the accelerometer trace as sensor_traces[0]
  auto& traces = doc["sensor_traces"];
  std::stable_sort(traces.begin(), traces.end(),
                   [](const json& a, const json& b) { return a["name"] == "accelerometer" && b["name"] != "accelerometer"; });
  return doc;
}

}  // namespace odbr::testing
