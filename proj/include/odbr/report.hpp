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
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "odbr/capture.hpp"
#include "odbr/gesture.hpp"
#include "odbr/sensor.hpp"

namespace odbr {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kHitPolicy = "deepest-node;ties=later-document-order;containment=half-open";

struct ReportDevice {
  std::string model;
  std::string os_version;
  std::int32_t screen_width = 0;
  std::int32_t screen_height = 0;
  AxisRanges axis;

  bool operator==(const ReportDevice&) const = default;
};

struct BugReport {
  std::string id;
  int schema_version = kSchemaVersion;
  std::string title;
  std::string expected_behavior;
  std::string actual_behavior;
  std::string app_package;
  ReportDevice device;
  std::string created_at;
  std::vector<UserInteraction> steps;
  std::vector<SensorTrace> sensor_traces;
  std::string raw_events_ref;
  std::string hit_policy{kHitPolicy};
  std::map<std::string, std::string> attachments;  // name -> content type
  nlohmann::json extra = nlohmann::json::object();  // unknown top-level fields, kept verbatim
  std::map<std::size_t, nlohmann::json> step_extra;  // unknown step fields by step index

  bool operator==(const BugReport&) const = default;
};

struct Annotations {
  std::string title;
  std::string expected_behavior;
  std::string actual_behavior;
};

// A report plus the attachment bytes it references.
struct ReportBundle {
  BugReport report;
  std::map<std::string, std::string> blobs;  // attachment name -> bytes
};

// Attachment names used by assemble_report.
std::string screenshot_name(std::size_t capture_index);
std::string ui_dump_name(std::size_t capture_index);
inline constexpr std::string_view kRawEventsName = "events.getevent";

// For every interaction, the index of the capture pair it uses: the latest
// pair triggered at or before the interaction's start.
std::vector<std::optional<std::size_t>> match_captures(std::span<const UserInteraction> interactions,
                                                       std::span<const CapturePair> captures);

struct HitResult {
  std::optional<ComponentSummary> target;
  std::optional<ComponentSummary> clickable_ancestor;  // set only when target is not clickable
};

// Builds the report. Throws ValidationError listing orphans when a capture
// pair is matched by no interaction or an interaction has no capture at or
// before it.
ReportBundle assemble_report(const RawCapture& raw, std::vector<UserInteraction> interactions,
                             std::span<const HitResult> hits, const Annotations& annotations);

// Canonical document: keys sorted, absent values as explicit nulls. The id
// field is filled in from content_id when empty.
nlohmann::json report_to_json_value(const BugReport& report);
std::string to_json(const BugReport& report);
nlohmann::json step_to_json_value(const UserInteraction& step);

// Validates and parses; throws ValidationError enumerating every violation.
BugReport from_json(std::string_view text);
BugReport from_json_value(const nlohmann::json& doc);

// First 16 hex digits of SHA-256 over the canonical JSON without `id`.
std::string content_id(const BugReport& report);

std::string sha256_hex(std::string_view data);

// Maps an attachment name to a link target; nullopt renders a placeholder.
using AssetResolver = std::function<std::optional<std::string>(std::string_view name)>;

// Links to names beside report.html.
AssetResolver relative_asset_resolver(const BugReport& report);

inline constexpr std::string_view kSendeventScriptName = "replay.sendevent.sh";
inline constexpr std::string_view kAdbScriptName = "replay.adb.sh";

std::string render_html(const BugReport& report, const AssetResolver& resolve);

std::string html_escape(std::string_view text);

}  // namespace odbr
