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
#include <map>
#include <string>
#include <vector>

#include "odbr/capture.hpp"
#include "odbr/fixture_bridge.hpp"
#include "odbr/gesture.hpp"
#include "odbr/replay_script.hpp"
#include "odbr/report.hpp"

namespace odbr {

struct PipelineOptions {
  GestureThresholds thresholds;
  std::map<std::string, std::int64_t> sensor_floors_ms;
};

// Offline analysis of a capture: ingest, gesture classification and
// hit-testing against each step's UI dump.
struct Analysis {
  std::vector<TouchTrack> tracks;  // screen pixels
  std::vector<KeyPress> keys;
  std::vector<InteractionSegment> segments;
  std::vector<UserInteraction> interactions;  // described, refs not yet attached
  std::vector<HitResult> hits;
  std::vector<std::string> warnings;
};

Analysis analyze_capture(const RawCapture& raw, const GestureThresholds& thresholds);

// The capture a fixture-bridge session would produce for `scenario`,
// computed without threads.
RawCapture capture_from_scenario(const Scenario& scenario, const PipelineOptions& options = {});

ReportBundle build_report(const RawCapture& raw, const Annotations& annotations, const GestureThresholds& thresholds);

// Replay scripts regenerated from a stored report and its raw event log.
std::string sendevent_script_for(const BugReport& report, std::string_view raw_events_text,
                                 const ReplayTiming& timing = ReplayTiming::preserve());
std::string adb_script_for(const BugReport& report);

// Writes report.json, report.html, both replay scripts and every attachment
// into `dir`.
void write_bundle(const ReportBundle& bundle, const std::filesystem::path& dir);
ReportBundle read_bundle(const std::filesystem::path& dir);

void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace odbr
