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

#include <algorithm>
#include <fstream>
#include <set>

#include "odbr/pipeline.hpp"

namespace odbr {
namespace {

std::uint64_t rebase(std::uint64_t t, std::uint64_t epoch) { return t >= epoch ? t - epoch : 0; }

}  // namespace

Analysis analyze_capture(const RawCapture& raw, const GestureThresholds& thresholds) {
  Analysis out;
  const auto touch = touch_devices(raw.events);
  const std::set<std::uint32_t> touch_set(touch.begin(), touch.end());

  std::vector<InputEvent> leftovers;
  std::vector<TouchTrack> raw_tracks;
  for (const auto device : touch) {
    std::vector<InputEvent> stream;
    for (const auto& e : raw.events) {
      if (e.device == device) stream.push_back(e);
    }
    MultitouchResult result = track_multitouch(stream);
    raw_tracks.insert(raw_tracks.end(), result.tracks.begin(), result.tracks.end());
    leftovers.insert(leftovers.end(), result.unconsumed.begin(), result.unconsumed.end());
    for (auto& w : result.warnings) out.warnings.push_back("event" + std::to_string(device) + ": " + w);
  }
  for (const auto& e : raw.events) {
    if (!touch_set.count(e.device)) leftovers.push_back(e);
  }
  std::stable_sort(leftovers.begin(), leftovers.end(),
                   [](const InputEvent& a, const InputEvent& b) { return a.timestamp_us < b.timestamp_us; });
  KeyExtraction keys = extract_key_events(leftovers);
  out.keys = std::move(keys.presses);
  out.warnings.insert(out.warnings.end(), keys.warnings.begin(), keys.warnings.end());

  for (const auto& t : raw_tracks) out.tracks.push_back(to_screen(t, raw.device.axis));
  out.segments = segment_interactions(out.tracks, out.keys, thresholds);
  for (const auto& segment : out.segments) out.interactions.push_back(classify(segment, thresholds));

  const auto matches = match_captures(out.interactions, raw.captures);
  std::map<std::size_t, std::optional<UiTree>> trees;
  for (std::size_t i = 0; i < out.interactions.size(); ++i) {
    UserInteraction& step = out.interactions[i];
    step.index = i;
    HitResult hit;
    const auto c = matches[i];
    if (step.kind != InteractionKind::KeyPress && c && raw.captures[*c].ui_dump) {
      auto [it, inserted] = trees.try_emplace(*c);
      if (inserted) {
        try {
          it->second = parse_ui_dump(*raw.captures[*c].ui_dump);
        } catch (const Error& e) {
          out.warnings.push_back("capture " + std::to_string(*c) + ": " + e.what());
        }
      }
      if (const auto& tree = it->second) {
        if (const auto node = hit_test(*tree, step.start_point)) {
          hit.target = component_summary(tree->node(*node));
          if (!tree->node(*node).clickable) {
            if (const auto ancestor = nearest_clickable(*tree, *node)) {
              hit.clickable_ancestor = component_summary(tree->node(*ancestor));
            }
          }
        }
      }
    }
    step.target = hit.target;
    step.clickable_ancestor = hit.clickable_ancestor;
    step.description = describe(step);
    out.hits.push_back(std::move(hit));
  }
  return out;
}

RawCapture capture_from_scenario(const Scenario& scenario, const PipelineOptions& options) {
  RawCapture raw;
  raw.app_package = scenario.app_package;
  raw.created_at = scenario.created_at.empty() ? utc_now_text() : scenario.created_at;
  raw.device = scenario.device;

  auto events = parse_getevent_log(scenario.getevent_text).events;
  const std::uint64_t epoch =
      scenario.device.epoch_us.value_or(events.empty() ? 0 : events.front().timestamp_us);
  raw.session_epoch_us = epoch;
  raw.device.epoch_us = epoch;
  for (auto& e : events) e.timestamp_us = rebase(e.timestamp_us, epoch);
  std::stable_sort(events.begin(), events.end(),
                   [](const InputEvent& a, const InputEvent& b) { return a.timestamp_us < b.timestamp_us; });

  const auto triggers = detect_new_actions(events, options.thresholds);
  for (std::size_t i = 0; i < triggers.size(); ++i) {
    CapturePair pair;
    pair.trigger_us = triggers[i];
    if (i < scenario.screens.size()) {
      pair.screenshot = scenario.screens[i];
    } else {
      pair.errors.push_back("screenshot: fixture has no screenshot #" + std::to_string(i));
    }
    if (i < scenario.dumps.size()) {
      pair.ui_dump = scenario.dumps[i];
    } else {
      pair.errors.push_back("ui dump: fixture has no ui dump #" + std::to_string(i));
    }
    raw.captures.push_back(std::move(pair));
  }
  raw.events = std::move(events);

  std::string_view text = scenario.sensor_text;
  std::size_t line_number = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    auto parsed = parse_sensor_line(line, ++line_number);
    if (!parsed) continue;
    parsed->second.timestamp_us = rebase(parsed->second.timestamp_us, epoch);
    try {
      admit_to(raw.sensors, parsed->first, parsed->second, options.sensor_floors_ms);
    } catch (const Error&) {
      // arity mismatch: dropped, as in a live session
    }
  }
  return raw;
}

ReportBundle build_report(const RawCapture& raw, const Annotations& annotations, const GestureThresholds& thresholds) {
  Analysis analysis = analyze_capture(raw, thresholds);
  return assemble_report(raw, std::move(analysis.interactions), analysis.hits, annotations);
}

std::string sendevent_script_for(const BugReport& report, std::string_view raw_events_text, const ReplayTiming& timing) {
  const auto events = parse_getevent_log(raw_events_text).events;
  return emit_sendevent_script(events, {}, timing, report.id);
}

std::string adb_script_for(const BugReport& report) { return emit_adb_script(report.steps, report.id); }

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

void write_bundle(const ReportBundle& bundle, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const BugReport& r = bundle.report;
  for (const auto& [name, bytes] : bundle.blobs) write_file(dir / name, bytes);
  write_file(dir / "report.json", to_json(r));
  write_file(dir / "report.html", render_html(r, relative_asset_resolver(r)));
  const auto raw = bundle.blobs.find(r.raw_events_ref);
  write_file(dir / std::string(kSendeventScriptName),
             sendevent_script_for(r, raw == bundle.blobs.end() ? std::string_view{} : std::string_view(raw->second)));
  write_file(dir / std::string(kAdbScriptName), adb_script_for(r));
}

ReportBundle read_bundle(const std::filesystem::path& dir) {
  ReportBundle bundle;
  bundle.report = from_json(read_text_file(dir / "report.json"));
  for (const auto& [name, type] : bundle.report.attachments) {
    const auto path = dir / name;
    if (std::filesystem::exists(path)) bundle.blobs[name] = read_text_file(path);
  }
  return bundle;
}

}  // namespace odbr
