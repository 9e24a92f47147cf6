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
#include <charconv>
#include <numeric>

#include "odbr/error.hpp"
#include "odbr/gesture.hpp"

namespace odbr {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string point_text(ScreenPoint p) { return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")"; }

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
    return i;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

void GestureThresholds::validate() const {
  if (tap_slop_px <= 0 || long_press_ms <= 0 || idle_timeout_ms <= 0 || multi_touch_overlap_ms <= 0) {
    throw Error("gesture thresholds must be strictly positive");
  }
}

GestureThresholds parse_thresholds(std::string_view text, GestureThresholds base) {
  std::size_t line_number = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_number, std::string(line), "expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view raw = trim(line.substr(eq + 1));
    std::int32_t value = 0;
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (raw.empty() || ec != std::errc() || ptr != raw.data() + raw.size()) {
      throw ParseError(line_number, std::string(line), "threshold value is not an integer");
    }
    if (key == "tap_slop_px") {
      base.tap_slop_px = value;
    } else if (key == "long_press_ms") {
      base.long_press_ms = value;
    } else if (key == "idle_timeout_ms") {
      base.idle_timeout_ms = value;
    } else if (key == "multi_touch_overlap_ms") {
      base.multi_touch_overlap_ms = value;
    } else {
      throw ParseError(line_number, std::string(key), "unknown threshold key");
    }
  }
  base.validate();
  return base;
}

std::string_view to_string(InteractionKind kind) {
  switch (kind) {
    case InteractionKind::Tap: return "Tap";
    case InteractionKind::LongPress: return "LongPress";
    case InteractionKind::Swipe: return "Swipe";
    case InteractionKind::MultiTouch: return "MultiTouch";
    case InteractionKind::KeyPress: return "KeyPress";
  }
  return "Tap";
}

std::optional<InteractionKind> interaction_kind_from_string(std::string_view name) {
  for (auto kind : {InteractionKind::Tap, InteractionKind::LongPress, InteractionKind::Swipe,
                    InteractionKind::MultiTouch, InteractionKind::KeyPress}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

std::vector<InteractionSegment> segment_interactions(std::span<const TouchTrack> tracks,
                                                     std::span<const KeyPress> keys,
                                                     const GestureThresholds& thresholds) {
  const auto min_overlap = static_cast<std::int64_t>(thresholds.multi_touch_overlap_ms) * 1000;

  std::vector<std::size_t> order(tracks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return tracks[a].down_time_us < tracks[b].down_time_us; });

  DisjointSets groups(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& a = tracks[order[i]];
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const auto& b = tracks[order[j]];
      const auto overlap = static_cast<std::int64_t>(std::min(a.up_time_us, b.up_time_us)) -
                           static_cast<std::int64_t>(std::max(a.down_time_us, b.down_time_us));
      if (overlap >= min_overlap) groups.unite(i, j);
    }
  }

  std::vector<InteractionSegment> segments;
  std::vector<std::size_t> segment_of(order.size(), SIZE_MAX);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::size_t root = groups.find(i);
    if (segment_of[root] == SIZE_MAX) {
      segment_of[root] = segments.size();
      segments.emplace_back();
      segments.back().start_time_us = tracks[order[i]].down_time_us;
    }
    auto& seg = segments[segment_of[root]];
    seg.tracks.push_back(tracks[order[i]]);
    seg.start_time_us = std::min(seg.start_time_us, tracks[order[i]].down_time_us);
    seg.end_time_us = std::max(seg.end_time_us, tracks[order[i]].up_time_us);
  }
  for (const auto& key : keys) {
    InteractionSegment seg;
    seg.key = key;
    seg.start_time_us = key.down_time_us;
    seg.end_time_us = key.up_time_us;
    segments.push_back(std::move(seg));
  }
  std::stable_sort(segments.begin(), segments.end(), [](const auto& a, const auto& b) {
    if (a.start_time_us != b.start_time_us) return a.start_time_us < b.start_time_us;
    return !a.key && b.key;
  });
  return segments;
}

std::int64_t duration_ms(std::uint64_t start_us, std::uint64_t end_us) {
  const std::int64_t diff = static_cast<std::int64_t>(end_us) - static_cast<std::int64_t>(start_us);
  return diff >= 0 ? (diff + 500) / 1000 : -((-diff + 500) / 1000);
}

UserInteraction classify(const InteractionSegment& segment, const GestureThresholds& thresholds) {
  UserInteraction out;
  out.start_time_us = segment.start_time_us;
  out.end_time_us = std::max(segment.end_time_us, segment.start_time_us);
  out.duration_ms = duration_ms(out.start_time_us, out.end_time_us);

  if (segment.key) {
    out.kind = InteractionKind::KeyPress;
    out.key_code = segment.key->key_code;
    out.key_name = segment.key->key_name;
    return out;
  }
  if (segment.tracks.empty()) throw Error("segment has neither tracks nor a key press");
  for (const auto& track : segment.tracks) {
    if (track.points.empty()) throw Error("segment contains a track with no points");
  }

  const auto& first = segment.tracks.front();
  out.start_point = ScreenPoint{first.points.front().x, first.points.front().y};
  out.end_point = ScreenPoint{first.points.back().x, first.points.back().y};
  out.pointer_count = segment.tracks.size();

  if (segment.tracks.size() > 1) {
    out.kind = InteractionKind::MultiTouch;
    return out;
  }
  const std::int64_t dx = out.end_point.x - out.start_point.x;
  const std::int64_t dy = out.end_point.y - out.start_point.y;
  const std::int64_t slop = thresholds.tap_slop_px;
  const auto held_us = static_cast<std::int64_t>(out.end_time_us - out.start_time_us);
  if (dx * dx + dy * dy > slop * slop) {
    out.kind = InteractionKind::Swipe;
  } else if (held_us >= static_cast<std::int64_t>(thresholds.long_press_ms) * 1000) {
    out.kind = InteractionKind::LongPress;
  } else {
    out.kind = InteractionKind::Tap;
  }
  return out;
}

std::vector<IdleBoundary> detect_idle(std::span<const UserInteraction> interactions, std::uint64_t session_end_us,
                                      const GestureThresholds& thresholds) {
  const auto timeout = static_cast<std::uint64_t>(thresholds.idle_timeout_ms) * 1000;
  std::vector<IdleBoundary> out;
  if (interactions.empty()) {
    if (session_end_us > timeout) out.push_back({timeout, std::nullopt});
    return out;
  }
  for (std::size_t i = 0; i < interactions.size(); ++i) {
    const std::uint64_t end = interactions[i].end_time_us;
    const std::uint64_t next = i + 1 < interactions.size() ? interactions[i + 1].start_time_us : session_end_us;
    if (next > end && next - end > timeout) out.push_back({end + timeout, i});
  }
  return out;
}

std::string component_label(const ComponentSummary& target) {
  if (!target.text.empty()) return target.text;
  if (!target.resource_id.empty()) return target.resource_id;
  return target.class_name;
}

std::string describe(const UserInteraction& in) {
  auto on_target = [&]() -> std::string {
    if (!in.target) return "";
    return " on " + in.target->class_name + " '" + component_label(*in.target) + "'";
  };
  switch (in.kind) {
    case InteractionKind::Tap:
      return "Tap" + on_target() + " at " + point_text(in.start_point);
    case InteractionKind::LongPress:
      return "Long-press" + on_target() + " at " + point_text(in.start_point) + " for " +
             std::to_string(in.duration_ms) + "ms";
    case InteractionKind::Swipe:
      return "Swipe from " + point_text(in.start_point) + " to " + point_text(in.end_point);
    case InteractionKind::KeyPress:
      if (in.key_name) return "Press " + *in.key_name;
      return "Press key " + std::to_string(in.key_code.value_or(0));
    case InteractionKind::MultiTouch:
      return "Multi-touch gesture with " + std::to_string(in.pointer_count) + " fingers from " +
             point_text(in.start_point);
  }
  return {};
}

TouchTrack to_screen(const TouchTrack& track, const AxisRanges& ranges) {
  TouchTrack out = track;
  for (auto& p : out.points) {
    const ScreenPoint s = map_raw_to_screen(RawPoint{p.x, p.y}, ranges);
    p.x = s.x;
    p.y = s.y;
  }
  return out;
}

}  // namespace odbr
