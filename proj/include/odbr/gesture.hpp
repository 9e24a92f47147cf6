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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "odbr/events.hpp"
#include "odbr/ui_hierarchy.hpp"

namespace odbr {

struct GestureThresholds {
  std::int32_t tap_slop_px = 24;
  std::int32_t long_press_ms = 500;
  std::int32_t idle_timeout_ms = 5000;
  std::int32_t multi_touch_overlap_ms = 50;

  // Throws Error unless every threshold is strictly positive.
  void validate() const;
  bool operator==(const GestureThresholds&) const = default;
};

// Reads `key = value` lines (`#` comments allowed) over the defaults.
GestureThresholds parse_thresholds(std::string_view text, GestureThresholds base = {});

enum class InteractionKind { Tap, LongPress, Swipe, MultiTouch, KeyPress };

std::string_view to_string(InteractionKind kind);
std::optional<InteractionKind> interaction_kind_from_string(std::string_view name);

// One or more tracks that form a single gesture, or one key press.
struct InteractionSegment {
  std::vector<TouchTrack> tracks;
  std::optional<KeyPress> key;
  std::uint64_t start_time_us = 0;
  std::uint64_t end_time_us = 0;
};

// Groups tracks whose active intervals overlap by at least
// `multi_touch_overlap_ms` (transitively); keys are always alone. Output is
// ordered by start time, tracks before keys on ties.
std::vector<InteractionSegment> segment_interactions(std::span<const TouchTrack> tracks,
                                                     std::span<const KeyPress> keys,
                                                     const GestureThresholds& thresholds);

struct UserInteraction {
  std::size_t index = 0;
  InteractionKind kind = InteractionKind::Tap;
  ScreenPoint start_point;
  ScreenPoint end_point;
  std::uint64_t start_time_us = 0;
  std::uint64_t end_time_us = 0;
  std::int64_t duration_ms = 0;
  std::size_t pointer_count = 0;
  std::optional<std::uint16_t> key_code;
  std::optional<std::string> key_name;
  std::optional<ComponentSummary> target;
  std::optional<ComponentSummary> clickable_ancestor;
  std::optional<std::string> screenshot_ref;
  std::optional<std::string> ui_dump_ref;
  std::string description;

  bool operator==(const UserInteraction&) const = default;
};

// round((end - start) / 1000), halves away from zero.
std::int64_t duration_ms(std::uint64_t start_us, std::uint64_t end_us);

// Classifies a segment whose track points are already in screen pixels.
// Throws Error for a segment with no points and no key.
UserInteraction classify(const InteractionSegment& segment, const GestureThresholds& thresholds);

struct IdleBoundary {
  std::uint64_t timestamp_us = 0;
  std::optional<std::size_t> after_interaction;  // nullopt: idle from session start

  bool operator==(const IdleBoundary&) const = default;
};

std::vector<IdleBoundary> detect_idle(std::span<const UserInteraction> interactions, std::uint64_t session_end_us,
                                      const GestureThresholds& thresholds);

// Text of the `<class> '<label>'` part; empty label falls back to resource
// id, then class name.
std::string component_label(const ComponentSummary& target);

std::string describe(const UserInteraction& interaction);

// Copy of `track` with raw coordinates mapped onto screen pixels.
TouchTrack to_screen(const TouchTrack& track, const AxisRanges& ranges);

}  // namespace odbr
