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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace odbr {

// Event types and codes from linux/input-event-codes.h that the toolkit
// interprets. Everything else passes through untouched.
inline constexpr std::uint16_t kEvSyn = 0x00;
inline constexpr std::uint16_t kEvKey = 0x01;
inline constexpr std::uint16_t kEvAbs = 0x03;

inline constexpr std::uint16_t kSynReport = 0x00;
inline constexpr std::uint16_t kSynMtReport = 0x02;

inline constexpr std::uint16_t kAbsX = 0x00;
inline constexpr std::uint16_t kAbsY = 0x01;
inline constexpr std::uint16_t kAbsPressure = 0x18;
inline constexpr std::uint16_t kAbsMtSlot = 0x2f;
inline constexpr std::uint16_t kAbsMtTouchMajor = 0x30;
inline constexpr std::uint16_t kAbsMtPositionX = 0x35;
inline constexpr std::uint16_t kAbsMtPositionY = 0x36;
inline constexpr std::uint16_t kAbsMtTrackingId = 0x39;
inline constexpr std::uint16_t kAbsMtPressure = 0x3a;
inline constexpr std::uint16_t kAbsMtToolY = 0x3d;

// BTN_TOOL_PEN .. BTN_TOOL_QUADTAP plus BTN_TOUCH: touch-device bookkeeping
// keys that accompany multi-touch frames rather than user key presses.
inline constexpr std::uint16_t kBtnDigiFirst = 0x140;
inline constexpr std::uint16_t kBtnDigiLast = 0x14f;
inline constexpr std::uint16_t kBtnTouch = 0x14a;

// One decoded evdev record. `timestamp_us` is relative to the session epoch.
struct InputEvent {
  std::uint64_t timestamp_us = 0;
  std::uint32_t device = 0;  // N in /dev/input/eventN
  std::uint16_t type = 0;
  std::uint16_t code = 0;
  std::int32_t value = 0;

  // Types outside SYN/KEY/ABS are kept in logs but ignored downstream.
  bool pass_through() const { return type != kEvSyn && type != kEvKey && type != kEvAbs; }
  bool is_syn_report() const { return type == kEvSyn && code == kSynReport; }

  bool operator==(const InputEvent&) const = default;
};

std::string default_device_path(std::uint32_t device);

// ---------------------------------------------------------------------------
// getevent text

// A line that carries no event: device enumeration output of `getevent`.
struct MetadataLine {
  bool operator==(const MetadataLine&) const = default;
};

using GeteventLine = std::variant<InputEvent, MetadataLine>;

// Parses one line of `getevent -t` output. Lines without a `[ sec.usec]`
// prefix get `fill_timestamp_us`. Throws ParseError on malformed input.
GeteventLine parse_getevent_line(std::string_view line, std::size_t line_number = 0,
                                 std::uint64_t fill_timestamp_us = 0);

struct GeteventLog {
  std::vector<InputEvent> events;
  std::size_t metadata_lines = 0;
  std::size_t blank_lines = 0;
  std::map<std::uint32_t, std::string> device_names;  // from `name:` lines
};

// Parses a whole transcript. Timestampless lines are filled monotonically.
GeteventLog parse_getevent_log(std::string_view text);

// Formats an event as a timestamped getevent line (lowercase hex).
std::string format_getevent_line(const InputEvent& event);
std::string format_getevent_log(std::span<const InputEvent> events);

// ---------------------------------------------------------------------------
// Binary evdev records

enum class TimeFieldWidth { k32, k64 };

struct BinaryLayout {
  TimeFieldWidth time_width = TimeFieldWidth::k64;
  std::endian byte_order = std::endian::little;
  std::uint32_t device = 0;  // device index stamped on decoded events

  std::size_t record_size() const { return time_width == TimeFieldWidth::k64 ? 24 : 16; }
};

struct DecodedStream {
  std::vector<InputEvent> events;
  std::size_t remainder = 0;  // trailing bytes that do not form a record
};

DecodedStream decode_binary_stream(std::span<const std::byte> bytes, const BinaryLayout& layout = {});
std::vector<std::byte> encode_binary_stream(std::span<const InputEvent> events,
                                            const BinaryLayout& layout = {});

// ---------------------------------------------------------------------------
// Touch tracks and key presses

struct TouchPoint {
  std::uint64_t timestamp_us = 0;
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::optional<std::int32_t> pressure;
  std::int32_t slot = 0;
  std::int32_t tracking_id = 0;

  bool operator==(const TouchPoint&) const = default;
};

struct TouchTrack {
  std::vector<TouchPoint> points;
  std::uint64_t down_time_us = 0;
  std::uint64_t up_time_us = 0;
  bool truncated = false;  // input ended before the finger lifted
  bool synthetic = false;  // opened implicitly by a position update on a closed slot

  std::int32_t tracking_id() const { return points.empty() ? -1 : points.front().tracking_id; }

  bool operator==(const TouchTrack&) const = default;
};

struct MultitouchResult {
  std::vector<TouchTrack> tracks;
  std::vector<InputEvent> unconsumed;
  std::vector<std::string> warnings;
  std::size_t consumed = 0;  // events folded into slot state or frames
};

// Protocol-B slot state machine. Tracks are returned in the order they were
// opened; tracks that never reached a SYN_REPORT with state are dropped with
// a warning. Throws UnsupportedError on protocol-A frames (SYN_MT_REPORT).
MultitouchResult track_multitouch(std::span<const InputEvent> events);

// True for ABS_MT_* codes and the single-touch/BTN_TOOL companions.
bool is_touch_event(const InputEvent& event);

struct KeyPress {
  std::uint16_t key_code = 0;
  std::uint64_t down_time_us = 0;
  std::uint64_t up_time_us = 0;
  std::optional<std::string> key_name;
  bool truncated = false;

  bool operator==(const KeyPress&) const = default;
};

struct KeyExtraction {
  std::vector<KeyPress> presses;  // ordered by down time
  std::vector<std::string> warnings;
  std::size_t dropped = 0;
};

KeyExtraction extract_key_events(std::span<const InputEvent> events);

// Linux key name (KEY_POWER) for a code, when known.
std::optional<std::string> linux_key_name(std::uint16_t code);
// Android KEYCODE_* number used by `input keyevent`, when known.
std::optional<int> android_keycode(std::uint16_t linux_code);

// Devices that emit ABS_MT_* events.
std::vector<std::uint32_t> touch_devices(std::span<const InputEvent> events);

}  // namespace odbr
