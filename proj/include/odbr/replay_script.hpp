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

#include "odbr/events.hpp"
#include "odbr/gesture.hpp"

namespace odbr {

// Sub-10ms shell sleeps are noise; shorter gaps are carried forward.
inline constexpr std::int64_t kSleepFloorMs = 10;

struct ReplayTiming {
  enum class Mode { Preserve, FixedGap, MaxSpeed };

  Mode mode = Mode::Preserve;
  std::int64_t gap_ms = 0;  // FixedGap only

  static ReplayTiming preserve() { return {Mode::Preserve, 0}; }
  static ReplayTiming fixed_gap(std::int64_t ms) { return {Mode::FixedGap, ms}; }
  static ReplayTiming max_speed() { return {Mode::MaxSpeed, 0}; }

  // "preserve", "max_speed", "fixed_gap:<ms>"
  static ReplayTiming parse(std::string_view text);
  std::string to_string() const;

  bool operator==(const ReplayTiming&) const = default;
};

// Where sleeps go in a replay. `before_ms[i]` is the sleep preceding event
// i (0 = none). In preserve mode gaps accumulate until they reach the floor
// and are emitted as whole milliseconds, the sub-millisecond residue carried
// on; anything left after the last event becomes `trailing_ms` when it is at
// least 1ms, so the sleeps add up to the recorded duration.
struct SleepPlan {
  std::vector<std::int64_t> before_ms;
  std::int64_t trailing_ms = 0;

  std::int64_t total_ms() const;
  std::size_t sleep_count() const;
};

SleepPlan plan_sleeps(std::span<const InputEvent> events, const ReplayTiming& timing);

using DeviceMap = std::map<std::uint32_t, std::string>;

// Throws Error naming the first device index without a mapping. An empty
// map means `/dev/input/event<N>` for every device.
std::string emit_sendevent_script(std::span<const InputEvent> events, const DeviceMap& devices,
                                  const ReplayTiming& timing, std::string_view report_id = "");

struct ParsedScript {
  std::vector<InputEvent> events;   // timestamps rebuilt from the sleeps
  std::vector<std::int64_t> gaps_ms;  // same layout as SleepPlan::before_ms
  std::int64_t trailing_ms = 0;
  std::optional<std::string> report_id;
  std::optional<std::string> timing;
};

// Inverse of emit_sendevent_script. Throws ParseError (with line number) on
// unknown directives.
ParsedScript parse_sendevent_script(std::string_view text, const DeviceMap& devices = {});

std::string emit_adb_script(std::span<const UserInteraction> steps, std::string_view report_id = "");

std::string format_sleep(std::int64_t ms);

}  // namespace odbr
