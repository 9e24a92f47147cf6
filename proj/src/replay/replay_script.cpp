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

#include <charconv>
#include <cstdio>

#include "odbr/error.hpp"
#include "odbr/replay_script.hpp"

namespace odbr {
namespace {

constexpr std::string_view kShebang = "#!/system/bin/sh";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <typename T>
std::optional<T> parse_int(std::string_view token) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

// "<seconds>.<millis>" with exactly three fractional digits.
std::optional<std::int64_t> parse_sleep(std::string_view token) {
  const auto dot = token.find('.');
  if (dot == std::string_view::npos || token.size() - dot - 1 != 3) return std::nullopt;
  const auto sec = parse_int<std::int64_t>(token.substr(0, dot));
  const auto ms = parse_int<std::int64_t>(token.substr(dot + 1));
  if (!sec || !ms || *sec < 0 || *ms < 0) return std::nullopt;
  return *sec * 1000 + *ms;
}

}  // namespace

ReplayTiming ReplayTiming::parse(std::string_view text) {
  if (text == "preserve") return preserve();
  if (text == "max_speed") return max_speed();
  constexpr std::string_view kFixed = "fixed_gap:";
  if (text.substr(0, kFixed.size()) == kFixed) {
    if (auto ms = parse_int<std::int64_t>(text.substr(kFixed.size())); ms && *ms >= 0) return fixed_gap(*ms);
  }
  throw Error("unknown replay timing '" + std::string(text) + "' (expected preserve, max_speed or fixed_gap:<ms>)");
}

std::string ReplayTiming::to_string() const {
  switch (mode) {
    case Mode::Preserve: return "preserve";
    case Mode::MaxSpeed: return "max_speed";
    case Mode::FixedGap: return "fixed_gap:" + std::to_string(gap_ms);
  }
  return "preserve";
}

std::int64_t SleepPlan::total_ms() const {
  std::int64_t total = trailing_ms;
  for (auto ms : before_ms) total += ms;
  return total;
}

std::size_t SleepPlan::sleep_count() const {
  std::size_t n = trailing_ms > 0 ? 1 : 0;
  for (auto ms : before_ms) n += ms > 0 ? 1 : 0;
  return n;
}

SleepPlan plan_sleeps(std::span<const InputEvent> events, const ReplayTiming& timing) {
  SleepPlan plan;
  plan.before_ms.assign(events.size(), 0);
  if (timing.mode == ReplayTiming::Mode::MaxSpeed) return plan;

  std::int64_t pending_us = 0;
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].timestamp_us > events[i - 1].timestamp_us) {
      pending_us += static_cast<std::int64_t>(events[i].timestamp_us - events[i - 1].timestamp_us);
    }
    if (pending_us >= kSleepFloorMs * 1000) {
      const std::int64_t ms = pending_us / 1000;
      plan.before_ms[i] = timing.mode == ReplayTiming::Mode::FixedGap ? timing.gap_ms : ms;
      pending_us -= ms * 1000;
    }
  }
  if (timing.mode == ReplayTiming::Mode::Preserve && pending_us >= 1000) plan.trailing_ms = pending_us / 1000;
  return plan;
}

std::string format_sleep(std::int64_t ms) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "sleep %lld.%03lld", static_cast<long long>(ms / 1000),
                static_cast<long long>(ms % 1000));
  return buf;
}

std::string emit_sendevent_script(std::span<const InputEvent> events, const DeviceMap& devices,
                                  const ReplayTiming& timing, std::string_view report_id) {
  std::string out;
  out.reserve(64 + events.size() * 40);
  out += kShebang;
  out += "\n# odbr sendevent replay\n# report: ";
  out += report_id.empty() ? "-" : report_id;
  out += "\n# timing: " + timing.to_string() + "\n# events: " + std::to_string(events.size()) + "\n";

  const SleepPlan plan = plan_sleeps(events, timing);
  for (std::size_t i = 0; i < events.size(); ++i) {
    const InputEvent& e = events[i];
    std::string path;
    if (devices.empty()) {
      path = default_device_path(e.device);
    } else if (auto it = devices.find(e.device); it != devices.end()) {
      path = it->second;
    } else {
      throw Error("no device path mapped for input device index " + std::to_string(e.device));
    }
    if (plan.before_ms[i] > 0) out += format_sleep(plan.before_ms[i]) + "\n";
    out += "sendevent " + path + " " + std::to_string(e.type) + " " + std::to_string(e.code) + " " +
           std::to_string(e.value) + "\n";
  }
  if (plan.trailing_ms > 0) out += format_sleep(plan.trailing_ms) + "\n";
  return out;
}

ParsedScript parse_sendevent_script(std::string_view text, const DeviceMap& devices) {
  ParsedScript out;
  std::map<std::string, std::uint32_t, std::less<>> by_path;
  for (const auto& [index, path] : devices) by_path.emplace(path, index);

  std::size_t line_number = 0;
  std::int64_t clock_ms = 0;
  std::int64_t pending_ms = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_number;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '#') {
      constexpr std::string_view kReport = "# report: ";
      constexpr std::string_view kTiming = "# timing: ";
      if (line.substr(0, kReport.size()) == kReport) out.report_id = std::string(line.substr(kReport.size()));
      if (line.substr(0, kTiming.size()) == kTiming) out.timing = std::string(line.substr(kTiming.size()));
      continue;
    }

    const auto fields = split_fields(line);
    if (fields[0] == "sleep") {
      const auto ms = fields.size() == 2 ? parse_sleep(fields[1]) : std::nullopt;
      if (!ms) throw ParseError(line_number, std::string(raw), "malformed sleep directive");
      pending_ms += *ms;
      continue;
    }
    if (fields[0] != "sendevent") throw ParseError(line_number, std::string(raw), "unknown directive");
    if (fields.size() != 5) throw ParseError(line_number, std::string(raw), "sendevent takes 4 arguments");

    InputEvent e;
    if (auto it = by_path.find(fields[1]); it != by_path.end()) {
      e.device = it->second;
    } else {
      const std::string default_prefix = default_device_path(0).substr(0, default_device_path(0).size() - 1);
      const auto index = fields[1].substr(0, default_prefix.size()) == default_prefix
                             ? parse_int<std::uint32_t>(fields[1].substr(default_prefix.size()))
                             : std::nullopt;
      if (!index) throw ParseError(line_number, std::string(raw), "unmapped device path");
      e.device = *index;
    }
    const auto type = parse_int<std::uint16_t>(fields[2]);
    const auto code = parse_int<std::uint16_t>(fields[3]);
    const auto value = parse_int<std::int32_t>(fields[4]);
    if (!type || !code || !value) throw ParseError(line_number, std::string(raw), "malformed sendevent argument");
    e.type = *type;
    e.code = *code;
    e.value = *value;

    clock_ms += pending_ms;
    e.timestamp_us = static_cast<std::uint64_t>(clock_ms) * 1000;
    out.gaps_ms.push_back(out.events.empty() ? 0 : pending_ms);
    pending_ms = 0;
    out.events.push_back(e);
  }
  out.trailing_ms = pending_ms;
  return out;
}

std::string emit_adb_script(std::span<const UserInteraction> steps, std::string_view report_id) {
  std::string out;
  out += kShebang;
  out += "\n# odbr adb input replay\n# report: ";
  out += report_id.empty() ? "-" : report_id;
  out += "\n# run on the device, e.g. adb shell sh < replay.adb.sh\n";

  auto xy = [](ScreenPoint p) { return std::to_string(p.x) + " " + std::to_string(p.y); };
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const UserInteraction& s = steps[i];
    if (i > 0) {
      const std::int64_t gap = duration_ms(steps[i - 1].end_time_us, s.start_time_us);
      if (gap > 0) out += format_sleep(gap) + "\n";
    }
    switch (s.kind) {
      case InteractionKind::Tap:
        out += "input tap " + xy(s.start_point) + "\n";
        break;
      case InteractionKind::Swipe:
        out += "input swipe " + xy(s.start_point) + " " + xy(s.end_point) + " " + std::to_string(s.duration_ms) + "\n";
        break;
      case InteractionKind::LongPress:
        out += "input swipe " + xy(s.start_point) + " " + xy(s.start_point) + " " + std::to_string(s.duration_ms) +
               "\n";
        break;
      case InteractionKind::KeyPress:
        if (auto code = s.key_code ? android_keycode(*s.key_code) : std::nullopt) {
          out += "input keyevent " + std::to_string(*code) + "\n";
        } else {
          out += "# step " + std::to_string(s.index) + ": key " + std::to_string(s.key_code.value_or(0)) +
                 " has no keyevent equivalent; see the sendevent script\n";
        }
        break;
      case InteractionKind::MultiTouch:
        out += "# step " + std::to_string(s.index) + ": multi-touch gesture (" + std::to_string(s.pointer_count) +
               " fingers) cannot be expressed with `input`; see the sendevent script\n";
        break;
    }
  }
  return out;
}

}  // namespace odbr
