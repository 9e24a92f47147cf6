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
#include "odbr/events.hpp"

namespace odbr {
namespace {

constexpr std::string_view kDevicePrefix = "/dev/input/event";

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

std::optional<std::uint32_t> parse_hex32(std::string_view token) {
  if (token.size() > 2 && token[0] == '0' && (token[1] == 'x' || token[1] == 'X')) token.remove_prefix(2);
  if (token.empty() || token.size() > 8) return std::nullopt;
  std::uint32_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value, 16);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

template <typename T>
std::optional<T> parse_decimal(std::string_view token) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

// Splits on runs of blanks.
std::vector<std::string_view> split_fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

bool is_metadata(std::string_view raw, std::string_view trimmed) {
  if (trimmed.empty()) return true;
  if (starts_with(trimmed, "add device") || starts_with(trimmed, "remove device") ||
      starts_with(trimmed, "could not")) {
    return true;
  }
  // Property lines (name:, version:, events:, ...) are indented under their
  // `add device` line.
  return !raw.empty() && (raw.front() == ' ' || raw.front() == '\t') && trimmed.front() != '[' &&
         !starts_with(trimmed, kDevicePrefix);
}

}  // namespace

std::string default_device_path(std::uint32_t device) { return std::string(kDevicePrefix) + std::to_string(device); }

GeteventLine parse_getevent_line(std::string_view line, std::size_t line_number, std::uint64_t fill_timestamp_us) {
  const std::string_view rest_all = trim(line);
  if (is_metadata(line, rest_all)) return MetadataLine{};

  auto fail = [&](const std::string& what) -> ParseError {
    return ParseError(line_number, std::string(line), what);
  };

  std::string_view rest = rest_all;
  std::uint64_t timestamp = fill_timestamp_us;
  if (!rest.empty() && rest.front() == '[') {
    const auto close = rest.find(']');
    if (close == std::string_view::npos) throw fail("unterminated timestamp");
    const std::string_view stamp = trim(rest.substr(1, close - 1));
    const auto dot = stamp.find('.');
    if (dot == std::string_view::npos) throw fail("timestamp without fraction");
    const auto sec = parse_decimal<std::uint64_t>(stamp.substr(0, dot));
    std::string_view frac = stamp.substr(dot + 1);
    if (!sec || frac.empty() || frac.size() > 9 || !parse_decimal<std::uint64_t>(frac)) {
      throw fail("malformed timestamp");
    }
    std::uint64_t usec = 0;
    for (std::size_t i = 0; i < 6; ++i) usec = usec * 10 + (i < frac.size() ? static_cast<std::uint64_t>(frac[i] - '0') : 0);
    timestamp = *sec * 1'000'000 + usec;
    rest = trim(rest.substr(close + 1));
  }

  if (!starts_with(rest, kDevicePrefix)) throw fail("missing device path");
  rest.remove_prefix(kDevicePrefix.size());
  const auto colon = rest.find(':');
  if (colon == std::string_view::npos) throw fail("missing ':' after device path");
  const auto device = parse_decimal<std::uint32_t>(rest.substr(0, colon));
  if (!device) throw fail("malformed device index");

  const auto fields = split_fields(rest.substr(colon + 1));
  if (fields.size() != 3) throw fail("expected 3 hex fields, found " + std::to_string(fields.size()));
  const auto type = parse_hex32(fields[0]);
  const auto code = parse_hex32(fields[1]);
  const auto value = parse_hex32(fields[2]);
  if (!type || *type > 0xffff) throw fail("malformed type field");
  if (!code || *code > 0xffff) throw fail("malformed code field");
  if (!value) throw fail("malformed value field");

  return InputEvent{timestamp, *device, static_cast<std::uint16_t>(*type), static_cast<std::uint16_t>(*code),
                    static_cast<std::int32_t>(*value)};
}

GeteventLog parse_getevent_log(std::string_view text) {
  GeteventLog log;
  std::size_t line_number = 0;
  std::optional<std::uint32_t> announced_device;
  std::uint64_t last_timestamp = 0;

  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_number;

    const std::string_view trimmed = trim(line);
    if (trimmed.empty()) {
      ++log.blank_lines;
      continue;
    }
    auto parsed = parse_getevent_line(line, line_number, last_timestamp);
    if (auto* event = std::get_if<InputEvent>(&parsed)) {
      last_timestamp = event->timestamp_us;
      log.events.push_back(*event);
      announced_device.reset();
      continue;
    }
    ++log.metadata_lines;
    if (starts_with(trimmed, "add device")) {
      const auto pos = trimmed.find(kDevicePrefix);
      announced_device = pos == std::string_view::npos
                             ? std::nullopt
                             : parse_decimal<std::uint32_t>(trim(trimmed.substr(pos + kDevicePrefix.size())));
    } else if (announced_device && starts_with(trimmed, "name:")) {
      std::string_view name = trim(trimmed.substr(5));
      if (name.size() >= 2 && name.front() == '"' && name.back() == '"') name = name.substr(1, name.size() - 2);
      log.device_names[*announced_device] = std::string(name);
    }
  }
  return log;
}

std::string format_getevent_line(const InputEvent& event) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "[%8llu.%06llu] /dev/input/event%u: %04x %04x %08x",
                static_cast<unsigned long long>(event.timestamp_us / 1'000'000),
                static_cast<unsigned long long>(event.timestamp_us % 1'000'000), event.device, event.type,
                event.code, static_cast<std::uint32_t>(event.value));
  return buf;
}

std::string format_getevent_log(std::span<const InputEvent> events) {
  std::string out;
  out.reserve(events.size() * 56);
  for (const auto& e : events) {
    out += format_getevent_line(e);
    out += '\n';
  }
  return out;
}

}  // namespace odbr
