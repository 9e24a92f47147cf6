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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace odbr {

enum class SensorKind { Accelerometer, Gps, Other };

// Identifies one sensor stream; `name` distinguishes Other kinds.
struct SensorId {
  SensorKind kind = SensorKind::Other;
  std::string name;  // canonical name: "accelerometer", "gps" or the Other name

  static SensorId from_name(std::string_view name);
  bool operator==(const SensorId&) const = default;
  auto operator<=>(const SensorId&) const = default;
};

struct SensorSample {
  std::uint64_t timestamp_us = 0;
  std::vector<double> values;

  bool operator==(const SensorSample&) const = default;
};

enum class Admission { Admitted, RateLimited, OutOfOrder, Duplicate };

struct SensorTrace {
  SensorId id;
  std::string unit;
  std::int64_t min_interval_ms = 0;
  std::vector<SensorSample> samples;
  std::size_t rate_limited = 0;
  std::size_t out_of_order = 0;

  // Sensor floors and units used when a trace is created implicitly.
  static SensorTrace for_sensor(const SensorId& id);

  // Admits `sample` when the trace is empty or it is at least
  // min_interval_ms after the last admitted sample. Throws Error when the
  // value count does not fit the sensor kind.
  Admission admit(const SensorSample& sample);

  bool operator==(const SensorTrace&) const = default;
};

inline Admission admit_sample(SensorTrace& trace, const SensorSample& sample) { return trace.admit(sample); }

struct AxisSummary {
  double min = 0;
  double max = 0;
  double mean = 0;

  bool operator==(const AxisSummary&) const = default;
};

struct TraceSummary {
  std::size_t count = 0;
  std::optional<std::uint64_t> span_us;
  std::vector<AxisSummary> axes;  // empty when count == 0

  bool operator==(const TraceSummary&) const = default;
};

TraceSummary summarize_trace(const SensorTrace& trace);

using SensorTraces = std::map<SensorId, SensorTrace>;

// Admits into the trace for `id`, creating it with default (or `floors_ms`)
// settings first. Throws Error on arity mismatch.
Admission admit_to(SensorTraces& traces, const SensorId& id, const SensorSample& sample,
                   const std::map<std::string, std::int64_t>& floors_ms = {});

// Parses `<kind> <t_usec> <v1> [v2 v3]...` lines into admitted traces.
// Blank lines and `#` comments are skipped.
SensorTraces parse_sensor_lines(std::string_view text, std::map<std::string, std::int64_t> floors_ms = {});

// Parses one fixture line; nullopt for blanks and comments.
std::optional<std::pair<SensorId, SensorSample>> parse_sensor_line(std::string_view line, std::size_t line_number = 0);

}  // namespace odbr
