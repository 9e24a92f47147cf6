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
#include <sstream>

#include "odbr/error.hpp"
#include "odbr/sensor.hpp"

namespace odbr {
namespace {

bool arity_ok(SensorKind kind, std::size_t n) {
  switch (kind) {
    case SensorKind::Accelerometer: return n == 3;
    case SensorKind::Gps: return n == 2 || n == 3;
    case SensorKind::Other: return n >= 1;
  }
  return false;
}

}  // namespace

SensorId SensorId::from_name(std::string_view name) {
  if (name == "accelerometer") return {SensorKind::Accelerometer, "accelerometer"};
  if (name == "gps") return {SensorKind::Gps, "gps"};
  return {SensorKind::Other, std::string(name)};
}

SensorTrace SensorTrace::for_sensor(const SensorId& id) {
  SensorTrace trace;
  trace.id = id;
  switch (id.kind) {
    case SensorKind::Accelerometer:
      trace.unit = "m/s^2";
      trace.min_interval_ms = 50;
      break;
    case SensorKind::Gps:
      trace.unit = "deg,deg,m";
      trace.min_interval_ms = 1000;
      break;
    case SensorKind::Other:
      trace.min_interval_ms = 0;
      break;
  }
  return trace;
}

Admission SensorTrace::admit(const SensorSample& sample) {
  std::optional<std::size_t> established;
  if (!samples.empty()) established = samples.front().values.size();
  if (!arity_ok(id.kind, sample.values.size()) ||
      (established && *established != sample.values.size())) {
    throw Error("sensor " + id.name + ": sample at t=" + std::to_string(sample.timestamp_us) + "us has " +
                std::to_string(sample.values.size()) + " values");
  }
  if (samples.empty()) {
    samples.push_back(sample);
    return Admission::Admitted;
  }
  const SensorSample& last = samples.back();
  if (sample == last) return Admission::Duplicate;
  if (sample.timestamp_us < last.timestamp_us) {
    ++out_of_order;
    return Admission::OutOfOrder;
  }
  const std::uint64_t gap = sample.timestamp_us - last.timestamp_us;
  if (gap == 0 || gap < static_cast<std::uint64_t>(min_interval_ms) * 1000) {
    ++rate_limited;
    return Admission::RateLimited;
  }
  samples.push_back(sample);
  return Admission::Admitted;
}

TraceSummary summarize_trace(const SensorTrace& trace) {
  TraceSummary out;
  out.count = trace.samples.size();
  if (trace.samples.empty()) return out;
  out.span_us = trace.samples.back().timestamp_us - trace.samples.front().timestamp_us;
  const std::size_t axes = trace.samples.front().values.size();
  out.axes.resize(axes);
  for (std::size_t a = 0; a < axes; ++a) {
    double lo = trace.samples.front().values[a];
    double hi = lo;
    double sum = 0;
    for (const auto& s : trace.samples) {
      lo = std::min(lo, s.values[a]);
      hi = std::max(hi, s.values[a]);
      sum += s.values[a];
    }
    out.axes[a] = AxisSummary{lo, hi, sum / static_cast<double>(trace.samples.size())};
  }
  return out;
}

std::optional<std::pair<SensorId, SensorSample>> parse_sensor_line(std::string_view line, std::size_t line_number) {
  if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::istringstream in{std::string(line)};
  std::string kind;
  if (!(in >> kind)) return std::nullopt;

  std::string token;
  if (!(in >> token)) throw ParseError(line_number, std::string(line), "sensor line without timestamp");
  std::uint64_t t = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), t);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line_number, std::string(line), "malformed sensor timestamp");
  }
  SensorSample sample{t, {}};
  while (in >> token) {
    try {
      std::size_t used = 0;
      sample.values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw ParseError(line_number, std::string(line), "malformed sensor value");
    }
  }
  if (sample.values.empty()) throw ParseError(line_number, std::string(line), "sensor line without values");
  return std::make_pair(SensorId::from_name(kind), std::move(sample));
}

Admission admit_to(SensorTraces& traces, const SensorId& id, const SensorSample& sample,
                   const std::map<std::string, std::int64_t>& floors_ms) {
  auto it = traces.find(id);
  if (it == traces.end()) {
    auto trace = SensorTrace::for_sensor(id);
    if (auto f = floors_ms.find(id.name); f != floors_ms.end()) trace.min_interval_ms = f->second;
    it = traces.emplace(id, std::move(trace)).first;
  }
  return it->second.admit(sample);
}

SensorTraces parse_sensor_lines(std::string_view text, std::map<std::string, std::int64_t> floors_ms) {
  SensorTraces traces;
  std::size_t line_number = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_number;
    auto parsed = parse_sensor_line(line, line_number);
    if (!parsed) continue;
    try {
      admit_to(traces, parsed->first, parsed->second, floors_ms);
    } catch (const Error& e) {
      throw ParseError(line_number, std::string(line), e.what());
    }
  }
  return traces;
}

}  // namespace odbr
