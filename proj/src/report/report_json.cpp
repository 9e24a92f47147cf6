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

#include <regex>
#include <set>

#include "odbr/report.hpp"

namespace odbr {
namespace {

using nlohmann::json;

const std::set<std::string>& top_level_keys() {
  static const std::set<std::string> keys{
      "id",         "schema_version", "title",         "expected_behavior", "actual_behavior",
      "app_package", "device_info",   "created_at",    "steps",             "sensor_traces",
      "raw_events_ref", "hit_policy", "attachments"};
  return keys;
}

const std::set<std::string>& step_keys() {
  static const std::set<std::string> keys{
      "index",     "kind",       "start_point",        "end_point",      "start_time_us", "end_time_us",
      "duration_ms", "pointer_count", "key_code",      "key_name",       "target",        "clickable_ancestor",
      "screenshot_ref", "ui_dump_ref", "description"};
  return keys;
}

template <typename T>
json optional_value(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json point_json(ScreenPoint p) { return json{{"x", p.x}, {"y", p.y}}; }

json summary_json(const std::optional<ComponentSummary>& s) {
  if (!s) return nullptr;
  return json{{"class_name", s->class_name},
              {"resource_id", s->resource_id},
              {"text", s->text},
              {"clickable", s->clickable},
              {"bounds", format_bounds(s->bounds)}};
}

json axis_json(const AxisRanges& a) {
  return json{{"x_min", a.x_min}, {"x_max", a.x_max}, {"y_min", a.y_min}, {"y_max", a.y_max}};
}

std::string kind_name(SensorKind kind) {
  switch (kind) {
    case SensorKind::Accelerometer: return "accelerometer";
    case SensorKind::Gps: return "gps";
    case SensorKind::Other: return "other";
  }
  return "other";
}

json trace_json(const SensorTrace& t) {
  json samples = json::array();
  for (const auto& s : t.samples) {
    json row = json::array({s.timestamp_us});
    for (double v : s.values) row.push_back(v);
    samples.push_back(std::move(row));
  }
  const TraceSummary summary = summarize_trace(t);
  json axes = json::array();
  for (const auto& a : summary.axes) axes.push_back(json{{"min", a.min}, {"max", a.max}, {"mean", a.mean}});
  return json{{"kind", kind_name(t.id.kind)},
              {"name", t.id.name},
              {"unit", t.unit},
              {"min_interval_ms", t.min_interval_ms},
              {"rate_limited", t.rate_limited},
              {"out_of_order", t.out_of_order},
              {"samples", std::move(samples)},
              {"summary", json{{"count", summary.count},
                               {"span_us", optional_value(summary.span_us)},
                               {"axes", std::move(axes)}}}};
}

// Collects violations while reading a document.
class Reader {
 public:
  std::vector<Violation> violations;

  void add(std::string path, std::string message) { violations.push_back({std::move(path), std::move(message)}); }

  const json* field(const json& obj, const std::string& path, const char* key, bool required = true) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) add(join(path, key), "required field is missing");
      return nullptr;
    }
    return &*it;
  }

  std::optional<std::string> string(const json& obj, const std::string& path, const char* key, bool nullable = false) {
    const json* v = field(obj, path, key);
    if (!v) return std::nullopt;
    if (nullable && v->is_null()) return std::nullopt;
    if (!v->is_string()) {
      add(join(path, key), nullable ? "must be a string or null" : "must be a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  template <typename T>
  std::optional<T> integer(const json& obj, const std::string& path, const char* key, bool nullable = false) {
    const json* v = field(obj, path, key);
    if (!v) return std::nullopt;
    if (nullable && v->is_null()) return std::nullopt;
    if (!v->is_number_integer()) {
      add(join(path, key), "must be an integer");
      return std::nullopt;
    }
    if constexpr (std::is_unsigned_v<T>) {
      if (v->is_number_unsigned() || v->get<std::int64_t>() >= 0) return v->get<T>();
      add(join(path, key), "must be non-negative");
      return std::nullopt;
    } else {
      return v->get<T>();
    }
  }

  std::optional<bool> boolean(const json& obj, const std::string& path, const char* key) {
    const json* v = field(obj, path, key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) {
      add(join(path, key), "must be a boolean");
      return std::nullopt;
    }
    return v->get<bool>();
  }

  const json* object(const json& obj, const std::string& path, const char* key, bool nullable = false) {
    const json* v = field(obj, path, key);
    if (!v || (nullable && v->is_null())) return nullptr;
    if (!v->is_object()) {
      add(join(path, key), nullable ? "must be an object or null" : "must be an object");
      return nullptr;
    }
    return v;
  }

  const json* array(const json& obj, const std::string& path, const char* key) {
    const json* v = field(obj, path, key);
    if (!v) return nullptr;
    if (!v->is_array()) {
      add(join(path, key), "must be an array");
      return nullptr;
    }
    return v;
  }

  static std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }
};

ScreenPoint read_point(Reader& r, const json& obj, const std::string& path, const char* key) {
  ScreenPoint p;
  if (const json* v = r.object(obj, path, key)) {
    const std::string here = Reader::join(path, key);
    p.x = r.integer<std::int32_t>(*v, here, "x").value_or(0);
    p.y = r.integer<std::int32_t>(*v, here, "y").value_or(0);
  }
  return p;
}

std::optional<ComponentSummary> read_summary(Reader& r, const json& obj, const std::string& path, const char* key) {
  const json* v = r.object(obj, path, key, true);
  if (!v) return std::nullopt;
  const std::string here = Reader::join(path, key);
  ComponentSummary s;
  s.class_name = r.string(*v, here, "class_name").value_or("");
  s.resource_id = r.string(*v, here, "resource_id").value_or("");
  s.text = r.string(*v, here, "text").value_or("");
  s.clickable = r.boolean(*v, here, "clickable").value_or(false);
  if (auto bounds = r.string(*v, here, "bounds")) {
    try {
      s.bounds = parse_bounds(*bounds);
    } catch (const Error& e) {
      r.add(Reader::join(here, "bounds"), e.what());
    }
  }
  return s;
}

UserInteraction read_step(Reader& r, const json& obj, const std::string& path) {
  UserInteraction s;
  s.index = r.integer<std::size_t>(obj, path, "index").value_or(SIZE_MAX);
  if (auto kind = r.string(obj, path, "kind")) {
    if (auto k = interaction_kind_from_string(*kind)) {
      s.kind = *k;
    } else {
      r.add(path + ".kind", "unknown interaction kind '" + *kind + "'");
    }
  }
  s.start_point = read_point(r, obj, path, "start_point");
  s.end_point = read_point(r, obj, path, "end_point");
  const auto start = r.integer<std::uint64_t>(obj, path, "start_time_us");
  const auto end = r.integer<std::uint64_t>(obj, path, "end_time_us");
  const auto duration = r.integer<std::int64_t>(obj, path, "duration_ms");
  s.start_time_us = start.value_or(0);
  s.end_time_us = end.value_or(0);
  s.duration_ms = duration.value_or(0);
  if (start && end && *end < *start) r.add(path + ".end_time_us", "end_time_us is before start_time_us");
  if (start && end && duration && *end >= *start && *duration != duration_ms(*start, *end)) {
    r.add(path + ".duration_ms", "duration_ms does not equal round((end_time_us - start_time_us) / 1000)");
  }
  s.pointer_count = r.integer<std::size_t>(obj, path, "pointer_count").value_or(0);
  if (auto code = r.integer<std::int64_t>(obj, path, "key_code", true)) {
    if (*code < 0 || *code > 0xffff) {
      r.add(path + ".key_code", "key_code out of range");
    } else {
      s.key_code = static_cast<std::uint16_t>(*code);
    }
  }
  s.key_name = r.string(obj, path, "key_name", true);
  s.target = read_summary(r, obj, path, "target");
  s.clickable_ancestor = read_summary(r, obj, path, "clickable_ancestor");
  s.screenshot_ref = r.string(obj, path, "screenshot_ref", true);
  s.ui_dump_ref = r.string(obj, path, "ui_dump_ref", true);
  s.description = r.string(obj, path, "description").value_or("");
  return s;
}

std::optional<SensorTrace> read_trace(Reader& r, const json& obj, const std::string& path) {
  const auto kind = r.string(obj, path, "kind");
  const auto name = r.string(obj, path, "name");
  if (!kind || !name) return std::nullopt;
  SensorId id = SensorId::from_name(*name);
  if (kind_name(id.kind) != *kind) {
    r.add(path + ".kind", "kind '" + *kind + "' does not match sensor name '" + *name + "'");
    return std::nullopt;
  }
  SensorTrace t;
  t.id = id;
  t.unit = r.string(obj, path, "unit").value_or("");
  t.min_interval_ms = r.integer<std::int64_t>(obj, path, "min_interval_ms").value_or(0);
  t.rate_limited = r.integer<std::size_t>(obj, path, "rate_limited").value_or(0);
  t.out_of_order = r.integer<std::size_t>(obj, path, "out_of_order").value_or(0);
  const json* samples = r.array(obj, path, "samples");
  if (!samples) return t;
  for (std::size_t i = 0; i < samples->size(); ++i) {
    const std::string here = path + ".samples[" + std::to_string(i) + "]";
    const json& row = (*samples)[i];
    if (!row.is_array() || row.size() < 2 || !row[0].is_number_unsigned()) {
      r.add(here, "sample must be [t_us, v1, ...]");
      continue;
    }
    SensorSample sample{row[0].get<std::uint64_t>(), {}};
    bool numeric = true;
    for (std::size_t v = 1; v < row.size(); ++v) {
      if (!row[v].is_number()) numeric = false;
      else sample.values.push_back(row[v].get<double>());
    }
    if (!numeric) {
      r.add(here, "sample values must be numbers");
      continue;
    }
    if (!t.samples.empty()) {
      const auto& last = t.samples.back();
      if (sample.values.size() != last.values.size()) {
        r.add(here, "sample arity differs from the first sample");
      }
      if (sample.timestamp_us <= last.timestamp_us) {
        r.add(here, "sample timestamps must be strictly increasing");
      } else if (sample.timestamp_us - last.timestamp_us < static_cast<std::uint64_t>(t.min_interval_ms) * 1000) {
        r.add(here, "samples closer than min_interval_ms");
      }
    }
    const bool arity_ok = (id.kind == SensorKind::Accelerometer && sample.values.size() == 3) ||
                          (id.kind == SensorKind::Gps && (sample.values.size() == 2 || sample.values.size() == 3)) ||
                          id.kind == SensorKind::Other;
    if (!arity_ok) r.add(here, "value count does not match the sensor kind");
    t.samples.push_back(std::move(sample));
  }
  return t;
}

}  // namespace

json step_to_json_value(const UserInteraction& s) {
  return json{{"index", s.index},
              {"kind", std::string(to_string(s.kind))},
              {"start_point", point_json(s.start_point)},
              {"end_point", point_json(s.end_point)},
              {"start_time_us", s.start_time_us},
              {"end_time_us", s.end_time_us},
              {"duration_ms", s.duration_ms},
              {"pointer_count", s.pointer_count},
              {"key_code", optional_value(s.key_code)},
              {"key_name", optional_value(s.key_name)},
              {"target", summary_json(s.target)},
              {"clickable_ancestor", summary_json(s.clickable_ancestor)},
              {"screenshot_ref", optional_value(s.screenshot_ref)},
              {"ui_dump_ref", optional_value(s.ui_dump_ref)},
              {"description", s.description}};
}

json report_to_json_value(const BugReport& report) {
  json steps = json::array();
  for (const auto& s : report.steps) {
    json step = step_to_json_value(s);
    if (auto it = report.step_extra.find(s.index); it != report.step_extra.end()) {
      for (const auto& [key, value] : it->second.items()) {
        if (!step.contains(key)) step[key] = value;
      }
    }
    steps.push_back(std::move(step));
  }
  json traces = json::array();
  for (const auto& t : report.sensor_traces) traces.push_back(trace_json(t));

  json doc{{"id", report.id.empty() ? content_id(report) : report.id},
           {"schema_version", report.schema_version},
           {"title", report.title},
           {"expected_behavior", report.expected_behavior},
           {"actual_behavior", report.actual_behavior},
           {"app_package", report.app_package},
           {"device_info", json{{"model", report.device.model},
                                {"os_version", report.device.os_version},
                                {"screen_width", report.device.screen_width},
                                {"screen_height", report.device.screen_height},
                                {"axis_ranges", axis_json(report.device.axis)}}},
           {"created_at", report.created_at},
           {"steps", std::move(steps)},
           {"sensor_traces", std::move(traces)},
           {"raw_events_ref", report.raw_events_ref},
           {"hit_policy", report.hit_policy},
           {"attachments", json(report.attachments)}};
  for (const auto& [key, value] : report.extra.items()) {
    if (!doc.contains(key)) doc[key] = value;
  }
  return doc;
}

std::string to_json(const BugReport& report) { return report_to_json_value(report).dump(2) + "\n"; }

BugReport from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::vector<Violation>{{"$", std::string("not valid JSON: ") + e.what()}});
  }
  return from_json_value(doc);
}

BugReport from_json_value(const json& doc) {
  if (!doc.is_object()) throw ValidationError(std::vector<Violation>{{"$", "document must be a JSON object"}});
  Reader r;
  BugReport out;

  static const std::regex kId("^[0-9a-f]{16}$");
  static const std::regex kTimestamp(R"(^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(\.\d+)?(Z|[+-]\d{2}:\d{2})$)");

  if (const json* id = r.field(doc, "", "id", false); id && !id->is_null()) {
    if (!id->is_string() || !std::regex_match(id->get<std::string>(), kId)) {
      r.add("id", "id must be 16 lowercase hex digits");
    } else {
      out.id = id->get<std::string>();
    }
  }
  if (auto version = r.integer<std::int64_t>(doc, "", "schema_version")) {
    if (*version > kSchemaVersion) {
      r.add("schema_version", "schema_version " + std::to_string(*version) + " is newer than supported version " +
                                  std::to_string(kSchemaVersion));
    } else if (*version < 1) {
      r.add("schema_version", "schema_version must be at least 1");
    } else {
      out.schema_version = static_cast<int>(*version);
    }
  }
  out.title = r.string(doc, "", "title").value_or("");
  out.expected_behavior = r.string(doc, "", "expected_behavior").value_or("");
  out.actual_behavior = r.string(doc, "", "actual_behavior").value_or("");
  out.app_package = r.string(doc, "", "app_package").value_or("");
  if (auto created = r.string(doc, "", "created_at")) {
    if (!std::regex_match(*created, kTimestamp)) r.add("created_at", "created_at must be an ISO-8601 UTC timestamp");
    out.created_at = *created;
  }
  out.raw_events_ref = r.string(doc, "", "raw_events_ref").value_or("");
  out.hit_policy = r.string(doc, "", "hit_policy").value_or("");

  if (const json* dev = r.object(doc, "", "device_info")) {
    out.device.model = r.string(*dev, "device_info", "model").value_or("");
    out.device.os_version = r.string(*dev, "device_info", "os_version").value_or("");
    out.device.screen_width = r.integer<std::int32_t>(*dev, "device_info", "screen_width").value_or(0);
    out.device.screen_height = r.integer<std::int32_t>(*dev, "device_info", "screen_height").value_or(0);
    if (const json* axis = r.object(*dev, "device_info", "axis_ranges")) {
      const std::string here = "device_info.axis_ranges";
      out.device.axis.x_min = r.integer<std::int32_t>(*axis, here, "x_min").value_or(0);
      out.device.axis.x_max = r.integer<std::int32_t>(*axis, here, "x_max").value_or(0);
      out.device.axis.y_min = r.integer<std::int32_t>(*axis, here, "y_min").value_or(0);
      out.device.axis.y_max = r.integer<std::int32_t>(*axis, here, "y_max").value_or(0);
      out.device.axis.screen_width = out.device.screen_width;
      out.device.axis.screen_height = out.device.screen_height;
      if (!out.device.axis.valid()) r.add(here, "axis ranges must satisfy max > min with a positive screen size");
    }
  }

  if (const json* attachments = r.object(doc, "", "attachments")) {
    for (const auto& [name, type] : attachments->items()) {
      if (!type.is_string()) {
        r.add("attachments." + name, "content type must be a string");
      } else {
        out.attachments[name] = type.get<std::string>();
      }
    }
  }
  auto require_attachment = [&](const std::optional<std::string>& ref, const std::string& path) {
    if (ref && !out.attachments.count(*ref)) r.add(path, "reference '" + *ref + "' is not listed in attachments");
  };
  require_attachment(r.field(doc, "", "raw_events_ref", false) ? std::optional(out.raw_events_ref) : std::nullopt,
                     "raw_events_ref");

  if (const json* steps = r.array(doc, "", "steps")) {
    for (std::size_t i = 0; i < steps->size(); ++i) {
      const std::string path = "steps[" + std::to_string(i) + "]";
      const json& item = (*steps)[i];
      if (!item.is_object()) {
        r.add(path, "step must be an object");
        continue;
      }
      UserInteraction step = read_step(r, item, path);
      if (step.index != i && step.index != SIZE_MAX) {
        r.add(path + ".index", "steps must be indexed contiguously from 0: expected " + std::to_string(i) +
                                   ", found " + std::to_string(step.index));
      }
      require_attachment(step.screenshot_ref, path + ".screenshot_ref");
      require_attachment(step.ui_dump_ref, path + ".ui_dump_ref");
      json extra = json::object();
      for (const auto& [key, value] : item.items()) {
        if (!step_keys().count(key)) extra[key] = value;
      }
      if (!extra.empty()) out.step_extra[step.index] = std::move(extra);
      out.steps.push_back(std::move(step));
    }
  }

  if (const json* traces = r.array(doc, "", "sensor_traces")) {
    for (std::size_t i = 0; i < traces->size(); ++i) {
      const std::string path = "sensor_traces[" + std::to_string(i) + "]";
      if (!(*traces)[i].is_object()) {
        r.add(path, "sensor trace must be an object");
        continue;
      }
      if (auto trace = read_trace(r, (*traces)[i], path)) out.sensor_traces.push_back(std::move(*trace));
    }
  }

  for (const auto& [key, value] : doc.items()) {
    if (!top_level_keys().count(key)) out.extra[key] = value;
  }
  if (!r.violations.empty()) throw ValidationError(std::move(r.violations));
  return out;
}

}  // namespace odbr
