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

#include <cstdio>

#include "odbr/report.hpp"

namespace odbr {
namespace {

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

constexpr std::string_view kStyle =
    "body{font-family:sans-serif;margin:2em;max-width:70em}"
    "table{border-collapse:collapse;margin:.5em 0}"
    "td,th{border:1px solid #999;padding:.2em .6em;text-align:left}"
    ".step{border-top:1px solid #ccc;padding:1em 0}"
    ".step img{max-width:270px;border:1px solid #666}"
    ".placeholder{display:inline-block;width:270px;height:120px;border:1px dashed #999;"
    "color:#666;text-align:center;line-height:120px}";

void component_table(std::string& out, const char* caption, const ComponentSummary& c) {
  out += "<table class=\"component\"><caption>";
  out += caption;
  out += "</caption>\n";
  out += "<tr><th>class</th><td>" + html_escape(c.class_name) + "</td></tr>\n";
  out += "<tr><th>resource id</th><td>" + html_escape(c.resource_id) + "</td></tr>\n";
  out += "<tr><th>text</th><td>" + html_escape(c.text) + "</td></tr>\n";
  out += std::string("<tr><th>clickable</th><td>") + (c.clickable ? "true" : "false") + "</td></tr>\n";
  out += "<tr><th>bounds</th><td>" + format_bounds(c.bounds) + "</td></tr>\n";
  out += "</table>\n";
}

}  // namespace

std::string html_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

AssetResolver relative_asset_resolver(const BugReport& report) {
  return [attachments = report.attachments](std::string_view name) -> std::optional<std::string> {
    if (name == kSendeventScriptName || name == kAdbScriptName || attachments.count(std::string(name))) {
      return std::string(name);
    }
    return std::nullopt;
  };
}

std::string render_html(const BugReport& r, const AssetResolver& resolve) {
  std::string out;
  out += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>";
  out += html_escape(r.title.empty() ? "Bug report " + r.id : r.title);
  out += "</title>\n<style>";
  out += kStyle;
  out += "</style>\n</head>\n<body>\n";

  out += "<header>\n<h1>" + html_escape(r.title) + "</h1>\n<table class=\"meta\">\n";
  out += "<tr><th>report</th><td>" + html_escape(r.id) + "</td></tr>\n";
  out += "<tr><th>app</th><td>" + html_escape(r.app_package) + "</td></tr>\n";
  out += "<tr><th>device</th><td>" + html_escape(r.device.model) + " (Android " + html_escape(r.device.os_version) +
         ", " + std::to_string(r.device.screen_width) + "x" + std::to_string(r.device.screen_height) + ")</td></tr>\n";
  out += "<tr><th>created</th><td>" + html_escape(r.created_at) + "</td></tr>\n";
  out += "</table>\n</header>\n";

  out += "<section class=\"annotations\">\n<h2>Expected behavior</h2>\n<p>" + html_escape(r.expected_behavior) +
         "</p>\n<h2>Actual behavior</h2>\n<p>" + html_escape(r.actual_behavior) + "</p>\n</section>\n";

  out += "<section class=\"steps\">\n<h2>Reproduction steps</h2>\n";
  if (r.steps.empty()) out += "<p>No steps were recorded.</p>\n";
  for (const auto& s : r.steps) {
    const std::string n = std::to_string(s.index);
    out += "<section class=\"step\" id=\"step-" + n + "\">\n<h3>Step " + n + "</h3>\n";
    out += "<p class=\"description\">" + html_escape(s.description) + "</p>\n";
    std::optional<std::string> shot = s.screenshot_ref ? resolve(*s.screenshot_ref) : std::nullopt;
    if (shot) {
      out += "<img src=\"" + html_escape(*shot) + "\" alt=\"Screenshot for step " + n + "\">\n";
    } else {
      out += "<div class=\"placeholder\">Screenshot unavailable</div>\n";
    }
    if (s.ui_dump_ref) {
      if (auto dump = resolve(*s.ui_dump_ref)) {
        out += "<p><a href=\"" + html_escape(*dump) + "\">UI hierarchy dump</a></p>\n";
      }
    }
    if (s.target) {
      component_table(out, "Component", *s.target);
    } else {
      out += "<p class=\"no-component\">No component at this location.</p>\n";
    }
    if (s.clickable_ancestor) component_table(out, "Nearest clickable ancestor", *s.clickable_ancestor);
    out += "</section>\n";
  }
  out += "</section>\n";

  out += "<section class=\"sensors\">\n<h2>Sensor data</h2>\n";
  if (r.sensor_traces.empty()) out += "<p>No sensor data was captured.</p>\n";
  for (const auto& t : r.sensor_traces) {
    const TraceSummary summary = summarize_trace(t);
    out += "<table class=\"sensor\"><caption>" + html_escape(t.id.name) + " (" + html_escape(t.unit) +
           ")</caption>\n";
    out += "<tr><th>samples</th><td colspan=\"3\">" + std::to_string(summary.count) + "</td></tr>\n";
    out += "<tr><th>span</th><td colspan=\"3\">" +
           (summary.span_us ? number(static_cast<double>(*summary.span_us) / 1000.0) + " ms" : std::string("-")) +
           "</td></tr>\n";
    out += "<tr><th>axis</th><th>min</th><th>max</th><th>mean</th></tr>\n";
    for (std::size_t a = 0; a < summary.axes.size(); ++a) {
      out += "<tr><td>" + std::to_string(a) + "</td><td>" + number(summary.axes[a].min) + "</td><td>" +
             number(summary.axes[a].max) + "</td><td>" + number(summary.axes[a].mean) + "</td></tr>\n";
    }
    out += "</table>\n";
  }
  out += "</section>\n";

  out += "<section class=\"replay\">\n<h2>Replay</h2>\n<ul>\n";
  const std::pair<std::string_view, const char*> flavors[] = {
      {kSendeventScriptName, "Exact replay (sendevent script)"}, {kAdbScriptName, "Portable replay (adb input script)"}};
  for (const auto& [name, label] : flavors) {
    if (auto link = resolve(name)) {
      out += "<li><a class=\"replay-script\" href=\"" + html_escape(*link) + "\">" + label + "</a></li>\n";
    } else {
      out += "<li>" + std::string(label) + ": unavailable</li>\n";
    }
  }
  out += "</ul>\n</section>\n</body>\n</html>\n";
  return out;
}

}  // namespace odbr
