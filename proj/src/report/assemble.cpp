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
#include <cstdio>
#include <regex>

#include <openssl/evp.h>

#include "odbr/report.hpp"

namespace odbr {
namespace {

using nlohmann::json;

constexpr const char* kPng = "image/png";
constexpr const char* kXml = "application/xml";
constexpr const char* kText = "text/plain";

std::string three_digits(std::size_t n) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%03zu", n);
  return buf;
}

}  // namespace

std::string screenshot_name(std::size_t capture_index) { return "screen-" + three_digits(capture_index) + ".png"; }
std::string ui_dump_name(std::size_t capture_index) { return "dump-" + three_digits(capture_index) + ".xml"; }

std::vector<std::optional<std::size_t>> match_captures(std::span<const UserInteraction> interactions,
                                                       std::span<const CapturePair> captures) {
  std::vector<std::optional<std::size_t>> out;
  out.reserve(interactions.size());
  for (const auto& step : interactions) {
    std::optional<std::size_t> best;
    for (std::size_t c = 0; c < captures.size(); ++c) {
      if (captures[c].trigger_us <= step.start_time_us &&
          (!best || captures[c].trigger_us >= captures[*best].trigger_us)) {
        best = c;
      }
    }
    out.push_back(best);
  }
  return out;
}

ReportBundle assemble_report(const RawCapture& raw, std::vector<UserInteraction> interactions,
                             std::span<const HitResult> hits, const Annotations& annotations) {
  ReportBundle bundle;
  BugReport& r = bundle.report;
  r.title = annotations.title;
  r.expected_behavior = annotations.expected_behavior;
  r.actual_behavior = annotations.actual_behavior;
  r.app_package = raw.app_package;
  r.created_at = raw.created_at;
  r.device = ReportDevice{raw.device.model, raw.device.os_version, raw.device.axis.screen_width,
                          raw.device.axis.screen_height, raw.device.axis};

  const auto matches = match_captures(interactions, raw.captures);
  std::vector<bool> used(raw.captures.size(), false);
  std::vector<Violation> orphans;
  for (std::size_t i = 0; i < interactions.size(); ++i) {
    UserInteraction& step = interactions[i];
    step.index = i;
    if (i < hits.size()) {
      step.target = hits[i].target;
      step.clickable_ancestor = hits[i].clickable_ancestor;
    }
    step.screenshot_ref.reset();
    step.ui_dump_ref.reset();
    if (const auto c = matches[i]) {
      used[*c] = true;
      if (raw.captures[*c].screenshot) step.screenshot_ref = screenshot_name(*c);
      if (raw.captures[*c].ui_dump) step.ui_dump_ref = ui_dump_name(*c);
    } else {
      orphans.push_back({"steps[" + std::to_string(i) + "]",
                         "no capture pair at or before t=" + std::to_string(step.start_time_us) + "us"});
    }
    step.description = describe(step);
  }
  for (std::size_t c = 0; c < raw.captures.size(); ++c) {
    if (!used[c]) {
      orphans.push_back({"captures[" + std::to_string(c) + "]", "capture pair triggered at t=" +
                                                                  std::to_string(raw.captures[c].trigger_us) +
                                                                  "us matches no interaction"});
    }
  }
  if (!orphans.empty()) throw ValidationError(std::move(orphans));

  for (std::size_t c = 0; c < raw.captures.size(); ++c) {
    const auto& pair = raw.captures[c];
    if (pair.screenshot) {
      r.attachments[screenshot_name(c)] = kPng;
      bundle.blobs[screenshot_name(c)] = std::string(reinterpret_cast<const char*>(pair.screenshot->data()),
                                                     pair.screenshot->size());
    }
    if (pair.ui_dump) {
      r.attachments[ui_dump_name(c)] = kXml;
      bundle.blobs[ui_dump_name(c)] = *pair.ui_dump;
    }
  }
  r.raw_events_ref = std::string(kRawEventsName);
  r.attachments[r.raw_events_ref] = kText;
  bundle.blobs[r.raw_events_ref] = format_getevent_log(raw.events);

  r.steps = std::move(interactions);
  for (const auto& [id, trace] : raw.sensors) r.sensor_traces.push_back(trace);
  r.id = content_id(r);
  return bundle;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, digest, &length) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("SHA-256 digest failed");
  }
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string content_id(const BugReport& report) {
  BugReport copy = report;
  copy.id = "x";  // keep to_json from recursing; the field is erased below
  json doc = report_to_json_value(copy);
  doc.erase("id");
  return sha256_hex(doc.dump()).substr(0, 16);
}

}  // namespace odbr
