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
#include <fstream>
#include <iterator>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "odbr/fixture_bridge.hpp"

namespace odbr {
namespace {

std::vector<std::filesystem::path> sorted_files(const std::filesystem::path& dir, std::string_view extension) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(dir)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::byte> read_binary_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<std::byte> out(text.size());
  std::transform(text.begin(), text.end(), out.begin(), [](char c) { return static_cast<std::byte>(c); });
  return out;
}

DeviceInfo parse_device_json(const std::string& text) {
  DeviceInfo info;
  try {
    const auto doc = nlohmann::json::parse(text);
    info.model = doc.value("model", "");
    info.os_version = doc.value("os_version", "");
    const auto& axis = doc.at("axis_ranges");
    info.axis = AxisRanges{axis.at("x_min").get<std::int32_t>(),       axis.at("x_max").get<std::int32_t>(),
                           axis.at("y_min").get<std::int32_t>(),       axis.at("y_max").get<std::int32_t>(),
                           doc.at("screen_width").get<std::int32_t>(), doc.at("screen_height").get<std::int32_t>()};
    if (doc.contains("epoch_us")) info.epoch_us = doc.at("epoch_us").get<std::uint64_t>();
    if (doc.contains("input_devices")) {
      for (const auto& [key, path] : doc.at("input_devices").items()) {
        info.input_devices[static_cast<std::uint32_t>(std::stoul(key))] = path.get<std::string>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid device.json: ") + e.what());
  }
  if (!info.axis.valid()) throw Error("invalid device.json: axis ranges or screen size out of range");
  return info;
}

Scenario load_scenario(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("scenario directory " + dir.string() + " does not exist");
  Scenario s;
  s.dir = dir;
  s.getevent_text = read_text_file(dir / "events.getevent");
  const std::string device_text = read_text_file(dir / "device.json");
  s.device = parse_device_json(device_text);
  const auto doc = nlohmann::json::parse(device_text);
  s.created_at = doc.value("created_at", "");
  s.app_package = doc.value("app_package", "");
  s.packages = doc.value("packages", std::vector<std::string>{});
  if (std::filesystem::exists(dir / "sensors.txt")) s.sensor_text = read_text_file(dir / "sensors.txt");
  for (const auto& path : sorted_files(dir / "dumps", ".xml")) s.dumps.push_back(read_text_file(path));
  for (const auto& path : sorted_files(dir / "screens", ".png")) s.screens.push_back(read_binary_file(path));
  return s;
}

FixtureBridge::FixtureBridge(Scenario scenario, Options options)
    : scenario_(std::move(scenario)), options_(std::move(options)) {
  events_ = parse_getevent_log(scenario_.getevent_text).events;
}

std::string FixtureBridge::run_shell(const std::string& command) {
  std::lock_guard lock(mu_);
  shell_log_.push_back(command);
  return {};
}

void FixtureBridge::stream_input_events(const EventSink& sink, std::stop_token stop) {
  const auto begin = std::chrono::steady_clock::now();
  for (const auto& e : events_) {
    if (stop.stop_requested()) return;
    if (options_.pace > 0 && !events_.empty()) {
      const auto offset = std::chrono::microseconds(
          static_cast<std::int64_t>(static_cast<double>(e.timestamp_us - events_.front().timestamp_us) * options_.pace));
      std::this_thread::sleep_until(begin + offset);
    }
    sink(e);
  }
}

std::string FixtureBridge::dump_hierarchy() {
  const std::size_t n = next_dump_++;
  if (n >= scenario_.dumps.size()) throw BridgeError("fixture has no ui dump #" + std::to_string(n));
  return scenario_.dumps[n];
}

std::vector<std::byte> FixtureBridge::screencap() {
  const std::size_t n = next_screen_++;
  if (options_.failing_screencaps.count(n)) throw BridgeError("screencap failed (injected fault #" + std::to_string(n) + ")");
  if (n >= scenario_.screens.size()) throw BridgeError("fixture has no screenshot #" + std::to_string(n));
  return scenario_.screens[n];
}

void FixtureBridge::poll_sensors(const SensorSink& sink, std::stop_token stop) {
  std::string_view text = scenario_.sensor_text;
  std::size_t line_number = 0;
  while (!text.empty() && !stop.stop_requested()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto parsed = parse_sensor_line(line, ++line_number)) sink(parsed->first, parsed->second);
  }
}

void FixtureBridge::inject_event(const InputEvent& event) {
  std::lock_guard lock(mu_);
  if (options_.failing_injections.count(injected_.size() + 1)) {
    throw BridgeError("sendevent failed (injected fault at event " + std::to_string(injected_.size() + 1) + ")");
  }
  injected_.push_back(event);
}

std::vector<std::string> FixtureBridge::list_packages() { return scenario_.packages; }

DeviceInfo FixtureBridge::device_info() { return scenario_.device; }

std::vector<InputEvent> FixtureBridge::injected() const {
  std::lock_guard lock(mu_);
  return injected_;
}

std::vector<std::string> FixtureBridge::shell_log() const {
  std::lock_guard lock(mu_);
  return shell_log_;
}

}  // namespace odbr
