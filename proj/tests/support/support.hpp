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
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "odbr/events.hpp"
#include "odbr/ui_hierarchy.hpp"

namespace odbr::testing {

using Rng = std::mt19937_64;

std::filesystem::path source_dir();
std::filesystem::path fixture_dir(const std::string& name);
std::vector<std::string> scenario_names();
std::string slurp(const std::filesystem::path& path);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Reference slot simulator: replays the protocol-B rules with an explicit
// slot -> contact table, sharing no code with track_multitouch.
struct SimulatedTouches {
  std::vector<TouchTrack> tracks;
  std::vector<InputEvent> unconsumed;
};
SimulatedTouches simulate_slots(std::span<const InputEvent> events);

// A well-formed protocol-B stream: at most `max_slots` slots and
// `max_frames` SYN_REPORT frames, with occasional non-touch events mixed in.
std::vector<InputEvent> random_protocol_b(Rng& rng, int max_slots = 4, int max_frames = 200,
                                          std::uint32_t device = 1);

// Random uiautomator document together with the geometry, depth and
// pre-order position of every node as the generator laid them out.
struct GeneratedNode {
  Rect bounds;
  int depth = 0;
  std::size_t order = 0;
};
struct GeneratedTree {
  std::string xml;
  std::vector<GeneratedNode> nodes;
};
GeneratedTree random_ui_tree(Rng& rng, int extent = 100, int max_nodes = 40);

// Scans every node; keeps those containing `p` and returns the one with the
// greatest (depth, order).
std::optional<std::size_t> brute_force_hit(const std::vector<GeneratedNode>& nodes, ScreenPoint p);

// Arbitrary event log: several devices, any type/code, signed values, and
// gaps from zero up to seconds at microsecond resolution.
std::vector<InputEvent> random_event_log(Rng& rng, std::size_t max_events = 300);

}  // namespace odbr::testing
