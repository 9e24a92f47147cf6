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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace odbr {

struct ScreenPoint {
  std::int32_t x = 0;
  std::int32_t y = 0;

  bool operator==(const ScreenPoint&) const = default;
};

struct RawPoint {
  std::int32_t x = 0;
  std::int32_t y = 0;
};

// Screen rectangle in pixels. Zero-area rects are valid.
struct Rect {
  std::int32_t left = 0;
  std::int32_t top = 0;
  std::int32_t right = 0;
  std::int32_t bottom = 0;

  // Half-open [left, right) x [top, bottom); a degenerate axis matches only
  // its exact coordinate.
  bool contains(ScreenPoint p) const;

  bool operator==(const Rect&) const = default;
};

// Parses `[x1,y1][x2,y2]`. Throws ParseError on any deviation.
Rect parse_bounds(std::string_view text);
std::string format_bounds(const Rect& rect);

struct UiNode {
  std::string class_name;
  std::string resource_id;
  std::string text;
  std::string content_desc;
  std::string package;
  bool clickable = false;
  Rect bounds;
  std::vector<std::size_t> children;  // indices into UiTree::nodes
  std::optional<std::size_t> parent;
  int depth = 0;
  std::size_t document_order = 0;
};

// Nodes are stored in pre-order, so `nodes[i].document_order == i`.
struct UiTree {
  std::vector<UiNode> nodes;
  std::vector<std::size_t> roots;

  const UiNode& node(std::size_t index) const { return nodes.at(index); }
  std::size_t size() const { return nodes.size(); }
};

// Parses a uiautomator dump. Throws ParseError for malformed XML or a node
// without usable bounds; the message names the node's document order.
UiTree parse_ui_dump(std::string_view xml);

// Deepest node containing `p`; ties at equal depth go to the later node in
// document order. nullopt when nothing contains the point.
std::optional<std::size_t> hit_test(const UiTree& tree, ScreenPoint p);

// Closest ancestor (or the node itself) that is clickable.
std::optional<std::size_t> nearest_clickable(const UiTree& tree, std::size_t index);

struct ComponentSummary {
  std::string class_name;
  std::string resource_id;
  std::string text;
  bool clickable = false;
  Rect bounds;

  bool operator==(const ComponentSummary&) const = default;
};

ComponentSummary component_summary(const UiNode& node);

struct AxisRanges {
  std::int32_t x_min = 0;
  std::int32_t x_max = 0;
  std::int32_t y_min = 0;
  std::int32_t y_max = 0;
  std::int32_t screen_width = 0;
  std::int32_t screen_height = 0;

  bool valid() const { return x_max > x_min && y_max > y_min && screen_width > 0 && screen_height > 0; }
  bool operator==(const AxisRanges&) const = default;
};

// Scales a raw touch coordinate onto the pixel grid, clamping to the screen.
ScreenPoint map_raw_to_screen(RawPoint p, const AxisRanges& ranges);

}  // namespace odbr
