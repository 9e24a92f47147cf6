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

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "odbr/error.hpp"
#include "odbr/ui_hierarchy.hpp"

namespace odbr {
namespace {

namespace pt = boost::property_tree;

bool axis_contains(std::int32_t lo, std::int32_t hi, std::int32_t v) { return hi == lo ? v == lo : (lo <= v && v < hi); }

// Reads an optionally signed integer at `pos`, advancing it.
std::optional<std::int32_t> read_int(std::string_view s, std::size_t& pos) {
  std::int32_t v = 0;
  const char* first = s.data() + pos;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr == first) return std::nullopt;
  pos += static_cast<std::size_t>(ptr - first);
  return v;
}

bool expect(std::string_view s, std::size_t& pos, char c) {
  if (pos >= s.size() || s[pos] != c) return false;
  ++pos;
  return true;
}

class DumpReader {
 public:
  explicit DumpReader(UiTree& tree) : tree_(tree) {}

  void read_children(const pt::ptree& parent, std::optional<std::size_t> parent_index, int depth) {
    for (const auto& [name, child] : parent) {
      if (name != "node") continue;
      const std::size_t index = tree_.nodes.size();
      tree_.nodes.push_back(make_node(child, index, depth));
      tree_.nodes[index].parent = parent_index;
      if (parent_index) {
        tree_.nodes[*parent_index].children.push_back(index);
      } else {
        tree_.roots.push_back(index);
      }
      read_children(child, index, depth + 1);
    }
  }

 private:
  static UiNode make_node(const pt::ptree& element, std::size_t order, int depth) {
    UiNode node;
    node.depth = depth;
    node.document_order = order;
    const auto attrs = element.get_child_optional("<xmlattr>");
    auto attr = [&](const char* key) -> std::string {
      return attrs ? attrs->get<std::string>(key, "") : std::string();
    };
    if (!attrs || !attrs->get_child_optional("bounds")) {
      throw ParseError(0, "node " + std::to_string(order), "ui dump node without bounds");
    }
    try {
      node.bounds = parse_bounds(attr("bounds"));
    } catch (const ParseError&) {
      throw ParseError(0, attr("bounds"), "ui dump node " + std::to_string(order) + " has invalid bounds");
    }
    node.class_name = attr("class");
    node.resource_id = attr("resource-id");
    node.text = attr("text");
    node.content_desc = attr("content-desc");
    node.package = attr("package");
    node.clickable = attr("clickable") == "true";
    return node;
  }

  UiTree& tree_;
};

}  // namespace

bool Rect::contains(ScreenPoint p) const { return axis_contains(left, right, p.x) && axis_contains(top, bottom, p.y); }

Rect parse_bounds(std::string_view text) {
  std::size_t pos = 0;
  Rect r;
  auto fail = [&] { return ParseError(0, std::string(text), "malformed bounds"); };
  if (!expect(text, pos, '[')) throw fail();
  auto x1 = read_int(text, pos);
  if (!x1 || !expect(text, pos, ',')) throw fail();
  auto y1 = read_int(text, pos);
  if (!y1 || !expect(text, pos, ']') || !expect(text, pos, '[')) throw fail();
  auto x2 = read_int(text, pos);
  if (!x2 || !expect(text, pos, ',')) throw fail();
  auto y2 = read_int(text, pos);
  if (!y2 || !expect(text, pos, ']') || pos != text.size()) throw fail();
  if (*x2 < *x1 || *y2 < *y1) throw ParseError(0, std::string(text), "inverted bounds");
  r = Rect{*x1, *y1, *x2, *y2};
  return r;
}

std::string format_bounds(const Rect& r) {
  return "[" + std::to_string(r.left) + "," + std::to_string(r.top) + "][" + std::to_string(r.right) + "," +
         std::to_string(r.bottom) + "]";
}

UiTree parse_ui_dump(std::string_view xml) {
  pt::ptree doc;
  std::istringstream in{std::string(xml)};
  try {
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(e.line(), e.message(), "malformed ui dump XML");
  }
  const auto hierarchy = doc.get_child_optional("hierarchy");
  if (!hierarchy) throw ParseError(0, "", "ui dump has no <hierarchy> root");

  UiTree tree;
  DumpReader(tree).read_children(*hierarchy, std::nullopt, 0);
  return tree;
}

std::optional<std::size_t> hit_test(const UiTree& tree, ScreenPoint p) {
  // Children may overflow their parents, so every subtree is visited; the
  // pre-order walk makes the later of two equal-depth hits win on `>=`.
  std::optional<std::size_t> best;
  std::vector<std::size_t> stack(tree.roots.rbegin(), tree.roots.rend());
  while (!stack.empty()) {
    const std::size_t index = stack.back();
    stack.pop_back();
    const UiNode& node = tree.nodes[index];
    if (node.bounds.contains(p) && (!best || node.depth >= tree.nodes[*best].depth)) best = index;
    stack.insert(stack.end(), node.children.rbegin(), node.children.rend());
  }
  return best;
}

std::optional<std::size_t> nearest_clickable(const UiTree& tree, std::size_t index) {
  std::optional<std::size_t> cursor = index;
  while (cursor) {
    if (tree.nodes.at(*cursor).clickable) return cursor;
    cursor = tree.nodes[*cursor].parent;
  }
  return std::nullopt;
}

ComponentSummary component_summary(const UiNode& node) {
  return ComponentSummary{node.class_name, node.resource_id, node.text, node.clickable, node.bounds};
}

ScreenPoint map_raw_to_screen(RawPoint p, const AxisRanges& ranges) {
  auto scale = [](std::int64_t v, std::int64_t lo, std::int64_t hi, std::int64_t dim) -> std::int32_t {
    const std::int64_t num = (v - lo) * (dim - 1);
    const std::int64_t den = hi - lo;
    if (num <= 0) return 0;
    const std::int64_t rounded = (2 * num + den) / (2 * den);  // half-up
    return static_cast<std::int32_t>(std::min(rounded, dim - 1));
  };
  return ScreenPoint{scale(p.x, ranges.x_min, ranges.x_max, ranges.screen_width),
                     scale(p.y, ranges.y_min, ranges.y_max, ranges.screen_height)};
}

}  // namespace odbr
