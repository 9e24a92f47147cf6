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

#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace odbr::testing {

std::filesystem::path source_dir() { return ODBR_SOURCE_DIR; }

std::filesystem::path fixture_dir(const std::string& name) { return source_dir() / "fixtures" / name; }

std::vector<std::string> scenario_names() {
  return {"single-tap", "two-tap", "long-press", "swipe", "multi-touch", "key-press", "three-action"};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TempDir::TempDir(const std::string& prefix) {
  static std::random_device seed;
  for (;;) {
    path_ = std::filesystem::temp_directory_path() / (prefix + "-" + std::to_string(seed()));
    if (std::filesystem::create_directory(path_)) return;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

// ---------------------------------------------------------------------------

namespace {

struct Contact {
  std::int32_t slot;
  std::int32_t id;
  bool synthetic;
  std::vector<TouchPoint> points;
  std::uint64_t up = 0;
  bool lifted = false;
  bool truncated = false;
};

struct Axes {
  std::int32_t x = 0, y = 0;
  std::optional<std::int32_t> pressure;
};

bool touch_companion(const InputEvent& e) {
  if (e.type == 3) {
    return e.code == 0x00 || e.code == 0x01 || e.code == 0x18 || e.code == 0x1c || (e.code >= 0x2f && e.code <= 0x3d);
  }
  return e.type == 1 && e.code >= 0x140 && e.code <= 0x14f;
}

}  // namespace

SimulatedTouches simulate_slots(std::span<const InputEvent> events) {
  std::vector<Contact> contacts;
  std::map<std::int32_t, std::ptrdiff_t> active;  // slot -> contact index, -1 when free
  std::map<std::int32_t, Axes> axes;
  std::map<std::int32_t, bool> changed;
  std::int32_t current = 0;
  SimulatedTouches out;

  auto lift = [&](std::int32_t slot, std::uint64_t t) {
    Contact& c = contacts[active[slot]];
    c.lifted = true;
    c.up = c.points.empty() ? t : std::max(t, c.points.front().timestamp_us);
    active[slot] = -1;
    changed[slot] = false;
  };
  auto begin = [&](std::int32_t slot, std::int32_t id, bool synthetic) {
    contacts.push_back(Contact{slot, id, synthetic, {}});
    active[slot] = static_cast<std::ptrdiff_t>(contacts.size()) - 1;
    changed[slot] = true;
  };
  auto is_active = [&](std::int32_t slot) {
    auto it = active.find(slot);
    return it != active.end() && it->second >= 0;
  };

  for (const InputEvent& e : events) {
    if (e.type == 0) {
      if (e.code != 0) continue;
      for (auto& [slot, index] : active) {
        if (index < 0 || !changed[slot]) continue;
        const Axes& a = axes[slot];
        contacts[index].points.push_back(TouchPoint{e.timestamp_us, a.x, a.y, a.pressure, slot, contacts[index].id});
        changed[slot] = false;
      }
      continue;
    }
    if (e.type == 3 && e.code == 0x2f) {
      if (e.value < 0) {
        out.unconsumed.push_back(e);
      } else {
        current = e.value;
      }
      continue;
    }
    if (e.type == 3 && e.code == 0x39) {
      if (e.value >= 0) {
        if (is_active(current)) {
          if (contacts[active[current]].id == e.value) continue;
          lift(current, e.timestamp_us);
        }
        begin(current, e.value, false);
      } else if (is_active(current)) {
        lift(current, e.timestamp_us);
      }
      continue;
    }
    if (e.type == 3 && (e.code == 0x35 || e.code == 0x36 || e.code == 0x3a)) {
      if (!is_active(current)) begin(current, -2 - current, true);
      Axes& a = axes[current];
      if (e.code == 0x35) a.x = e.value;
      if (e.code == 0x36) a.y = e.value;
      if (e.code == 0x3a) a.pressure = e.value;
      changed[current] = true;
      continue;
    }
    if (touch_companion(e)) continue;
    out.unconsumed.push_back(e);
  }

  const std::uint64_t end = events.empty() ? 0 : events.back().timestamp_us;
  for (auto& c : contacts) {
    if (!c.lifted) {
      c.truncated = true;
      c.up = c.points.empty() ? end : std::max(end, c.points.front().timestamp_us);
    }
    if (c.points.empty()) continue;
    TouchTrack t;
    t.points = c.points;
    t.down_time_us = c.points.front().timestamp_us;
    t.up_time_us = c.up;
    t.truncated = c.truncated;
    t.synthetic = c.synthetic;
    out.tracks.push_back(std::move(t));
  }
  return out;
}

std::vector<InputEvent> random_protocol_b(Rng& rng, int max_slots, int max_frames, std::uint32_t device) {
  std::uniform_int_distribution<int> frames_dist(0, max_frames);
  std::uniform_int_distribution<int> slot_dist(0, max_slots - 1);
  std::uniform_int_distribution<int> coord(0, 4095);
  std::uniform_int_distribution<int> pct(0, 99);
  std::uniform_int_distribution<std::uint64_t> gap(0, 20000);

  std::vector<InputEvent> out;
  std::vector<bool> open(max_slots, false);
  int selected = 0;
  std::int32_t next_id = 1;
  std::uint64_t t = std::uniform_int_distribution<std::uint64_t>(0, 1000000)(rng);
  auto push = [&](std::uint16_t type, std::uint16_t code, std::int32_t value) {
    out.push_back(InputEvent{t, device, type, code, value});
  };
  auto select = [&](int slot) {
    if (slot != selected || pct(rng) < 10) push(3, 0x2f, slot);
    selected = slot;
  };

  const int frames = frames_dist(rng);
  for (int f = 0; f < frames; ++f) {
    t += gap(rng);
    const int actions = 1 + pct(rng) % 4;
    for (int a = 0; a < actions; ++a) {
      const int slot = slot_dist(rng);
      const int roll = pct(rng);
      if (!open[slot]) {
        if (roll < 60) {
          select(slot);
          push(3, 0x39, next_id++);
          if (pct(rng) < 90) push(3, 0x35, coord(rng));
          if (pct(rng) < 90) push(3, 0x36, coord(rng));
          if (pct(rng) < 50) push(3, 0x3a, pct(rng) + 1);
          if (pct(rng) < 30) push(3, 0x30, pct(rng));
          open[slot] = true;
        }
      } else if (roll < 20) {
        select(slot);
        push(3, 0x39, -1);
        open[slot] = false;
      } else if (roll < 25) {
        // lift and touch again in the same frame
        select(slot);
        push(3, 0x39, next_id++);
        push(3, 0x35, coord(rng));
      } else {
        select(slot);
        if (roll < 80) push(3, 0x35, coord(rng));
        if (roll > 50) push(3, 0x36, coord(rng));
        if (roll % 7 == 0) push(3, 0x3a, pct(rng) + 1);
      }
    }
    const int extra = pct(rng);
    if (extra < 8) push(1, 0x14a, pct(rng) % 2);
    else if (extra < 11) push(4, 4, pct(rng));               // EV_MSC scan code
    else if (extra < 13) push(1, 116, pct(rng) % 2);         // power key on the same node
    else if (extra < 15) push(3, 0x00, coord(rng));          // single-touch ABS_X
    push(0, 0, 0);
  }
  if (pct(rng) < 50) {
    // tail without a final SYN_REPORT
    t += gap(rng);
    for (int s = 0; s < max_slots; ++s) {
      if (open[s] && pct(rng) < 50) {
        select(s);
        push(3, 0x39, -1);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void emit_node(Rng& rng, GeneratedTree& tree, std::string& xml, int depth, int extent, int& budget) {
  std::uniform_int_distribution<int> pos(-5, extent + 5);
  std::uniform_int_distribution<int> pct(0, 99);
  Rect r;
  const int kind = pct(rng);
  if (kind < 8) {
    r.left = r.right = pos(rng);
    r.top = r.bottom = pos(rng);
  } else if (kind < 12) {
    r.left = r.right = pos(rng);
    r.top = pos(rng);
    r.bottom = r.top + pct(rng) % 30;
  } else {
    const int a = pos(rng), b = pos(rng), c = pos(rng), d = pos(rng);
    r = Rect{std::min(a, b), std::min(c, d), std::max(a, b), std::max(c, d)};
  }
  const std::size_t order = tree.nodes.size();
  tree.nodes.push_back(GeneratedNode{r, depth, order});
  --budget;

  const bool clickable = pct(rng) < 30;
  xml += "<node index=\"" + std::to_string(order) + "\" text=\"n" + std::to_string(order) +
         "\" resource-id=\"\" class=\"android.view.View\" package=\"p\" content-desc=\"\" clickable=\"" +
         (clickable ? "true" : "false") + "\" bounds=\"" + format_bounds(r) + "\"";
  int children = depth >= 6 ? 0 : pct(rng) % (depth == 0 ? 5 : 4);
  if (children == 0 || budget <= 0) {
    xml += " />";
    return;
  }
  xml += ">";
  for (int i = 0; i < children && budget > 0; ++i) emit_node(rng, tree, xml, depth + 1, extent, budget);
  xml += "</node>";
}

bool inside(std::int32_t v, std::int32_t lo, std::int32_t hi) { return lo == hi ? v == lo : (lo <= v && v < hi); }

}  // namespace

GeneratedTree random_ui_tree(Rng& rng, int extent, int max_nodes) {
  GeneratedTree tree;
  std::string xml = "<?xml version='1.0' encoding='UTF-8' standalone='yes' ?><hierarchy rotation=\"0\">";
  int budget = std::uniform_int_distribution<int>(1, max_nodes)(rng);
  const int roots = 1 + static_cast<int>(rng() % 2);
  for (int i = 0; i < roots && budget > 0; ++i) emit_node(rng, tree, xml, 0, extent, budget);
  xml += "</hierarchy>";
  tree.xml = std::move(xml);
  return tree;
}

std::optional<std::size_t> brute_force_hit(const std::vector<GeneratedNode>& nodes, ScreenPoint p) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Rect& r = nodes[i].bounds;
    if (!inside(p.x, r.left, r.right) || !inside(p.y, r.top, r.bottom)) continue;
    if (!best || std::pair(nodes[i].depth, nodes[i].order) > std::pair(nodes[*best].depth, nodes[*best].order)) {
      best = i;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

std::vector<InputEvent> random_event_log(Rng& rng, std::size_t max_events) {
  std::uniform_int_distribution<std::size_t> count(0, max_events);
  std::uniform_int_distribution<int> pct(0, 99);
  std::uniform_int_distribution<std::uint32_t> device(0, 5);
  std::uniform_int_distribution<std::int64_t> value(std::numeric_limits<std::int32_t>::min(),
                                                    std::numeric_limits<std::int32_t>::max());
  std::vector<InputEvent> log;
  std::uint64_t t = std::uniform_int_distribution<std::uint64_t>(0, 5'000'000'000)(rng);
  const std::size_t n = count(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const int g = pct(rng);
    if (g < 40) {
      // same frame
    } else if (g < 60) {
      t += std::uniform_int_distribution<std::uint64_t>(1, 9999)(rng);
    } else if (g < 65) {
      t += 10000;
    } else if (g < 95) {
      t += std::uniform_int_distribution<std::uint64_t>(10000, 400000)(rng);
    } else {
      t += std::uniform_int_distribution<std::uint64_t>(400000, 8000000)(rng);
    }
    InputEvent e;
    e.timestamp_us = t;
    e.device = device(rng);
    const int kind = pct(rng);
    if (kind < 30) {
      e.type = 0;
      e.code = 0;
    } else if (kind < 60) {
      e.type = 3;
      e.code = static_cast<std::uint16_t>(0x2f + pct(rng) % 15);
    } else if (kind < 80) {
      e.type = 1;
      e.code = static_cast<std::uint16_t>(pct(rng) * 7);
    } else {
      e.type = static_cast<std::uint16_t>(std::uniform_int_distribution<int>(0, 0xffff)(rng));
      e.code = static_cast<std::uint16_t>(std::uniform_int_distribution<int>(0, 0xffff)(rng));
    }
    e.value = static_cast<std::int32_t>(kind < 90 ? value(rng) % 5000 : value(rng));
    log.push_back(e);
  }
  return log;
}

}  // namespace odbr::testing
