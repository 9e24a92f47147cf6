#!/usr/bin/env python3
# Copyright (C) 2026 The ODBR Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates fixtures/: scenario directories and their expected.json."""

import json
import os
import shutil
import struct
import sys
import zlib

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")
EPOCH_US = 1_000_000_000
TOUCH = 1
KEYS = 0
APP = "com.example.notes"

EV_SYN, EV_KEY, EV_ABS = 0, 1, 3
SLOT, TID, MX, MY, PRESS = 0x2F, 0x39, 0x35, 0x36, 0x3A
BTN_TOUCH = 0x14A


def png(width, height, rgb):
    def chunk(tag, data):
        body = tag + data
        return struct.pack(">I", len(data)) + body + struct.pack(">I", zlib.crc32(body) & 0xFFFFFFFF)

    row = b"\x00" + bytes(rgb) * width
    raw = row * height
    return (b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0))
            + chunk(b"IDAT", zlib.compress(raw, 9)) + chunk(b"IEND", b""))


class Log:
    def __init__(self, devices):
        self.lines = []
        self.count = 0
        for index, (name, _) in sorted(devices.items()):
            self.lines.append("add device %d: /dev/input/event%d" % (index + 1, index))
            self.lines.append('  name:     "%s"' % name)

    def ev(self, t_ms, dev, typ, code, value):
        t_us = EPOCH_US + int(round(t_ms * 1000))
        self.lines.append("[%8d.%06d] /dev/input/event%d: %04x %04x %08x"
                          % (t_us // 1_000_000, t_us % 1_000_000, dev, typ, code, value & 0xFFFFFFFF))
        self.count += 1

    def syn(self, t_ms, dev=None):
        self.ev(t_ms, TOUCH if dev is None else dev, EV_SYN, 0, 0)

    def text(self):
        return "\n".join(self.lines) + "\n"


def contacts(log, fingers):
    """fingers: list of (slot, tracking_id, [(t_ms, x, y), ...]). Frames are merged by time.

    The last path entry is the lift frame and carries no position. Returns
    the first and last reported positions of the first finger.
    """
    frames = {}
    for slot, tid, path in fingers:
        for i, (t, x, y) in enumerate(path):
            frames.setdefault(t, []).append((slot, tid, i, x, y, i == len(path) - 1))
    multi = len(fingers) > 1
    open_count = 0
    for t in sorted(frames):
        for slot, tid, i, x, y, last in frames[t]:
            if multi:
                log.ev(t, TOUCH, EV_ABS, SLOT, slot)
            if i == 0:
                log.ev(t, TOUCH, EV_ABS, TID, tid)
                log.ev(t, TOUCH, EV_ABS, MX, x)
                log.ev(t, TOUCH, EV_ABS, MY, y)
                log.ev(t, TOUCH, EV_ABS, PRESS, 60)
                if open_count == 0:
                    log.ev(t, TOUCH, EV_KEY, BTN_TOUCH, 1)
                open_count += 1
            elif last:
                log.ev(t, TOUCH, EV_ABS, TID, -1)
                open_count -= 1
                if open_count == 0:
                    log.ev(t, TOUCH, EV_KEY, BTN_TOUCH, 0)
            else:
                log.ev(t, TOUCH, EV_ABS, MX, x)
                log.ev(t, TOUCH, EV_ABS, MY, y)
        log.syn(t)
    path = fingers[0][2]
    return (path[0][1], path[0][2]), (path[-2][1], path[-2][2])


def line(t0, t1, a, b, n):
    return [(t0 + (t1 - t0) * k / n, round(a[0] + (b[0] - a[0]) * k / n), round(a[1] + (b[1] - a[1]) * k / n))
            for k in range(n + 1)]


def node(cls, bounds, children=(), rid="", text="", desc="", clickable=False):
    return {"class": cls, "bounds": bounds, "children": list(children), "rid": rid, "text": text, "desc": desc,
            "clickable": clickable}


def dump_xml(root):
    out = ["<?xml version='1.0' encoding='UTF-8' standalone='yes' ?>", '<hierarchy rotation="0">']

    def emit(n, index, depth):
        (l, t), (r, b) = n["bounds"]
        attrs = [("index", str(index)), ("text", n["text"]), ("resource-id", n["rid"]), ("class", n["class"]),
                 ("package", APP), ("content-desc", n["desc"]), ("checkable", "false"), ("checked", "false"),
                 ("clickable", "true" if n["clickable"] else "false"), ("enabled", "true"),
                 ("focusable", "true" if n["clickable"] else "false"), ("focused", "false"),
                 ("scrollable", "false"), ("long-clickable", "false"), ("password", "false"),
                 ("selected", "false"), ("bounds", "[%d,%d][%d,%d]" % (l, t, r, b))]
        a = " ".join('%s="%s"' % (k, v.replace("&", "&amp;").replace('"', "&quot;")) for k, v in attrs)
        pad = "  " * depth
        if not n["children"]:
            out.append("%s<node %s />" % (pad, a))
            return
        out.append("%s<node %s>" % (pad, a))
        for i, c in enumerate(n["children"]):
            emit(c, i, depth + 1)
        out.append("%s</node>" % pad)

    emit(root, 0, 1)
    out.append("</hierarchy>")
    return "\n".join(out) + "\n"


def screen(children, title="Notes"):
    return node("android.widget.FrameLayout", ((0, 0), (1080, 1920)), [
        node("android.widget.LinearLayout", ((0, 0), (1080, 1920)), [
            node("android.widget.TextView", ((0, 63), (1080, 210)), rid=APP + ":id/toolbar_title", text=title),
            node("android.widget.FrameLayout", ((0, 210), (1080, 1920)), children, rid=APP + ":id/content"),
        ]),
    ])


def summary(n):
    (l, t), (r, b) = n["bounds"]
    return {"class_name": n["class"], "resource_id": n["rid"], "text": n["text"], "clickable": n["clickable"],
            "bounds": "[%d,%d][%d,%d]" % (l, t, r, b)}


def write_scenario(name, log, dumps, sensors="", steps=(), colors=None):
    d = os.path.join(ROOT, name)
    shutil.rmtree(d, ignore_errors=True)
    os.makedirs(os.path.join(d, "dumps"))
    os.makedirs(os.path.join(d, "screens"))
    with open(os.path.join(d, "events.getevent"), "w") as f:
        f.write(log.text())
    device = {
        "model": "Pixel 3a (fixture)",
        "os_version": "11",
        "screen_width": 1080,
        "screen_height": 1920,
        "axis_ranges": {"x_min": 0, "x_max": 1079, "y_min": 0, "y_max": 1919},
        "epoch_us": EPOCH_US,
        "input_devices": {"0": "/dev/input/event0", "1": "/dev/input/event1"},
        "created_at": "2026-03-02T14:30:00Z",
        "app_package": APP,
        "packages": ["com.android.settings", APP],
    }
    with open(os.path.join(d, "device.json"), "w") as f:
        json.dump(device, f, indent=2, sort_keys=True)
        f.write("\n")
    for i, root in enumerate(dumps):
        with open(os.path.join(d, "dumps", "%03d.xml" % i), "w") as f:
            f.write(dump_xml(root))
        with open(os.path.join(d, "screens", "%03d.png" % i), "wb") as f:
            f.write(png(27, 48, (40 + 60 * i % 200, 120, 200 - 30 * i % 200)))
    if sensors:
        with open(os.path.join(d, "sensors.txt"), "w") as f:
            f.write(sensors)
    expected = {"event_count": log.count, "action_count": len(dumps), "steps": list(steps)}
    with open(os.path.join(d, "expected.json"), "w") as f:
        json.dump(expected, f, indent=2, sort_keys=True)
        f.write("\n")


DEVICES = {KEYS: ("gpio-keys", None), TOUCH: ("synaptics_dsx_touch", None)}


def step(kind, start, end, pointers=1, target=None, ancestor=None, key=None):
    return {"kind": kind, "start_point": {"x": start[0], "y": start[1]}, "end_point": {"x": end[0], "y": end[1]},
            "pointer_count": pointers, "target": summary(target) if target else None,
            "clickable_ancestor": summary(ancestor) if ancestor else None, "key_code": key}


def single_tap():
    button = node("android.widget.Button", ((340, 900), (740, 1020)), rid=APP + ":id/save", text="Save",
                  clickable=True)
    log = Log(DEVICES)
    a, b = contacts(log, [(0, 101, [(500, 540, 960), (540, 542, 961), (580, 542, 961)])])
    write_scenario("single-tap", log, [screen([button])], steps=[step("Tap", a, b, target=button)])


def two_tap():
    a = node("android.widget.Button", ((40, 240), (400, 360)), rid=APP + ":id/new_note", text="New", clickable=True)
    b = node("android.widget.Button", ((680, 1440), (1040, 1560)), rid=APP + ":id/delete", text="Delete",
             clickable=True)
    log = Log(DEVICES)
    p1 = contacts(log, [(0, 201, [(500, 200, 300), (570, 200, 300)])])
    p2 = contacts(log, [(0, 202, [(1500, 800, 1500), (1550, 801, 1502), (1590, 801, 1502)])])
    write_scenario("two-tap", log, [screen([a, b]), screen([a, b])],
                   steps=[step("Tap", *p1, target=a), step("Tap", *p2, target=b)])


def long_press():
    label = node("android.widget.TextView", ((80, 880), (1000, 1040)), rid=APP + ":id/note_title",
                 text="Groceries")
    row = node("android.widget.LinearLayout", ((40, 860), (1040, 1060)), [label], rid=APP + ":id/note_row",
               clickable=True)
    log = Log(DEVICES)
    p = contacts(log, [(0, 301, [(500, 540, 960), (800, 542, 962), (1100, 543, 962), (1300, 543, 962)])])
    write_scenario("long-press", log, [screen([row])],
                   steps=[step("LongPress", *p, target=label, ancestor=row)])


def swipe():
    lst = node("androidx.recyclerview.widget.RecyclerView", ((0, 210), (1080, 1920)), rid=APP + ":id/notes",
               clickable=False)
    log = Log(DEVICES)
    p = contacts(log, [(0, 401, line(500, 800, (540, 1600), (540, 400), 12))])
    write_scenario("swipe", log, [screen([lst])], steps=[step("Swipe", *p, target=lst)])


def multi_touch():
    img = node("android.widget.ImageView", ((0, 210), (1080, 1920)), rid=APP + ":id/photo", clickable=False)
    log = Log(DEVICES)
    p = contacts(log, [(0, 501, line(500, 900, (400, 900), (300, 800), 8)),
                       (1, 502, line(500, 900, (700, 1100), (800, 1200), 8))])
    write_scenario("multi-touch", log, [screen([img])], steps=[step("MultiTouch", *p, pointers=2, target=img)])


def key_press():
    log = Log(DEVICES)
    log.ev(500, KEYS, EV_KEY, 158, 1)
    log.syn(500, KEYS)
    log.ev(600, KEYS, EV_KEY, 158, 0)
    log.syn(600, KEYS)
    write_scenario("key-press", log, [screen([])],
                   steps=[step("KeyPress", (0, 0), (0, 0), pointers=0, key=158)])


def three_action():
    login = node("android.widget.Button", ((340, 1500), (740, 1620)), rid=APP + ":id/login", text="Log in",
                 clickable=True)
    user = node("android.widget.EditText", ((90, 600), (990, 720)), rid=APP + ":id/username", text="tester",
                clickable=True)
    item_text = node("android.widget.TextView", ((80, 500), (1000, 640)), rid=APP + ":id/note_title",
                     text="Meeting notes")
    item = node("android.widget.LinearLayout", ((40, 480), (1040, 660)), [item_text], rid=APP + ":id/note_row",
                clickable=True)
    lst = node("androidx.recyclerview.widget.RecyclerView", ((0, 210), (1080, 1920)), [item],
               rid=APP + ":id/notes")
    lst2 = node("androidx.recyclerview.widget.RecyclerView", ((0, 210), (1080, 1920)), [item],
                rid=APP + ":id/notes")
    log = Log(DEVICES)
    p1 = contacts(log, [(0, 601, [(500, 540, 1560), (560, 541, 1561), (590, 541, 1561)])])
    p2 = contacts(log, [(0, 602, [(1500, 500, 570), (1900, 501, 571), (2300, 502, 572), (2400, 502, 572)])])
    p3 = contacts(log, [(0, 603, line(3500, 3800, (540, 1500), (560, 700), 10))])
    sensors = ["# kind timestamp_us values"]
    for k in range(0, 41):
        t = EPOCH_US + k * 100_000
        sensors.append("accelerometer %d %.3f %.3f %.3f" % (t, 0.01 * (k % 7), 9.78 + 0.002 * k, -0.05 * (k % 3)))
    for k in range(0, 5):
        t = EPOCH_US + k * 1_000_000
        sensors.append("gps %d %.6f %.6f %.1f" % (t, 37.2707 + 0.00001 * k, -76.7075, 12.0 + k))
    write_scenario("three-action", log,
                   [screen([user, login], "Sign in"), screen([lst], "Notes"), screen([lst2], "Notes")],
                   sensors="\n".join(sensors) + "\n",
                   steps=[step("Tap", *p1, target=login),
                          step("LongPress", *p2, target=item_text, ancestor=item),
                          step("Swipe", *p3, target=lst2)])


def emulator_transcript():
    devices = {0: ("Power Button", None), 1: ("qwerty2", None), 2: ("virtio_input_multi_touch_1", None)}
    log = Log(devices)
    global TOUCH
    saved, TOUCH = TOUCH, 2
    contacts(log, [(0, 0x2a1, [(12.5, 10012, 18021), (80.5, 10012, 18021)])])
    contacts(log, [(0, 0x2a2, line(1500, 1800, (16000, 25000), (16200, 9000), 15))])
    contacts(log, [(0, 0x2a3, line(3000, 3400, (12000, 15000), (9000, 12000), 10)),
                   (1, 0x2a4, line(3000, 3400, (20000, 17000), (23000, 20000), 10))])
    TOUCH = saved
    log.ev(5000, 1, EV_KEY, 30, 1)
    log.ev(5000, 1, EV_SYN, 0, 0)
    log.ev(5080, 1, EV_KEY, 30, 0)
    log.ev(5080, 1, EV_SYN, 0, 0)
    log.ev(6000, 0, EV_KEY, 116, 1)
    log.ev(6000, 0, EV_SYN, 0, 0)
    log.ev(6150, 0, EV_KEY, 116, 0)
    log.ev(6150, 0, EV_SYN, 0, 0)
    d = os.path.join(ROOT, "transcripts")
    os.makedirs(d, exist_ok=True)
    with open(os.path.join(d, "emulator-getevent.txt"), "w") as f:
        f.write(log.text())


def main():
    os.makedirs(ROOT, exist_ok=True)
    single_tap()
    two_tap()
    long_press()
    swipe()
    multi_touch()
    key_press()
    three_action()
    emulator_transcript()
    return 0


if __name__ == "__main__":
    sys.exit(main())
