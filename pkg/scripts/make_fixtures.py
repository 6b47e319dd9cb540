#!/usr/bin/env python3
"""Regenerate the checked-in fixture scenarios under fixtures/.

Every fixture is synthesized deterministically from the constants below, so
the directory can be rebuilt byte-for-byte at any time.  Scenario layout is
the one FixtureBridge consumes: events.getevent, dumps/NNN.xml,
screens/NNN.png, sensors.txt, device.json.  Sensor timestamps are
session-relative; getevent timestamps are raw and rebased via epoch_us.

Usage: python3 scripts/make_fixtures.py [--root fixtures]
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from PIL import Image, ImageDraw

import sys

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from odbr.events import InputEvent, format_getevent_line  # noqa: E402

TOUCH_DEV = 2
KEY_DEV = 0
EPOCH_US = 10_000_000

DEVICE_HEADER = """add device 1: /dev/input/event5
  name:     "goldfish_rotary"
add device 2: /dev/input/event2
  name:     "goldfish_multi_touch"
add device 3: /dev/input/event0
  name:     "goldfish_events"
could not get driver version for /dev/input/mice, Not a typewriter
"""


def ev(t_us, type_, code, value, dev=TOUCH_DEV):
    return InputEvent(EPOCH_US + t_us, dev, type_, code, value)


def syn(t_us, dev=TOUCH_DEV):
    return ev(t_us, 0, 0, 0, dev)


def touch_down(t_us, tracking_id, x, y, pressure=81, slot=None):
    events = []
    if slot is not None:
        events.append(ev(t_us, 3, 0x2F, slot))
    events += [
        ev(t_us, 3, 0x39, tracking_id),
        ev(t_us, 3, 0x35, x),
        ev(t_us, 3, 0x36, y),
        ev(t_us, 3, 0x3A, pressure),
        ev(t_us, 1, 0x14A, 1),  # BTN_TOUCH chatter, as real devices emit
        syn(t_us),
    ]
    return events


def touch_move(t_us, x=None, y=None, slot=None):
    events = []
    if slot is not None:
        events.append(ev(t_us, 3, 0x2F, slot))
    if x is not None:
        events.append(ev(t_us, 3, 0x35, x))
    if y is not None:
        events.append(ev(t_us, 3, 0x36, y))
    events.append(syn(t_us))
    return events


def touch_up(t_us, slot=None, last=True):
    events = []
    if slot is not None:
        events.append(ev(t_us, 3, 0x2F, slot))
    events.append(ev(t_us, 3, 0x39, -1))
    if last:
        events.append(ev(t_us, 1, 0x14A, 0))
    events.append(syn(t_us))
    return events


def key_press(t_down_us, t_up_us, code):
    return [
        ev(t_down_us, 1, code, 1, dev=KEY_DEV),
        syn(t_down_us, dev=KEY_DEV),
        ev(t_up_us, 1, code, 0, dev=KEY_DEV),
        syn(t_up_us, dev=KEY_DEV),
    ]


# -- UI dumps ----------------------------------------------------------------


def wrap_hierarchy(body: str) -> str:
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<hierarchy rotation="0">\n'
        f'  <node class="android.widget.FrameLayout" package="com.example.demo"'
        f' bounds="[0,0][1080,1920]" clickable="false">\n{body}\n  </node>\n'
        "</hierarchy>\n"
    )


DUMP_OK_BUTTON = wrap_hierarchy(
    '    <node class="android.widget.LinearLayout" package="com.example.demo"'
    ' bounds="[0,800][1080,1100]" clickable="false">\n'
    '      <node class="android.widget.Button" resource-id="com.example:id/ok" text="OK"'
    ' package="com.example.demo" bounds="[490,910][590,1010]" clickable="true"/>\n'
    "    </node>"
)

DUMP_DELETE_ROW = wrap_hierarchy(
    '    <node class="android.widget.LinearLayout" package="com.example.demo"'
    ' bounds="[0,200][1080,400]" clickable="true">\n'
    '      <node class="android.widget.TextView" resource-id="com.example:id/row_delete"'
    ' text="Delete item" package="com.example.demo" bounds="[150,250][930,350]"'
    ' clickable="true"/>\n'
    "    </node>"
)

DUMP_SCROLL_LIST = wrap_hierarchy(
    '    <node class="androidx.recyclerview.widget.RecyclerView"'
    ' resource-id="com.example:id/list" package="com.example.demo"'
    ' bounds="[0,1000][1080,1400]" clickable="false">\n'
    '      <node class="android.widget.TextView" resource-id="com.example:id/row"'
    ' text="Row 1" package="com.example.demo" bounds="[0,1050][1080,1150]" clickable="false"/>\n'
    '      <node class="android.widget.TextView" resource-id="com.example:id/row"'
    ' text="Row 2" package="com.example.demo" bounds="[0,1150][1080,1250]" clickable="false"/>\n'
    "    </node>"
)

DUMP_CANVAS = wrap_hierarchy(
    '    <node class="android.view.View" resource-id="com.example:id/canvas"'
    ' package="com.example.demo" bounds="[0,200][1080,1700]" clickable="true"/>'
)

DUMP_HOME = wrap_hierarchy(
    '    <node class="android.widget.TextView" resource-id="com.example:id/status"'
    ' text="Ready" package="com.example.demo" bounds="[0,80][1080,180]" clickable="false"/>'
)


def make_png(color: tuple[int, int, int], index: int) -> Image.Image:
    img = Image.new("RGB", (96, 64), color)
    draw = ImageDraw.Draw(img)
    draw.rectangle([4, 4, 91, 59], outline=(255, 255, 255))
    for i in range(index + 1):  # step count as filled squares
        draw.rectangle([8 + i * 12, 48, 16 + i * 12, 56], fill=(255, 255, 255))
    return img


def device_json(created_at: str) -> dict:
    return {
        "model": "sdk_gphone64_x86_64",
        "os_version": "13",
        "screen_width": 1080,
        "screen_height": 1920,
        "axis_ranges": {"x_min": 0, "x_max": 1079, "y_min": 0, "y_max": 1919},
        "packages": ["com.example.demo", "com.android.settings"],
        "epoch_us": EPOCH_US,
        "created_at": created_at,
    }


SENSORS_SHORT = """# session sensor stream (timestamps are session-relative microseconds)
accelerometer 0 0.01 -0.02 9.81
accelerometer 100000 0.02 -0.01 9.80
accelerometer 200000 0.00 0.00 9.81
gps 0 35.9940 -78.8986
"""

SENSORS_LONG = """# session sensor stream (timestamps are session-relative microseconds)
accelerometer 0 0.01 -0.02 9.81
accelerometer 500000 0.02 -0.01 9.80
accelerometer 1000000 0.05 0.03 9.79
accelerometer 1500000 0.01 0.00 9.81
accelerometer 2000000 -0.02 0.01 9.82
accelerometer 2500000 0.00 0.02 9.80
accelerometer 3000000 0.03 -0.01 9.81
accelerometer 3500000 0.01 0.01 9.80
gps 0 35.9940 -78.8986
gps 2000000 35.9941 -78.8985
"""


def write_scenario(root: Path, name: str, events, dumps, screen_colors, sensors, created_at):
    scenario = root / name
    (scenario / "dumps").mkdir(parents=True, exist_ok=True)
    (scenario / "screens").mkdir(parents=True, exist_ok=True)
    text = DEVICE_HEADER + "".join(format_getevent_line(e) + "\n" for e in events)
    (scenario / "events.getevent").write_text(text)
    for i, dump in enumerate(dumps):
        (scenario / "dumps" / f"{i:03d}.xml").write_text(dump)
    for i, color in enumerate(screen_colors):
        make_png(color, i).save(scenario / "screens" / f"{i:03d}.png")
    (scenario / "sensors.txt").write_text(sensors)
    (scenario / "device.json").write_text(json.dumps(device_json(created_at), indent=2) + "\n")


def build_all(root: Path):
    # single tap on the OK button at screen (540,960)
    tap = touch_down(0, 7, 540, 960) + touch_up(80_000)
    write_scenario(
        root,
        "single-tap",
        tap,
        [DUMP_OK_BUTTON],
        [(30, 90, 160)],
        SENSORS_SHORT,
        "2026-08-01T09:30:00Z",
    )

    # stationary 900ms contact on a list row
    long_press = (
        touch_down(0, 11, 200, 300, pressure=80)
        + touch_move(450_000, x=201, y=301)
        + touch_up(900_000)
    )
    write_scenario(
        root,
        "long-press",
        long_press,
        [DUMP_DELETE_ROW],
        [(160, 60, 60)],
        SENSORS_SHORT,
        "2026-08-01T09:32:00Z",
    )

    # 300ms horizontal drag across the list
    swipe = (
        touch_down(0, 12, 100, 1200, pressure=82)
        + touch_move(60_000, x=300)
        + touch_move(120_000, x=500)
        + touch_move(180_000, x=700)
        + touch_move(240_000, x=800)
        + touch_up(300_000)
    )
    write_scenario(
        root,
        "swipe",
        swipe,
        [DUMP_SCROLL_LIST],
        [(60, 140, 80)],
        SENSORS_SHORT,
        "2026-08-01T09:34:00Z",
    )

    # two fingers held together on the canvas
    multi = (
        touch_down(0, 20, 400, 800, slot=0)
        + touch_down(50_000, 21, 600, 800, pressure=78, slot=1)
        + touch_move(200_000, x=410, y=810, slot=0)
        + touch_move(200_001, x=590, y=790, slot=1)
        + touch_up(400_000, slot=0, last=False)
        + touch_up(450_000, slot=1)
    )
    write_scenario(
        root,
        "multi-touch",
        multi,
        [DUMP_CANVAS],
        [(120, 80, 150)],
        SENSORS_SHORT,
        "2026-08-01T09:36:00Z",
    )

    # hardware power key
    write_scenario(
        root,
        "key-press",
        key_press(0, 80_000, 116),
        [DUMP_HOME],
        [(90, 90, 90)],
        SENSORS_SHORT,
        "2026-08-01T09:38:00Z",
    )

    # tap, long-press, swipe in one session: the end-to-end pipeline fixture
    three = (
        touch_down(0, 1, 540, 960)
        + touch_up(80_000)
        + touch_down(1_500_000, 2, 200, 300, pressure=80)
        + touch_move(1_950_000, x=201, y=301)
        + touch_up(2_400_000)
        + touch_down(3_400_000, 3, 100, 1200, pressure=82)
        + touch_move(3_460_000, x=300)
        + touch_move(3_520_000, x=500)
        + touch_move(3_580_000, x=700)
        + touch_move(3_640_000, x=800)
        + touch_up(3_700_000)
    )
    write_scenario(
        root,
        "three-action",
        three,
        [DUMP_OK_BUTTON, DUMP_DELETE_ROW, DUMP_SCROLL_LIST],
        [(30, 90, 160), (160, 60, 60), (60, 140, 80)],
        SENSORS_LONG,
        "2026-08-01T10:00:00Z",
    )

    # golden transcript: the parser's reference input, heavier on metadata
    # and chatter than the scenario logs
    golden_events = (
        touch_down(0, 30, 540, 960)
        + touch_up(80_000)
        + key_press(500_000, 580_000, 115)
        + touch_down(1_000_000, 31, 100, 1200)
        + [ev(1_000_000, 3, 0x30, 5)]  # ABS_MT_TOUCH_MAJOR chatter
        + touch_move(1_060_000, x=300)
        + touch_move(1_120_000, x=500, y=1210)
        + touch_up(1_180_000)
        + key_press(2_000_000, 2_120_000, 116)
    )
    golden = DEVICE_HEADER + "".join(format_getevent_line(e) + "\n" for e in golden_events)
    (root / "golden.getevent").write_text(golden)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--root", default="fixtures", type=Path)
    args = parser.parse_args()
    args.root.mkdir(parents=True, exist_ok=True)
    build_all(args.root)
    print(f"fixtures written under {args.root}")


if __name__ == "__main__":
    main()
