from __future__ import annotations

import random
import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from odbr.hierarchy import (
    AxisRanges,
    Rect,
    UiDumpParseError,
    component_summary,
    format_bounds,
    hit_test,
    map_raw_to_screen,
    parse_bounds,
    parse_ui_dump,
)
from oracles import generate_random_tree, hit_test_oracle

FULLSCREEN = (
    '<?xml version="1.0" encoding="UTF-8"?><hierarchy rotation="0">'
    '<node class="android.widget.FrameLayout" package="com.example.app"'
    ' bounds="[0,0][1080,1920]" clickable="false"/></hierarchy>'
)

NESTED = (
    '<?xml version="1.0" encoding="UTF-8"?><hierarchy rotation="0">'
    '<node class="android.widget.FrameLayout" bounds="[0,0][1080,1920]">'
    '<node class="android.widget.LinearLayout" bounds="[0,0][1080,960]" clickable="true">'
    '<node class="android.widget.Button" resource-id="com.example:id/ok" text="OK"'
    ' bounds="[100,100][200,200]" clickable="true"/>'
    "</node></node></hierarchy>"
)


class TestParseBounds:
    def test_full_screen(self):
        assert parse_bounds("[0,0][1080,1920]") == Rect(0, 0, 1080, 1920)

    def test_zero_area_is_valid(self):
        r = parse_bounds("[10,20][10,20]")
        assert (r.width, r.height) == (0, 0)

    def test_truncated_input_rejected(self):
        with pytest.raises(UiDumpParseError, match=re.escape("[0,0][1080")):
            parse_bounds("[0,0][1080")

    def test_inverted_rect_rejected(self):
        with pytest.raises(UiDumpParseError):
            parse_bounds("[50,0][10,20]")

    def test_negative_coordinates_allowed(self):
        assert parse_bounds("[-5,-10][5,10]") == Rect(-5, -10, 5, 10)

    @given(
        st.integers(-2000, 2000),
        st.integers(-2000, 2000),
        st.integers(0, 3000),
        st.integers(0, 3000),
    )
    def test_format_parse_round_trip(self, left, top, w, h):
        rect = Rect(left, top, left + w, top + h)
        assert parse_bounds(format_bounds(rect)) == rect


class TestParseUiDump:
    def test_single_fullscreen_node(self):
        tree = parse_ui_dump(FULLSCREEN)
        assert tree.node_count == 1
        root = tree.roots[0]
        assert root.depth == 0
        assert root.document_order == 0
        assert root.bounds == Rect(0, 0, 1080, 1920)
        assert root.package == "com.example.app"

    def test_three_level_nesting_orders(self):
        tree = parse_ui_dump(NESTED)
        nodes = list(tree.walk())
        assert [n.depth for n in nodes] == [0, 1, 2]
        assert [n.document_order for n in nodes] == [0, 1, 2]

    def test_attributes_parsed(self):
        button = list(parse_ui_dump(NESTED).walk())[2]
        assert button.class_name == "android.widget.Button"
        assert button.clickable is True
        assert button.resource_id == "com.example:id/ok"
        assert button.text == "OK"

    def test_missing_optional_attributes_default(self):
        tree = parse_ui_dump(
            '<hierarchy><node class="android.view.View" bounds="[0,0][10,10]"/></hierarchy>'
        )
        node = tree.roots[0]
        assert node.resource_id == ""
        assert node.text == ""
        assert node.content_desc == ""
        assert node.clickable is False

    def test_missing_bounds_names_document_order(self):
        xml = (
            '<hierarchy><node class="a" bounds="[0,0][10,10]">'
            '<node class="b"/></node></hierarchy>'
        )
        with pytest.raises(UiDumpParseError, match="document_order 1"):
            parse_ui_dump(xml)

    def test_malformed_xml_rejected(self):
        with pytest.raises(UiDumpParseError, match="malformed"):
            parse_ui_dump("<hierarchy><node")

    def test_wrong_root_tag_rejected(self):
        with pytest.raises(UiDumpParseError, match="hierarchy"):
            parse_ui_dump("<nodes/>")

    def test_node_count_matches_element_count(self):
        rng = random.Random(0xC0)
        for _ in range(25):
            xml = generate_random_tree(rng)
            tree = parse_ui_dump(xml)
            assert tree.node_count == xml.count("<node ")

    def test_parent_links(self):
        tree = parse_ui_dump(NESTED)
        outer, middle, button = tree.walk()
        assert tree.parent_of(outer) is None
        assert tree.parent_of(middle) is outer
        assert tree.parent_of(button) is middle


class TestMapRawToScreen:
    RANGES = AxisRanges(0, 16383, 0, 16383, 1080, 1920)

    def test_low_endpoint(self):
        assert map_raw_to_screen((0, 0), self.RANGES) == (0, 0)

    def test_high_endpoint_maps_to_last_pixel(self):
        assert map_raw_to_screen((16383, 16383), self.RANGES) == (1079, 1919)

    def test_identity_when_ranges_match_screen(self):
        ranges = AxisRanges(0, 1079, 0, 1919, 1080, 1920)
        assert map_raw_to_screen((540, 960), ranges) == (540, 960)

    def test_out_of_range_clamped(self):
        assert map_raw_to_screen((-50, 99999), self.RANGES) == (0, 1919)

    def test_invalid_ranges_rejected(self):
        with pytest.raises(ValueError):
            AxisRanges(10, 10, 0, 100, 1080, 1920)

    @given(st.integers(0, 16383), st.integers(0, 16383))
    def test_monotone_in_each_axis(self, x, y):
        px, py = map_raw_to_screen((x, y), self.RANGES)
        qx, qy = map_raw_to_screen((min(x + 37, 16383), y), self.RANGES)
        assert qx >= px and qy == py


class TestHitTest:
    def test_single_root_hit(self):
        tree = parse_ui_dump(FULLSCREEN)
        assert hit_test(tree, (540, 960)) is tree.roots[0]

    def test_deepest_child_wins(self):
        tree = parse_ui_dump(NESTED)
        node = hit_test(tree, (150, 150))
        assert node.class_name == "android.widget.Button"

    def test_outside_all_bounds(self):
        tree = parse_ui_dump(NESTED)
        assert hit_test(tree, (5000, 5000)) is None

    def test_half_open_edges(self):
        tree = parse_ui_dump(NESTED)
        # right/bottom edges of the button are exclusive
        assert hit_test(tree, (200, 150)).class_name != "android.widget.Button"
        assert hit_test(tree, (100, 100)).class_name == "android.widget.Button"

    def test_overlapping_siblings_later_wins(self):
        xml = (
            "<hierarchy>"
            '<node class="a" bounds="[0,0][100,100]"/>'
            '<node class="b" bounds="[0,0][100,100]"/>'
            "</hierarchy>"
        )
        assert hit_test(parse_ui_dump(xml), (50, 50)).class_name == "b"

    def test_zero_area_node_matches_only_its_point(self):
        xml = (
            "<hierarchy>"
            '<node class="a" bounds="[0,0][100,100]">'
            '<node class="pt" bounds="[30,30][30,30]"/></node>'
            "</hierarchy>"
        )
        tree = parse_ui_dump(xml)
        assert hit_test(tree, (30, 30)).class_name == "pt"
        assert hit_test(tree, (31, 30)).class_name == "a"

    def test_child_outside_parent_still_found(self):
        xml = (
            "<hierarchy>"
            '<node class="parent" bounds="[0,0][100,100]">'
            '<node class="overflow" bounds="[500,500][600,600]"/></node>'
            "</hierarchy>"
        )
        assert hit_test(parse_ui_dump(xml), (550, 550)).class_name == "overflow"

    def test_matches_brute_force_scan(self):
        rng = random.Random(0xC1)
        for _ in range(40):
            tree = parse_ui_dump(generate_random_tree(rng))
            flat = [(n, n.depth, n.document_order) for n in tree.walk()]
            for _ in range(25):
                p = (rng.randrange(-50, 1200), rng.randrange(-50, 2000))
                assert hit_test(tree, p) is hit_test_oracle(flat, *p)

    def test_result_contains_point(self):
        rng = random.Random(0xC2)
        for _ in range(20):
            tree = parse_ui_dump(generate_random_tree(rng))
            for _ in range(20):
                p = (rng.randrange(0, 1100), rng.randrange(0, 1950))
                node = hit_test(tree, p)
                if node is not None:
                    assert node.bounds.contains(*p)


class TestClickableAncestor:
    def test_nearest_clickable_ancestor(self):
        tree = parse_ui_dump(NESTED)
        outer, middle, button = tree.walk()
        assert tree.clickable_ancestor(button) is middle
        assert tree.clickable_ancestor(middle) is None  # outer is not clickable

    def test_root_has_none(self):
        tree = parse_ui_dump(FULLSCREEN)
        assert tree.clickable_ancestor(tree.roots[0]) is None


class TestComponentSummary:
    def test_projection(self):
        button = list(parse_ui_dump(NESTED).walk())[2]
        summary = component_summary(button)
        assert summary.class_name == "android.widget.Button"
        assert summary.resource_id == "com.example:id/ok"
        assert summary.text == "OK"
        assert summary.clickable is True
        assert summary.bounds == Rect(100, 100, 200, 200)

    def test_empty_fields_preserved(self):
        tree = parse_ui_dump(FULLSCREEN)
        summary = component_summary(tree.roots[0])
        assert summary.resource_id == ""
        assert summary.clickable is False
