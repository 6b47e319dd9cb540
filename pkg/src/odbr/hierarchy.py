"""UI hierarchy dumps: XML parsing, coordinate mapping, point-to-component hit testing.

A uiautomator dump is a `hierarchy` document of nested `node` elements, each
carrying pixel bounds and widget attributes.  This module turns one into an
immutable tree, scales raw touch-axis coordinates onto the screen, and resolves
which component owns a touched point.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Iterator, Optional

# Recorded in report metadata so consumers know how targets were resolved.
HIT_POLICY = (
    "deepest containing node wins; equal depth resolved to the latest document "
    "order; bounds half-open, degenerate axes match by equality; raw coordinates "
    "scaled to screen pixels from per-session axis ranges"
)


class UiDumpParseError(ValueError):
    """The dump XML is malformed or a node is missing required attributes."""


@dataclass(frozen=True)
class Rect:
    left: int
    top: int
    right: int
    bottom: int

    def __post_init__(self):
        if self.right < self.left or self.bottom < self.top:
            raise ValueError(f"inverted rect: {self}")

    def contains(self, x: int, y: int) -> bool:
        # half-open so adjacent tiles never double-claim a boundary pixel;
        # zero-width/height axes match only their exact coordinate
        if self.right > self.left:
            inside_x = self.left <= x < self.right
        else:
            inside_x = x == self.left
        if self.bottom > self.top:
            inside_y = self.top <= y < self.bottom
        else:
            inside_y = y == self.top
        return inside_x and inside_y

    @property
    def width(self) -> int:
        return self.right - self.left

    @property
    def height(self) -> int:
        return self.bottom - self.top

    @property
    def center(self) -> tuple[int, int]:
        return ((self.left + self.right) // 2, (self.top + self.bottom) // 2)


_BOUNDS_RE = re.compile(r"^\[(-?\d+),(-?\d+)\]\[(-?\d+),(-?\d+)\]$")


def parse_bounds(s: str) -> Rect:
    """Parse the `[x1,y1][x2,y2]` bounds attribute."""
    m = _BOUNDS_RE.match(s)
    if m is None:
        raise UiDumpParseError(f"bad bounds syntax: {s!r}")
    try:
        return Rect(*(int(g) for g in m.groups()))
    except ValueError as exc:
        raise UiDumpParseError(f"bad bounds geometry: {s!r} ({exc})") from exc


def format_bounds(rect: Rect) -> str:
    return f"[{rect.left},{rect.top}][{rect.right},{rect.bottom}]"


@dataclass(frozen=True)
class UiNode:
    class_name: str
    resource_id: str
    text: str
    content_desc: str
    package: str
    clickable: bool
    bounds: Rect
    children: tuple["UiNode", ...]
    depth: int
    document_order: int


@dataclass(frozen=True)
class ComponentSummary:
    """The target attributes attached to a report step."""

    class_name: str
    resource_id: str
    text: str
    clickable: bool
    bounds: Rect


class UiTree:
    """Immutable parse result; nodes listed in pre-order."""

    def __init__(self, roots: tuple[UiNode, ...]):
        self.roots = roots
        self._nodes: list[UiNode] = []
        self._parent_by_order: dict[int, Optional[UiNode]] = {}

        def collect(node: UiNode, parent: Optional[UiNode]):
            self._nodes.append(node)
            self._parent_by_order[node.document_order] = parent
            for child in node.children:
                collect(child, node)

        for root in roots:
            collect(root, None)

    def walk(self) -> Iterator[UiNode]:
        return iter(self._nodes)

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    def parent_of(self, node: UiNode) -> Optional[UiNode]:
        return self._parent_by_order.get(node.document_order)

    def clickable_ancestor(self, node: UiNode) -> Optional[UiNode]:
        """Nearest strict ancestor with clickable=true, or None."""
        parent = self.parent_of(node)
        while parent is not None:
            if parent.clickable:
                return parent
            parent = self.parent_of(parent)
        return None


def parse_ui_dump(xml: str) -> UiTree:
    """Parse a uiautomator dump document.

    Unknown attributes are ignored; a node without `bounds` is an error
    identified by its pre-order document position.
    """
    try:
        root = ET.fromstring(xml)
    except ET.ParseError as exc:
        raise UiDumpParseError(f"malformed dump XML: {exc}") from exc
    if root.tag != "hierarchy":
        raise UiDumpParseError(f"expected <hierarchy> document, got <{root.tag}>")

    counter = [0]

    def build(elem: ET.Element, depth: int) -> UiNode:
        order = counter[0]
        counter[0] += 1
        bounds_attr = elem.get("bounds")
        if bounds_attr is None:
            raise UiDumpParseError(f"node at document_order {order} has no bounds attribute")
        bounds = parse_bounds(bounds_attr)
        children = tuple(build(c, depth + 1) for c in elem if c.tag == "node")
        return UiNode(
            class_name=elem.get("class", ""),
            resource_id=elem.get("resource-id", ""),
            text=elem.get("text", ""),
            content_desc=elem.get("content-desc", ""),
            package=elem.get("package", ""),
            clickable=elem.get("clickable", "false") == "true",
            bounds=bounds,
            children=children,
            depth=depth,
            document_order=order,
        )

    roots = tuple(build(c, 0) for c in root if c.tag == "node")
    return UiTree(roots)


@dataclass(frozen=True)
class AxisRanges:
    """Raw touch-axis extents plus the screen they project onto."""

    x_min: int
    x_max: int
    y_min: int
    y_max: int
    screen_width: int
    screen_height: int

    def __post_init__(self):
        if self.x_max <= self.x_min or self.y_max <= self.y_min:
            raise ValueError("axis range must have positive extent")
        if self.screen_width <= 0 or self.screen_height <= 0:
            raise ValueError("screen dimensions must be positive")


def map_raw_to_screen(point: tuple[int, int], ranges: AxisRanges) -> tuple[int, int]:
    """Scale a raw touch point to pixels, clamping out-of-range input."""
    x = round((point[0] - ranges.x_min) * (ranges.screen_width - 1) / (ranges.x_max - ranges.x_min))
    y = round(
        (point[1] - ranges.y_min) * (ranges.screen_height - 1) / (ranges.y_max - ranges.y_min)
    )
    return (
        min(max(x, 0), ranges.screen_width - 1),
        min(max(y, 0), ranges.screen_height - 1),
    )


def hit_test(tree: UiTree, point: tuple[int, int]) -> Optional[UiNode]:
    """Deepest node containing the point; later document order wins depth ties.

    Scans every node: real dumps let children escape their parent's bounds
    (scrolling containers), so containment cannot prune subtrees.
    """
    x, y = point
    best: Optional[UiNode] = None
    for node in tree.walk():
        if node.bounds.contains(x, y):
            if best is None or (node.depth, node.document_order) > (
                best.depth,
                best.document_order,
            ):
                best = node
    return best


def component_summary(node: UiNode) -> ComponentSummary:
    return ComponentSummary(
        class_name=node.class_name,
        resource_id=node.resource_id,
        text=node.text,
        clickable=node.clickable,
        bounds=node.bounds,
    )
