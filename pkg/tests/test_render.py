from fractions import Fraction

import pytest

from credalgames.beliefs import CredalSet, StateSpace
from credalgames.render import TriangleLayer, TrianglePanel, render_triangle

F = Fraction

LRO = StateSpace.of("L", "R", "O")

QUAD = CredalSet.from_vertices(
    LRO,
    [
        ["7/32", "21/32", "1/8"],
        ["7/16", "7/16", "1/8"],
        ["1/4", "1/4", "1/2"],
        ["1/8", "3/8", "1/2"],
    ],
)

SEGMENT = CredalSet.from_vertices(LRO, [[0, 1, 0], ["1/4", "3/4", 0]])
DOT = CredalSet.singleton(LRO, ["1/3", "1/3", "1/3"])


def test_byte_identical_across_runs(tmp_path):
    layers = [TriangleLayer(QUAD, label="P"), TriangleLayer(SEGMENT, label="cond")]
    first = render_triangle(layers)
    second = render_triangle(layers)
    assert first == second
    out = tmp_path / "triangle.svg"
    render_triangle(layers, str(out))
    assert out.read_text() == first


def test_document_structure():
    doc = render_triangle([TriangleLayer(QUAD)])
    assert doc.startswith('<?xml version="1.0"')
    assert 'viewBox="0 0 512 512"' in doc
    assert doc.count("<polygon") == 1
    assert "(7/32,21/32)" in doc  # exact rational vertex labels
    assert "{O}" in doc and ">L<" in doc and ">R<" in doc


def test_segment_drawn_as_thick_line():
    doc = render_triangle([TriangleLayer(SEGMENT)])
    assert 'stroke-width="4"' in doc
    assert "<polygon" not in doc


def test_singleton_drawn_as_labeled_dot():
    doc = render_triangle([TriangleLayer(DOT, label="point")])
    assert '<circle' in doc and 'r="4"' in doc
    assert ">point<" in doc
    assert "(1/3,1/3)" in doc


def test_two_panels_side_by_side():
    induced = CredalSet.from_vertices(
        StateSpace.of("Z", "RN", "O"),
        [
            ["35/64", "21/64", "1/8"],
            ["35/48", "7/48", "1/8"],
            ["5/12", "1/12", "1/2"],
            ["5/16", "3/16", "1/2"],
        ],
    )
    doc = render_triangle(
        [
            TrianglePanel((TriangleLayer(QUAD, label="P"),), "initial"),
            TrianglePanel((TriangleLayer(induced, label="ind"),), "induced"),
        ]
    )
    assert doc.count("<polygon") == 2
    assert ">Z<" in doc and ">L<" in doc
    assert "(35/64,21/64)" in doc and "(7/32,21/32)" in doc


def test_rejects_bad_projection():
    with pytest.raises(ValueError):
        render_triangle([TriangleLayer(QUAD, coords=(0, 3))])


def test_vertex_order_is_a_simple_polygon():
    # the polygon path must trace the hull boundary, never crossing itself:
    # for the quadrilateral the four corners appear in circular order
    doc = render_triangle([TriangleLayer(QUAD, label_vertices=False)])
    start = doc.index("<polygon")
    points = doc[start:].split('points="')[1].split('"')[0].split()
    assert len(points) == 4

    def px(pair):
        return tuple(float(x) for x in pair.split(","))

    pts = [px(p) for p in points]
    # consecutive cross products share a sign for a convex traversal
    crosses = []
    for i in range(4):
        ax, ay = pts[i]
        bx, by = pts[(i + 1) % 4]
        cx, cy = pts[(i + 2) % 4]
        crosses.append((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))
    assert all(c > 0 for c in crosses) or all(c < 0 for c in crosses)
