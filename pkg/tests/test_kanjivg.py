import itertools

import pytest

from conftest import MINIMAL_SVG, PART_SVG, svg_of
from kanjidist.kanjivg import (
    KanjiVGParseError,
    StructureError,
    build_decomposition,
    index_and_veins,
    load_decomposition,
    parse_kanjivg,
    serialize_decomposition,
    validate_decomposition,
)


def deco_of(char: str, max_level: int = 3):
    return build_decomposition(parse_kanjivg(svg_of(char)), max_level=max_level)


def test_gan_has_18_strokes():
    tree = parse_kanjivg(svg_of("顔"))
    assert len(tree.strokes) == 18
    assert tree.codepoint == 0x9854
    assert [s.index for s in tree.strokes] == list(range(1, 19))


def test_minimal_synthetic_file():
    tree = parse_kanjivg(MINIMAL_SVG)
    assert len(tree.strokes) == 1
    assert tree.strokes[0].path.shape == (1, 4, 2)


def test_part_groups_survive_raw_parse():
    tree = parse_kanjivg(PART_SVG)
    parts = [g for g in tree.root.iter_groups() if g.label == "B"]
    assert len(parts) == 2
    assert sorted(g.part for g in parts) == [1, 2]


def test_part_groups_reunited_in_decomposition():
    deco = build_decomposition(parse_kanjivg(PART_SVG))
    labels = {c.label: sorted(c.strokes) for c in deco.levels[1]}
    assert labels["B"] == [2, 3, 4]
    assert labels["A"] == [1, 2]  # keeps the stroke ceded to the re-united part


def test_parse_errors():
    with pytest.raises(KanjiVGParseError, match="malformed XML"):
        parse_kanjivg("<svg><g></svg>")
    with pytest.raises(KanjiVGParseError, match="zero strokes"):
        parse_kanjivg('<svg xmlns="http://www.w3.org/2000/svg"><g id="kvg:0"></g></svg>')


def test_gan_level_structure():
    deco = deco_of("顔")
    assert [len(level) for level in deco.levels] == [1, 2, 5, 6, 18]
    lvl2 = {c.label: c.strokes for c in deco.levels[2] if c.label}
    assert lvl2["立"] & lvl2["厂"] == {5}  # the shared stroke stays in both


def test_gan_veins_match_brute_force():
    deco = deco_of("顔")
    iv = index_and_veins(deco)
    assert ((0, 1), (1, 2), (2, 5), (3, 5)) in iv.veins
    labels = [deco.component(*idx).label for idx in ((0, 1), (1, 2), (2, 5), (3, 5))]
    assert labels == ["顔", "頁", "貝", "目"]
    # brute-force chain enumeration over the inclusion relation
    chains = []
    L = deco.max_level
    def extend(chain, level):
        if level > L:
            chains.append(tuple(chain))
            return
        parent = deco.component(*chain[-1])
        for i, comp in enumerate(deco.levels[level]):
            if comp.strokes <= parent.strokes:
                chain.append((level, i + 1))
                extend(chain, level + 1)
                chain.pop()
    extend([(0, 1)], 1)
    assert sorted(iv.veins) == sorted(chains)
    assert len(iv.veins) >= len(deco.levels[L])


def test_single_stroke_kanji_degenerate_hierarchy():
    deco = deco_of("一")
    assert len(deco.strokes) == 1
    for level in deco.levels:
        assert len(level) == 1 and level[0].strokes == {1}
    iv = index_and_veins(deco)
    assert len(iv.veins) == 1


def test_vein_shape_invariants():
    for ch in "顔須粋一構":
        deco = deco_of(ch)
        iv = index_and_veins(deco)
        L = deco.max_level
        for vein in iv.veins:
            assert len(vein) == L + 1
            assert [lvl for lvl, _ in vein] == list(range(0, L + 1))
            sets = [deco.component(*idx).strokes for idx in vein]
            for outer, inner in zip(sets, sets[1:]):
                assert inner <= outer
        on_vein = {idx for vein in iv.veins for idx in vein}
        assert set(iv.indices) <= on_vein
        assert (0, 1) not in iv.indices


def test_validation_passes_for_sample(tmp_path):
    for ch in "粋枠酔酢砕潟陽顔須一三乗単構歌":
        deco = deco_of(ch)
        validate_decomposition(deco)
        assert len(deco.levels[-1]) == len(deco.levels[0][0].strokes)


def test_serialization_round_trip():
    deco = deco_of("須")
    blob = serialize_decomposition(deco)
    again = load_decomposition(blob)
    assert serialize_decomposition(again) == blob
    assert [len(l) for l in again.levels] == [len(l) for l in deco.levels]
    assert all(
        a.strokes == b.strokes and a.label == b.label
        for la, lb in zip(deco.levels, again.levels)
        for a, b in zip(la, lb)
    )


def test_deeper_nesting_truncated():
    full = deco_of("構", max_level=3)
    shallow = deco_of("構", max_level=1)
    assert shallow.max_level == 1
    assert [len(l) for l in shallow.levels][:2] == [1, 2]
    assert [sorted(c.strokes) for c in shallow.levels[1]] == [
        sorted(c.strokes) for c in full.levels[1]
    ]


def test_intra_level_nesting_is_rejected():
    from kanjidist.kanjivg import Component, KanjiDecomposition, Stroke
    import numpy as np

    strokes = [Stroke(i, None, np.zeros((1, 4, 2))) for i in (1, 2)]
    levels = [
        [Component(frozenset({1, 2}), None)],
        [Component(frozenset({1, 2}), None), Component(frozenset({1}), None)],
        [Component(frozenset({1}), None), Component(frozenset({2}), None)],
    ]
    with pytest.raises(StructureError, match="nested"):
        validate_decomposition(KanjiDecomposition(codepoint=0, strokes=strokes, levels=levels))
