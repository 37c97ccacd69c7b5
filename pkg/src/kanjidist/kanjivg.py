"""kanjiVG ingestion: SVG parsing, structural repair, nested decompositions.

The raw files nest component groups (<g kvg:element=...>) around stroke
paths. Logical components are sometimes split into several kvg:part
groups, and some wrapper groups add hierarchy levels without adding any
partition; both are repaired here before levels are built.
"""

from __future__ import annotations

import json
import logging
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

import numpy as np

from .svgpath import parse_path

logger = logging.getLogger(__name__)

SOURCE_SIZE = 109.0  # kanjiVG canvas is 109x109
DEFAULT_MAX_LEVEL = 3

_SVG_NS = "{http://www.w3.org/2000/svg}"
_KVG_URIS = ("https://kanjivg.tagaini.net/", "http://kanjivg.tagaini.net")


class KanjiVGParseError(ValueError):
    """Malformed SVG or unsupported kanjiVG content."""


class StructureError(ValueError):
    """A repaired decomposition violates a structural invariant."""


@dataclass
class Stroke:
    index: int  # 1-based position in drawing order
    type_tag: str | None
    path: np.ndarray  # (n_segments, 4, 2) in source coordinates

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "type": self.type_tag,
            "beziers": [[[float(x), float(y)] for x, y in seg] for seg in self.path],
        }

    @staticmethod
    def from_json(obj: dict) -> "Stroke":
        return Stroke(
            index=int(obj["index"]),
            type_tag=obj["type"],
            path=np.array(obj["beziers"], dtype=float),
        )


@dataclass
class RawGroup:
    label: str | None = None
    original: str | None = None
    part: int | None = None
    number: int | None = None
    position: str | None = None
    children: list = field(default_factory=list)  # RawGroup | Stroke, document order

    def iter_groups(self):
        for c in self.children:
            if isinstance(c, RawGroup):
                yield c
                yield from c.iter_groups()

    def stroke_ids(self) -> list[int]:
        out = []
        for c in self.children:
            if isinstance(c, RawGroup):
                out.extend(c.stroke_ids())
            else:
                out.append(c.index)
        return out


@dataclass
class RawKanjiTree:
    codepoint: int
    root: RawGroup
    strokes: list[Stroke]


def parse_kanjivg(svg_text: str) -> RawKanjiTree:
    """Parse one kanjiVG SVG document into a raw stroke/group tree."""
    text = _ensure_kvg_namespace(svg_text)
    try:
        doc = ET.fromstring(text)
    except ET.ParseError as e:
        raise KanjiVGParseError(f"malformed XML: {e}") from None
    root_el = _find_root_group(doc)
    if root_el is None:
        raise KanjiVGParseError("no stroke group found in document")
    counter = [0]
    root = _walk_group(root_el, counter)
    strokes = _collect_strokes(root)
    if not strokes:
        raise KanjiVGParseError("document contains zero strokes")
    return RawKanjiTree(codepoint=_codepoint_of(root_el, root), root=root, strokes=strokes)


def _ensure_kvg_namespace(text: str) -> str:
    if "xmlns:kvg" in text or "kvg:" not in text:
        return text
    # older kanjiVG releases declare the kvg: prefix only in the DTD
    return re.sub(r"<svg\b", '<svg xmlns:kvg="https://kanjivg.tagaini.net/"', text, count=1)


def _kvg_attr(el: ET.Element, name: str) -> str | None:
    for uri in _KVG_URIS:
        v = el.get("{%s}%s" % (uri, name))
        if v is not None:
            return v
    return el.get(name)


def _find_root_group(doc: ET.Element):
    groups = [g for g in doc if g.tag in (_SVG_NS + "g", "g")]
    groups = [g for g in groups if "StrokeNumbers" not in (g.get("id") or "")]
    if not groups:
        return None
    top = groups[0]
    if "StrokePaths" in (top.get("id") or ""):
        inner = [g for g in top if g.tag in (_SVG_NS + "g", "g")]
        if len(inner) == 1:
            return inner[0]
    return top


def _walk_group(el: ET.Element, counter: list[int]) -> RawGroup:
    part = _kvg_attr(el, "part")
    number = _kvg_attr(el, "number")
    g = RawGroup(
        label=_kvg_attr(el, "element"),
        original=_kvg_attr(el, "original"),
        part=int(part) if part else None,
        number=int(number) if number else None,
        position=_kvg_attr(el, "position"),
    )
    for child in el:
        tag = child.tag.rsplit("}", 1)[-1]
        if tag == "g":
            g.children.append(_walk_group(child, counter))
        elif tag == "path":
            d = child.get("d")
            if d is None:
                raise KanjiVGParseError("path element without d attribute")
            counter[0] += 1
            g.children.append(
                Stroke(index=counter[0], type_tag=_kvg_attr(child, "type"), path=parse_path(d))
            )
    return g


def _collect_strokes(g: RawGroup) -> list[Stroke]:
    out = []
    for c in g.children:
        if isinstance(c, RawGroup):
            out.extend(_collect_strokes(c))
        else:
            out.append(c)
    return out


def _codepoint_of(el: ET.Element, root: RawGroup) -> int:
    ident = el.get("id") or ""
    m = re.search(r"([0-9a-fA-F]{4,6})$", ident)
    if m:
        return int(m.group(1), 16)
    if root.label:
        return ord(root.label[0])
    return 0


@dataclass(frozen=True)
class Component:
    strokes: frozenset
    label: str | None

    def sorted_strokes(self) -> list[int]:
        return sorted(self.strokes)


@dataclass
class KanjiDecomposition:
    codepoint: int
    strokes: list[Stroke]
    levels: list[list[Component]]  # index 0..L+1

    @property
    def max_level(self) -> int:
        return len(self.levels) - 2

    def component(self, level: int, i: int) -> Component:
        """1-based component access, mirroring the (l, i) index convention."""
        return self.levels[level][i - 1]

    def stroke_by_index(self, idx: int) -> Stroke:
        return self.strokes[idx - 1]

    def to_json(self) -> dict:
        return {
            "codepoint": self.codepoint,
            "strokes": [s.to_json() for s in self.strokes],
            "levels": [
                [
                    {"strokes": c.sorted_strokes(), **({"label": c.label} if c.label is not None else {})}
                    for c in level
                ]
                for level in self.levels
            ],
        }

    @staticmethod
    def from_json(obj: dict) -> "KanjiDecomposition":
        return KanjiDecomposition(
            codepoint=int(obj["codepoint"]),
            strokes=[Stroke.from_json(s) for s in obj["strokes"]],
            levels=[
                [Component(frozenset(c["strokes"]), c.get("label")) for c in level]
                for level in obj["levels"]
            ],
        )


def serialize_decomposition(d: KanjiDecomposition) -> bytes:
    return (
        json.dumps(d.to_json(), sort_keys=True, separators=(",", ":")) + "\n"
    ).encode("ascii")


def load_decomposition(data: bytes | str) -> KanjiDecomposition:
    return KanjiDecomposition.from_json(json.loads(data))


# --- structural repair -----------------------------------------------------


@dataclass
class _Node:
    label: str | None = None
    original: str | None = None
    number: int | None = None
    part: int | None = None
    groups: list = field(default_factory=list)
    direct: list[int] = field(default_factory=list)  # direct stroke indices
    full: frozenset = frozenset()  # frozen subtree strokes; survives part detachment
    split: bool = False  # node ever had child groups

    def min_stroke(self) -> int:
        return min(self.full)


def _to_node(g: RawGroup) -> _Node:
    n = _Node(label=g.label, original=g.original, number=g.number, part=g.part)
    for c in g.children:
        if isinstance(c, RawGroup):
            n.groups.append(_to_node(c))
        else:
            n.direct.append(c.index)
    return n


def _freeze(n: _Node) -> frozenset:
    s = set(n.direct)
    for g in n.groups:
        s |= _freeze(g)
    n.full = frozenset(s)
    n.split = bool(n.groups)
    return n.full


def _parent_map(root: _Node) -> dict:
    parents = {}

    def walk(n):
        for g in n.groups:
            parents[id(g)] = n
            walk(g)

    walk(root)
    return parents


def _ancestors(n: _Node, parents: dict) -> list[_Node]:
    chain = [n]
    while id(chain[-1]) in parents:
        chain.append(parents[id(chain[-1])])
    return chain


def _merge_parts(root: _Node) -> None:
    """Re-unite kvg:part groups sharing (element, original, number).

    The merged component is attached below the lowest common ancestor of
    the parts, which preserves the nesting property. The detached parts'
    strokes stay in their former parents' frozen stroke sets, so a
    component like the one split across a neighbour keeps overlapping it
    one level down.
    """
    for _round in range(1000):
        parents = _parent_map(root)
        depth: dict[int, int] = {id(root): 0}
        for n in _iter_nodes(root):
            if id(n) in parents:
                depth[id(n)] = depth[id(parents[id(n)])] + 1
        buckets: dict[tuple, list[_Node]] = {}
        for n in _iter_nodes(root):
            if n.part is not None and n.label is not None:
                buckets.setdefault((n.label, n.number), []).append(n)
        if not buckets:
            return
        # shallowest bucket first so that merged inner parts land inside
        # the merged outer component, then drawing order
        key = min(
            buckets,
            key=lambda k: (
                min(depth[id(n)] for n in buckets[k]),
                min(n.min_stroke() for n in buckets[k]),
            ),
        )
        # stroke numbering is the document order that survives re-attachment
        nodes = sorted(buckets[key], key=lambda n: n.min_stroke())
        # repeated instances of one element restart their part count at 1
        instance: list[_Node] = []
        prev = 0
        for n in nodes:
            if n.part <= prev:
                break
            instance.append(n)
            prev = n.part
        if [n.part for n in instance] != list(range(1, len(instance) + 1)):
            logger.warning(
                "part numbers %s for %r do not form 1..k; left split",
                [n.part for n in instance], key[0],
            )
            for n in instance:
                n.part = None
            continue
        if len(instance) == 1:
            instance[0].part = None
            continue
        member_ids = {id(n) for n in instance}
        orig = next((n.original for n in instance if n.original), None)
        merged = _Node(label=key[0], original=orig, number=key[1])
        for n in instance:
            merged.groups.extend(g for g in n.groups if id(g) not in member_ids)
            merged.direct.extend(n.direct)
        merged.full = frozenset().union(*(n.full for n in instance))
        merged.split = bool(merged.groups)
        # lowest common ancestor of all part parents
        chains = [_ancestors(parents.get(id(n), root), parents) for n in instance]
        common = set(id(x) for x in chains[0])
        for ch in chains[1:]:
            common &= set(id(x) for x in ch)
        common -= member_ids
        if not common:
            raise StructureError(f"cycle in part re-union for {key[0]!r}")
        lca = next(x for x in chains[0] if id(x) in common)
        for n in instance:
            p = parents.get(id(n))
            if p is not None:
                p.groups = [g for g in p.groups if g is not n]
        lca.groups.append(merged)
    raise StructureError("cycle in part re-union: merge did not terminate")


def _iter_nodes(root: _Node):
    yield root
    for g in root.groups:
        yield from _iter_nodes(g)


def _flatten_wrappers(root: _Node) -> None:
    """Drop groups that wrap exactly one child group and own no strokes."""
    changed = True
    while changed:
        changed = False
        for n in _iter_nodes(root):
            for i, g in enumerate(list(n.groups)):
                if len(g.groups) == 1 and not g.direct:
                    inner = g.groups[0]
                    if inner.label is None:
                        inner.label = g.label
                        inner.original = inner.original or g.original
                    n.groups[i] = inner
                    changed = True
    # the root itself can be a wrapper; collapse into its single child
    while len(root.groups) == 1 and not root.direct:
        inner = root.groups[0]
        if inner.label is None:
            inner.label = root.label
        root.label, root.original = inner.label, inner.original or root.original
        root.direct = inner.direct
        root.groups = inner.groups
        root.split = inner.split


def _drop_empty_groups(node: _Node) -> None:
    for g in list(node.groups):
        _drop_empty_groups(g)
        if not g.direct and not g.groups:
            logger.info("dropped group %r with no strokes", g.label)
            node.groups.remove(g)


def _level_children(node: _Node) -> list[_Node]:
    """Direct descendants of a node in the level hierarchy.

    A node that was never split repeats itself one level down. For a
    split node, dangling direct strokes pool into one unlabeled
    remainder; strokes ceded to a re-united part are not repeated here
    (the merged component covers them elsewhere on the level).
    """
    if not node.split:
        return [node]
    kids = list(node.groups)
    rem = frozenset(node.direct)
    if rem:
        kids.append(_Node(label=None, direct=sorted(rem), full=rem, split=False))
    return kids


def build_decomposition(tree: RawKanjiTree, max_level: int = DEFAULT_MAX_LEVEL) -> KanjiDecomposition:
    """Repair a raw tree and produce validated nested component levels.

    Levels run 0..max_level, then a final singleton level is appended.
    """
    root = _to_node(tree.root)
    _drop_empty_groups(root)
    _freeze(root)
    _merge_parts(root)
    _flatten_wrappers(root)

    levels_nodes: list[list[_Node]] = [[root]]
    for _l in range(1, max_level + 1):
        nxt: list[_Node] = []
        for n in levels_nodes[-1]:
            nxt.extend(_level_children(n))
        nxt.sort(key=lambda n: (n.min_stroke(), sorted(n.full)))
        levels_nodes.append(nxt)

    levels = [
        [Component(n.full, n.label) for n in lvl] for lvl in levels_nodes
    ]
    levels = [_repair_level(lvl, li, tree.codepoint) for li, lvl in enumerate(levels)]
    all_ids = frozenset(s.index for s in tree.strokes)
    levels.append([Component(frozenset([i]), None) for i in sorted(all_ids)])

    deco = KanjiDecomposition(codepoint=tree.codepoint, strokes=list(tree.strokes), levels=levels)
    validate_decomposition(deco)
    return deco


def _repair_level(level: list[Component], li: int, cp: int) -> list[Component]:
    """Enforce the no-intra-level-nesting property by dropping subsets."""
    out: list[Component] = []
    for i, c in enumerate(level):
        keep = True
        for j, o in enumerate(level):
            if i == j:
                continue
            if c.strokes < o.strokes:
                keep = False
            elif c.strokes == o.strokes and j < i:
                keep = False
        if keep:
            out.append(c)
        else:
            logger.info("U+%05X level %d: dropped nested component %s", cp, li, sorted(c.strokes))
    return out


def validate_decomposition(d: KanjiDecomposition) -> None:
    """Check all five structural invariants; raise StructureError if violated."""
    all_ids = frozenset(s.index for s in d.strokes)
    if len(d.levels) < 2:
        raise StructureError("decomposition needs at least root and leaf levels")
    if len(d.levels[0]) != 1 or d.levels[0][0].strokes != all_ids:
        raise StructureError("level 0 must be the single all-strokes component")
    leaves = d.levels[-1]
    if any(len(c.strokes) != 1 for c in leaves) or {min(c.strokes) for c in leaves} != all_ids:
        raise StructureError("last level must be the stroke singletons")
    for l in range(1, len(d.levels)):
        cover = set()
        for c in d.levels[l]:
            cover |= c.strokes
            if not any(c.strokes <= p.strokes for p in d.levels[l - 1]):
                raise StructureError(
                    f"level {l} component {sorted(c.strokes)} not nested in any level {l-1} component"
                )
        if cover != all_ids:
            raise StructureError(f"level {l} does not cover all strokes")
        for i, c in enumerate(d.levels[l]):
            for j, o in enumerate(d.levels[l]):
                if i != j and not (c.strokes - o.strokes):
                    raise StructureError(
                        f"level {l}: component {sorted(c.strokes)} nested in {sorted(o.strokes)}"
                    )


@dataclass
class IndexSetAndVeins:
    indices: list[tuple[int, int]]  # (level, 1-based i) over levels 1..L
    veins: list[tuple[tuple[int, int], ...]]


def index_and_veins(d: KanjiDecomposition) -> IndexSetAndVeins:
    """Enumerate matchable component indices and all maximal inclusion chains.

    Veins run from the root down to the last level before the stroke
    singletons; the matchable index set excludes the root, so whole-kanji
    overlays never shadow the component structure.
    """
    L = d.max_level
    indices = []
    for l in range(1, L + 1):
        indices.extend((l, i + 1) for i in range(len(d.levels[l])))

    veins: list[tuple[tuple[int, int], ...]] = []

    def descend(l: int, i: int, chain: list[tuple[int, int]]):
        if l == L:
            veins.append(tuple(chain))
            return
        cur = d.component(l, i)
        for j, child in enumerate(d.levels[l + 1]):
            if child.strokes <= cur.strokes:
                chain.append((l + 1, j + 1))
                descend(l + 1, j + 1, chain)
                chain.pop()

    descend(0, 1, [(0, 1)])
    if len(veins) < len(d.levels[L]):
        raise StructureError("fewer veins than last-level components")
    return IndexSetAndVeins(indices=indices, veins=veins)
