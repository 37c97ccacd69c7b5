"""Corpus store and the cached distance engine.

The store is a directory of normalized decomposition JSON files, one
per codepoint. The engine prepares kanji on demand and caches the two
expensive artifacts across all pair computations: normalized component
rasters (components recur across kanji) and component-pair distance
evaluations, both keyed by content rather than by kanji.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import EngineConfig
from .geometry import bounding_box, normalize_component, stroke_length, unit_geometry
from .kanjivg import (
    KanjiDecomposition,
    index_and_veins,
    load_decomposition,
    parse_kanjivg,
    build_decomposition,
    serialize_decomposition,
)
from .matching import (
    ComponentView,
    MatchParams,
    PreparedKanji,
    component_weights,
    evaluate_pair,
    kanji_distance,
)
from .raster import PixelImage, rasterize

logger = logging.getLogger(__name__)


def _load_corpus_filter(path: str) -> set[int]:
    """Read a corpus restriction file: one character (or hex codepoint) per line."""
    out: set[int] = set()
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if len(line) == 1:
            out.add(ord(line))
        else:
            out.add(int(line, 16))
    return out


def store_filename(codepoint: int) -> str:
    return f"{codepoint:05x}.json"


def ingest_directory(svg_dir: str | Path, store_dir: str | Path, max_level: int = 3) -> tuple[int, list[tuple[str, str]]]:
    """Parse every kanjiVG SVG in a directory into the decomposition store.

    Returns (count written, [(filename, error), ...]); parse failures are
    reported, not fatal. Output bytes are deterministic.
    """
    svg_dir = Path(svg_dir)
    store_dir = Path(store_dir)
    store_dir.mkdir(parents=True, exist_ok=True)
    failures: list[tuple[str, str]] = []
    written = 0
    codepoints = []
    for path in sorted(svg_dir.glob("*.svg")):
        try:
            tree = parse_kanjivg(path.read_text(encoding="utf-8"))
            deco = build_decomposition(tree, max_level=max_level)
        except Exception as e:  # nothing recoverable about a bad file
            failures.append((path.name, str(e)))
            continue
        (store_dir / store_filename(deco.codepoint)).write_bytes(serialize_decomposition(deco))
        codepoints.append(deco.codepoint)
        written += 1
    index = {
        "codepoints": sorted(codepoints),
        "max_level": max_level,
        "failures": sorted(f for f, _ in failures),
    }
    (store_dir / "index.json").write_bytes(
        (json.dumps(index, sort_keys=True, separators=(",", ":")) + "\n").encode("ascii")
    )
    return written, failures


class UnknownKanjiError(KeyError):
    pass


class Engine:
    """Loads a store and serves distances, neighbors and renders."""

    def __init__(self, config: EngineConfig, store_dir: str | Path | None = None):
        self.config = config
        self.store_dir = Path(store_dir if store_dir is not None else config.data_dir)
        self.match_params: MatchParams = config.match_params()
        self._prepared: dict[int, PreparedKanji] = {}
        self._decos: dict[int, KanjiDecomposition] = {}
        self._rasters: dict[tuple, PixelImage] = {}
        self._rho_cache: dict[tuple, tuple] = {}
        self._lock = threading.Lock()
        self._corpus: list[int] | None = None

    # -- store access --------------------------------------------------

    def codepoints(self) -> list[int]:
        if self._corpus is None:
            index = self.store_dir / "index.json"
            if index.exists():
                cps = json.loads(index.read_text())["codepoints"]
            else:
                cps = sorted(
                    int(p.stem, 16) for p in self.store_dir.glob("*.json") if p.stem != "index"
                )
            if self.config.corpus:
                wanted = _load_corpus_filter(self.config.corpus)
                cps = [cp for cp in cps if cp in wanted]
            self._corpus = cps
        return self._corpus

    def has(self, codepoint: int) -> bool:
        return (self.store_dir / store_filename(codepoint)).exists()

    def decomposition(self, codepoint: int) -> KanjiDecomposition:
        deco = self._decos.get(codepoint)
        if deco is None:
            path = self.store_dir / store_filename(codepoint)
            if not path.exists():
                raise UnknownKanjiError(f"U+{codepoint:05X} not in store")
            deco = load_decomposition(path.read_bytes())
            with self._lock:
                self._decos[codepoint] = deco
        return deco

    # -- preparation ----------------------------------------------------

    def prepare(self, codepoint: int) -> PreparedKanji:
        pk = self._prepared.get(codepoint)
        if pk is not None:
            return pk
        deco = self.decomposition(codepoint)
        iv = index_and_veins(deco)
        lengths = {s.index: stroke_length(s) for s in deco.strokes}
        ink_of = lambda strokes: sum(lengths[i] for i in strokes)
        weights = component_weights(deco, trickle=self.config.trickle, ink_of=ink_of)
        comps: dict = {}
        for (l, i) in iv.indices:
            comp = deco.component(l, i)
            geometry = unit_geometry(deco, comp)
            box = bounding_box(geometry)
            ink = ink_of(comp.strokes)
            normalized, _rec = normalize_component(geometry)
            rkey = self._geometry_key(normalized)
            view = ComponentView(
                key=(l, i),
                label=comp.label,
                strokes=comp.strokes,
                box=box,
                ink=ink,
                raster=self._raster_provider(rkey, normalized),
            )
            view.content_key = rkey + view.signature()
            comps[(l, i)] = view
        pk = PreparedKanji(
            codepoint=codepoint,
            deco=deco,
            indices=iv.indices,
            veins=iv.veins,
            weights=weights,
            comps=comps,
        )
        with self._lock:
            self._prepared[codepoint] = pk
        return pk

    def _geometry_key(self, normalized: list[np.ndarray]) -> tuple:
        h = hashlib.sha1()
        for seg in normalized:
            h.update(np.round(seg, 9).tobytes())
        return (h.hexdigest(), self.config.n, round(self.config.line_width, 12))

    def _raster_provider(self, rkey: tuple, normalized: list[np.ndarray]):
        def provide() -> PixelImage:
            img = self._rasters.get(rkey)
            if img is None:
                img = rasterize(normalized, self.config.n, self.config.line_width)
                with self._lock:
                    self._rasters[rkey] = img
            return img

        return provide

    # -- distances -------------------------------------------------------

    def rho_evaluator(self):
        """Cached component-pair evaluator; safe for concurrent use.

        Cache entries are keyed by the components' content (normalized
        geometry, label, box), so recurring components share work across
        all kanji pairs. The pruning budget is the fixed unmatched
        penalty rate, so cached early exits stay valid.
        """
        params = self.match_params.rho
        budget = self.match_params.a

        def evaluate(cv1: ComponentView, cv2: ComponentView, _budget: float = budget):
            sig = (cv1.content_key, cv2.content_key)
            if sig[0] > sig[1]:
                sig = (sig[1], sig[0])
            hit = self._rho_cache.get(sig)
            if hit is None:
                hit = evaluate_pair(params, cv1, cv2, budget)
                with self._lock:
                    self._rho_cache[sig] = hit
            return hit

        return evaluate

    def distance(self, cp1: int, cp2: int):
        """Kanji distance with full match breakdown."""
        pk1, pk2 = self.prepare(cp1), self.prepare(cp2)
        return kanji_distance(pk1, pk2, self.match_params, rho_fn=self.rho_evaluator())

    def distance_value(self, cp1: int, cp2: int) -> float:
        return self.distance(cp1, cp2)[0]

    def nearest(self, query: int, k: int, workers: int | None = None) -> list[tuple[int, float]]:
        """k nearest corpus kanji, ascending, ties broken by codepoint."""
        from concurrent.futures import ThreadPoolExecutor

        others = [cp for cp in self.codepoints() if cp != query]

        def one(cp: int) -> tuple[float, int]:
            return self.distance_value(query, cp), cp

        if workers is not None and workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as ex:
                pairs = list(ex.map(one, others))
        else:
            pairs = [one(cp) for cp in others]
        pairs.sort()
        return [(cp, d) for d, cp in pairs[: max(k, 0)]]

    def render_component(self, codepoint: int, level: int) -> list[tuple[dict, PixelImage]]:
        """Rasterize every component of one level, with metadata."""
        deco = self.decomposition(codepoint)
        if not (0 <= level < len(deco.levels)):
            raise UnknownKanjiError(f"level {level} out of range for U+{codepoint:05X}")
        out = []
        for i, comp in enumerate(deco.levels[level]):
            geometry = unit_geometry(deco, comp)
            normalized, _rec = normalize_component(geometry)
            img = rasterize(normalized, self.config.n, self.config.line_width)
            meta = {
                "index": [level, i + 1],
                "label": comp.label,
                "strokes": comp.sorted_strokes(),
            }
            out.append((meta, img))
        return out
