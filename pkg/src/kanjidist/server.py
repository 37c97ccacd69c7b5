"""Local JSON API over an ingested store, versioned under /v1.

Endpoints serve neighbor lists, focused layouts, pair explanations and
component renders; responses are plain JSON (or PNG for renders) with
CORS enabled so a local page can consume them directly.
"""

from __future__ import annotations

import io
import json

import numpy as np
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from . import analysis
from .brackets import bracket_of
from .engine import Engine, UnknownKanjiError


def _cp(text: str) -> int:
    return int(text, 16)


def create_app(engine: Engine, default_k: int = 16) -> FastAPI:
    app = FastAPI(title="kanjidist", version="1")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET"],
        allow_headers=["*"],
    )

    def not_found(detail: str) -> JSONResponse:
        return JSONResponse(status_code=404, content={"error": detail})

    @app.get("/v1/kanji/{cp}/neighbors")
    def neighbors(cp: str, k: int = default_k):
        code = _cp(cp)
        if not engine.has(code):
            return not_found(f"unknown kanji {cp}")
        rows = engine.nearest(code, k)
        return {
            "center": {"cp": f"{code:05x}", "char": chr(code)},
            "neighbors": [
                {
                    "cp": f"{ncp:05x}",
                    "char": chr(ncp),
                    "distance": d,
                    "bracket": bracket_of(d)[0],
                    "color": bracket_of(d)[3],
                }
                for ncp, d in rows
            ],
        }

    @app.get("/v1/kanji/{cp}/focused")
    def focused(cp: str, k: int = default_k):
        code = _cp(cp)
        if not engine.has(code):
            return not_found(f"unknown kanji {cp}")
        rows = engine.nearest(code, k)
        cps = [code] + [ncp for ncp, _ in rows]
        matrix = analysis.distance_matrix(engine, cps)
        layout = analysis.focused_mds(matrix, code)
        return {
            "center": {"cp": f"{code:05x}", "char": chr(code)},
            "points": [
                {
                    "cp": f"{pcp:05x}",
                    "char": chr(pcp),
                    "r": r,
                    "theta": theta,
                    "distance": r,
                    "bracket": bracket_of(r)[0],
                    "color": bracket_of(r)[3],
                }
                for pcp, r, theta in layout.points
            ],
        }

    @app.get("/v1/pair/{cp1}/{cp2}/explain")
    def explain(cp1: str, cp2: str):
        a, b = _cp(cp1), _cp(cp2)
        if not engine.has(a):
            return not_found(f"unknown kanji {cp1}")
        if not engine.has(b):
            return not_found(f"unknown kanji {cp2}")
        distance, result = engine.distance(a, b)
        payload = json.loads(result.to_json())
        payload["kanji"] = [
            {"cp": f"{a:05x}", "char": chr(a)},
            {"cp": f"{b:05x}", "char": chr(b)},
        ]
        payload["a"] = result.a
        payload["components"] = {
            f"{code:05x}": _component_summary(engine, code) for code in (a, b)
        }
        return payload

    @app.get("/v1/render/{cp}/{level}")
    def render(cp: str, level: int, fmt: str = "json"):
        code = _cp(cp)
        if not engine.has(code):
            return not_found(f"unknown kanji {cp}")
        try:
            parts = engine.render_component(code, level)
        except UnknownKanjiError as e:
            return not_found(str(e))
        if fmt == "png":
            return Response(content=_level_png(parts), media_type="image/png")
        return {
            "cp": f"{code:05x}",
            "level": level,
            "components": [
                {**meta, "n": img.n, "cells": img.cells.tolist()} for meta, img in parts
            ],
        }

    return app


def _component_summary(engine: Engine, code: int) -> list[dict]:
    deco = engine.decomposition(code)
    out = []
    for level in range(1, deco.max_level + 1):
        for i, comp in enumerate(deco.levels[level]):
            out.append(
                {
                    "index": [level, i + 1],
                    "label": comp.label,
                    "strokes": comp.sorted_strokes(),
                }
            )
    return out


def _level_png(parts) -> bytes:
    from PIL import Image

    if not parts:
        return b""
    n = parts[0][1].n
    pad = 2
    width = len(parts) * (n + pad) - pad
    canvas = np.full((n, width), 255, dtype=np.uint8)
    for idx, (_, img) in enumerate(parts):
        cells = img.cells
        peak = cells.max() or 1.0
        tile = 255 - np.rint(cells / peak * 255).astype(np.uint8)
        canvas[:, idx * (n + pad) : idx * (n + pad) + n] = tile
    buf = io.BytesIO()
    Image.fromarray(canvas, mode="L").save(buf, format="PNG")
    return buf.getvalue()
