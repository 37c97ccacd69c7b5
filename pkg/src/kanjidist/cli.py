"""Command-line interface.

Exit codes: 0 success, 2 I/O problems, 3 unknown kanji, 4 bad arguments,
5 serve failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import analysis
from .brackets import bracket_of
from .config import ConfigError, EngineConfig, load_config, save_config
from .engine import Engine, UnknownKanjiError, ingest_directory

EXIT_OK = 0
EXIT_IO = 2
EXIT_UNKNOWN_KANJI = 3
EXIT_BAD_ARGS = 4
EXIT_SERVE = 5


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def parse_codepoint(text: str) -> int:
    """Accept a literal kanji or a hex codepoint like 7c8b."""
    t = text.strip()
    if len(t) == 1 and not t.isascii():
        return ord(t)
    try:
        return int(t, 16)
    except ValueError:
        raise CliError(f"cannot interpret {text!r} as a kanji or codepoint", EXIT_BAD_ARGS) from None


def read_kanji_set(path: str) -> list[int]:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise CliError(f"cannot read set file: {e}", EXIT_IO) from None
    out = []
    for raw in lines:
        line = raw.strip()
        if line and not line.startswith("#"):
            out.append(parse_codepoint(line))
    return out


def _load_engine(args) -> Engine:
    if args.config:
        try:
            cfg = load_config(args.config)
        except (OSError, ConfigError) as e:
            raise CliError(f"config: {e}", EXIT_BAD_ARGS) from None
    else:
        cfg = EngineConfig()
    if args.store:
        return Engine(cfg, args.store)
    return Engine(cfg)


def cmd_ingest(args) -> int:
    if not Path(args.svg_dir).is_dir():
        print(f"error: {args.svg_dir} is not a readable directory", file=sys.stderr)
        return EXIT_IO
    store = args.store or (EngineConfig().data_dir if not args.config else load_config(args.config).data_dir)
    max_level = args.max_level
    count, failures = ingest_directory(args.svg_dir, store, max_level=max_level)
    print(f"ingested {count} kanji into {store}")
    for name, err in failures:
        print(f"  failed: {name}: {err}")
    return EXIT_OK


def _require(engine: Engine, cp: int) -> None:
    if not engine.has(cp):
        raise CliError(f"U+{cp:05X} not in store", EXIT_UNKNOWN_KANJI)


def cmd_dist(args) -> int:
    engine = _load_engine(args)
    cp1, cp2 = parse_codepoint(args.kanji1), parse_codepoint(args.kanji2)
    _require(engine, cp1)
    _require(engine, cp2)
    d, result = engine.distance(cp1, cp2)
    print(f"{d:.6f}")
    if args.explain:
        print(result.to_json())
    return EXIT_OK


def cmd_knn(args) -> int:
    engine = _load_engine(args)
    cp = parse_codepoint(args.kanji)
    _require(engine, cp)
    if args.matrix:
        matrix = _read_matrix(args.matrix)
    else:
        corpus = engine.codepoints()
        if cp not in corpus:
            corpus = sorted(corpus + [cp])
        matrix = None
    if args.k <= 0:
        return EXIT_OK
    if matrix is not None:
        neighbors = analysis.knn(matrix, cp, args.k)
    else:
        neighbors = engine.nearest(cp, args.k, workers=args.workers)
    for ncp, d in neighbors:
        line = f"{chr(ncp)}\t{ncp:05x}\t{d:.6f}"
        if args.brackets:
            idx, lo, hi, color = bracket_of(d)
            hi_txt = f"{hi:g}" if math.isfinite(hi) else "inf"
            line += f"\tbracket {idx} ({lo:g}-{hi_txt}) {color}"
        print(line)
    return EXIT_OK


def _read_matrix(prefix: str) -> analysis.DistanceMatrix:
    try:
        payload = Path(prefix + ".bin").read_bytes()
        sidecar = Path(prefix + ".json").read_text()
    except OSError as e:
        raise CliError(f"cannot read matrix cache: {e}", EXIT_IO) from None
    return analysis.DistanceMatrix.from_binary(payload, sidecar)


def cmd_matrix(args) -> int:
    engine = _load_engine(args)
    cps = read_kanji_set(args.set_file)
    for cp in cps:
        _require(engine, cp)
    matrix = analysis.distance_matrix(engine, cps, workers=args.workers)
    out = args.out
    Path(out + ".bin").write_bytes(matrix.to_binary()[0])
    Path(out + ".json").write_text(matrix.to_binary()[1])
    Path(out + ".csv").write_text(matrix.to_csv())
    print(f"matrix {len(cps)}x{len(cps)} written to {out}.bin/.json/.csv")
    return EXIT_OK


def cmd_map(args) -> int:
    engine = _load_engine(args)
    cps = read_kanji_set(args.set_file)
    for cp in cps:
        _require(engine, cp)
    matrix = analysis.distance_matrix(engine, cps, workers=args.workers)
    out = Path(args.out)
    if args.mode == "focused":
        if not args.center:
            print("error: focused mode needs --center", file=sys.stderr)
            return EXIT_BAD_ARGS
        center = parse_codepoint(args.center)
        if center not in cps:
            print(f"error: center U+{center:05X} not in the set", file=sys.stderr)
            return EXIT_BAD_ARGS
        layout = analysis.focused_mds(matrix, center)
        out.with_suffix(".json").write_text(layout.to_json() + "\n")
        out.with_suffix(".svg").write_text(render_focused_svg(layout))
    else:
        result = analysis.metric_mds(matrix)
        payload = {
            "stress": result.stress,
            "points": [
                {"cp": f"{cp:05x}", "x": float(x), "y": float(y)}
                for cp, (x, y) in zip(matrix.codepoints, result.coords)
            ],
        }
        out.with_suffix(".json").write_text(json.dumps(payload, sort_keys=True) + "\n")
        out.with_suffix(".svg").write_text(render_global_svg(matrix.codepoints, result.coords))
    print(f"map written to {out.with_suffix('.json')} and {out.with_suffix('.svg')}")
    return EXIT_OK


def render_focused_svg(layout, size: int = 640, ring_step: float = 0.05) -> str:
    """Radial map with distance rings at fixed multiples."""
    max_r = max((r for _, r, _ in layout.points), default=ring_step)
    rings = int(math.ceil(max_r / ring_step))
    scale = (size / 2 - 40) / (rings * ring_step)
    cx = cy = size / 2
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for k in range(1, rings + 1):
        rr = k * ring_step * scale
        parts.append(
            f'<circle cx="{cx}" cy="{cy}" r="{rr:.2f}" fill="none" '
            f'stroke="#cccccc" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{cx + rr:.2f}" y="{cy - 4:.2f}" font-size="10" '
            f'fill="#999999">{k * ring_step:.2f}</text>'
        )
    parts.append(
        f'<text x="{cx:.2f}" y="{cy:.2f}" font-size="22" text-anchor="middle" '
        f'dominant-baseline="central" fill="#000000">{chr(layout.center)}</text>'
    )
    for cp, r, theta in layout.points:
        x = cx + r * scale * math.cos(theta)
        y = cy + r * scale * math.sin(theta)
        _, _, _, color = bracket_of(r)
        parts.append(
            f'<circle cx="{x:.2f}" cy="{y:.2f}" r="14" fill="{color}" opacity="0.85"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-size="18" text-anchor="middle" '
            f'dominant-baseline="central">{chr(cp)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_global_svg(codepoints, coords, size: int = 640) -> str:
    import numpy as np

    xy = np.asarray(coords, dtype=float)
    span = max(float(np.ptp(xy[:, 0])), float(np.ptp(xy[:, 1])), 1e-9)
    scale = (size - 80) / span
    x0, y0 = xy[:, 0].min(), xy[:, 1].min()
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for cp, (x, y) in zip(codepoints, xy):
        px = 40 + (x - x0) * scale
        py = 40 + (y - y0) * scale
        parts.append(
            f'<text x="{px:.2f}" y="{py:.2f}" font-size="18" text-anchor="middle" '
            f'dominant-baseline="central">{chr(cp)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_config(args) -> int:
    cfg = load_config(args.config) if args.config else EngineConfig()
    save_config(cfg, args.out)
    print(f"config written to {args.out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    engine = _load_engine(args)
    from .server import create_app

    app = create_app(engine)
    import uvicorn

    try:
        uvicorn.run(app, host=args.host, port=args.port, log_config=None, log_level="warning")
    except (OSError, SystemExit) as e:
        print(f"error: serve failed: {e}", file=sys.stderr)
        return EXIT_SERVE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    # shared options accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config", default=argparse.SUPPRESS, help="engine config file (key = value lines)"
    )
    common.add_argument(
        "--store", default=argparse.SUPPRESS, help="decomposition store directory (overrides config)"
    )
    common.add_argument(
        "--workers",
        type=int,
        default=argparse.SUPPRESS,
        help="worker threads for batch computations (default: CPU count)",
    )
    parser = argparse.ArgumentParser(
        prog="kanjidist",
        description="Kanji dissimilarity by hierarchical component matching and ink transport",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="parse kanjiVG SVGs into the decomposition store")
    p.add_argument("svg_dir")
    p.add_argument("--max-level", type=int, default=3)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("dist", parents=[common], help="distance between two kanji")
    p.add_argument("kanji1")
    p.add_argument("kanji2")
    p.add_argument("--explain", action="store_true", help="dump the match breakdown JSON")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("knn", parents=[common], help="nearest neighbors of a kanji")
    p.add_argument("kanji")
    p.add_argument("-k", type=int, default=10)
    p.add_argument("--brackets", action="store_true", help="annotate distance brackets")
    p.add_argument("--matrix", help="prefix of a cached matrix to search instead")
    p.set_defaults(func=cmd_knn)

    p = sub.add_parser("matrix", parents=[common], help="compute and cache a full distance matrix")
    p.add_argument("set_file")
    p.add_argument("--out", default="matrix")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("map", parents=[common], help="2-D map layouts (focused rings or global)")
    p.add_argument("set_file")
    p.add_argument("--mode", choices=("focused", "global"), default="focused")
    p.add_argument("--center")
    p.add_argument("--out", default="map")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("serve", parents=[common], help="local JSON API for the explorer UI")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8023)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("config", parents=[common], help="write the effective config to a file")
    p.add_argument("--out", default="engine.conf")
    p.set_defaults(func=cmd_config)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for attr, default in (("config", None), ("store", None), ("workers", max(os.cpu_count() or 1, 1))):
        if not hasattr(args, attr):
            setattr(args, attr, default)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except UnknownKanjiError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNKNOWN_KANJI
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
