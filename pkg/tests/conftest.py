import shutil
from pathlib import Path

import pytest

from kanjidist.config import EngineConfig
from kanjidist.engine import Engine, ingest_directory

REPO = Path(__file__).resolve().parent.parent
KANJIVG_DIR = REPO / "data" / "kanjivg"
JOYO_LIST = REPO / "data" / "joyo.txt"

# a small cross-section: the worked examples plus structural edge cases
SAMPLE_KANJI = "粋枠酔酢砕潟陽顔須一三乗単構歌斎残悔母"


def svg_of(char: str) -> str:
    return (KANJIVG_DIR / f"{ord(char):05x}.svg").read_text(encoding="utf-8")


MINIMAL_SVG = """<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="109" height="109" viewBox="0 0 109 109">
<g id="kvg:StrokePaths_04e00">
<g id="kvg:04e00" kvg:element="X" xmlns:kvg="https://kanjivg.tagaini.net/">
<path d="M0,0 C1,1 2,2 3,3"/>
</g>
</g>
</svg>
"""

# two part-groups sharing one element label, as the source data splits them
PART_SVG = """<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" xmlns:kvg="https://kanjivg.tagaini.net/" width="109" height="109" viewBox="0 0 109 109">
<g id="kvg:StrokePaths_050000">
<g id="kvg:05000" kvg:element="W">
<g id="kvg:05000-g1" kvg:element="A">
<path d="M10,10 C20,10 30,10 40,10"/>
<g id="kvg:05000-g2" kvg:element="B" kvg:part="1">
<path d="M10,30 C20,30 30,30 40,30"/>
</g>
</g>
<g id="kvg:05000-g3" kvg:element="B" kvg:part="2">
<path d="M10,50 C20,50 30,50 40,50"/>
<path d="M10,70 C20,70 30,70 40,70"/>
</g>
</g>
</g>
</svg>
"""


@pytest.fixture(scope="session")
def sample_store(tmp_path_factory):
    svgdir = tmp_path_factory.mktemp("svgs")
    for ch in SAMPLE_KANJI:
        shutil.copy(KANJIVG_DIR / f"{ord(ch):05x}.svg", svgdir)
    store = tmp_path_factory.mktemp("store")
    count, failures = ingest_directory(svgdir, store)
    assert count == len(SAMPLE_KANJI) and not failures
    return store


@pytest.fixture(scope="session")
def engine(sample_store):
    return Engine(EngineConfig(), sample_store)
