"""Engine configuration: a flat, hand-editable key=value text file."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from .matching import MU_KINDS, MatchParams
from .metric import IDENTITY, PsiParams, RhoParams
from .ubw import UbwParams


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EngineConfig:
    data_dir: str = "store"
    n: int = 32
    line_width_px: float = 4.5
    max_level: int = 3
    p: float = 1.0
    b: float = 0.4
    lambdas: tuple = (0.8, 0.1, 0.05, 0.05)
    psis: tuple = (PsiParams(2.0, 0.4), IDENTITY, IDENTITY, IDENTITY)
    label_override: bool = True
    ot_scale: float = 2.0
    a: float = 0.25
    mu: str = "min"
    trickle: float = 0.02
    corpus: str | None = None  # optional list file restricting the corpus

    def rho_params(self) -> RhoParams:
        return RhoParams(
            lambdas=self.lambdas,
            psis=self.psis,
            ubw=UbwParams(p=self.p, b=self.b),
            label_override=self.label_override,
            ot_scale=self.ot_scale,
        )

    def match_params(self) -> MatchParams:
        return MatchParams(
            a=self.a, mu_kind=self.mu, trickle=self.trickle, rho=self.rho_params()
        )

    @property
    def line_width(self) -> float:
        return self.line_width_px / self.n

    def fingerprint_data(self) -> str:
        psis = ";".join(
            "identity" if p.is_identity else f"{p.alpha!r},{p.x0!r}" for p in self.psis
        )
        return (
            f"n={self.n} w={self.line_width_px!r} L={self.max_level} p={self.p!r} "
            f"b={self.b!r} l={self.lambdas!r} psi={psis} ov={self.label_override} s={self.ot_scale!r} "
            f"a={self.a!r} mu={self.mu} eps={self.trickle!r}"
        )


def _format_psi(p: PsiParams) -> str:
    return "identity" if p.is_identity else f"{p.alpha:g},{p.x0:g}"


def _parse_psi(text: str) -> PsiParams:
    text = text.strip()
    if text == "identity":
        return IDENTITY
    try:
        alpha, x0 = (float(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"bad psi value {text!r}; want 'identity' or 'alpha,x0'") from None
    return PsiParams(alpha, x0)


def save_config(cfg: EngineConfig, path: str | Path) -> None:
    lines = [
        f"data_dir = {cfg.data_dir}",
        f"n = {cfg.n}",
        f"line_width_px = {cfg.line_width_px:g}",
        f"max_level = {cfg.max_level}",
        f"p = {cfg.p:g}",
        f"b = {cfg.b:g}",
    ]
    lines += [f"lambda{i} = {v:g}" for i, v in enumerate(cfg.lambdas)]
    lines += [f"psi{i} = {_format_psi(p)}" for i, p in enumerate(cfg.psis)]
    lines += [
        f"label_override = {'true' if cfg.label_override else 'false'}",
        f"ot_scale = {cfg.ot_scale:g}",
        f"a = {cfg.a:g}",
        f"mu = {cfg.mu}",
        f"trickle = {cfg.trickle:g}",
    ]
    if cfg.corpus:
        lines.append(f"corpus = {cfg.corpus}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_config(path: str | Path) -> EngineConfig:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()

    cfg = EngineConfig()
    try:
        lambdas = tuple(
            float(values.pop(f"lambda{i}", cfg.lambdas[i])) for i in range(4)
        )
        psis = tuple(
            _parse_psi(values.pop(f"psi{i}", _format_psi(cfg.psis[i]))) for i in range(4)
        )
        out = EngineConfig(
            data_dir=values.pop("data_dir", cfg.data_dir),
            n=int(values.pop("n", cfg.n)),
            line_width_px=float(values.pop("line_width_px", cfg.line_width_px)),
            max_level=int(values.pop("max_level", cfg.max_level)),
            p=float(values.pop("p", cfg.p)),
            b=float(values.pop("b", cfg.b)),
            lambdas=lambdas,
            psis=psis,
            label_override=values.pop("label_override", "true").lower() in ("true", "1", "yes"),
            ot_scale=float(values.pop("ot_scale", cfg.ot_scale)),
            a=float(values.pop("a", cfg.a)),
            mu=values.pop("mu", cfg.mu),
            trickle=float(values.pop("trickle", cfg.trickle)),
            corpus=values.pop("corpus", None),
        )
    except ValueError as e:
        raise ConfigError(f"{path}: {e}") from None
    if values:
        raise ConfigError(f"{path}: unknown keys {sorted(values)}")
    if out.mu not in MU_KINDS:
        raise ConfigError(f"{path}: unknown mu kind {out.mu!r}")
    return out
