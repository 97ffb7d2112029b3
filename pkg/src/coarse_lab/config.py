"""TOML run configurations and the builders they name.

A config has a ``[space]`` table, an optional ``[combing]`` table, an
optional ``[budgets]`` table and a list of ``[[tasks]]``. Constructors that
produce their own space (``nonproper``, ``noncoherent``, ``product``, cones)
may omit ``[space]``.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import combing as cb
from . import cones
from .errors import CoarseLabError
from .groups import cycle_graph, group_from_dict
from .metric import (FiniteMetricSpace, build_cayley_graph, interval_space, product_space,
                     uniform_space)

TASK_KINDS = ("audit", "hyperbolicity", "asdim", "rips", "cohomology", "uniform_triviality", "corona")
AUDIT_PROPERTIES = ("controlled", "proper", "coherent", "expanding", "quasi_geodesic", "gromov_fellow")


class ConfigError(CoarseLabError):
    pass


@dataclass
class RunConfig:
    name: str
    space: dict
    combing: Optional[dict]
    tasks: list
    budgets: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    source: Optional[Path] = None


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        # the decoder message carries "(at line L, column C)"
        raise ConfigError(f"{path}: {exc}") from None
    return parse_config(data, source=path)


def parse_config(data: dict, source: Optional[Path] = None) -> RunConfig:
    known = {"name", "format_version", "space", "combing", "tasks", "budgets", "output"}
    extra = set(data) - known
    if extra:
        raise ConfigError(f"unknown top-level keys: {sorted(extra)}")
    tasks = data.get("tasks", [])
    for i, t in enumerate(tasks):
        kind = t.get("kind")
        if kind not in TASK_KINDS:
            raise ConfigError(f"task {i}: unknown kind {kind!r} (expected one of {', '.join(TASK_KINDS)})")
        if kind == "audit":
            prop = t.get("property", "all")
            if prop != "all" and prop not in AUDIT_PROPERTIES:
                raise ConfigError(f"task {i}: unknown audit property {prop!r}")
    budgets = data.get("budgets", {})
    bad = set(budgets) - {"points", "simplices", "matrix_cells"}
    if bad:
        raise ConfigError(f"unknown budgets: {sorted(bad)}")
    name = data.get("name") or (source.stem if source else "run")
    return RunConfig(name, data.get("space", {}), data.get("combing"), tasks, budgets, data.get("output", {}), source)


# ---------------------------------------------------------------------------
# spaces


@dataclass
class Built:
    space: FiniteMetricSpace
    combing: Optional[cb.Combing] = None
    cone: Optional[cones.ConeSpec] = None


def _phi_table(spec, height_max, resolution):
    phi = spec.get("phi", "identity")
    hs = range(resolution, height_max + 1, resolution)
    if phi == "identity":
        return [h for h in hs]
    if isinstance(phi, int):
        return [phi] * len(hs)
    if isinstance(phi, list):
        return phi
    if isinstance(phi, str) and phi.startswith("sqrt"):
        return [max(1, math.isqrt(h)) for h in hs]
    raise ConfigError(f"cannot read phi {phi!r}: use 'identity', 'sqrt', an integer or a table")


def build_space(spec: dict, radius: Optional[int] = None) -> Built:
    """Build the space described by ``spec``; ``radius`` overrides the truncation."""
    kind = spec.get("kind")
    if kind == "cayley":
        group = group_from_dict(spec["group"])
        r = int(spec["radius"] if radius is None else radius)
        return Built(build_cayley_graph(group, r, scale=int(spec.get("scale", 1))))
    if kind == "interval":
        return Built(interval_space(int(spec["length"] if radius is None else radius)))
    if kind == "uniform":
        return Built(uniform_space(int(spec["points"]), int(spec.get("distance", 1))))
    if kind == "cycle":
        k = int(spec["length"])
        return Built(build_cayley_graph(cycle_graph(k), k // 2))
    if kind == "product":
        left, right = build_space(spec["left"]).space, build_space(spec["right"]).space
        return Built(product_space(left, right, spec.get("radius", radius)))
    if kind in ("cone", "warped_cone"):
        base = build_space(spec["base"]).space
        T = int(spec["height_max"] if radius is None else radius)
        res = int(spec.get("resolution", 1))
        cone = cones.ConeSpec(base, tuple(_phi_table(spec, T, res)), T, res)
        if kind == "cone":
            space, comb = cones.open_cone(cone)
        else:
            space, comb = cones.warped_cone(cones.WarpSpec(cone, _action(spec, base.n)), spec.get("warp_length"))
        return Built(space, comb, cone)
    if kind == "file":
        from .io import read_json, space_from_dict

        return Built(space_from_dict(read_json(spec["path"])))
    raise ConfigError(f"unknown space kind {kind!r}")


def _action(spec, k):
    act = spec.get("action", {})
    if "rotation" in act:
        return cones.rotation_action(k, act["rotation"])
    if "permutations" in act:
        return tuple(tuple(p) for p in act["permutations"])
    return (tuple(range(k)),)


def build_combing(spec: Optional[dict], built: Built) -> Built:
    if spec is None:
        return built
    kind = spec.get("kind")
    sp = built.space
    if kind == "geodesic":
        return Built(sp, cb.geodesic_combing(sp), built.cone)
    if kind == "bresenham":
        return Built(sp, cb.bresenham_combing(sp), built.cone)
    if kind == "shortlex":
        nf = cb.shortlex_normal_form(sp, spec.get("order"))
        return Built(sp, cb.normal_form_combing(sp, nf), built.cone)
    if kind == "reduced_word":
        return Built(sp, cb.normal_form_combing(sp, cb.reduced_word), built.cone)
    if kind == "nonproper":
        c = cb.nonproper_example(int(spec["T"]))
        return Built(c.space, c)
    if kind == "noncoherent":
        c = cb.noncoherent_example(int(spec["T"]))
        return Built(c.space, c)
    if kind == "product":
        parts = []
        for side in ("left", "right"):
            sub = spec[side]
            parts.append(build_combing(sub["combing"], build_space(sub["space"])).combing)
        c = cb.product_combing(parts[0], parts[1], spec.get("radius"))
        return Built(c.space, c)
    if kind == "cone":
        if built.combing is None or built.cone is None:
            raise ConfigError("combing kind 'cone' needs a cone or warped_cone space")
        return built
    if kind == "file":
        from .io import combing_from_dict, read_json

        return Built(sp, combing_from_dict(read_json(spec["path"]), sp), built.cone)
    raise ConfigError(f"unknown combing kind {kind!r}")


def build(cfg: RunConfig) -> Built:
    built = build_space(cfg.space) if cfg.space else None
    if built is None:
        if cfg.combing is None or cfg.combing.get("kind") not in ("nonproper", "noncoherent", "product"):
            raise ConfigError("config needs a [space] table")
        built = Built(None)
    return build_combing(cfg.combing, built)


# ---------------------------------------------------------------------------
# corona reference models


def reference_model(spec: dict, built: Built):
    """Reference space and label map for a corona comparison."""
    kind = spec.get("kind")
    if kind == "point":
        return uniform_space(1), lambda lab: 0
    if kind == "cone_base":
        if built.cone is None:
            raise ConfigError("reference 'cone_base' needs a cone space")
        return built.cone.base, lambda lab: lab[0]
    if kind == "circle":
        k = int(spec["points"])
        ref = build_cayley_graph(cycle_graph(k), k // 2)

        def direction(lab):
            angle = math.atan2(lab[1], lab[0]) % (2 * math.pi)
            return int(round(angle * k / (2 * math.pi))) % k

        return ref, direction
    raise ConfigError(f"unknown reference kind {kind!r}")


def as_plain(obj: Any):
    """Config tables as plain dicts (TOML parsers may return subclasses)."""
    if isinstance(obj, dict):
        return {k: as_plain(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [as_plain(v) for v in obj]
    return obj
