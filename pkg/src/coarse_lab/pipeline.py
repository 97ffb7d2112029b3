"""Task execution shared by ``coarse-lab run`` and ``coarse-lab verify``."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import audits
from .cohomology import (coarse_cohomology_report, cohomology, collar_subcomplex,
                         uniform_triviality_probe)
from .config import Built, ConfigError, build_space, reference_model
from .corona import (boundary_clusters, cluster_nerve, corona_compare, default_recipe,
                     nerve_cohomology, nerve_complex)
from .metric import estimate_asdim_upper, estimate_hyperbolicity
from .rips import rips_complex
from .snf import Ring

SUPPORTED_ALIASES = ("Supported", audits.SUPPORTED)


@dataclass
class TaskOutput:
    stem: str
    result: dict
    verdict: Optional[str] = None
    extra: dict = field(default_factory=dict)  # suffix -> text


def _need_combing(built, task):
    if built.combing is None:
        raise ConfigError(f"task {task['kind']!r} needs a [combing] table")
    return built.combing


def _ints(v):
    return None if v is None else [int(x) for x in v]


def _audit(prop, task, built) -> TaskOutput:
    c = _need_combing(built, task)
    sp = c.space
    collar = task.get("collar")
    if prop == "controlled":
        rep = audits.audit_controlled(c, _ints(task.get("r_list")), collar)
    elif prop == "proper":
        rep = audits.audit_proper(c, int(task.get("K_radius", 2 * sp.scale)), collar)
    elif prop == "coherent":
        rep = audits.audit_coherent(c, _ints(task.get("radii")), int(collar or 0))
    elif prop == "expanding":
        r_list = _ints(task.get("r_list")) or [sp.scale, 2 * sp.scale, 3 * sp.scale]
        n_list = _ints(task.get("n_list")) or list(range(6))
        rep = audits.audit_expanding(c, r_list, n_list, collar, task.get("slack"), task.get("band"))
        out = TaskOutput("expanding", rep.to_dict(sp), rep.verdict)
        out.extra["csv"] = rep.table.to_csv()
        return out
    elif prop == "quasi_geodesic":
        q = audits.audit_quasi_geodesic(c, int(collar or 0))
        verdict = audits.SUPPORTED if q.ok else audits.INCONCLUSIVE
        return TaskOutput("quasi_geodesic", {"property": "QuasiGeodesic", "verdict": verdict, **q.to_dict()}, verdict)
    elif prop == "gromov_fellow":
        rep = audits.check_gromov_fellow(c, int(task["delta"]), int(task.get("sample_budget", 200_000)),
                                         int(task.get("seed", 0)))
    else:
        raise ConfigError(f"unknown audit property {prop!r}")
    return TaskOutput(prop, rep.to_dict(sp), rep.verdict)


def audit_outputs(task, built) -> list[TaskOutput]:
    prop = task.get("property", "all")
    props = ["controlled", "proper", "coherent", "expanding"] if prop == "all" else [prop]
    return [_audit(p, task, built) for p in props]


def _ring(task):
    return Ring.parse(task.get("ring", "ZZ"))


def _cohomology(task, built, config) -> TaskOutput:
    ring = _ring(task)
    if task.get("mode", "single") == "stabilization":
        Ts = _ints(task["truncations"])
        spaces = {T: build_space(config["space"], radius=T).space for T in Ts}
        rep = coarse_cohomology_report(spaces, _ints(task["scales"]), _ints(task["degrees"]),
                                       int(task["collar"]), ring, task.get("dim_cap"))
        return TaskOutput("cohomology", rep.to_dict(), rep.verdict)
    sp = built.space
    degrees = _ints(task.get("degrees"))
    cap = int(task.get("dim_cap", (max(degrees) + 1) if degrees else 2))
    degrees = degrees or list(range(cap))
    cx = rips_complex(sp, int(task["R"]), cap)
    rel = None
    if "collar" in task:
        rel = collar_subcomplex(cx, sp, int(task["collar"]))
    res = cohomology(cx, ring, degrees, rel)
    out = res.to_dict()
    out.update({"R": int(task["R"]), "dim_cap": cap, "counts": cx.counts(),
                "relative_collar": task.get("collar")})
    return TaskOutput("cohomology", out)


def _corona(task, built, config) -> TaskOutput:
    c = _need_combing(built, task)
    sp = c.space
    recipe = default_recipe(c)
    annulus = tuple(task.get("annulus", recipe.annulus))
    stage = int(task.get("stage", recipe.stage))
    s = int(task.get("threshold", recipe.threshold))
    s2 = int(task.get("edge_threshold", recipe.edge_threshold))
    part = boundary_clusters(c, annulus, stage, s)
    nerve = cluster_nerve(part, s2)
    result = {
        "partition": part.to_dict(sp),
        "nerve": nerve.to_dict(sp),
        "nerve_dimension": nerve_complex(nerve).dimension(),
        "nerve_cohomology": nerve_cohomology(nerve, _ring(task)).to_dict(),
        "nerve_is_cycle": nerve.is_cycle(),
        "recipe": {"annulus": list(annulus), "stage": stage, "threshold": s, "edge_threshold": s2,
                   "defaults": {"annulus": list(recipe.annulus), "stage": recipe.stage,
                                "threshold": recipe.threshold, "edge_threshold": recipe.edge_threshold}},
    }
    cone_built = built
    if built.cone is None and config.get("space", {}).get("kind") in ("cone", "warped_cone"):
        # verify reloads only the space and combing; the cone parameters come from the config echo
        cone_built = build_space(config["space"])
    if cone_built.cone is not None:
        result["cone"] = cone_built.cone.to_dict()
    if "reference" in task:
        ref, label_map = reference_model(task["reference"], cone_built)
        result["comparison"] = corona_compare(part, sp, ref, label_map)
    out = TaskOutput("corona", result)
    out.extra["dot"] = nerve.to_dot(sp)
    return out


def run_task(task: dict, built: Built, config: dict) -> list[TaskOutput]:
    kind = task["kind"]
    if kind == "audit":
        return audit_outputs(task, built)
    sp = built.space
    if kind == "hyperbolicity":
        delta = estimate_hyperbolicity(sp, int(task.get("sample_budget", 200_000)), int(task.get("seed", 0)))
        return [TaskOutput("hyperbolicity", {"delta": str(delta), "scale": sp.scale,
                                             "sample_budget": int(task.get("sample_budget", 200_000)),
                                             "seed": int(task.get("seed", 0))})]
    if kind == "asdim":
        return [TaskOutput("asdim", estimate_asdim_upper(sp, _ints(task["scales"])).to_dict())]
    if kind == "rips":
        cx = rips_complex(sp, int(task["R"]), int(task.get("dim_cap", 3)))
        out = TaskOutput("rips", {"R": int(task["R"]), "dim_cap": cx.dim_cap, "counts": cx.counts(),
                                  "dimension": cx.dimension()})
        if task.get("write_complex", False):
            out.extra["complex.json"] = cx.to_dict()
        return [out]
    if kind == "cohomology":
        return [_cohomology(task, built, config)]
    if kind == "uniform_triviality":
        centers = [sp.base_point] if task.get("centers") == "base" else _ints(task.get("centers"))
        probe = uniform_triviality_probe(sp, int(task["k"]), int(task["n"]), int(task["N"]), int(task["r"]),
                                         int(task["s"]), _ring(task), centers, task.get("dim_cap"))
        return [TaskOutput("uniform_triviality", probe.to_dict())]
    if kind == "corona":
        return [_corona(task, built, config)]
    raise ConfigError(f"unknown task kind {kind!r}")


def expectation_failed(task: dict, verdict: Optional[str]) -> bool:
    """True when the task expects Supported and the verdict is a refutation."""
    return task.get("expect") in SUPPORTED_ALIASES and verdict == audits.REFUTED


def recheck_witnesses(result: dict, combing) -> list[str]:
    """Diff lines for witnesses whose stored distance disagrees with a recomputation."""
    diffs = []
    for i, w in enumerate(result.get("witnesses", [])):
        try:
            got = audits.evaluate_witness(combing, w)
        except (IndexError, KeyError, ValueError) as exc:
            diffs.append(f"witness {i} ({w.get('kind')}): cannot evaluate: {exc}")
            continue
        if got != w.get("distance"):
            diffs.append(f"witness {i} ({w['kind']} at points {w['points']}, stages {w['stages']}): "
                         f"stored {w.get('distance')}, recomputed {got}")
    return diffs

