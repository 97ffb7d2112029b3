"""JSON serialization of spaces, combings and complexes.

Output is deterministic: sorted keys, fixed indentation, trailing newline.
Dense spaces store the strict lower triangle of the distance matrix row by
row; graph-backed spaces store adjacency lists, product spaces their two
factors and index pairs.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .combing import Combing
from .groups import group_from_dict
from .metric import FiniteMetricSpace, _Dense, _Graph, _Product, label_tuple

FORMAT_VERSION = 1


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def space_to_dict(space: FiniteMetricSpace) -> dict:
    out = {
        "format_version": FORMAT_VERSION,
        "labels": jsonable(space.labels),
        "scale": space.scale,
        "base_point": space.base_point,
        "truncation_radius": space.truncation_radius,
        "name": space.name,
    }
    if space.group is not None:
        out["group"] = space.group.to_dict()
    b = space.backing
    if isinstance(b, _Dense):
        n = space.n
        il = np.tril_indices(n, k=-1)
        out["kind"] = "dense"
        out["dist"] = np.asarray(b.dist)[il].astype(np.int64).tolist()
    elif isinstance(b, _Graph):
        out["kind"] = "graph"
        out["edge_length"] = b.edge_length
        out["adjacency"] = [b.indices[b.indptr[i]:b.indptr[i + 1]].tolist() for i in range(b.n)]
    elif isinstance(b, _Product):
        out["kind"] = "product"
        out["left"] = space_to_dict(b.left)
        out["right"] = space_to_dict(b.right)
        out["ia"] = b.ia.tolist()
        out["ib"] = b.ib.tolist()
    else:
        raise TypeError(f"cannot serialize backing {type(b).__name__}")
    return out


def space_from_dict(data: dict) -> FiniteMetricSpace:
    labels = [label_tuple(lab) for lab in data["labels"]]
    kw = dict(scale=data["scale"], base_point=data["base_point"], truncation_radius=data["truncation_radius"],
              name=data.get("name", ""))
    if "group" in data:
        kw["group"] = group_from_dict(data["group"])
    kind = data["kind"]
    if kind == "dense":
        n = len(labels)
        dist = np.zeros((n, n), dtype=np.int64)
        il = np.tril_indices(n, k=-1)
        dist[il] = np.array(data["dist"], dtype=np.int64)
        dist = dist + dist.T
        small = dist.astype(np.int32) if n and dist.max() < 2**31 else dist
        return FiniteMetricSpace(labels, _Dense(small), **kw)
    if kind == "graph":
        return FiniteMetricSpace.from_graph(labels, data["adjacency"], edge_length=data["edge_length"], **kw)
    if kind == "product":
        left, right = space_from_dict(data["left"]), space_from_dict(data["right"])
        return FiniteMetricSpace(labels, _Product(left, right, data["ia"], data["ib"]), **kw)
    raise ValueError(f"unknown space kind {kind!r}")


def combing_to_dict(c: Combing, space_ref: str) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "space_ref": space_ref,
        "base_point": c.base_point,
        "horizon": c.horizon,
        "stage_length": c.stage_length,
        "name": c.name,
        "table": c.table.tolist(),
        "settle": c.settle.tolist(),
    }


def combing_from_dict(data: dict, space: FiniteMetricSpace) -> Combing:
    if data["base_point"] != space.base_point:
        raise ValueError("combing base point does not match the space")
    c = Combing(space, np.array(data["table"], dtype=np.int64), stage_length=data["stage_length"],
                name=data.get("name", ""))
    if c.settle.tolist() != data["settle"]:
        raise ValueError("stored settle times disagree with the table")
    return c
