"""Finite-scale audits of combing properties.

Each auditor returns an :class:`AuditReport` whose verdict is only ever a
statement about the audited truncation: ``SupportedAtScale``,
``RefutedAtScale`` or ``Inconclusive``. Constants are scaled integers.
Witnesses carry enough data to be recomputed from the table alone
(:func:`evaluate_witness`).
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .combing import Combing
from .metric import label_key, near_pairs

SUPPORTED = "SupportedAtScale"
REFUTED = "RefutedAtScale"
INCONCLUSIVE = "Inconclusive"

COHERENCE_SLOPE = Fraction(1, 5)
LAMBDA_GRID = (Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3))
K_GRID = tuple(range(9))


@dataclass
class AuditReport:
    property: str
    verdict: str
    constants: dict
    witnesses: list = field(default_factory=list)
    collar_excluded: int = 0
    params: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    table: object = field(default=None, repr=False, compare=False)

    def to_dict(self, space=None) -> dict:
        wits = []
        for w in self.witnesses:
            w = dict(w)
            if space is not None:
                w["labels"] = [_jsonable(space.labels[p]) for p in w["points"]]
            wits.append(w)
        return {
            "property": self.property,
            "verdict": self.verdict,
            "constants": self.constants,
            "witnesses": wits,
            "collar_excluded": self.collar_excluded,
            "params": self.params,
            "notes": list(self.notes),
        }


def _jsonable(label):
    if isinstance(label, tuple):
        return [_jsonable(v) for v in label]
    if isinstance(label, np.integer):
        return int(label)
    return label


def _witness(kind, points, stages, distance, **extra):
    w = {"kind": kind, "points": [int(p) for p in points], "stages": [int(s) for s in stages],
         "distance": int(distance)}
    w.update({k: int(v) for k, v in extra.items()})
    return w


def evaluate_witness(c: Combing, w: dict) -> Optional[int]:
    """Recompute a witness distance from the combing table.

    Returns ``None`` if the witness's side condition (ball membership,
    distance bound) no longer holds.
    """
    sp = c.space
    pts, st, kind = w["points"], w["stages"], w["kind"]
    if kind == "step":
        x, = pts
        n0, n1 = st
        return sp.d(c(x, n1), c(x, n0))
    if kind in ("fellow", "expansion", "gromov_fellow"):
        x, y = pts
        n, = st
        if "radius" in w and sp.d(x, y) > w["radius"]:
            return None
        return sp.d(c(x, n), c(y, n))
    if kind == "preimage":
        x, = pts
        n, = st
        if int(sp.radial()[c(x, n)]) > w["radius"]:
            return None
        return int(sp.radial()[x])
    if kind == "coherence":
        x, = pts
        m, n = st
        return sp.d(c(c(x, n), m), c(x, m))
    if kind == "quasi_geodesic":
        x, = pts
        s, t = st
        return sp.d(c(x, s), c(x, t))
    raise ValueError(f"unknown witness kind {kind!r}")


def _lex_first(space, candidates):
    """Index of the lexicographically least label among candidate points."""
    return min(candidates, key=lambda i: label_key(space.labels[i]))


def _default_collar(collar, fallback):
    return int(fallback if collar is None else collar)


# ---------------------------------------------------------------------------


def audit_controlled(c: Combing, r_list: Optional[Sequence[int]] = None, collar: Optional[int] = None) -> AuditReport:
    """Step sizes ``step(n)`` and fellow-travel constants ``fellow(r)`` over the interior."""
    sp = c.space
    r_list = sorted(int(r) for r in (r_list or [sp.scale]))
    collar = _default_collar(collar, max(r_list))
    pts = sp.interior(collar)
    step, witnesses = [], []
    for n in range(c.horizon):
        d = sp.pair_dist(c.table[pts, n + 1], c.table[pts, n])
        best = int(d.max()) if len(d) else 0
        step.append(best)
        if best > 0:
            x = _lex_first(sp, pts[d == best].tolist())
            witnesses.append(_witness("step", [x], [n, n + 1], best))
    fellow = {}
    xs, ys, dxy = near_pairs(sp, pts, max(r_list)) if len(pts) else (np.zeros(0, int),) * 3
    for r in r_list:
        sel = dxy <= r
        a, b = xs[sel], ys[sel]
        best, arg = 0, None
        for n in range(c.horizon + 1):
            d = sp.pair_dist(c.table[a, n], c.table[b, n])
            if len(d) and int(d.max()) > best:
                best = int(d.max())
                k = np.flatnonzero(d == best)
                arg = min(((int(a[i]), int(b[i])) for i in k),
                          key=lambda q: (label_key(sp.labels[q[0]]), label_key(sp.labels[q[1]])))
                arg = (arg, n)
        fellow[str(r)] = best
        if arg is not None:
            (x, y), n = arg
            witnesses.append(_witness("fellow", [x, y], [n], best, radius=r))
    return AuditReport(
        "Controlled", SUPPORTED,
        {"step": step, "step_max": max(step, default=0), "fellow": fellow},
        witnesses, collar, {"r_list": r_list, "horizon": c.horizon},
        ["finite tables are always bounded; the constants are the content of this report"],
    )


def audit_proper(c: Combing, K_radius: int, collar: Optional[int] = None) -> AuditReport:
    """m(n) = largest radius in the interior part of the preimage of B(p, K_radius) under H_n."""
    sp = c.space
    K_radius = int(K_radius)
    if K_radius < 0:
        raise ValueError("K_radius must be non-negative")
    collar = _default_collar(collar, K_radius)
    rad = sp.radial()
    pts = sp.interior(collar)
    limit = sp.truncation_radius - collar
    params = {"K_radius": K_radius, "horizon": c.horizon}
    if len(pts) <= 1:
        return AuditReport("Proper", SUPPORTED, {"m": [0] * (c.horizon + 1)}, [], collar, params,
                           ["single interior point: properness holds trivially"])
    if c.horizon * c.stage_length < K_radius:
        return AuditReport("Proper", INCONCLUSIVE, {"m": []}, [], collar, params,
                           [f"horizon {c.horizon} is shorter than K_radius {K_radius}"])
    n_max = min(c.horizon, max(limit, 0) // c.stage_length)
    params["stages_audited"] = n_max + 1
    max_radius = int(rad[pts].max())
    m, witnesses = [], []
    for n in range(n_max + 1):
        pre = pts[rad[c.table[pts, n]] <= K_radius]
        best = int(rad[pre].max())
        m.append(best)
        x = _lex_first(sp, pre[rad[pre] == best].tolist())
        witnesses.append(_witness("preimage", [x], [n], best, radius=K_radius))
    start = n_max
    while start > 0 and m[start - 1] == m[-1]:
        start -= 1
    tail_len = n_max - start + 1
    if max_radius <= K_radius:
        verdict = INCONCLUSIVE
        notes = [f"K_radius {K_radius} covers the whole interior; the preimage cannot escape it"]
    elif all(v == max_radius for v in m):
        verdict = REFUTED
        notes = ["preimage of K reaches the interior boundary at every audited stage"]
    elif tail_len >= 2 and m[-1] < limit:
        verdict = SUPPORTED
        notes = [f"m(n) constant = {m[-1]} for stages {start}..{n_max}"]
    else:
        verdict = INCONCLUSIVE
        notes = ["m(n) has not stabilised below the interior boundary"]
    return AuditReport("Proper", verdict, {"m": m, "stable_from": start if verdict == SUPPORTED else None,
                                           "max_radius": max_radius},
                       witnesses, collar, params, notes)


def _fit_slope(xs, ys):
    n = len(xs)
    if n < 2:
        return Fraction(0)
    mx = Fraction(sum(xs), n)
    my = Fraction(sum(ys), n)
    sxx = sum((Fraction(x) - mx) ** 2 for x in xs)
    if sxx == 0:
        return Fraction(0)
    return sum((Fraction(x) - mx) * (Fraction(y) - my) for x, y in zip(xs, ys)) / sxx


def audit_coherent(c: Combing, radii: Optional[Sequence[int]] = None, collar: int = 0) -> AuditReport:
    """coh(rho) = max over d(x, p) <= rho and m <= n of d(H_m(H_n(x)), H_m(x))."""
    sp = c.space
    rad = sp.radial()
    limit = sp.truncation_radius - int(collar)
    if radii is None:
        radii = sorted({max(limit * i // 10, 0) for i in range(1, 11)})
    radii = sorted(int(r) for r in radii)
    pts = sp.interior(collar)
    settle = c.settle[pts]
    # best[x] = (gap, m, n) maximising the gap, ties to the least (m, n)
    gap = np.zeros(len(pts), dtype=np.int64)
    arg_m = np.zeros(len(pts), dtype=np.int64)
    arg_n = np.zeros(len(pts), dtype=np.int64)
    for n in range(c.horizon + 1):
        live = np.flatnonzero(settle >= n)
        if len(live) == 0:
            continue
        x = pts[live]
        z = c.table[x, n]
        for m in range(n + 1):
            d = sp.pair_dist(c.table[z, m], c.table[x, m])
            better = d > gap[live]
            # same gap at a lexicographically smaller (m, n) only if not yet set
            idx = live[better]
            gap[idx] = d[better]
            arg_m[idx] = m
            arg_n[idx] = n
    order = sorted(range(len(pts)), key=lambda i: (int(rad[pts[i]]), label_key(sp.labels[pts[i]])))
    coh, witnesses = [], []
    best, best_i = 0, None
    j = 0
    for rho in radii:
        while j < len(order) and rad[pts[order[j]]] <= rho:
            i = order[j]
            if gap[i] > best:
                best, best_i = int(gap[i]), i
            j += 1
        coh.append(best)
        if best_i is not None:
            witnesses.append(_witness("coherence", [pts[best_i]], [arg_m[best_i], arg_n[best_i]], best, radius=rho))
    slope = _fit_slope(radii, coh)
    upper = coh[len(coh) // 2:]
    if slope > COHERENCE_SLOPE:
        verdict = REFUTED
    elif len(set(upper)) <= 1:
        verdict = SUPPORTED
    else:
        verdict = INCONCLUSIVE
    return AuditReport(
        "Coherent", verdict,
        {"radii": radii, "coh": coh, "slope": str(slope), "slope_threshold": str(COHERENCE_SLOPE)},
        witnesses, int(collar), {"horizon": c.horizon},
        ["RefutedAtScale when the least-squares slope of coh against radius exceeds the threshold; "
         "SupportedAtScale when coh is constant on the upper half of the radii"],
    )


@dataclass
class ExpansionTable:
    r_list: list
    n_list: list
    rho: list
    f: dict  # (r, n) -> list over rho

    def tail(self, r, n):
        vals = self.f[(r, n)]
        return vals[-2] if len(vals) >= 2 else (vals[-1] if vals else 0)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "n", "rho", "f"])
        for r in self.r_list:
            for n in self.n_list:
                for rho, v in zip(self.rho, self.f[(r, n)]):
                    w.writerow([r, n, rho, v])
        return buf.getvalue()


def expansion_table(c: Combing, r_list, n_list, collar=None, rho_step=None):
    sp = c.space
    r_list = sorted(int(r) for r in r_list)
    n_list = sorted(int(n) for n in n_list)
    collar = _default_collar(collar, max(r_list))
    limit = sp.truncation_radius - collar
    step = int(rho_step or sp.scale)
    rho = list(range(0, limit + 1, step)) if limit >= 0 else []
    pts = sp.interior(collar)
    rad = sp.radial()
    xs, ys, dxy = near_pairs(sp, pts, max(r_list)) if len(pts) else (np.zeros(0, int),) * 3
    f, best_pair = {}, {}
    for r in r_list:
        sel = dxy <= r
        a, b = xs[sel], ys[sel]
        for n in n_list:
            d = sp.pair_dist(c.column(n)[a], c.column(n)[b])
            g = np.zeros(sp.n, dtype=np.int64)
            np.maximum.at(g, a, d)
            # suffix max over radius thresholds
            vals = []
            for p in rho:
                cand = pts[rad[pts] >= p]
                vals.append(int(g[cand].max()) if len(cand) else 0)
            f[(r, n)] = vals
            if len(rho) >= 2 and len(d):
                thr = rho[-2]
                far = rad[a] >= thr
                tail = f[(r, n)][-2]
                k = np.flatnonzero(far & (d == tail))
                if len(k):
                    i = min(k.tolist(), key=lambda i: (label_key(sp.labels[a[i]]), label_key(sp.labels[b[i]])))
                    best_pair[(r, n)] = (int(a[i]), int(b[i]), tail)
    return ExpansionTable(r_list, n_list, rho, f), best_pair, collar


def audit_expanding(c: Combing, r_list: Sequence[int], n_list: Sequence[int], collar: Optional[int] = None,
                    c_slack: Optional[int] = None, band: Optional[int] = None, rho_step=None) -> AuditReport:
    """f(r, n, rho) = max over interior x with d(x, p) >= rho and y in B_r(x) of d(H_n x, H_n y)."""
    if not r_list or not n_list:
        raise ValueError("r_list and n_list must be nonempty")
    sp = c.space
    c_slack = int(2 * sp.scale if c_slack is None else c_slack)
    band = int(c_slack if band is None else band)
    table, best_pair, collar = expansion_table(c, r_list, n_list, collar, rho_step)
    params = {"r_list": table.r_list, "n_list": table.n_list, "slack": c_slack, "band": band}
    constants = {
        "rho": table.rho,
        "f": {f"{r},{n}": v for (r, n), v in table.f.items()},
    }
    if len(table.rho) < 2:
        return AuditReport("Expanding", INCONCLUSIVE, constants, [], collar, params,
                           ["rho grid too short after collar exclusion"], table)
    tails = {n: [table.tail(r, n) for r in table.r_list] for n in table.n_list}
    constants["tail"] = {str(n): v for n, v in tails.items()}
    witnesses = []
    for (r, n), (x, y, dist) in sorted(best_pair.items()):
        if dist > 0:
            witnesses.append(_witness("expansion", [x, y], [n], dist, radius=r))
    lo_r, hi_r = table.r_list[0], table.r_list[-1]
    refuting = [n for n, t in tails.items()
                if all(v >= r - c_slack for v, r in zip(t, table.r_list)) and t[-1] - t[0] > band and hi_r > lo_r]
    if refuting:
        verdict = REFUTED
        notes = [f"tail grows with r at stages {refuting}: evidence at this scale, not a proof of non-expansion"]
    elif all(max(t) - min(t) <= band for t in tails.values()):
        verdict = SUPPORTED
        notes = [f"tails agree across r within {band}"]
    else:
        verdict = INCONCLUSIVE
        notes = ["tails neither bounded within the band nor growing like r"]
    constants["tail_max"] = max(max(t) for t in tails.values())
    return AuditReport("Expanding", verdict, constants, witnesses, collar, params, notes, table)


@dataclass
class QuasiGeodesicParams:
    lam: Optional[Fraction]
    k: Optional[int]
    ok: bool
    lo: dict = field(default_factory=dict)
    hi: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)

    def to_dict(self):
        return {"lambda": None if self.lam is None else str(self.lam), "k": self.k, "ok": self.ok,
                "lo": {str(k): v for k, v in self.lo.items()}, "hi": {str(k): v for k, v in self.hi.items()},
                "witnesses": self.witnesses}


def audit_quasi_geodesic(c: Combing, collar: int = 0) -> QuasiGeodesicParams:
    """Least (lambda, k) on the candidate grid with every path on [0, settle]
    satisfying lambda^-1 |t-s| - k <= d <= lambda |t-s| + k (times in stages
    of ``stage_length``; ``k`` in multiples of the scale)."""
    sp = c.space
    pts = sp.interior(collar)
    settle = c.settle[pts]
    lo, hi, arg_lo, arg_hi = {}, {}, {}, {}
    for t in range(1, c.horizon + 1):
        live = pts[settle >= t]
        for s in range(t):
            d = sp.pair_dist(c.table[live, s], c.table[live, t])
            if not len(d):
                continue
            delta = t - s
            dmin, dmax = int(d.min()), int(d.max())
            if delta not in lo or dmin < lo[delta]:
                lo[delta] = dmin
                arg_lo[delta] = (int(live[np.argmax(d == dmin)]), s, t, dmin)
            if delta not in hi or dmax > hi[delta]:
                hi[delta] = dmax
                arg_hi[delta] = (int(live[np.argmax(d == dmax)]), s, t, dmax)
    L = c.stage_length
    for lam in LAMBDA_GRID:
        for kk in K_GRID:
            k = kk * sp.scale
            if all(delta * L <= lam * (lo[delta] + k) for delta in lo) and \
                    all(hi[delta] <= lam * delta * L + k for delta in hi):
                return QuasiGeodesicParams(lam, k, True, lo, hi)
    witnesses = []
    lam, k = LAMBDA_GRID[-1], K_GRID[-1] * sp.scale
    bad = [arg_lo[d] for d in sorted(lo) if d * L > lam * (lo[d] + k)]
    bad += [arg_hi[d] for d in sorted(hi) if hi[d] > lam * d * L + k]
    for x, s, t, dist in bad[:5]:
        witnesses.append(_witness("quasi_geodesic", [x], [s, t], dist))
    return QuasiGeodesicParams(None, None, False, lo, hi, witnesses)


def check_gromov_fellow(c: Combing, delta: int, sample_budget: int = 200_000, seed: int = 0,
                        max_witnesses: int = 10) -> AuditReport:
    """Check d(H_n x, H_n y) <= 2 delta whenever n * stage_length <= (x|y) - delta."""
    sp = c.space
    rad = sp.radial()
    n_pts = sp.n
    total = n_pts * (n_pts - 1) // 2
    if total <= sample_budget:
        iu = np.triu_indices(n_pts, k=1)
        xs, ys = iu[0].astype(np.int64), iu[1].astype(np.int64)
        mode = "exhaustive"
    else:
        rng = np.random.default_rng(seed)
        xs = rng.integers(0, n_pts, sample_budget)
        ys = rng.integers(0, n_pts, sample_budget)
        keep = xs != ys
        xs, ys = xs[keep], ys[keep]
        mode = "sampled"
    two_gp = rad[xs] + rad[ys] - sp.pair_dist(xs, ys)
    L = c.stage_length
    fails = []
    worst = 0
    checked = 0
    for n in range(c.horizon + 1):
        sel = 2 * n * L <= two_gp - 2 * delta
        if not sel.any():
            break
        a, b = xs[sel], ys[sel]
        d = sp.pair_dist(c.column(n)[a], c.column(n)[b])
        checked += len(d)
        worst = max(worst, int(d.max()))
        bad = np.flatnonzero(d > 2 * delta)
        for i in bad[: max_witnesses].tolist():
            fails.append((int(d[i]), n, int(a[i]), int(b[i])))
    fails.sort(key=lambda f: (-f[0], f[1], f[2], f[3]))
    witnesses = [_witness("gromov_fellow", [x, y], [n], dist) for dist, n, x, y in fails[:max_witnesses]]
    return AuditReport(
        "GromovFellow", REFUTED if fails else SUPPORTED,
        {"delta": int(delta), "max_gap": worst, "bound": 2 * int(delta), "pairs_checked": checked},
        witnesses, 0, {"mode": mode, "sample_budget": sample_budget, "seed": seed},
        ["non-strict comparison d <= 2 delta"],
    )
