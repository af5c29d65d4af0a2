"""Branch-and-prune embeddability decisions with certified verdicts.

Refutation: the initial box (per free vertex x,y in [-1,1], z in [0,1], a
cover of all embeddings up to the pinned symmetry quotient) is contracted
and bisected until every box is excluded by interval evaluation; that proves
no embedding has all pairwise projective separations >= delta.

Existence: a Krawczyk interval-Newton step mapping a box strictly into its
own interior certifies a real root of a square equation system.  Systems
with fewer equations than variables are squared up by pinning coordinates
(slices) through an approximate root: a root of the sliced system still
satisfies every original equation.  Over-determined systems are not
certified here, only refuted or left inconclusive.
"""

from __future__ import annotations

import heapq
import json
import os
import pickle
import tempfile
from dataclasses import dataclass

import numpy as np

from .graphs import Graph
from .constraints import (
    ConstraintSystem,
    DEFAULT_DELTA,
    NoEdgesError,
    Refutation,
    build_constraint_system,
    contract_explain,
    recheck_refutation_exact,
)
from .intervals import Interval, IntervalBox, WidthUnderflow, bisect

CHECKPOINT_VERSION = 1


# ---------------------------------------------------------------------------
# Verdicts

@dataclass(frozen=True)
class SolverStats:
    contraction_steps: int = 0
    boxes_processed: int = 0
    boxes_refuted: int = 0
    bisections: int = 0
    newton_attempts: int = 0
    peak_queue: int = 0

    def to_dict(self):
        return self.__dict__.copy()


@dataclass(frozen=True)
class KrawczykCertificate:
    """A box strictly mapped into itself by the Krawczyk operator.

    ``box`` is the certified (outer) box; ``refined`` the tighter root
    enclosure obtained by intersecting with the operator image.
    """

    box: IntervalBox
    refined: IntervalBox
    slices: tuple[tuple[int, float], ...]
    iterations: int


@dataclass(frozen=True)
class ProvedUnembeddable:
    """Box cover exhausted with every box refuted (at separation >= delta)."""

    delta: float
    stats: SolverStats

    kind = "unembeddable"


@dataclass(frozen=True)
class ProvedEmbeddable:
    """Existence certificate plus strict pairwise distinctness on the box."""

    box: IntervalBox | None
    certificate: KrawczykCertificate | None
    stats: SolverStats

    kind = "embeddable"


@dataclass(frozen=True)
class Inconclusive:
    residual_boxes: tuple[IntervalBox, ...]
    stats: SolverStats
    reason: str

    kind = "inconclusive"


Verdict = ProvedUnembeddable | ProvedEmbeddable | Inconclusive


def verdict_to_json(v: Verdict, delta: float | None = None, budget: int | None = None) -> str:
    data = {"verdict": v.kind, "stats": v.stats.to_dict()}
    if delta is not None:
        data["delta"] = delta
    if budget is not None:
        data["budget"] = budget
    if isinstance(v, ProvedUnembeddable):
        data["delta"] = v.delta
    if isinstance(v, Inconclusive):
        data["reason"] = v.reason
        data["residual_boxes"] = len(v.residual_boxes)
    return json.dumps(data)


# ---------------------------------------------------------------------------
# Krawczyk existence test

@dataclass(frozen=True)
class NewtonResult:
    certificate: KrawczykCertificate | None
    diagnostic: str

    def __bool__(self):
        return self.certificate is not None


def _equations(cs: ConstraintSystem):
    """Fixed equation order: norms, coordinate zeros, free-free dots."""
    eqs = [("norm", s) for s in cs.norm_slots]
    eqs += [("coord", s, c) for s, c in cs.coord_zero]
    eqs += [("dot", s, t) for s, t in cs.dot_pairs]
    return eqs


def _residuals_at(cs: ConstraintSystem, eqs, pt) -> list[Interval]:
    """Interval residuals at a thin point (outward rounded)."""
    out = []
    thin = [Interval.point(v) for v in pt]
    one = Interval(1.0, 1.0)
    for eq in eqs:
        if eq[0] == "norm":
            s = eq[1]
            out.append(thin[3 * s].sqr() + thin[3 * s + 1].sqr() + thin[3 * s + 2].sqr() - one)
        elif eq[0] == "coord":
            out.append(thin[3 * eq[1] + eq[2]])
        else:
            s, t = eq[1], eq[2]
            acc = Interval(0.0, 0.0)
            for c in range(3):
                acc = acc + thin[3 * s + c] * thin[3 * t + c]
            out.append(acc)
    return out


def _float_residuals(cs: ConstraintSystem, eqs, pt: np.ndarray) -> np.ndarray:
    out = np.zeros(len(eqs))
    for i, eq in enumerate(eqs):
        if eq[0] == "norm":
            s = eq[1]
            out[i] = pt[3 * s] ** 2 + pt[3 * s + 1] ** 2 + pt[3 * s + 2] ** 2 - 1.0
        elif eq[0] == "coord":
            out[i] = pt[3 * eq[1] + eq[2]]
        else:
            s, t = eq[1], eq[2]
            out[i] = sum(pt[3 * s + c] * pt[3 * t + c] for c in range(3))
    return out


def _float_jacobian(cs: ConstraintSystem, eqs, pt: np.ndarray) -> np.ndarray:
    nv = cs.num_vars
    jac = np.zeros((len(eqs), nv))
    for i, eq in enumerate(eqs):
        if eq[0] == "norm":
            s = eq[1]
            for c in range(3):
                jac[i, 3 * s + c] = 2.0 * pt[3 * s + c]
        elif eq[0] == "coord":
            jac[i, 3 * eq[1] + eq[2]] = 1.0
        else:
            s, t = eq[1], eq[2]
            for c in range(3):
                jac[i, 3 * s + c] = pt[3 * t + c]
                jac[i, 3 * t + c] = pt[3 * s + c]
    return jac


def _interval_jacobian(cs: ConstraintSystem, eqs, box: IntervalBox, slices):
    m = len(eqs) + len(slices)
    rows: list[list[Interval]] = [[Interval(0.0, 0.0)] * cs.num_vars for _ in range(m)]
    for i, eq in enumerate(eqs):
        if eq[0] == "norm":
            s = eq[1]
            for c in range(3):
                rows[i][3 * s + c] = box[3 * s + c].scale(2.0)
        elif eq[0] == "coord":
            rows[i][3 * eq[1] + eq[2]] = Interval(1.0, 1.0)
        else:
            s, t = eq[1], eq[2]
            for c in range(3):
                rows[i][3 * s + c] = box[3 * t + c]
                rows[i][3 * t + c] = box[3 * s + c]
    for k, (coord, _val) in enumerate(slices):
        rows[len(eqs) + k][coord] = Interval(1.0, 1.0)
    return rows


def choose_slices(cs: ConstraintSystem, pt: np.ndarray) -> tuple[tuple[int, float], ...]:
    """Coordinate pins that square up an under-determined system at pt.

    Greedy pivoting on the Jacobian nullspace basis: repeatedly pin the
    coordinate with the largest remaining basis row, then eliminate that
    direction.  Pins through the approximate root only add constraints.
    """
    eqs = _equations(cs)
    need = cs.num_vars - len(eqs)
    if need <= 0:
        return ()
    jac = _float_jacobian(cs, eqs, pt)
    _u, sv, vt = np.linalg.svd(jac) if len(eqs) else (None, np.zeros(0), np.eye(cs.num_vars))
    rank = int((sv > 1e-9 * max(1.0, sv[0] if len(sv) else 1.0)).sum())
    basis = vt[rank:].T.copy()  # (nv, k) nullspace basis
    if basis.shape[1] < need:
        basis = np.hstack([basis, np.eye(cs.num_vars)[:, : need - basis.shape[1]]])
    picks = []
    for _ in range(need):
        norms = np.linalg.norm(basis, axis=1)
        coord = int(np.argmax(norms))
        picks.append(coord)
        # eliminate the chosen coordinate's direction from the basis
        row = basis[coord].copy()
        nrm = np.dot(row, row)
        if nrm > 0:
            basis = basis - np.outer(basis @ row, row) / nrm
        basis[coord] = 0.0
    return tuple((c, float(pt[c])) for c in sorted(picks))


def _krawczyk_image(cs: ConstraintSystem, eqs, cur: IntervalBox, slices):
    """K(cur) = mid - C f(mid) + (I - C J(cur))(cur - mid); str on failure."""
    nv = cs.num_vars
    mid = cur.midpoint()
    fmid = _residuals_at(cs, eqs, mid)
    for coord, val in slices:
        fmid.append(Interval.point(mid[coord]) - Interval.point(val))
    jac = _interval_jacobian(cs, eqs, cur, slices)
    jmid = np.array([[0.5 * (iv.lo + iv.hi) for iv in row] for row in jac])
    try:
        cmat = np.linalg.inv(jmid)
    except np.linalg.LinAlgError:
        return "singular midpoint Jacobian"
    if not np.all(np.isfinite(cmat)):
        return "non-finite preconditioner"
    delta_iv = [cur[i] - Interval.point(mid[i]) for i in range(nv)]
    newbox = []
    for i in range(nv):
        cf = Interval(0.0, 0.0)
        for j in range(nv):
            cf = cf + fmid[j].scale(cmat[i, j])
        acc = Interval.point(mid[i]) - cf
        for j in range(nv):
            mij = Interval.point(1.0 if i == j else 0.0)
            s = Interval(0.0, 0.0)
            for k in range(nv):
                s = s + jac[k][j].scale(cmat[i, k])
            mij = mij - s
            acc = acc + mij * delta_iv[j]
        newbox.append(acc)
    return newbox


def prove_root_in_box(
    box: IntervalBox,
    cs: ConstraintSystem,
    slices: tuple[tuple[int, float], ...] | str = "auto",
    max_iter: int = 10,
) -> NewtonResult:
    """Krawczyk containment test on the (sliced) square equation system.

    A certificate means the system has a real solution (locally unique) in
    the certified box; "unknown" carries no claim.  Over-determined systems
    and singular midpoint Jacobians report unknown with a diagnostic.
    """
    eqs = _equations(cs)
    nv = cs.num_vars
    if nv == 0:
        empty = IntervalBox(())
        return NewtonResult(KrawczykCertificate(empty, empty, (), 0), "constant system")
    if slices == "auto":
        slices = choose_slices(cs, np.array(box.midpoint()))
    m = len(eqs) + len(slices)
    if m > nv:
        return NewtonResult(None, f"over-determined: {m} equations, {nv} variables")
    if m < nv:
        return NewtonResult(None, f"under-determined: {m} equations, {nv} variables; slices required")

    cur = box
    for it in range(1, max_iter + 1):
        newbox = _krawczyk_image(cs, eqs, cur, slices)
        if isinstance(newbox, str):
            return NewtonResult(None, newbox)
        if all(newbox[i].strictly_inside(cur[i]) for i in range(nv)):
            refined = []
            for i in range(nv):
                cut = newbox[i].intersect(cur[i])
                refined.append(cut if cut is not None else cur[i])
            return NewtonResult(
                KrawczykCertificate(cur, IntervalBox(tuple(refined)), tuple(slices), it),
                "certified",
            )
        shrunk = []
        progress = False
        for i in range(nv):
            cut = newbox[i].intersect(cur[i])
            if cut is None:
                return NewtonResult(None, "Krawczyk image disjoint from box")
            if cut.width < cur[i].width * 0.9:
                progress = True
            shrunk.append(cut)
        if not progress:
            return NewtonResult(None, "Krawczyk not contracting")
        cur = IntervalBox(tuple(shrunk))
    return NewtonResult(None, f"no containment within {max_iter} iterations")


def check_distinctness(cs: ConstraintSystem, box: IntervalBox) -> bool:
    """Strict pairwise projective distinctness of all vertex images over box.

    Adjacent pairs are orthogonal unit vectors at any root, hence distinct;
    non-adjacent pairs need (u.v)^2 < 1 strictly over the box.
    """
    for s, c in cs.sep_coords:
        if box[3 * s + c].sqr().hi >= 1.0:
            return False
    for s, t in cs.sep_pairs:
        acc = Interval(0.0, 0.0)
        for c in range(3):
            acc = acc + box[3 * s + c] * box[3 * t + c]
        if acc.sqr().hi >= 1.0:
            return False
    return True


def refine_certificate(cert: KrawczykCertificate, cs: ConstraintSystem, steps: int = 10):
    """Iterate the Krawczyk operator from the certified box.

    Returns the final enclosure; every iterate must stay inside the
    certificate's outer box (None on the impossible escape/disjoint case).
    """
    eqs = _equations(cs)
    cur = cert.box
    for _ in range(steps):
        res = _krawczyk_image(cs, eqs, cur, cert.slices)
        if isinstance(res, str):
            return None
        nxt = []
        for i in range(cs.num_vars):
            cut = res[i].intersect(cur[i])
            if cut is None:
                return None
            if not (cert.box[i].lo <= cut.lo and cut.hi <= cert.box[i].hi):
                return None
            nxt.append(cut)
        cur = IntervalBox(tuple(nxt))
    return cur


# ---------------------------------------------------------------------------
# Gauss-Newton polish (float heuristic feeding the certified test)

def _polish(cs: ConstraintSystem, eqs, start: np.ndarray, iters: int = 40):
    x = start.astype(float).copy()
    for _ in range(iters):
        f = _float_residuals(cs, eqs, x)
        if np.max(np.abs(f)) < 1e-13:
            break
        jac = _float_jacobian(cs, eqs, x)
        step, *_ = np.linalg.lstsq(jac, -f, rcond=None)
        x = x + step
        if np.max(np.abs(step)) < 1e-15:
            break
    return x


# ---------------------------------------------------------------------------
# Box queue with disk spill

class BoxQueue:
    """Best-first (largest volume) box queue; overflow spills to a temp file."""

    def __init__(self, max_in_memory: int = 200_000):
        self.heap: list[tuple[float, int, IntervalBox]] = []
        self.counter = 0
        self.max_in_memory = max_in_memory
        self.spill_path: str | None = None
        self.spilled = 0

    def push(self, box: IntervalBox) -> None:
        heapq.heappush(self.heap, (-box.log_volume(), self.counter, box))
        self.counter += 1
        if len(self.heap) > self.max_in_memory:
            self._spill()

    def _spill(self) -> None:
        # move the smallest-volume half out of memory
        keep = self.max_in_memory // 2
        items = sorted(self.heap)
        self.heap = items[:keep]
        heapq.heapify(self.heap)
        if self.spill_path is None:
            fd, self.spill_path = tempfile.mkstemp(prefix="kssearch-boxes-")
            os.close(fd)
        with open(self.spill_path, "ab") as fh:
            for _, _, box in items[keep:]:
                pickle.dump(box.to_lists(), fh)
                self.spilled += 1

    def pop(self) -> IntervalBox | None:
        if not self.heap and self.spilled:
            self._reload()
        if not self.heap:
            return None
        _, _, box = heapq.heappop(self.heap)
        return box

    def _reload(self) -> None:
        boxes = []
        with open(self.spill_path, "rb") as fh:
            while True:
                try:
                    boxes.append(IntervalBox.from_lists(pickle.load(fh)))
                except EOFError:
                    break
        os.unlink(self.spill_path)
        self.spill_path = None
        self.spilled = 0
        for b in boxes:
            self.push(b)

    def __len__(self):
        return len(self.heap) + self.spilled

    def drain(self) -> list[IntervalBox]:
        out = []
        while True:
            b = self.pop()
            if b is None:
                return out
            out.append(b)


# ---------------------------------------------------------------------------
# Main decision loop

def decide_embeddability(
    g: Graph,
    budget: int = 100_000,
    delta: float = DEFAULT_DELTA,
    *,
    verify_refutations: bool = False,
    on_refuted=None,
    resume_boxes=None,
    newton_width: float = 0.6,
    max_sweeps_per_box: int = 20,
    max_in_memory: int = 200_000,
) -> Verdict:
    """Branch-and-prune verdict on embeddability as a vector system.

    ProvedUnembeddable(delta): no embedding with all pairwise projective
    separations >= delta exists (the delta caveat is part of the verdict).
    ProvedEmbeddable: Krawczyk certificate plus strict distinctness over the
    certified box.  Budget exhaustion yields Inconclusive with residual
    boxes, serializable for resume.  Budget is counted in contraction steps
    (sweeps), so verdicts are machine-independent.
    """
    stats = dict(
        contraction_steps=0,
        boxes_processed=0,
        boxes_refuted=0,
        bisections=0,
        newton_attempts=0,
        peak_queue=0,
    )

    def mkstats():
        return SolverStats(**stats)

    try:
        cs = build_constraint_system(g, delta)
    except NoEdgesError:
        return ProvedEmbeddable(None, None, mkstats())

    if cs.num_vars == 0:
        # pinned triple satisfies everything exactly
        empty = IntervalBox(())
        return ProvedEmbeddable(empty, KrawczykCertificate(empty, empty, (), 0), mkstats())

    eqs = _equations(cs)
    queue = BoxQueue(max_in_memory=max_in_memory)
    if resume_boxes:
        for b in resume_boxes:
            queue.push(b)
    else:
        queue.push(cs.initial_box())
    residuals: list[IntervalBox] = []

    while stats["contraction_steps"] < budget:
        box = queue.pop()
        if box is None:
            break
        stats["boxes_processed"] += 1
        stats["peak_queue"] = max(stats["peak_queue"], len(queue) + 1)

        # contract to (near) fixpoint
        popped = box
        refuted = False
        for _ in range(max_sweeps_per_box):
            if stats["contraction_steps"] >= budget:
                break
            stats["contraction_steps"] += 1
            before = sum(iv.width for iv in box.ivs)
            nxt, refutation = contract_explain(box, cs)
            if nxt is None:
                if verify_refutations and not recheck_refutation_exact(cs, refutation):
                    raise AssertionError(
                        f"exact shadow check failed for {refutation.kind}"
                    )
                if on_refuted is not None:
                    on_refuted(popped)
                stats["boxes_refuted"] += 1
                refuted = True
                break
            box = nxt
            after = sum(iv.width for iv in box.ivs)
            if after > before * 0.98:
                break
        if refuted:
            continue

        if box.max_width < newton_width:
            stats["newton_attempts"] += 1
            polished = _polish(cs, eqs, np.array(box.midpoint()))
            if np.max(np.abs(_float_residuals(cs, eqs, polished))) < 1e-9:
                for eps in (1e-7, 1e-5, 1e-3):
                    seed = IntervalBox(
                        tuple(Interval(v - eps, v + eps) for v in polished)
                    )
                    res = prove_root_in_box(seed, cs, "auto")
                    if res and check_distinctness(cs, res.certificate.refined):
                        return ProvedEmbeddable(res.certificate.refined, res.certificate, mkstats())

        try:
            left, right = bisect(box)
        except WidthUnderflow:
            residuals.append(box)
            continue
        stats["bisections"] += 1
        queue.push(left)
        queue.push(right)

    leftovers = tuple(residuals) + tuple(queue.drain())
    if not leftovers:
        return ProvedUnembeddable(delta, mkstats())
    reason = (
        "budget exhausted"
        if stats["contraction_steps"] >= budget
        else "unsplittable boxes remain"
    )
    return Inconclusive(leftovers, mkstats(), reason)


# ---------------------------------------------------------------------------
# Checkpoints

def checkpoint_to_json(g: Graph, delta: float, verdict: Inconclusive) -> str:
    from .graphs import graph6_encode

    return json.dumps(
        {
            "version": CHECKPOINT_VERSION,
            "graph6": graph6_encode(g),
            "delta": delta,
            "stats": verdict.stats.to_dict(),
            "boxes": [b.to_lists() for b in verdict.residual_boxes],
        }
    )


def checkpoint_from_json(text: str):
    data = json.loads(text)
    if data.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {data.get('version')!r}")
    boxes = [IntervalBox.from_lists(b) for b in data["boxes"]]
    return data["graph6"], data["delta"], boxes
