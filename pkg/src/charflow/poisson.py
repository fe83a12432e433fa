"""Poisson brackets two ways.

The intersection engine implements the product formula: a signed sum over
authored crossings of trace pairings of parallel-transported variations.
The Darboux engine is an independent finite-difference oracle in
Fenchel-Nielsen coordinates (d = 2 only), where the symplectic form is
sum_i dl_i ^ dtheta_i. The two are proportional; `calibrate` estimates the
constant.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CalibrationIllConditioned
from .invariantfn import eval_invariant, variation
from .liekernel import ad_conjugate
from .representation import fn_to_holonomy

DARBOUX_STEP = 1e-5


@dataclass(frozen=True)
class BracketRequest:
    spec_a: object
    tuple_a: str
    spec_b: object
    tuple_b: str

    def swapped(self):
        return BracketRequest(self.spec_b, self.tuple_b, self.spec_a, self.tuple_a)


def tuple_matrices(scenario, rep, tuple_name):
    return [rep.evaluate(w) for w in scenario.tuple_words(tuple_name)]


def bracket_intersection(scenario, rep, request):
    """Signed sum over crossings of tr(Ad_tb F'_j . Ad_ta F_i).

    Antisymmetric under swapping the request; exactly zero when all crossing
    lists are empty. Missing table entries raise IncompleteAtlas.
    """
    curves_a = scenario.tuple_curves(request.tuple_a)
    curves_b = scenario.tuple_curves(request.tuple_b)
    gs_a = tuple_matrices(scenario, rep, request.tuple_a)
    gs_b = tuple_matrices(scenario, rep, request.tuple_b)
    f_a = variation(request.spec_a, gs_a)
    f_b = variation(request.spec_b, gs_b)

    total = 0.0
    for i, ca in enumerate(curves_a):
        for j, cb in enumerate(curves_b):
            for cr in scenario.table.lookup(ca, cb):
                fa = f_a[i]
                fb = f_b[j]
                if cr.ta:
                    fa = ad_conjugate(rep.evaluate(cr.ta), fa)
                if cr.tb:
                    fb = ad_conjugate(rep.evaluate(cr.tb), fb)
                total += cr.sign * float(np.trace(fb @ fa))
    return total


def _eval_at_point(scenario, fn_point, evaluations):
    rep = fn_to_holonomy(fn_point)
    out = []
    for spec, tuple_name in evaluations:
        gs = tuple_matrices(scenario, rep, tuple_name)
        out.append(eval_invariant(spec, gs))
    return out


def fn_gradients(scenario, fn_point, evaluations, step=DARBOUX_STEP):
    """Central-difference gradients in (lengths, twists) for several functions.

    Returns (dl, dth) arrays of shape (n_functions, n_curves).
    """
    n = len(fn_point.curves)
    k = len(evaluations)
    dl = np.empty((k, n))
    dth = np.empty((k, n))
    for i in range(n):
        fp = _eval_at_point(scenario, fn_point.replace(i, length=fn_point.lengths[i] + step), evaluations)
        fm = _eval_at_point(scenario, fn_point.replace(i, length=fn_point.lengths[i] - step), evaluations)
        for j in range(k):
            dl[j, i] = (fp[j] - fm[j]) / (2.0 * step)
        fp = _eval_at_point(scenario, fn_point.replace(i, twist=fn_point.twists[i] + step), evaluations)
        fm = _eval_at_point(scenario, fn_point.replace(i, twist=fn_point.twists[i] - step), evaluations)
        for j in range(k):
            dth[j, i] = (fp[j] - fm[j]) / (2.0 * step)
    return dl, dth


def bracket_darboux(scenario, request, fn_point, step=DARBOUX_STEP, refine=False):
    """sum_i (dA/dl_i dB/dth_i - dA/dth_i dB/dl_i) by central differences."""
    evaluations = [
        (request.spec_a, request.tuple_a),
        (request.spec_b, request.tuple_b),
    ]

    def at(h):
        dl, dth = fn_gradients(scenario, fn_point, evaluations, step=h)
        return float(np.sum(dl[0] * dth[1] - dth[0] * dl[1]))

    val = at(step)
    if refine:
        half = at(step / 2.0)
        if abs(val - half) > 1e-6 * max(1.0, abs(half)):
            return (4.0 * half - val) / 3.0
        return half
    return val


def calibrate(scenario, requests, fn_points, min_denominator=1e-6, step=DARBOUX_STEP):
    """Ratio intersection/darboux over pairs x points.

    Returns (kappa, spread, records); requires at least 3 usable ratios and
    spread = stdev/|mean| of the ratio set.
    """
    records = []
    ratios = []
    for fn_point in fn_points:
        rep = fn_to_holonomy(fn_point)
        for req in requests:
            inter = bracket_intersection(scenario, rep, req)
            darb = bracket_darboux(scenario, req, fn_point, step=step)
            rec = {
                "pair": (req.tuple_a, req.tuple_b),
                "labels": (req.spec_a.label(), req.spec_b.label()),
                "point": tuple(fn_point.lengths) + tuple(fn_point.twists),
                "intersection": inter,
                "darboux": darb,
            }
            if abs(darb) > min_denominator:
                rec["ratio"] = inter / darb
                ratios.append(inter / darb)
            records.append(rec)
    if len(ratios) < 3:
        raise CalibrationIllConditioned(
            f"only {len(ratios)} ratios above threshold {min_denominator}"
        )
    ratios = np.asarray(ratios)
    kappa = float(np.mean(ratios))
    spread = float(np.std(ratios) / abs(kappa)) if kappa != 0 else float("inf")
    return kappa, spread, records
