"""Conjugation-invariant multi-functions f: G^k -> R and their variations.

The variation F = (F_1 .. F_k) is the trace-form gradient characterized by
tr(F_i X) = d/dt f(g_1, ..., exp(tX) g_i, ..., g_k) at t = 0. Closed forms
are available for traces; everything else goes through central differences
dual-solved against the canonical sl(d) basis.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NumericalFailure
from .liekernel import (
    ad_conjugate,
    algebra_basis,
    mat_exp,
    project_traceless,
    trace_form,
    trace_form_dual_solve,
)
from .representation import simple_root_length
from .words import Word, parse_word

FD_STEP = 1e-5


# ---------------------------------------------------------------------------
# Spec kinds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceSpec:
    arity: int = 1

    def evaluate(self, gs):
        _check_arity(self, gs)
        return float(np.trace(gs[0]))

    def label(self):
        return "tr"


@dataclass(frozen=True)
class SimpleRootLengthSpec:
    j: int = 1
    arity: int = 1

    def evaluate(self, gs):
        _check_arity(self, gs)
        return simple_root_length(gs[0], self.j)

    def label(self):
        return f"srl{self.j}"


@dataclass(frozen=True)
class WordComposedSpec:
    """base(w_1(g), ..., w_m(g)) for word maps w_j over letters g1..gk."""

    base: object
    maps: tuple  # of Word over letters "g1".."gk"
    arity: int

    def evaluate(self, gs):
        _check_arity(self, gs)
        return self.base.evaluate([_word_map(m, gs) for m in self.maps])

    def label(self):
        inner = ",".join(str(m) for m in self.maps)
        return f"{self.base.label()}[{inner}]"


@dataclass(frozen=True)
class PolynomialSpec:
    """Sum of coef * product(factors), all factors over the same tuple."""

    terms: tuple  # of (coef, tuple of specs)
    arity: int

    def evaluate(self, gs):
        _check_arity(self, gs)
        total = 0.0
        for coef, factors in self.terms:
            prod = coef
            for f in factors:
                prod *= f.evaluate(gs)
            total += prod
        return total

    def label(self):
        return "poly"


def _check_arity(spec, gs):
    if len(gs) != spec.arity:
        raise ValueError(f"expected {spec.arity} arguments, got {len(gs)}")


def _word_map(w, gs):
    d = gs[0].shape[0]
    out = np.eye(d)
    for name, e in w.letters:
        if not name.startswith("g"):
            raise ValueError(f"word-map letter {name!r} must be g1..gk")
        idx = int(name[1:]) - 1
        m = gs[idx]
        out = out @ (m if e > 0 else np.linalg.inv(m))
    return out


def spec_from_json(obj):
    """Parse the scenario-file spec syntax."""
    kind = obj.get("kind")
    if kind == "trace":
        return TraceSpec()
    if kind == "srl":
        return SimpleRootLengthSpec(j=int(obj.get("j", 1)))
    if kind == "word":
        base = spec_from_json(obj["base"])
        maps = tuple(parse_word(s) for s in obj["words"])
        if len(maps) != base.arity:
            raise ValueError("number of word maps must match base arity")
        arity = int(obj["arity"]) if "arity" in obj else _max_letter(maps)
        return WordComposedSpec(base=base, maps=maps, arity=arity)
    if kind == "poly":
        terms = []
        arity = None
        for t in obj["terms"]:
            factors = tuple(spec_from_json(f) for f in t["factors"])
            for f in factors:
                arity = f.arity if arity is None else arity
                if f.arity != arity:
                    raise ValueError("polynomial factors must share arity")
            terms.append((float(t.get("coef", 1.0)), factors))
        return PolynomialSpec(terms=tuple(terms), arity=arity or 1)
    raise ValueError(f"unknown spec kind {kind!r}")


def _max_letter(maps):
    mx = 0
    for m in maps:
        for name, _ in m.letters:
            mx = max(mx, int(name[1:]))
    return mx


# ---------------------------------------------------------------------------
# Evaluation and variations
# ---------------------------------------------------------------------------

def eval_invariant(spec, gs):
    gs = [np.asarray(g, dtype=float) for g in gs]
    return spec.evaluate(gs)


def variation_trace_closed(g):
    """Variation of the trace: g - (tr g / d) I."""
    g = np.asarray(g, dtype=float)
    return project_traceless(g)


@lru_cache(maxsize=512)
def _exp_basis_step(d, k, h):
    basis = algebra_basis(d)
    return mat_exp(h * basis.elements[k])


def _directional(spec, gs, slot, step_mat_pos, step_mat_neg, denom):
    gp = list(gs)
    gp[slot] = step_mat_pos @ gs[slot]
    fp = spec.evaluate(gp)
    gp[slot] = step_mat_neg @ gs[slot]
    fm = spec.evaluate(gp)
    return (fp - fm) / denom


def variation_numeric(spec, gs, h=FD_STEP, check_residual=True):
    """Central-difference variation, dual-solved through the trace form.

    Falls back to Richardson extrapolation in h when the defining-identity
    residual check fails at the base step.
    """
    gs = [np.asarray(g, dtype=float) for g in gs]
    d = gs[0].shape[0]
    basis = algebra_basis(d)

    def slot_variation(slot, step):
        c = np.empty(len(basis))
        for k in range(len(basis)):
            c[k] = _directional(
                spec, gs, slot,
                _exp_basis_step(d, k, step), _exp_basis_step(d, k, -step),
                2.0 * step,
            )
        if not np.all(np.isfinite(c)):
            raise NumericalFailure("non-finite directional derivative")
        return trace_form_dual_solve(c, basis)

    out = []
    rng = np.random.default_rng(12345)
    for i in range(spec.arity):
        f_i = slot_variation(i, h)
        if check_residual and not _residual_ok(spec, gs, i, f_i, h, rng):
            f_half = slot_variation(i, h / 2.0)
            f_i = (4.0 * f_half - f_i) / 3.0
        out.append(project_traceless(f_i))
    return out


def _residual_ok(spec, gs, slot, f_slot, h, rng, n_dirs=20, tol=1e-6):
    d = gs[0].shape[0]
    scale = max(1.0, abs(spec.evaluate(gs)))
    for _ in range(n_dirs):
        x = project_traceless(rng.standard_normal((d, d)))
        x /= max(np.linalg.norm(x), 1e-30)
        fd = _directional(spec, gs, slot, mat_exp(h * x), mat_exp(-h * x), 2.0 * h)
        if abs(trace_form(f_slot, x) - fd) > tol * scale:
            return False
    return True


def variation_reducible(base_variation, eps, gs):
    """Variation of f(g_1..g_k) = f'(g_1^e1 ... g_k^ek) from the variation of f'.

    base_variation maps a single group element to the variation matrix of f'.
    """
    gs = [np.asarray(g, dtype=float) for g in gs]
    k = len(gs)
    if len(eps) != k or any(e not in (1, -1) for e in eps):
        raise ValueError("eps must be a list of +-1 matching the tuple length")

    def factor(idx):
        return gs[idx] if eps[idx] > 0 else np.linalg.inv(gs[idx])

    out = []
    for i in range(k):
        rest = [factor(j) for j in range(i + 1, k)] + [factor(j) for j in range(i)]
        prod = np.eye(gs[0].shape[0])
        for m in rest:
            prod = prod @ m
        if eps[i] > 0:
            out.append(base_variation(gs[i] @ prod))
        else:
            out.append(-base_variation(prod @ np.linalg.inv(gs[i])))
    return out


def variation(spec, gs, h=FD_STEP):
    """Variation with closed forms where available, numeric otherwise."""
    gs = [np.asarray(g, dtype=float) for g in gs]
    if isinstance(spec, TraceSpec):
        return [variation_trace_closed(gs[0])]
    if isinstance(spec, WordComposedSpec) and isinstance(spec.base, TraceSpec):
        eps = _plain_product_eps(spec.maps[0], spec.arity)
        if eps is not None:
            return variation_reducible(variation_trace_closed, eps, gs)
    return variation_numeric(spec, gs, h=h)


def _plain_product_eps(w, arity):
    """[e1..ek] if the word map is g1^e1 ... gk^ek in order, else None."""
    if len(w.letters) != arity:
        return None
    eps = []
    for pos, (name, e) in enumerate(w.letters):
        if name != f"g{pos + 1}":
            return None
        eps.append(e)
    return eps


def check_diagonal_invariance(spec, gs, rng, n=20, tol=1e-9):
    """Spot-check invariance under simultaneous conjugation."""
    gs = [np.asarray(g, dtype=float) for g in gs]
    base = spec.evaluate(gs)
    worst = 0.0
    d = gs[0].shape[0]
    for _ in range(n):
        x = project_traceless(rng.standard_normal((d, d)) * 0.4)
        hmat = mat_exp(x)
        hinv = np.linalg.inv(hmat)
        conj = [hmat @ g @ hinv for g in gs]
        worst = max(worst, abs(spec.evaluate(conj) - base))
    return worst <= tol * max(1.0, abs(base)), worst


def check_equivariance(spec, gs, rng, n=20, tol=1e-6):
    """F(h g h^{-1}) = Ad_h F(g) for the numeric variation."""
    gs = [np.asarray(g, dtype=float) for g in gs]
    fs = variation(spec, gs)
    d = gs[0].shape[0]
    worst = 0.0
    for _ in range(n):
        x = project_traceless(rng.standard_normal((d, d)) * 0.3)
        hmat = mat_exp(x)
        hinv = np.linalg.inv(hmat)
        conj = [hmat @ g @ hinv for g in gs]
        fs_conj = variation(spec, conj)
        for f, fc in zip(fs, fs_conj):
            worst = max(worst, float(np.max(np.abs(fc - ad_conjugate(hmat, f)))))
    return worst <= tol, worst
