"""Representations of surface groups into SL(d,R).

Word evaluation, Fenchel-Nielsen holonomy construction for d = 2 (genus 2
and genus 3 pants patterns), hyperbolic trace-length, and simple root
lengths of proximal elements.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotHyperbolic, NotProximal, UnsupportedDecomposition
from .liekernel import mat_exp, sym_power
from .words import Presentation, Word, commutator, free_reduce, word

RELATOR_TOL = 1e-8


class Representation:
    """Assignment of unimodular d x d matrices to presentation generators."""

    def __init__(self, presentation, images, relator_tol=RELATOR_TOL, check=True):
        self.presentation = presentation
        self.images = {g: np.asarray(m, dtype=float) for g, m in images.items()}
        self.relator_tol = relator_tol
        dims = {m.shape for m in self.images.values()}
        if len(dims) != 1:
            raise ValueError(f"inconsistent image shapes {dims}")
        self.d = next(iter(dims))[0]
        if check:
            self.validate()

    def validate(self):
        for g in self.presentation.generators:
            if g not in self.images:
                raise ValueError(f"missing image for generator {g}")
            det = np.linalg.det(self.images[g])
            if abs(det - 1.0) > 1e-9:
                raise ValueError(f"det rho({g}) = {det} is not 1")
        res = self.relator_residual()
        if res > self.relator_tol:
            raise ValueError(f"relator residual {res:.3e} exceeds {self.relator_tol}")

    def relator_residual(self):
        img = self.evaluate(self.presentation.relator)
        return float(np.max(np.abs(img - np.eye(self.d))))

    def evaluate(self, w):
        """Product of generator images along the word."""
        out = np.eye(self.d)
        for g, e in w.letters:
            if g not in self.images:
                raise ValueError(f"unknown generator {g!r}")
            m = self.images[g]
            out = out @ (m if e > 0 else np.linalg.inv(m))
        return out

    def trace(self, w):
        return float(np.trace(self.evaluate(w)))

    def conjugate(self, h):
        h = np.asarray(h, dtype=float)
        hinv = np.linalg.inv(h)
        return Representation(
            self.presentation,
            {g: h @ m @ hinv for g, m in self.images.items()},
            relator_tol=self.relator_tol,
            check=False,
        )

    def with_images(self, updates, check=False):
        imgs = dict(self.images)
        imgs.update(updates)
        return Representation(
            self.presentation, imgs, relator_tol=self.relator_tol, check=check
        )

    def sym_power_lift(self, d):
        """Post-compose a 2-dimensional representation with SL(2) -> SL(d)."""
        if self.d != 2:
            raise ValueError("sym_power_lift needs a 2-dimensional representation")
        return Representation(
            self.presentation,
            {g: sym_power(m, d) for g, m in self.images.items()},
            relator_tol=max(self.relator_tol, 1e-6),
            check=False,
        )

    def images_json(self):
        return {g: [list(row) for row in m] for g, m in sorted(self.images.items())}


def trace_length(g):
    """Translation length 2 arccosh(|tr|/2) of a hyperbolic SL(2) element."""
    t = abs(float(np.trace(np.asarray(g))))
    if t < 2.0 - 1e-12:
        raise NotHyperbolic(f"|trace| = {t} < 2")
    return 2.0 * math.acosh(max(t / 2.0, 1.0))


def simple_root_length(g, j):
    """log(lambda_j / lambda_{j+1}) of eigenvalue moduli sorted descending."""
    g = np.asarray(g, dtype=float)
    d = g.shape[0]
    if not 1 <= j <= d - 1:
        raise ValueError(f"root index {j} out of range for d = {d}")
    moduli = np.sort(np.abs(np.linalg.eigvals(g)))[::-1]
    lo, hi = moduli[j], moduli[j - 1]
    if lo <= 0 or hi / lo <= 1.0 + 1e-8:
        raise NotProximal(f"eigenvalue gap {hi}/{lo} at root {j} below threshold")
    return float(np.log(hi / lo))


# ---------------------------------------------------------------------------
# Hyperbolic 2x2 utilities for the Fenchel-Nielsen builder
# ---------------------------------------------------------------------------

def _eigvec(m, lam):
    a, b = m[0, 0] - lam, m[0, 1]
    c, d = m[1, 0], m[1, 1] - lam
    v1 = np.array([b, -a])
    v2 = np.array([-d, c])
    v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("eigenvector computation failed")
    v = v / n
    # deterministic sign: largest-|.| component positive
    k = int(np.argmax(np.abs(v)))
    if v[k] < 0:
        v = -v
    return v


def eigenframe(m):
    """P with columns (attracting, repelling) eigenvectors, det P = 1."""
    m = np.asarray(m, dtype=float)
    t = float(np.trace(m))
    if abs(t) <= 2.0:
        raise NotHyperbolic(f"|trace| = {abs(t)} <= 2")
    disc = math.sqrt(t * t - 4.0)
    lam_plus = (t + disc) / 2.0 if t > 0 else (t - disc) / 2.0  # |lam_plus| > 1
    lam_minus = 1.0 / lam_plus
    p = np.column_stack([_eigvec(m, lam_plus), _eigvec(m, lam_minus)])
    det = np.linalg.det(p)
    if det < 0:
        p[:, 1] = -p[:, 1]
        det = -det
    if det <= 0:
        raise ValueError("degenerate eigenframe")
    return p / math.sqrt(det)


def conjugator_matching(src, dst):
    """h with h src h^{-1} = dst for hyperbolic elements of equal trace."""
    if abs(np.trace(src) - np.trace(dst)) > 1e-8:
        raise ValueError("cannot match elements of different trace")
    h = eigenframe(dst) @ np.linalg.inv(eigenframe(src))
    return h


def translation_generator(g):
    """N with exp(theta N) = translation by theta along the axis of g.

    Oriented toward the attracting fixed point of g, so the normalization is
    independent of the sign of the lift.
    """
    g = np.asarray(g, dtype=float)
    t = float(np.trace(g))
    ell = trace_length(g)
    s = math.sinh(ell / 2.0)
    if s == 0:
        raise NotHyperbolic("zero translation length")
    return math.copysign(1.0, t) * (g - (t / 2.0) * np.eye(2)) / (2.0 * s)


def _pants_pair(t1, t2, t3, b_sign=1.0):
    """(C1, C2) in SL(2,R) with tr C1 = t1, tr C2 = t2, tr(C1 C2) = t3.

    C1 is diagonal; the off-diagonal sign of C2 picks the discrete normal
    form among the two real solutions.
    """
    if abs(t1) <= 2.0 or abs(t2) <= 2.0 or abs(t3) <= 2.0:
        raise ValueError("pants boundary traces must be hyperbolic")
    s1 = math.copysign(1.0, t1)
    m = abs(t1) / 2.0 + math.sqrt((t1 / 2.0) ** 2 - 1.0)
    c1 = s1 * np.diag([m, 1.0 / m])
    denom = m - 1.0 / m
    a = (s1 * t3 - t2 / m) / denom
    d = t2 - a
    bc = a * d - 1.0
    if abs(bc) < 1e-14:
        raise ValueError("degenerate pants solve (bc = 0)")
    b = b_sign * math.sqrt(abs(bc))
    c = bc / b
    c2 = np.array([[a, b], [c, d]])
    return c1, c2


def one_holed_torus(l_inner, theta, l_bnd, b_sign=1.0):
    """Holonomy (A, B) of a one-holed torus.

    A translates by l_inner along the imaginary-axis geodesic; twisting by
    theta composes B with the axis translation exp(theta N_A). The boundary
    commutator [A, B] has trace -2 cosh(l_bnd / 2) and does not move with
    theta.
    """
    if l_inner <= 0 or l_bnd <= 0:
        raise ValueError("lengths must be positive")
    m = math.exp(l_inner / 2.0)
    a_mat = np.diag([m, 1.0 / m])
    t2 = m + 1.0 / m
    t3 = -2.0 * math.cosh(l_bnd / 2.0)
    _, c2 = _pants_pair(t2, t2, t3, b_sign=b_sign)
    # need B A^{-1} B^{-1} = C2; both sides share trace t2
    b0 = conjugator_matching(np.linalg.inv(a_mat), c2)
    b_mat = b0 @ mat_exp(theta * translation_generator(a_mat))
    return a_mat, b_mat


@dataclass(frozen=True)
class FNCoordinates:
    """Fenchel-Nielsen data for one of the shipped pants patterns.

    kind: "genus2_handles" (curves A1, separating curve, A2) or
    "genus3_tripod" (curves a, b, c of the central pants then the three
    inner handle curves). Twists are measured in hyperbolic length.
    """

    kind: str
    curves: tuple
    lengths: tuple
    twists: tuple

    def __post_init__(self):
        n = len(self.curves)
        if len(self.lengths) != n or len(self.twists) != n:
            raise ValueError("curves, lengths, twists must have equal length")
        if any(l <= 0 for l in self.lengths):
            raise ValueError("lengths must be positive")

    def replace(self, index, length=None, twist=None):
        ls = list(self.lengths)
        ts = list(self.twists)
        if length is not None:
            ls[index] = length
        if twist is not None:
            ts[index] = twist
        return FNCoordinates(self.kind, self.curves, tuple(ls), tuple(ts))

    def shifted(self, dl, dth):
        """New point with all lengths/twists offset by the given vectors."""
        return FNCoordinates(
            self.kind,
            self.curves,
            tuple(l + x for l, x in zip(self.lengths, dl)),
            tuple(t + x for t, x in zip(self.twists, dth)),
        )


def fn_to_holonomy(fn):
    """Discrete SL(2,R) holonomy with the prescribed lengths and twists.

    The relator lifts to +I exactly by construction; pants-curve traces
    satisfy |tr| = 2 cosh(l/2).
    """
    if fn.kind == "genus2_handles":
        return _holonomy_genus2(fn)
    if fn.kind == "genus3_tripod":
        return _holonomy_genus3(fn)
    raise UnsupportedDecomposition(f"unknown pants pattern {fn.kind!r}")


def _holonomy_genus2(fn):
    (l1, ls, l2) = fn.lengths
    (th1, ths, th2) = fn.twists
    a1, b1 = one_holed_torus(l1, th1, ls)
    k1 = commutator_matrix(a1, b1)
    a2o, b2o = one_holed_torus(l2, th2, ls)
    k2o = commutator_matrix(a2o, b2o)
    h = mat_exp(ths * translation_generator(k1)) @ conjugator_matching(
        k2o, np.linalg.inv(k1)
    )
    hinv = np.linalg.inv(h)
    pres = Presentation.standard(2)
    return Representation(
        pres,
        {"A1": a1, "B1": b1, "A2": h @ a2o @ hinv, "B2": h @ b2o @ hinv},
    )


def _holonomy_genus3(fn):
    (la, lb, lc, li1, li2, li3) = fn.lengths
    (tha, thb, thc, thi1, thi2, thi3) = fn.twists
    # b_sign = -1 selects the real form in which the three complementary
    # handles sit on the far side of each boundary axis; the +1 form glues
    # them overlapping and is not discrete.
    c1, c2 = _pants_pair(
        -2.0 * math.cosh(la / 2.0),
        -2.0 * math.cosh(lb / 2.0),
        -2.0 * math.cosh(lc / 2.0),
        b_sign=-1.0,
    )
    c3 = np.linalg.inv(c1 @ c2)
    images = {}
    for idx, (c_mat, l_bnd, th_bnd, l_in, th_in) in enumerate(
        [
            (c1, la, tha, li1, thi1),
            (c2, lb, thb, li2, thi2),
            (c3, lc, thc, li3, thi3),
        ],
        start=1,
    ):
        ao, bo = one_holed_torus(l_in, th_in, l_bnd)
        ko = commutator_matrix(ao, bo)
        h = mat_exp(th_bnd * translation_generator(c_mat)) @ conjugator_matching(
            ko, c_mat
        )
        hinv = np.linalg.inv(h)
        images[f"A{idx}"] = h @ ao @ hinv
        images[f"B{idx}"] = h @ bo @ hinv
    pres = Presentation.standard(3)
    return Representation(pres, images)


def commutator_matrix(a, b):
    return a @ b @ np.linalg.inv(a) @ np.linalg.inv(b)


def default_fn(genus):
    """Generic FN point used for numeric word-problem oracles."""
    if genus == 2:
        return FNCoordinates(
            "genus2_handles",
            ("A1", "s", "A2"),
            (1.3, 2.1, 0.9),
            (0.35, -0.2, 0.55),
        )
    if genus == 3:
        return FNCoordinates(
            "genus3_tripod",
            ("a", "b", "c", "A1", "A2", "A3"),
            (1.7, 1.9, 2.3, 1.1, 0.8, 1.4),
            (0.3, -0.45, 0.2, 0.15, 0.4, -0.25),
        )
    raise UnsupportedDecomposition(f"no default FN point for genus {genus}")


def fuchsian_rep(genus):
    return fn_to_holonomy(default_fn(genus))


def fn_pants_word(fn, name, presentation):
    """Word of a named pants curve in the standard presentation."""
    if fn.kind == "genus2_handles":
        table = {
            fn.curves[0]: word("A1"),
            fn.curves[1]: commutator(word("A1"), word("B1")),
            fn.curves[2]: word("A2"),
        }
    elif fn.kind == "genus3_tripod":
        table = {
            fn.curves[0]: commutator(word("A1"), word("B1")),
            fn.curves[1]: commutator(word("A2"), word("B2")),
            fn.curves[2]: commutator(word("A3"), word("B3")),
            fn.curves[3]: word("A1"),
            fn.curves[4]: word("A2"),
            fn.curves[5]: word("A3"),
        }
    else:
        raise UnsupportedDecomposition(fn.kind)
    if name not in table:
        raise ValueError(f"unknown pants curve {name!r}")
    return free_reduce(table[name])
