"""Dense numerics for SL(d,R) and sl(d,R).

Provides the matrix exponential, adjoint action, the trace form
B(X,Y) = tr(XY) with its dual solve against a fixed basis of sl(d),
and the irreducible SL(2) -> SL(d) embedding on symmetric powers.
"""

from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .errors import IllConditionedForm

GROUP_DET_TOL = 1e-9
TRACELESS_TOL = 1e-9


def check_group(g, tol=GROUP_DET_TOL):
    """Raise ValueError unless g is a finite square matrix with det within tol of 1."""
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise ValueError("non-finite entries in group element")
    det = np.linalg.det(g)
    if abs(det - 1.0) > tol:
        raise ValueError(f"determinant {det} is not 1 within {tol}")
    return g


def check_algebra(x, tol=TRACELESS_TOL):
    """Raise ValueError unless x is a finite square matrix with |tr| <= tol."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite entries in algebra element")
    if abs(np.trace(x)) > tol:
        raise ValueError(f"trace {np.trace(x)} is not 0 within {tol}")
    return x


def project_traceless(x):
    """Remove the trace part: x - (tr x / d) I."""
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    return x - (np.trace(x) / d) * np.eye(d)


def renormalize_det(g):
    """Rescale g by det(g)^(-1/d); used to correct drift along long flows."""
    g = np.asarray(g, dtype=float)
    d = g.shape[0]
    det = np.linalg.det(g)
    if det <= 0:
        # SL(d) elements can only drift to positive determinants nearby.
        raise ValueError(f"cannot renormalize determinant {det}")
    return g / det ** (1.0 / d)


def mat_exp(x):
    """Matrix exponential (scaling-and-squaring, via scipy)."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite entries")
    return expm(x)


def ad_conjugate(h, x):
    """Adjoint action h x h^{-1}; preserves tracelessness."""
    h = np.asarray(h, dtype=float)
    x = np.asarray(x, dtype=float)
    try:
        # h x h^{-1} as a linear solve on the right factor for stability
        return np.linalg.solve(h.T, (h @ x).T).T
    except np.linalg.LinAlgError:
        raise ValueError("cannot conjugate by a singular matrix")


def trace_form(x, y):
    """Ad-invariant orthogonal structure B(X,Y) = tr(XY)."""
    return float(np.trace(np.asarray(x) @ np.asarray(y)))


class AlgebraBasis:
    """Basis of sl(d): elementary E_ij (i != j) plus H_i = E_ii - E_{i+1,i+1}.

    Carries the Gram matrix of the trace form for dual solves.
    """

    def __init__(self, d):
        if d < 2:
            raise ValueError(f"need d >= 2, got {d}")
        self.d = d
        elements = []
        for i in range(d):
            for j in range(d):
                if i != j:
                    e = np.zeros((d, d))
                    e[i, j] = 1.0
                    elements.append(e)
        for i in range(d - 1):
            h = np.zeros((d, d))
            h[i, i] = 1.0
            h[i + 1, i + 1] = -1.0
            elements.append(h)
        self.elements = elements
        n = len(elements)
        gram = np.empty((n, n))
        for a in range(n):
            for b in range(n):
                gram[a, b] = trace_form(elements[a], elements[b])
        self.gram = gram
        self.gram_cond = float(np.linalg.cond(gram))
        self._gram_inv = np.linalg.inv(gram)

    def __len__(self):
        return len(self.elements)

    def coordinates(self, x):
        """Coordinates of a traceless x in this basis (exact for the canonical basis)."""
        c = np.array([trace_form(x, e) for e in self.elements])
        return self._gram_inv @ c

    def from_coordinates(self, coords):
        out = np.zeros((self.d, self.d))
        for c, e in zip(coords, self.elements):
            out += c * e
        return out


@lru_cache(maxsize=16)
def algebra_basis(d):
    return AlgebraBasis(d)


def trace_form_dual_solve(functional, basis):
    """Solve B(F, E_k) = c_k for F in sl(d).

    `functional` is the vector of values c_k against basis.elements.
    """
    c = np.asarray(functional, dtype=float)
    if c.shape != (len(basis),):
        raise ValueError(f"functional has length {c.shape}, expected {len(basis)}")
    if basis.gram_cond > 1e12:
        raise IllConditionedForm(f"gram condition number {basis.gram_cond:.3e}")
    coords = np.linalg.solve(basis.gram, c)
    return basis.from_coordinates(coords)


@lru_cache(maxsize=16)
def _sym_multi_index(d):
    # monomials e1^(n-k) e2^k for k = 0..n, n = d-1
    return list(range(d))


def sym_power(g, d):
    """Action of g in SL(2) on degree-(d-1) homogeneous polynomials in two variables.

    Monomial basis e1^(n-k) e2^k, k = 0..n with n = d-1; rescaled to
    determinant 1 (the raw matrix already has determinant 1 for SL(2) input).
    Multiplicative: sym_power(gh) = sym_power(g) sym_power(h).
    """
    if d < 2:
        raise ValueError(f"need d >= 2, got {d}")
    g = check_group(g)
    if g.shape != (2, 2):
        raise ValueError("sym_power expects a 2x2 input")
    if d == 2:
        return g.copy()
    n = d - 1
    a, b, c, e = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    from math import comb

    out = np.zeros((d, d))
    # image of e1^(n-k) e2^k = (a e1 + c e2)^(n-k) (b e1 + e e2)^k
    for k in range(d):
        for i in range(n - k + 1):
            for j in range(k + 1):
                coef = (
                    comb(n - k, i) * a ** (n - k - i) * c**i *
                    comb(k, j) * b ** (k - j) * e**j
                )
                # term e1^(n-k-i+k-j) e2^(i+j) -> row index i+j
                out[i + j, k] += coef
    det = np.linalg.det(out)
    if det <= 0:
        raise ValueError(f"symmetric power has nonpositive determinant {det}")
    return out / det ** (1.0 / d)


def random_algebra(d, rng, scale=1.0):
    """Random traceless matrix with entries O(scale)."""
    x = rng.standard_normal((d, d)) * scale
    return project_traceless(x)


def random_group(d, rng, scale=0.5):
    """Random SL(d) element as exp of a random traceless matrix."""
    return mat_exp(random_algebra(d, rng, scale))
