"""Twisted cocycles u: pi -> sl(d) for the adjoint action of a representation.

Evaluation by the twisted rule, coboundary solving with centralizer
reporting, parabolicity certificates at boundary words, the explicit
Hamiltonian cocycles of subsurface decompositions, and the SL(2) figure-8
cocycle triple (u, v, w) with u + w = v.
"""

from dataclasses import dataclass

import numpy as np

from .invariantfn import variation
from .liekernel import ad_conjugate, algebra_basis, project_traceless
from .words import Word, free_reduce

RELATOR_CONSISTENCY_TOL = 1e-8


class Cocycle:
    """Values on presentation generators; u(xy) = u(x) + Ad_{rho(x)} u(y).

    When generators are covered by coboundary witnesses (values[g] =
    W - Ad_{rho(g)} W on a whole subgroup family), evaluation telescopes
    over maximal runs of same-family letters, which avoids the large
    cancellations the letter-by-letter rule would incur.
    """

    def __init__(self, rep, values, witnesses=None, check_relator=True,
                 tol=RELATOR_CONSISTENCY_TOL):
        self.rep = rep
        self.values = {g: project_traceless(np.asarray(v, dtype=float)) for g, v in values.items()}
        missing = [g for g in rep.presentation.generators if g not in self.values]
        if missing:
            raise ValueError(f"missing cocycle values for {missing}")
        # witnesses: gen -> (family key, W) with values[g] = W - Ad_{rho(g)} W
        self.witnesses = dict(witnesses) if witnesses else {}
        if check_relator:
            res = self.relator_residual()
            if res > tol:
                raise ValueError(f"cocycle not well defined: relator residual {res:.3e}")

    def _letter_value(self, g, e):
        m = self.rep.images[g]
        if e > 0:
            return self.values[g], m
        minv = np.linalg.inv(m)
        return -ad_conjugate(minv, self.values[g]), minv

    def evaluate(self, w):
        d = self.rep.d
        total = np.zeros((d, d))
        prefix = np.eye(d)
        letters = list(w.letters)
        i = 0
        while i < len(letters):
            g, e = letters[i]
            fam = self.witnesses.get(g)
            if fam is None:
                val, m = self._letter_value(g, e)
                total = total + ad_conjugate(prefix, val)
                prefix = prefix @ m
                i += 1
                continue
            key, wit = fam
            seg = np.eye(d)
            while i < len(letters):
                g2, e2 = letters[i]
                fam2 = self.witnesses.get(g2)
                if fam2 is None or fam2[0] != key:
                    break
                m2 = self.rep.images[g2]
                seg = seg @ (m2 if e2 > 0 else np.linalg.inv(m2))
                i += 1
            val = wit - ad_conjugate(seg, wit)
            total = total + ad_conjugate(prefix, val)
            prefix = prefix @ seg
        return total

    def relator_residual(self):
        return float(np.max(np.abs(self.evaluate(self.rep.presentation.relator))))

    def _combine(self, other, sign):
        vals = {g: self.values[g] + sign * other.values[g] for g in self.values}
        wits = None
        if self.witnesses and other.witnesses:
            keys_self = {g: fam[0] for g, fam in self.witnesses.items()}
            keys_other = {g: fam[0] for g, fam in other.witnesses.items()}
            if keys_self == keys_other:
                wits = {
                    g: (key, self.witnesses[g][1] + sign * other.witnesses[g][1])
                    for g, (key, _) in self.witnesses.items()
                }
        return Cocycle(self.rep, vals, witnesses=wits, check_relator=False)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def scaled(self, c):
        wits = {g: (key, c * wv) for g, (key, wv) in self.witnesses.items()} or None
        return Cocycle(self.rep, {g: c * v for g, v in self.values.items()},
                       witnesses=wits, check_relator=False)

    def values_json(self):
        return {g: [list(row) for row in v] for g, v in sorted(self.values.items())}


def coboundary(rep, u0):
    """delta u0: gamma -> Ad_{rho(gamma)} u0 - u0."""
    u0 = project_traceless(np.asarray(u0, dtype=float))
    vals = {g: ad_conjugate(rep.images[g], u0) - u0 for g in rep.presentation.generators}
    wits = {g: ("all", -u0) for g in rep.presentation.generators}
    return Cocycle(rep, vals, witnesses=wits, check_relator=False)


@dataclass
class CoboundaryWitness:
    u0: np.ndarray
    residual: float
    ambiguous: bool  # true when the witness is defined modulo centralizer directions


def _ad_minus_id_matrix(rep, w, basis):
    """Matrix of X -> Ad_{rho(w)} X - X in basis coordinates."""
    g = rep.evaluate(w)
    n = len(basis)
    cols = np.empty((n, n))
    for k, e in enumerate(basis.elements):
        cols[:, k] = basis.coordinates(ad_conjugate(g, e) - e)
    return cols


def coboundary_solve(u, subgroup_gens, rank_tol=1e-8):
    """Least-squares u0 minimizing sum_gamma |Ad_{rho(gamma)} u0 - u0 - u(gamma)|^2.

    Residual <= 1e-8 certifies that u restricts to a coboundary on the
    subgroup generated by the given words. Rank deficiency of the stacked
    system means the witness is defined only modulo centralizer directions;
    the minimal-norm witness is returned in that case.
    """
    if not subgroup_gens:
        raise ValueError("need at least one subgroup generator")
    rep = u.rep
    basis = algebra_basis(rep.d)
    blocks = []
    rhs = []
    for w in subgroup_gens:
        blocks.append(_ad_minus_id_matrix(rep, w, basis))
        rhs.append(basis.coordinates(u.evaluate(w)))
    a = np.vstack(blocks)
    b = np.concatenate(rhs)
    x, _, rank, _ = np.linalg.lstsq(a, b, rcond=rank_tol)
    ambiguous = bool(rank < a.shape[1])
    residual = float(np.linalg.norm(a @ x - b))
    return CoboundaryWitness(u0=basis.from_coordinates(x), residual=residual, ambiguous=ambiguous)


def parabolic_check(u, boundary_words):
    """Per boundary word: least-squares witness X_j with u(c_j) = Ad X_j - X_j."""
    out = []
    for w in boundary_words:
        if not free_reduce(w):
            raise ValueError("boundary words must be nontrivial")
        wit = coboundary_solve(u, [w])
        out.append((wit.u0, wit.residual))
    return out


# ---------------------------------------------------------------------------
# Hamiltonian cocycles of subsurface decompositions
# ---------------------------------------------------------------------------

@dataclass
class VariationAssignment:
    """Variation matrices in the slots of the S0-adapted function.

    xs[j], ys[j] vary the genus generators a_{j+1}, b_{j+1}; zs[i][l] varies
    the boundary word c^{i+1}_{l+1}.
    """

    xs: list
    ys: list
    zs: list

    @classmethod
    def zeros(cls, decomp, d):
        z = np.zeros((d, d))
        return cls(
            xs=[z.copy() for _ in range(decomp.s0_genus)],
            ys=[z.copy() for _ in range(decomp.s0_genus)],
            zs=[[z.copy() for _ in grp] for grp in decomp.boundaries],
        )


def variation_assignment_for_tuple(rep, decomp, spec, tuple_words):
    """Assignment for a spec whose tuple curves are decomposition letters.

    Each tuple word must equal (after free reduction) one of the S0 letters:
    a genus generator a_j / b_j or a boundary word c^i_l. Multi-letter
    curves are handled upstream by re-expressing the function as a
    word-composed spec over letter tuples.
    """
    va = VariationAssignment.zeros(decomp, rep.d)
    fs = variation(spec, [rep.evaluate(w) for w in tuple_words])
    for f, w in zip(fs, tuple_words):
        target = free_reduce(w)
        placed = False
        for j in range(decomp.s0_genus):
            if target == free_reduce(decomp.s0_ab[2 * j]):
                va.xs[j] = va.xs[j] + f
                placed = True
                break
            if target == free_reduce(decomp.s0_ab[2 * j + 1]):
                va.ys[j] = va.ys[j] + f
                placed = True
                break
        if placed:
            continue
        for i, grp in enumerate(decomp.boundaries):
            for l, c in enumerate(grp):
                if target == free_reduce(c):
                    va.zs[i][l] = va.zs[i][l] + f
                    placed = True
                    break
            if placed:
                break
        if not placed:
            raise ValueError(f"tuple word {w} is not a letter of the decomposition")
    return va


def hamiltonian_cocycle(rep, decomp, va):
    """Cocycle representing the Hamiltonian vector field of the induced function.

    Implements the explicit generator formulas for a decomposition along S0:
    each complementary vertex group is hit by a coboundary, gluing loops mix
    prefix sums over earlier boundaries, and the S0 genus generators carry
    the X/Y ladder. Every presentation generator must occur as a single
    letter of exactly one decomposition generator family.
    """
    if decomp.kind not in ("fully-separating-pants", "general-pants"):
        raise ValueError(f"need a pants-type decomposition, got {decomp.kind}")
    d = rep.d
    if len(va.zs) != len(decomp.boundaries) or any(
        len(z) != len(grp) for z, grp in zip(va.zs, decomp.boundaries)
    ):
        raise ValueError("variation assignment shape does not match the decomposition")

    adc = {}  # Ad_{rho(c^i_l)^{-1}} Z^i_l - Z^i_l per boundary
    for i, grp in enumerate(decomp.boundaries):
        for l, c in enumerate(grp):
            z = va.zs[i][l]
            adc[(i, l)] = ad_conjugate(np.linalg.inv(rep.evaluate(c)), z) - z

    def prefix(i):
        total = np.zeros((d, d))
        for h in range(i):
            for l in range(len(decomp.boundaries[h])):
                total = total + adc[(h, l)]
        return total

    values = {}
    witnesses = {}

    def assign(name, val, witness=None):
        if name in values:
            raise ValueError(f"generator {name} covered twice by the decomposition")
        values[name] = val
        if witness is not None:
            witnesses[name] = witness

    # complementary vertex groups: (id - Ad_rho(gamma))(P_i - Z^i_1)
    for i, grp in enumerate(decomp.vertex_groups):
        w_i = prefix(i) - va.zs[i][0]
        for gw in grp:
            if len(gw.letters) != 1 or gw.letters[0][1] != 1:
                raise ValueError("vertex-group generators must be single presentation letters")
            name = gw.letters[0][0]
            g = rep.images[name]
            assign(name, w_i - ad_conjugate(g, w_i), witness=(f"vertex{i}", w_i))

    # gluing loops eta^i_l, l >= 2: P_i - Z^i_1 + Ad_rho(eta)(-P_i + Z^i_l - Q^i_l)
    for i, loops in enumerate(decomp.gluing_loops):
        p_i = prefix(i)
        for idx, eta in enumerate(loops):
            l = idx + 1  # boundary slot this loop attaches to
            if len(eta.letters) != 1:
                raise ValueError("gluing loops must be single presentation letters")
            name, exp = eta.letters[0]
            rho_eta = rep.evaluate(eta)
            q_il = np.zeros((d, d))
            for n in range(l):
                q_il = q_il + adc[(i, n)]
            u_eta = p_i - va.zs[i][0] + ad_conjugate(rho_eta, -p_i + va.zs[i][l] - q_il)
            if exp > 0:
                assign(name, u_eta)
            else:
                # u(x) = -Ad_{rho(x)} u(x^{-1}) when the loop is an inverse letter
                assign(name, -ad_conjugate(rep.images[name], u_eta))

    # S0 genus generators a_j, b_j
    def s_ladder(j):
        total = np.zeros((d, d))
        for h in range(j):
            a_h = rep.evaluate(decomp.s0_ab[2 * h])
            b_h = rep.evaluate(decomp.s0_ab[2 * h + 1])
            x, y = va.xs[h], va.ys[h]
            total = total + (x - ad_conjugate(np.linalg.inv(a_h), x))
            total = total + (y - ad_conjugate(np.linalg.inv(b_h), y))
        return total

    for j in range(decomp.s0_genus):
        aw, bw = decomp.s0_ab[2 * j], decomp.s0_ab[2 * j + 1]
        for gw in (aw, bw):
            if len(gw.letters) != 1 or gw.letters[0][1] != 1:
                raise ValueError("S0 genus generators must be single presentation letters")
        a_name, b_name = aw.letters[0][0], bw.letters[0][0]
        a_mat, b_mat = rep.images[a_name], rep.images[b_name]
        s_prev, s_cur = s_ladder(j), s_ladder(j + 1)
        assign(a_name, s_prev + va.ys[j] - ad_conjugate(a_mat, s_cur))
        assign(b_name, ad_conjugate(b_mat, -s_prev + va.xs[j]) + s_cur)

    missing = [g for g in rep.presentation.generators if g not in values]
    if missing:
        raise ValueError(f"decomposition does not cover generators {missing}")
    return Cocycle(rep, values, witnesses=witnesses)


# ---------------------------------------------------------------------------
# SL(2) figure-8 cocycles
# ---------------------------------------------------------------------------

def _witness_cocycle(rep, decomp, witnesses):
    """Cocycle (id - Ad_rho(gamma)) W_i on each vertex group Gamma_i."""
    values = {}
    wit_map = {}
    for i, (grp, wit) in enumerate(zip(decomp.vertex_groups, witnesses)):
        for gw in grp:
            name = gw.letters[0][0]
            g = rep.images[name]
            values[name] = wit - ad_conjugate(g, wit)
            wit_map[name] = (f"vertex{i}", wit)
    return Cocycle(rep, values, witnesses=wit_map)


def figure8_cocycle_sl2(rep, decomp, tol=1e-8):
    """The SL(2) figure-8 cocycles (u, v, w) with u + w = v.

    u is the trace-identity representative, v the simplified commuting-twist
    representative, and w the connecting coboundary. Requires d = 2 and a
    fully separating pair of pants with boundary words a, b, c, abc = 1.
    """
    if rep.d != 2:
        raise ValueError("figure-8 cocycles in closed form exist only for d = 2")
    if decomp.kind != "fully-separating-pants":
        raise ValueError("need a fully separating pair of pants")
    wa, wb, wc = [grp[0] for grp in decomp.boundaries]
    ga, gb, gc = rep.evaluate(wa), rep.evaluate(wb), rep.evaluate(wc)
    if float(np.max(np.abs(ga @ gb @ gc - np.eye(2)))) > tol:
        raise ValueError("abc != 1 for the supplied boundary words")
    fa, fb = float(np.trace(ga)), float(np.trace(gb))
    var = lambda g: g - (np.trace(g) / 2.0) * np.eye(2)
    f_a, f_b, f_c = var(ga), var(gb), var(gc)

    u = _witness_cocycle(rep, decomp, [-f_c + fa * f_b, -f_c + fb * f_a, fa * f_b + fb * f_a])
    v = _witness_cocycle(rep, decomp, [-fb * f_a, -fa * f_b, f_c])
    # w(gamma) = (id - Ad_{rho(gamma)})(F_c - f_a F_b - f_b F_a) = delta(-W)
    w = coboundary(rep, -(f_c - fa * f_b - fb * f_a))
    return u, v, w


# ---------------------------------------------------------------------------
# Pairings and finite-difference cocycles (test oracles)
# ---------------------------------------------------------------------------

def pair_cocycle_with_cycle(u, curves, variations):
    """sum_i tr(u(alpha_i) F_i): the cocycle paired with a dual cycle.

    With u the Hamiltonian cocycle of f_B and the cycle of a probe f_A at
    the same representation, this equals the Poisson bracket {f_A, f_B} up
    to the global orientation sign of the atlas.
    """
    total = 0.0
    for w, f in zip(curves, variations):
        total += float(np.trace(u.evaluate(w) @ f))
    return total


def finite_difference_cocycle(rep0, rep_plus, rep_minus, eps):
    """u(g) ~ (rho_+ (g) - rho_-(g)) / (2 eps) rho_0(g)^{-1} on generators."""
    vals = {}
    for g in rep0.presentation.generators:
        der = (rep_plus.images[g] - rep_minus.images[g]) / (2.0 * eps)
        vals[g] = project_traceless(der @ np.linalg.inv(rep0.images[g]))
    return Cocycle(rep0, vals, check_relator=False)
