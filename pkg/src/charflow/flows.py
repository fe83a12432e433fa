"""Hamiltonian flows on the representation side.

Closed-form flows (cylinder twist, power of a simple curve, figure-8 trace
flow in SL(2)), a generic RK4 Hamiltonian flow in the Fenchel-Nielsen
Darboux chart, trajectory reports certifying subsurface deformations, and
Thurston-boundary limit estimation for the figure-8 and single-twist flows.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateProbe, IntegrationFailure
from .invariantfn import eval_invariant, variation
from .liekernel import mat_exp
from .poisson import tuple_matrices
from .representation import fn_to_holonomy, trace_length
from .words import Word, free_reduce


@dataclass
class FlowTrajectory:
    times: list
    states: list            # Representation or FNCoordinates per time
    hamiltonian_values: list
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if any(t2 <= t1 for t1, t2 in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")


def _unimodular_inv(m):
    """Inverse of a det-1 matrix; adjugate for 2x2 avoids LU breakdown at
    extreme condition numbers."""
    if m.shape == (2, 2):
        return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])
    return np.linalg.inv(m)


def _commutes(a, b, tol=1e-12):
    scale = float(np.max(np.abs(a))) * float(np.max(np.abs(b)))
    if scale == 0:
        return True
    return float(np.max(np.abs(a @ b - b @ a))) <= tol * scale


class FlowedRepresentation(Representation):
    """Representation produced by a closed-form flow, kept in factored form.

    plan maps each presentation generator to a group key; each key carries
    either a conjugator ("conj": images g rho(.) g^{-1}) or a gluing
    multiplier ("mult": image rho(eta) M). Word evaluation cancels g^{-1} g
    across same-group segment boundaries exactly and commutes multipliers
    through commuting factors, reproducing the algebraic cancellations that
    make the flows well defined; this keeps conserved traces conserved in
    floating point at large flow times.
    """

    def __init__(self, base, plan, kinds, mats):
        self.base = base
        self.plan = dict(plan)    # generator name -> group key (or None)
        self.kinds = dict(kinds)  # group key -> "conj" | "mult"
        self.mats = {k: np.asarray(m, dtype=float) for k, m in mats.items()}
        self._mats_inv = {k: _unimodular_inv(m) for k, m in self.mats.items()}
        images = {}
        for g, m in base.images.items():
            key = self.plan.get(g)
            if key is None:
                images[g] = m
            elif self.kinds[key] == "conj":
                images[g] = self.mats[key] @ m @ self._mats_inv[key]
            else:
                images[g] = m @ self.mats[key]
        super().__init__(base.presentation, images,
                         relator_tol=base.relator_tol, check=False)

    def _tokens(self, w):
        """Factored token stream: ("mat", m) and ("mul", key, +-1)."""
        tokens = []
        letters = list(w.letters)
        i = 0
        while i < len(letters):
            g, e = letters[i]
            key = self.plan.get(g)
            if key is not None and self.kinds[key] == "mult":
                m = self.base.images[g]
                if e > 0:
                    tokens.append(("mat", m))
                    tokens.append(("mul", key, 1))
                else:
                    tokens.append(("mul", key, -1))
                    tokens.append(("mat", _unimodular_inv(m)))
                i += 1
                continue
            if key is None:
                seg = Word(((g, e),))
                i += 1
                tokens.append(("mat", self.base.evaluate(seg)))
                continue
            # maximal run of letters sharing this conj group
            j = i
            seg_letters = []
            while j < len(letters):
                g2, e2 = letters[j]
                if self.plan.get(g2) != key:
                    break
                seg_letters.append((g2, e2))
                j += 1
            seg = self.base.evaluate(Word(tuple(seg_letters)))
            tokens.append(("mul", key, 1))
            tokens.append(("mat", seg))
            tokens.append(("mul", key, -1))
            i = j
        return tokens

    def _reduce_tokens(self, tokens):
        changed = True
        while changed:
            changed = False
            out = []
            k = 0
            while k < len(tokens):
                tok = tokens[k]
                if (
                    tok[0] == "mul"
                    and k + 1 < len(tokens)
                    and tokens[k + 1][0] == "mul"
                    and tokens[k + 1][1] == tok[1]
                    and tokens[k + 1][2] == -tok[2]
                ):
                    k += 2  # exact structural cancellation g g^{-1}
                    changed = True
                    continue
                if (
                    tok[0] == "mul"
                    and k + 1 < len(tokens)
                    and tokens[k + 1][0] == "mat"
                ):
                    g = self.mats[tok[1]]
                    m = tokens[k + 1][1]
                    if _commutes(g, m):
                        out.append(tokens[k + 1])
                        tokens[k] = tok
                        tokens = tokens[:k] + [tokens[k + 1], tok] + tokens[k + 2:]
                        changed = True
                        k += 1
                        continue
                out.append(tok)
                k += 1
            tokens = out
        return tokens

    def evaluate(self, w):
        tokens = self._reduce_tokens(self._tokens(w))
        out = np.eye(self.d)
        for tok in tokens:
            if tok[0] == "mat":
                out = out @ tok[1]
            else:
                m = self.mats[tok[1]] if tok[2] > 0 else self._mats_inv[tok[1]]
                out = out @ m
        return out

    def trace(self, w):
        # single conjugated segment: trace is exactly conjugation invariant
        keys = {self.plan.get(g) for g, _ in w.letters}
        if len(keys) == 1:
            key = keys.pop()
            if key is None or self.kinds[key] == "conj":
                return self.base.trace(w)
        return float(np.trace(self.evaluate(w)))


def _single_letter_gens(words):
    out = []
    for w in words:
        if len(w.letters) == 1 and w.letters[0][1] == 1:
            out.append(w.letters[0][0])
        else:
            out.append(None)
    return out


def _generator_sides(rep, groups):
    """Map each presentation generator to the index of the group containing it.

    Groups are lists of Words; only single-letter members count as carrying
    the generator. Raises when some generator is not covered.
    """
    side = {}
    for idx, grp in enumerate(groups):
        for name in _single_letter_gens(grp):
            if name is not None:
                side[name] = idx
    missing = [g for g in rep.presentation.generators if g not in side]
    if missing:
        raise ValueError(f"decomposition does not cover generators {missing}")
    return side


def cylinder_variation(scenario, rep, spec, decomp):
    """Variation F'(rho(a)) of the inducing single-variable function."""
    if spec.arity != 1:
        raise ValueError("cylinder flows take an arity-1 spec over the core curve")
    g = rep.evaluate(scenario.curve(decomp.curve))
    return variation(spec, [g])[0]


def twist_flow(scenario, rep, decomp, spec, t):
    """Generalized twist flow along a cylinder decomposition.

    Separating: conjugate the gamma2 side by exp(t F'(rho(a))). Non-separating:
    post-multiply the gluing generator by exp(sigma t F'(rho(a))), where sigma
    accounts for the stored crossing orientation of the gluing loop against
    the core curve. gamma1 images are bitwise unchanged.
    """
    f_prime = cylinder_variation(scenario, rep, spec, decomp)
    return _apply_cylinder(scenario, rep, decomp, f_prime, t)


def power_flow(scenario, rep, decomp, spec, n, t):
    """Flow of f(g^n) along the cylinder of a; conjugator exp(t n F(rho(a^n)))."""
    if n <= 0:
        raise ValueError(f"power must be a positive integer, got {n}")
    if spec.arity != 1:
        raise ValueError("power flows take an arity-1 base spec")
    g = rep.evaluate(scenario.curve(decomp.curve))
    gn = np.linalg.matrix_power(g, n)
    f_base = variation(spec, [gn])[0]
    return _apply_cylinder(scenario, rep, decomp, n * f_base, t)


def _eta_direction(scenario, decomp):
    """+-1: orientation of the gluing loop's crossing against the core curve.

    The Hamiltonian flow composes rho(eta) with exp(sigma t F'); sigma = +1
    exactly when eta crosses the core curve negatively in the atlas
    convention (stored sign of the (curve, eta) crossing = -1).
    """
    eta_name = decomp.eta.letters[0][0]
    crossings = scenario.table.lookup(decomp.curve, eta_name)
    if len(crossings) != 1:
        raise ValueError("gluing loop must cross the core curve exactly once")
    return -crossings[0].sign


def _apply_cylinder(scenario, rep, decomp, f_prime, t):
    if decomp.kind == "cylinder-separating":
        conjugator = mat_exp(t * f_prime)
        side = _generator_sides(rep, [decomp.gamma1, decomp.gamma2])
        cinv = np.linalg.inv(conjugator)
        images = {}
        for g, m in rep.images.items():
            images[g] = m if side[g] == 0 else conjugator @ m @ cinv
        return rep.with_images(images)
    if decomp.kind == "cylinder-nonseparating":
        if len(decomp.eta.letters) != 1 or decomp.eta.letters[0][1] != 1:
            raise ValueError("gluing loop must be a single positive presentation letter")
        eta = decomp.eta.letters[0][0]
        _generator_sides(rep, [decomp.gamma1, [decomp.eta]])
        sigma = _eta_direction(scenario, decomp)
        images = dict(rep.images)
        images[eta] = images[eta] @ mat_exp(sigma * t * f_prime)
        return rep.with_images(images)
    raise ValueError(f"not a cylinder decomposition: {decomp.kind}")


def figure8_component_conjugators(scenario, rep, decomp, t):
    """The three commuting conjugators of the SL(2) figure-8 trace flow."""
    if rep.d != 2:
        raise ValueError("the closed-form figure-8 flow exists only for d = 2")
    if decomp.kind != "fully-separating-pants":
        raise ValueError("figure-8 flow needs a fully separating pair of pants")
    wa, wb, wc = [grp[0] for grp in decomp.boundaries]
    ga, gb, gc = rep.evaluate(wa), rep.evaluate(wb), rep.evaluate(wc)
    fa = float(np.trace(ga))
    fb = float(np.trace(gb))
    var = lambda g: g - (np.trace(g) / 2.0) * np.eye(2)
    return [
        mat_exp(-t * fb * var(ga)),
        mat_exp(-t * fa * var(gb)),
        mat_exp(t * var(gc)),
    ]


def figure8_flow(scenario, rep, decomp, t, order=(0, 1, 2)):
    """SL(2) figure-8 trace flow: three commuting vertex-group conjugations.

    `order` permutes the application order of the component twists; the
    result is order-independent up to roundoff.
    """
    conjs = figure8_component_conjugators(scenario, rep, decomp, t)
    side = _generator_sides(rep, list(decomp.vertex_groups))
    images = dict(rep.images)
    for k in order:
        c = conjs[k]
        cinv = np.linalg.inv(c)
        for g in images:
            if side[g] == k:
                images[g] = c @ images[g] @ cinv
    return rep.with_images(images)


def flow_probe_derivative(flow_fn, rep, scenario, probe_spec, probe_tuple, h=1e-4):
    """Central-difference time derivative of a probe function along a flow."""
    def value(t):
        rep_t = flow_fn(t)
        gs = tuple_matrices(scenario, rep_t, probe_tuple)
        return eval_invariant(probe_spec, gs)

    return (value(h) - value(-h)) / (2.0 * h)


# ---------------------------------------------------------------------------
# Darboux ODE flow
# ---------------------------------------------------------------------------

def darboux_flow(scenario, fn0, spec, tuple_name, t_end, dt, grad_step=1e-5,
                 sample_every=None):
    """RK4 integration of dl_i/dt = dH/dth_i, dth_i/dt = -dH/dl_i.

    H is the spec evaluated at the holonomy of the moving FN point. States
    are FN points; Hamiltonian values are recorded per sample.
    """
    if dt <= 0 or t_end <= 0:
        raise ValueError("need positive dt and t_end")
    n = len(fn0.curves)
    words = scenario.tuple_words(tuple_name)

    def ham(point):
        rep = fn_to_holonomy(point)
        return eval_invariant(spec, [rep.evaluate(w) for w in words])

    def rhs(point):
        dl = np.empty(n)
        dth = np.empty(n)
        for i in range(n):
            hp = ham(point.replace(i, length=point.lengths[i] + grad_step))
            hm = ham(point.replace(i, length=point.lengths[i] - grad_step))
            dth[i] = -(hp - hm) / (2.0 * grad_step)
            hp = ham(point.replace(i, twist=point.twists[i] + grad_step))
            hm = ham(point.replace(i, twist=point.twists[i] - grad_step))
            dl[i] = (hp - hm) / (2.0 * grad_step)
        return dl, dth

    def advance(point, step):
        l0 = np.array(point.lengths)
        th0 = np.array(point.twists)
        k1l, k1t = rhs(point)
        k2l, k2t = rhs(point.shifted(step / 2 * k1l, step / 2 * k1t))
        k3l, k3t = rhs(point.shifted(step / 2 * k2l, step / 2 * k2t))
        k4l, k4t = rhs(point.shifted(step * k3l, step * k3t))
        dl = step / 6.0 * (k1l + 2 * k2l + 2 * k3l + k4l)
        dth = step / 6.0 * (k1t + 2 * k2t + 2 * k3t + k4t)
        return point.shifted(dl, dth)

    n_steps = int(round(t_end / dt))
    if sample_every is None:
        sample_every = max(1, n_steps // 20)
    times = [0.0]
    states = [fn0]
    hvals = [ham(fn0)]
    point = fn0
    t = 0.0
    for k in range(1, n_steps + 1):
        try:
            point = advance(point, dt)
        except Exception as e:  # noqa: BLE001 - report last good state
            raise IntegrationFailure(str(e), last_time=t, last_state=point)
        t = k * dt
        if min(point.lengths) <= 0:
            raise IntegrationFailure("length left the positive cone", last_time=t, last_state=point)
        if k % sample_every == 0 or k == n_steps:
            times.append(t)
            states.append(point)
            hvals.append(ham(point))
    return FlowTrajectory(times=times, states=states, hamiltonian_values=hvals,
                          meta={"dt": dt, "grad_step": grad_step})


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def _word_ball(gen_words, max_len):
    """Freely reduced nonempty words of length <= max_len over the given
    words and their inverses (length counted in alphabet letters)."""
    alphabet = []
    for w in gen_words:
        alphabet.append(w)
        alphabet.append(w.inverse())
    out = []
    frontier = [Word()]
    for _ in range(max_len):
        nxt = []
        for base in frontier:
            for step in alphabet:
                cand = free_reduce(base * step)
                if len(cand) > len(free_reduce(base)):
                    nxt.append(cand)
        seen = set()
        dedup = []
        for w in nxt:
            if w.letters not in seen:
                seen.add(w.letters)
                dedup.append(w)
        out.extend(dedup)
        frontier = dedup
    return out


def solve_conjugator(rep0, rep1, gen_words):
    """Least-squares g with g rho0(w) g^{-1} ~ rho1(w) on the given words.

    Homogeneous system g rho0(w) - rho1(w) g = 0 solved by SVD; returns
    (g, residual) with residual the worst conjugation error over the words.
    """
    d = rep0.d
    rows = []
    for w in gen_words:
        m0 = rep0.evaluate(w)
        m1 = rep1.evaluate(w)
        # vec(g m0 - m1 g) = (m0^T (x) I - I (x) m1) vec(g)
        rows.append(np.kron(m0.T, np.eye(d)) - np.kron(np.eye(d), m1))
    a = np.vstack(rows)
    _, _, vt = np.linalg.svd(a)
    g = vt[-1].reshape(d, d)
    det = np.linalg.det(g)
    if abs(det) < 1e-12:
        return g, float("inf")
    g = g / abs(det) ** (1.0 / d)
    ginv = np.linalg.inv(g)
    res = 0.0
    for w in gen_words:
        res = max(res, float(np.max(np.abs(g @ rep0.evaluate(w) @ ginv - rep1.evaluate(w)))))
    return g, res


def subsurface_report(states, decomp, word_ball_len=6):
    """Trace drift and solved conjugators over all complementary vertex groups.

    `states` is a list of Representations sharing a presentation; the first
    entry is the reference. Returns {group_index: {"drift": float,
    "conjugator_residuals": [...]}}.
    """
    if decomp.kind == "cylinder-separating":
        groups = [decomp.gamma1, decomp.gamma2]
    elif decomp.kind == "cylinder-nonseparating":
        groups = [decomp.gamma1]
    else:
        groups = list(decomp.vertex_groups)

    rep0 = states[0]
    report = {}
    for gi, grp in enumerate(groups):
        ball = _word_ball(list(grp), word_ball_len)
        base = np.array([rep0.trace(w) for w in ball])
        drift = 0.0
        residuals = []
        for rep_t in states[1:]:
            cur = np.array([rep_t.trace(w) for w in ball])
            drift = max(drift, float(np.max(np.abs(cur - base))))
            _, res = solve_conjugator(rep0, rep_t, list(grp))
            residuals.append(res)
        report[gi] = {"drift": drift, "conjugator_residuals": residuals}
    return report


# ---------------------------------------------------------------------------
# Thurston limits
# ---------------------------------------------------------------------------

def figure8_limit_weights(rep, decomp):
    """Twist weights (x1, x2, x3) of the figure-8 flow at the initial point."""
    wa, wb, wc = [grp[0] for grp in decomp.boundaries]
    la = trace_length(rep.evaluate(wa))
    lb = trace_length(rep.evaluate(wb))
    lc = trace_length(rep.evaluate(wc))
    return (
        2.0 * math.cosh(lb / 2.0) * math.sinh(la / 2.0),
        2.0 * math.cosh(la / 2.0) * math.sinh(lb / 2.0),
        math.sinh(lc / 2.0),
    )


def thurston_limit(scenario, fn0, flow, probes, min_probe_length=50.0,
                   t_start=1.0, max_doublings=12, spec=None):
    """Probe-length ratios along a flow vs the weighted intersection prediction.

    flow: ("figure8", decomposition name) or ("twist", decomposition name)
    with `spec` the inducing arity-1 function for the twist case (trace by
    default). Returns measured forward/backward ratios for consecutive probe
    pairs against the prediction sum_i x_i i(probe, c_i).
    """
    if len(probes) < 2:
        raise ValueError("need at least two probe curves")
    rep0 = fn_to_holonomy(fn0)
    kind, decomp_name = flow
    decomp = scenario.decomposition(decomp_name)

    if kind == "figure8":
        support = [grp[0] for grp in decomp.boundaries]
        support_names = _support_names(scenario, support)
        weights = figure8_limit_weights(rep0, decomp)
        flow_at = lambda t: figure8_flow(scenario, rep0, decomp, t)
    elif kind == "twist":
        from .invariantfn import TraceSpec

        spec = spec or TraceSpec()
        support_names = [decomp.curve]
        weights = (1.0,)
        flow_at = lambda t: twist_flow(scenario, rep0, decomp, spec, t)
    else:
        raise ValueError(f"unknown flow kind {kind!r}")

    crossings = {}
    for p in probes:
        counts = [scenario.table.geometric_count(cname, p) for cname in support_names]
        wsum = sum(x * n for x, n in zip(weights, counts))
        if wsum == 0:
            raise DegenerateProbe(f"probe {p} does not cross the flow support")
        crossings[p] = wsum

    probe_words = {p: scenario.curve(p) for p in probes}

    def measured(t):
        rep_t = flow_at(t)
        return {p: trace_length(rep_t.evaluate(w)) for p, w in probe_words.items()}

    t = t_start
    for _ in range(max_doublings):
        fwd = measured(t)
        if min(fwd.values()) >= min_probe_length:
            break
        t *= 2.0
    bwd = measured(-t)

    pairs = list(itertools.combinations(probes, 2))
    rows = []
    for p1, p2 in pairs:
        predicted = crossings[p1] / crossings[p2]
        rows.append({
            "probe_pair": (p1, p2),
            "predicted": predicted,
            "forward": fwd[p1] / fwd[p2],
            "backward": bwd[p1] / bwd[p2],
            "t": t,
        })
    return rows


def _support_names(scenario, support_words):
    names = []
    for w in support_words:
        for name, cw in scenario.curves.items():
            if cw == w:
                names.append(name)
                break
        else:
            raise ValueError(f"support word {w} is not a named curve")
    return names
