"""Scenario atlas: curves, tuples, subsurface decompositions and the
authored intersection table that feeds the bracket engine.

Scenario files are JSON; see the bundled genus2/genus3 fixtures for the
schema. Intersection data is authored, not computed; it is validated
indirectly through the Darboux-oracle consistency of brackets.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import IncompleteAtlas, ParseError, ScenarioInvalid
from .invariantfn import spec_from_json
from .representation import FNCoordinates, fn_to_holonomy, fuchsian_rep
from .words import Presentation, Word, free_reduce, parse_word, word_to_str


@dataclass(frozen=True)
class Crossing:
    sign: int
    ta: Word  # transport applied to the first (alpha) slot's variation
    tb: Word  # transport applied to the second (beta) slot's variation

    def mirrored(self):
        return Crossing(sign=-self.sign, ta=self.tb, tb=self.ta)


class IntersectionTable:
    """Crossing lists per ordered curve pair; (b, a) is the sign-negated,
    transport-swapped mirror of (a, b)."""

    def __init__(self, entries):
        self.entries = dict(entries)

    def has(self, a, b):
        return (a, b) in self.entries or (b, a) in self.entries

    def lookup(self, a, b):
        if (a, b) in self.entries:
            return self.entries[(a, b)]
        if (b, a) in self.entries:
            return [c.mirrored() for c in self.entries[(b, a)]]
        raise IncompleteAtlas(f"no intersection entry for ({a}, {b})")

    def geometric_count(self, a, b):
        return len(self.lookup(a, b))

    def pairs(self):
        return sorted(self.entries)


@dataclass(frozen=True)
class SubsurfaceDecomposition:
    """One of four kinds of decomposition along a supporting subsurface.

    cylinder kinds carry the core curve, the untouched side gamma1 and
    either gamma2 (separating) or the gluing loop eta (non-separating).
    Pants kinds carry the S0 data: genus handles (a_j, b_j), boundary words
    c^i_l grouped per complementary vertex, vertex-group generator words,
    and gluing loops eta^i_l for l >= 2.
    """

    name: str
    kind: str
    curve: str = None
    gamma1: tuple = ()
    gamma2: tuple = ()
    eta: Word = None
    s0_genus: int = 0
    s0_ab: tuple = ()          # (a_1, b_1, ..., a_g0, b_g0) as Words
    boundaries: tuple = ()     # tuple per vertex i of tuples of Words
    vertex_groups: tuple = ()  # tuple per vertex i of tuples of Words
    gluing_loops: tuple = ()   # tuple per vertex i of tuples of Words (l >= 2)

    def boundary_words_flat(self):
        return [w for grp in self.boundaries for w in grp]

    def s0_relator_word(self):
        out = Word()
        ab = self.s0_ab
        for j in range(self.s0_genus):
            a, b = ab[2 * j], ab[2 * j + 1]
            out = out * a * b * a.inverse() * b.inverse()
        for grp in self.boundaries:
            for c in grp:
                out = out * c
        return free_reduce(out)


@dataclass
class Scenario:
    presentation: Presentation
    curves: dict
    tuples: dict
    decompositions: dict
    table: IntersectionTable
    fn: FNCoordinates = None
    metadata: dict = field(default_factory=dict)

    def curve(self, name):
        if name not in self.curves:
            raise ValueError(f"unknown curve {name!r}")
        return self.curves[name]

    def tuple_words(self, name):
        if name not in self.tuples:
            raise ValueError(f"unknown tuple {name!r}")
        return [self.curve(c) for c in self.tuples[name]]

    def tuple_curves(self, name):
        if name not in self.tuples:
            raise ValueError(f"unknown tuple {name!r}")
        return list(self.tuples[name])

    def decomposition(self, name):
        if name not in self.decompositions:
            raise ValueError(f"unknown decomposition {name!r}")
        return self.decompositions[name]

    def holonomy(self, fn=None):
        point = fn if fn is not None else self.fn
        if point is None:
            raise ValueError("scenario carries no Fenchel-Nielsen block")
        return fn_to_holonomy(point)

    def spec(self, obj):
        return spec_from_json(obj)


def _req(obj, key, path):
    if key not in obj:
        raise ParseError(f"{path}.{key}", "missing required field")
    return obj[key]


def _parse_word_or_curve(token, curves, generators, path):
    if token in curves:
        return curves[token]
    try:
        return parse_word(token, generators)
    except ValueError as e:
        raise ParseError(path, str(e))


def load_scenario(path):
    """Load and fully validate a scenario file."""
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as e:
            raise ParseError("$", f"invalid JSON: {e}")
    return scenario_from_dict(raw)


def scenario_from_dict(raw):
    genus = _req(raw, "genus", "$")
    if not isinstance(genus, int) or genus < 2:
        raise ParseError("genus", f"must be an integer >= 2, got {genus!r}")
    presentation = Presentation.standard(genus)

    gens = _req(raw, "generators", "$")
    if tuple(gens) != presentation.generators:
        raise ParseError("generators", "must list the standard generators in order")

    relator = parse_word(_req(raw, "relator", "$"), presentation.generators)
    if free_reduce(relator) != presentation.relator:
        raise ScenarioInvalid("presentation.relator", "does not reduce to the standard surface relator")

    curves = {}
    for name, text in _req(raw, "curves", "$").items():
        try:
            curves[name] = free_reduce(parse_word(text, presentation.generators))
        except ValueError as e:
            raise ParseError(f"curves.{name}", str(e))

    tuples = {}
    for name, items in raw.get("tuples", {}).items():
        for c in items:
            if c not in curves:
                raise ParseError(f"tuples.{name}", f"unknown curve {c!r}")
        tuples[name] = list(items)

    entries = {}
    for k, entry in enumerate(raw.get("intersections", [])):
        a = _req(entry, "a", f"intersections[{k}]")
        b = _req(entry, "b", f"intersections[{k}]")
        for c in (a, b):
            if c not in curves:
                raise ParseError(f"intersections[{k}]", f"unknown curve {c!r}")
        crossings = []
        for m, cr in enumerate(entry.get("crossings", [])):
            sign = _req(cr, "sign", f"intersections[{k}].crossings[{m}]")
            if sign not in (1, -1):
                raise ScenarioInvalid("intersection.sign", f"sign must be +-1, got {sign!r}")
            ta = parse_word(cr.get("ta", ""), presentation.generators)
            tb = parse_word(cr.get("tb", ""), presentation.generators)
            crossings.append(Crossing(sign=int(sign), ta=ta, tb=tb))
        key = (a, b)
        if key in entries:
            raise ParseError(f"intersections[{k}]", f"duplicate pair {key}")
        entries[key] = crossings
    table = IntersectionTable(entries)

    # mirror consistency for doubly stored pairs
    for (a, b) in list(table.entries):
        if (b, a) in table.entries:
            fwd = table.entries[(a, b)]
            mir = [c.mirrored() for c in table.entries[(b, a)]]
            if len(fwd) != len(mir) or any(
                f.sign != m.sign or f.ta != m.ta or f.tb != m.tb
                for f, m in zip(fwd, mir)
            ):
                raise ScenarioInvalid("intersection.mirror", f"pair ({a},{b}) stored both ways inconsistently")

    decompositions = {}
    for k, entry in enumerate(raw.get("decompositions", [])):
        dec = _parse_decomposition(entry, curves, presentation, f"decompositions[{k}]")
        decompositions[dec.name] = dec

    fn = None
    if "fenchel_nielsen" in raw:
        blk = raw["fenchel_nielsen"]
        pants = _req(blk, "pants", "fenchel_nielsen")
        kind = _req(pants, "kind", "fenchel_nielsen.pants")
        curve_names = tuple(_req(pants, "curves", "fenchel_nielsen.pants"))
        lengths = tuple(float(x) for x in _req(blk, "lengths", "fenchel_nielsen"))
        twists = tuple(float(x) for x in _req(blk, "twists", "fenchel_nielsen"))
        for c in curve_names:
            if c not in curves:
                raise ParseError("fenchel_nielsen.pants.curves", f"unknown curve {c!r}")
        if any(l <= 0 for l in lengths):
            raise ParseError("fenchel_nielsen.lengths", "lengths must be positive")
        fn = FNCoordinates(kind, curve_names, lengths, twists)

    scenario = Scenario(
        presentation=presentation,
        curves=curves,
        tuples=tuples,
        decompositions=decompositions,
        table=table,
        fn=fn,
        metadata=raw.get("metadata", {}),
    )
    _validate_decompositions(scenario)
    return scenario


def _parse_decomposition(entry, curves, presentation, path):
    name = _req(entry, "name", path)
    kind = _req(entry, "kind", path)
    gens = presentation.generators

    def words_of(tokens, subpath):
        return tuple(
            _parse_word_or_curve(t, curves, gens, f"{path}.{subpath}") for t in tokens
        )

    if kind in ("cylinder-separating", "cylinder-nonseparating"):
        curve = _req(entry, "curve", path)
        if curve not in curves:
            raise ParseError(f"{path}.curve", f"unknown curve {curve!r}")
        gamma1 = words_of(_req(entry, "gamma1", path), "gamma1")
        if kind == "cylinder-separating":
            gamma2 = words_of(_req(entry, "gamma2", path), "gamma2")
            return SubsurfaceDecomposition(
                name=name, kind=kind, curve=curve, gamma1=gamma1, gamma2=gamma2
            )
        eta = _parse_word_or_curve(_req(entry, "eta", path), curves, gens, f"{path}.eta")
        return SubsurfaceDecomposition(
            name=name, kind=kind, curve=curve, gamma1=gamma1, eta=eta
        )

    if kind in ("fully-separating-pants", "general-pants"):
        s0 = _req(entry, "s0", path)
        g0 = int(s0.get("genus", 0))
        ab = words_of(s0.get("ab", []), "s0.ab")
        if len(ab) != 2 * g0:
            raise ParseError(f"{path}.s0.ab", f"need 2*genus = {2 * g0} words")
        boundaries = tuple(
            words_of(grp, f"s0.boundaries[{i}]")
            for i, grp in enumerate(_req(s0, "boundaries", f"{path}.s0"))
        )
        vertex_groups = tuple(
            words_of(grp, f"vertex_groups[{i}]")
            for i, grp in enumerate(_req(entry, "vertex_groups", path))
        )
        gluing = tuple(
            words_of(grp, f"gluing_loops[{i}]")
            for i, grp in enumerate(entry.get("gluing_loops", [[] for _ in boundaries]))
        )
        if len(vertex_groups) != len(boundaries) or len(gluing) != len(boundaries):
            raise ParseError(path, "vertex_groups/gluing_loops must align with boundaries")
        for i, (grp, glue) in enumerate(zip(boundaries, gluing)):
            if len(glue) != max(len(grp) - 1, 0):
                raise ParseError(
                    f"{path}.gluing_loops[{i}]",
                    "need one gluing loop per boundary beyond the first",
                )
        if kind == "fully-separating-pants":
            flat = [w for grp in boundaries for w in grp]
            if len(flat) != 3 or any(len(grp) != 1 for grp in boundaries):
                raise ScenarioInvalid("decomposition.pants", "need exactly 3 boundary words, one per vertex")
            c1, c2, c3 = flat
            if free_reduce(c3) != free_reduce((c1 * c2).inverse()):
                raise ScenarioInvalid("decomposition.pants", "c3 != (c1 c2)^{-1} after free reduction")
        return SubsurfaceDecomposition(
            name=name, kind=kind, s0_genus=g0, s0_ab=ab,
            boundaries=boundaries, vertex_groups=vertex_groups, gluing_loops=gluing,
        )

    raise ParseError(f"{path}.kind", f"unknown kind {kind!r}")


def _validate_decompositions(scenario, tol=1e-6):
    """Numeric S0-relator triviality in a faithful representation."""
    pants_kinds = ("fully-separating-pants", "general-pants")
    if not any(d.kind in pants_kinds for d in scenario.decompositions.values()):
        return
    rep = fuchsian_rep(scenario.presentation.genus)
    for dec in scenario.decompositions.values():
        if dec.kind not in pants_kinds:
            continue
        img = rep.evaluate(dec.s0_relator_word())
        dist = float(np.max(np.abs(img - np.eye(rep.d))))
        if dist > tol:
            raise ScenarioInvalid(
                "decomposition.s0_relator",
                f"{dec.name}: S0 relator image is {dist:.3e} from identity",
            )


def scenario_to_json(scenario):
    """Inverse of scenario_from_dict for the fields we ship (used by tests)."""
    out = {
        "genus": scenario.presentation.genus,
        "generators": list(scenario.presentation.generators),
        "relator": word_to_str(scenario.presentation.relator),
        "curves": {k: word_to_str(w) for k, w in scenario.curves.items()},
        "tuples": dict(scenario.tuples),
    }
    return out
