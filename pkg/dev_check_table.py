"""Dev probe: authored intersection table vs exact flow derivatives and Darboux."""
import numpy as np
from importlib import resources

from charflow.scenario import load_scenario
from charflow.poisson import BracketRequest, bracket_intersection, bracket_darboux, calibrate
from charflow.invariantfn import TraceSpec, WordComposedSpec
from charflow.flows import twist_flow, power_flow, figure8_flow, flow_probe_derivative
from charflow.words import parse_word

FIX = resources.files("charflow") / "fixtures"
sc2 = load_scenario(str(FIX / "genus2.json"))
sc3 = load_scenario(str(FIX / "genus3.json"))
rep2 = sc2.holonomy()
rep3 = sc3.holonomy()
tr = TraceSpec()

print("== genus 2: flow derivative vs intersection bracket ==")
combos = [
    ("twist A1 -> tr B1", "cyl_A1", "tA1", "tB1"),
    ("twist A1 -> tr d1", "cyl_A1", "tA1", "td1"),
    ("twist B1 -> tr A1", "cyl_B1", "tB1", "tA1"),
    ("twist B1 -> tr d1", "cyl_B1", "tB1", "td1"),
    ("twist A2 -> tr B2", "cyl_A2", "tA2", "tB2"),
]
for label, dec_name, tflow, tprobe in combos:
    dec = sc2.decomposition(dec_name)
    deriv = flow_probe_derivative(
        lambda t: twist_flow(sc2, rep2, dec, tr, t), rep2, sc2, tr, tprobe)
    br = bracket_intersection(sc2, rep2, BracketRequest(tr, tprobe, tr, tflow))
    print(f"{label}: flow={deriv:+.8f} bracket={br:+.8f} ratio={br/deriv if deriv else float('nan'):+.6f}")

for n in (2, 3):
    pw = WordComposedSpec(base=tr, maps=(parse_word(" ".join(["g1"] * n)),), arity=1)
    dec = sc2.decomposition("cyl_A1")
    deriv = flow_probe_derivative(
        lambda t: power_flow(sc2, rep2, dec, tr, n, t), rep2, sc2, tr, "tB1")
    br = bracket_intersection(sc2, rep2, BracketRequest(tr, "tB1", pw, "tA1"))
    print(f"power n={n} -> tr B1: flow={deriv:+.8f} bracket={br:+.8f} ratio={br/deriv:+.6f}")

print("\n== genus 3: figure-8 flow derivative vs intersection bracket ==")
f8 = WordComposedSpec(base=tr, maps=(parse_word("g1 g2-"),), arity=2)
dec3 = sc3.decomposition("pants_abc")
for probe in ("tg12", "tg13", "tg23", "tw4"):
    deriv = flow_probe_derivative(
        lambda t: figure8_flow(sc3, rep3, dec3, t), rep3, sc3, tr, probe)
    br = bracket_intersection(sc3, rep3, BracketRequest(tr, probe, f8, "tab"))
    print(f"figure8 -> tr {probe}: flow={deriv:+.8f} bracket={br:+.8f} ratio={br/deriv:+.6f}")

print("\n== genus 3: twist along a (separating) ==")
deca = sc3.decomposition("cyl_a")
for probe in ("tg12", "tg13"):
    deriv = flow_probe_derivative(
        lambda t: twist_flow(sc3, rep3, deca, tr, t), rep3, sc3, tr, probe)
    br = bracket_intersection(sc3, rep3, BracketRequest(tr, probe, tr, "ta"))
    print(f"twist a -> tr {probe}: flow={deriv:+.8f} bracket={br:+.8f} ratio={br/deriv:+.6f}")

print("\n== genus 2: Darboux ratios ==")
reqs = [
    BracketRequest(tr, "tA1", tr, "tB1"),
    BracketRequest(tr, "tA2", tr, "tB2"),
    BracketRequest(tr, "tA1", tr, "td1"),
    BracketRequest(tr, "tB1", tr, "td1"),
    BracketRequest(WordComposedSpec(base=tr, maps=(parse_word("g1 g2"),), arity=2), "tA1B1", tr, "tB1"),
]
for req in reqs:
    inter = bracket_intersection(sc2, rep2, req)
    darb = bracket_darboux(sc2, req, sc2.fn)
    print(f"{req.tuple_a} vs {req.tuple_b}: inter={inter:+.8f} darboux={darb:+.8f} "
          f"ratio={inter/darb if abs(darb) > 1e-9 else float('nan'):+.6f}")
