"""Dev probe: discreteness-style checks for the FN holonomy builders."""
import itertools
import numpy as np

from charflow.representation import (
    fn_to_holonomy, default_fn, one_holed_torus, commutator_matrix,
    trace_length, translation_generator,
)
from charflow.words import Presentation, word, commutator, free_reduce, parse_word
from charflow.liekernel import mat_exp

rng = np.random.default_rng(0)


def loxodromy_sweep(rep, n=300, maxlen=8):
    gens = rep.presentation.generators
    bad = []
    for _ in range(n):
        L = rng.integers(1, maxlen + 1)
        letters = []
        for _ in range(L):
            g = gens[rng.integers(len(gens))]
            e = 1 if rng.random() < 0.5 else -1
            letters.append((g, e))
        w = free_reduce(word(*letters))
        if not w:
            continue
        from charflow.words import dehn_reduce
        if not dehn_reduce(w, rep.presentation):
            continue  # trivial in the group
        t = abs(rep.trace(w))
        if t <= 2.0:
            bad.append((str(w), t))
    return bad


for b_sign in (1.0, -1.0):
    A, B = one_holed_torus(1.3, 0.35, 2.1, b_sign=b_sign)
    K = commutator_matrix(A, B)
    print(f"b_sign={b_sign}: tr A={np.trace(A):.6f} tr B={np.trace(B):.6f} "
          f"tr AB={np.trace(A@B):.6f} tr K={np.trace(K):.6f}")
    # sample words in the free group on A,B: all should be loxodromic if discrete
    mats = {"a": A, "b": B}
    bad = 0
    for _ in range(500):
        L = rng.integers(1, 9)
        w = np.eye(2)
        last = None
        wl = []
        for _ in range(L):
            ch = ["a", "b", "A", "B"][rng.integers(4)]
            wl.append(ch)
        # freely reduce
        red = []
        for ch in wl:
            if red and red[-1].swapcase() == ch:
                red.pop()
            else:
                red.append(ch)
        if not red:
            continue
        for ch in red:
            m = mats[ch.lower()]
            w = w @ (m if ch.islower() else np.linalg.inv(m))
        if abs(np.trace(w)) <= 2.0:
            bad += 1
    print(f"  non-loxodromic words in torus group: {bad}/500")

print()
for genus in (2, 3):
    rep = fn_to_holonomy(default_fn(genus))
    print(f"genus {genus}: relator residual {rep.relator_residual():.3e}")
    bad = loxodromy_sweep(rep)
    print(f"  non-loxodromic nontrivial words: {len(bad)}")
    for w, t in bad[:5]:
        print(f"    {w}: |tr| = {t:.4f}")

# trace/length checks and twist invariance, genus 2
fn = default_fn(2)
rep = fn_to_holonomy(fn)
pres = Presentation.standard(2)
s_word = commutator(word("A1"), word("B1"))
for name, w, l in [("A1", word("A1"), fn.lengths[0]),
                   ("s", s_word, fn.lengths[1]),
                   ("A2", word("A2"), fn.lengths[2])]:
    t = abs(rep.trace(w))
    print(f"{name}: |tr| = {t:.9f} vs 2cosh(l/2) = {2*np.cosh(l/2):.9f}")

fn2 = fn.replace(1, twist=fn.twists[1] + 0.7)
rep2 = fn_to_holonomy(fn2)
for name, w in [("A1", word("A1")), ("s", s_word), ("A2", word("A2"))]:
    print(f"twist s: |tr {name}| change = {abs(abs(rep.trace(w)) - abs(rep2.trace(w))):.2e}")

# the twist changes SOMETHING
probe = parse_word("A2 B2")
print(f"probe tr(A2 B2) change under s-twist: {abs(rep.trace(probe) - rep2.trace(probe)):.4f}")

# genus 3: check pants curves
fn3 = default_fn(3)
rep3 = fn_to_holonomy(fn3)
for i, name in enumerate(fn3.curves):
    from charflow.representation import fn_pants_word
    w = fn_pants_word(fn3, name, rep3.presentation)
    t = abs(rep3.trace(w))
    print(f"genus3 {name}: |tr| = {t:.9f} vs {2*np.cosh(fn3.lengths[i]/2):.9f}")
