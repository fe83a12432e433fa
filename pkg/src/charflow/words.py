"""Words in surface-group generators and the one-relator surface presentation.

Words are tuples of (generator name, exponent +-1). The word problem for the
standard genus-g presentation is decided by Dehn's algorithm (surface relators
satisfy the small-cancellation hypothesis), with an optional numeric
cross-check through a faithful representation.
"""

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Word:
    letters: tuple = ()

    def __len__(self):
        return len(self.letters)

    def __bool__(self):
        return bool(self.letters)

    def __mul__(self, other):
        return Word(self.letters + other.letters)

    def inverse(self):
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def __str__(self):
        return word_to_str(self)


def word(*letters):
    """Build a word from (name, exp) pairs or bare names (exp +1)."""
    out = []
    for item in letters:
        if isinstance(item, str):
            out.append((item, 1))
        else:
            g, e = item
            if e not in (1, -1):
                raise ValueError(f"exponent must be +-1, got {e}")
            out.append((g, int(e)))
    return Word(tuple(out))


def parse_word(text, generators=None):
    """Parse a whitespace-separated word string; trailing '-' means inverse.

    Example: "A1 B1 A1- B1-".
    """
    letters = []
    for tok in text.split():
        if tok.endswith("-"):
            name, e = tok[:-1], -1
        else:
            name, e = tok, 1
        if not name:
            raise ValueError(f"empty generator token in {text!r}")
        if generators is not None and name not in generators:
            raise ValueError(f"unknown generator {name!r} in {text!r}")
        letters.append((name, e))
    return Word(tuple(letters))


def word_to_str(w):
    return " ".join(g + ("-" if e < 0 else "") for g, e in w.letters)


def free_reduce(w):
    """Cancel adjacent inverse pairs; idempotent."""
    out = []
    for g, e in w.letters:
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return Word(tuple(out))


def cyclic_reduce(w):
    """Freely reduce, then strip matching first/last letters."""
    r = free_reduce(w)
    ls = list(r.letters)
    while len(ls) >= 2 and ls[0][0] == ls[-1][0] and ls[0][1] == -ls[-1][1]:
        ls = ls[1:-1]
    return Word(tuple(ls))


def commutator(a, b):
    return a * b * a.inverse() * b.inverse()


@dataclass(frozen=True)
class Presentation:
    """Standard one-relator surface presentation of genus g >= 2."""

    genus: int
    generators: tuple
    relator: Word = field(compare=False)

    @classmethod
    def standard(cls, genus):
        if genus < 2:
            raise ValueError(f"genus must be >= 2, got {genus}")
        gens = []
        rel = Word()
        for i in range(1, genus + 1):
            a, b = f"A{i}", f"B{i}"
            gens += [a, b]
            rel = rel * commutator(word(a), word(b))
        return cls(genus=genus, generators=tuple(gens), relator=rel)

    def check_word(self, w):
        for g, _ in w.letters:
            if g not in self.generators:
                raise ValueError(f"unknown generator {g!r}")
        return w

    def relator_is_standard(self):
        return free_reduce(self.relator) == Presentation.standard(self.genus).relator


def _rotations_of(w):
    ls = w.letters
    return [Word(ls[i:] + ls[:i]) for i in range(len(ls))]


def _find_cyclic(haystack, needle):
    """Index where needle occurs in the cyclic word haystack, or -1."""
    n = len(haystack)
    if len(needle) > n:
        return -1
    doubled = haystack.letters + haystack.letters
    m = len(needle)
    for i in range(n):
        if doubled[i:i + m] == needle.letters:
            return i
    return -1


def dehn_reduce(w, presentation):
    """Reduce the cyclic word w using the relator; empty iff trivial in the group.

    Any subword longer than half the (cyclically permuted) relator or its
    inverse is replaced by the shorter complement; each step strictly
    shortens, so this terminates.
    """
    presentation.check_word(w)
    rel = free_reduce(presentation.relator)
    rots = _rotations_of(rel) + _rotations_of(rel.inverse())
    half = len(rel) // 2

    cur = cyclic_reduce(w)
    while cur:
        advanced = False
        for r in rots:
            for plen in range(len(rel), half, -1):
                piece = Word(r.letters[:plen])
                idx = _find_cyclic(cur, piece)
                if idx < 0:
                    continue
                rest = Word(r.letters[plen:])
                rotated = Word(cur.letters[idx:] + cur.letters[:idx])
                replaced = rest.inverse() * Word(rotated.letters[plen:])
                nxt = cyclic_reduce(replaced)
                if len(nxt) < len(cur):
                    cur = nxt
                    advanced = True
                    break
            if advanced:
                break
        if not advanced:
            break
    return cur


def word_is_trivial(w, presentation, rep=None, numeric_tol=1e-6):
    """True iff w = 1 in the surface group.

    Decided by Dehn's algorithm; if a representation is supplied its image is
    cross-checked (trivial words must evaluate within numeric_tol of +-I).
    """
    reduced = dehn_reduce(w, presentation)
    trivial = not reduced
    if rep is not None:
        import numpy as np

        img = rep.evaluate(w)
        d = img.shape[0]
        dist = min(
            float(np.max(np.abs(img - np.eye(d)))),
            float(np.max(np.abs(img + np.eye(d)))),
        )
        numeric = dist <= numeric_tol
        if trivial and not numeric:
            raise AssertionError(
                f"Dehn says trivial but image is {dist:.3e} from +-I"
            )
        trivial = trivial and numeric
    return trivial
