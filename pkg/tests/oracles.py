"""Independent brute-force oracles.

Nothing here shares code with the engine being checked beyond structure
construction: probabilities are summed over explicitly enumerated outcomes
and the synthesis oracle enumerates every syntactic formula with no
equivalence pruning, evaluating each as a bitmask over full valuations.
"""

import itertools
import math
from fractions import Fraction


def binary_outcome_tail(probs, predicate):
    """Sum of weights of 0/1 vectors satisfying ``predicate`` (exhaustive)."""
    total = Fraction(0)
    for bits in itertools.product((0, 1), repeat=len(probs)):
        if predicate(bits):
            w = Fraction(1)
            for b, p in zip(bits, probs):
                w *= p if b else 1 - p
            total += w
    return total


def uniform_binary_count_tail(n, p, predicate):
    """Exhaustive over all 2**n vectors, weights grouped by success count."""
    counts = [0] * (n + 1)
    for bits in itertools.product((0, 1), repeat=n):
        if predicate(bits):
            counts[sum(bits)] += 1
    return sum((c * p**k * (1 - p) ** (n - k) for k, c in enumerate(counts)), Fraction(0))


def pools_tail(N, K, n, predicate):
    """Fraction of all n-subsets of range(N) satisfying ``predicate``; range(K) is marked."""
    good = sum(1 for pool in itertools.combinations(range(N), n) if predicate(pool, K))
    return Fraction(good, math.comb(N, n))


# -- synthesis oracle ------------------------------------------------------


class NaiveDefinability:
    """Exhaustive syntactic enumeration for one-sorted structures.

    Grammar: relation atoms and (in)equalities over variables v1..vV and
    constants; negation; & | -> <->; exists/forall and their dotted
    variants (any variable, any body), quantifier depth at most D.  Every
    formula is kept, duplicates included.
    """

    def __init__(self, structure, sort, max_vars, max_depth):
        self.elems = list(structure.elements(sort))
        self.n = len(self.elems)
        self.V = max_vars
        self.D = max_depth
        self.size = self.n ** self.V
        self.full = (1 << self.size) - 1
        self.vals = list(itertools.product(range(self.n), repeat=self.V))
        # valuation index: sum(a_i * n**i)
        self.stride = [self.n ** i for i in range(self.V)]
        self.sel = [[self._mask(lambda v, i=i, k=k: v[i] == k) for k in range(self.n)] for i in range(self.V)]
        voc = structure.vocabulary
        terms = [("var", i) for i in range(self.V)]
        terms += [("const", self.elems.index(structure.constant(c))) for c, s in voc.constants.items()]
        self.atoms = {}

        def val(t, v):
            return v[t[1]] if t[0] == "var" else t[1]

        def fv(ts):
            return frozenset(t[1] for t in ts if t[0] == "var")

        for rel, types in voc.relations.items():
            ext = {tuple(self.elems.index(e) for e in row) for row in structure.relations[rel]}
            for ts in itertools.product(terms, repeat=len(types)):
                m = self._mask(lambda v, ts=ts: tuple(val(t, v) for t in ts) in ext)
                self.atoms.setdefault(1 + len(types), []).append((fv(ts), 0, m))
        for a, b in itertools.product(terms, repeat=2):
            m = self._mask(lambda v, a=a, b=b: val(a, v) == val(b, v))
            self.atoms.setdefault(3, []).append((fv((a, b)), 0, m))
            self.atoms[3].append((fv((a, b)), 0, self.full & ~m))

    def _mask(self, pred):
        m = 0
        for idx, v in enumerate(self._ordered()):
            if pred(v):
                m |= 1 << idx
        return m

    def _ordered(self):
        # itertools.product varies the last coordinate fastest; index uses v[0] fastest
        out = [None] * (self.n ** self.V)
        for v in itertools.product(range(self.n), repeat=self.V):
            out[sum(a * s for a, s in zip(v, [self.n ** i for i in range(self.V)]))] = v
        return out

    def _exists(self, m, i):
        proj = 0
        for k in range(self.n):
            proj |= (m & self.sel[i][k]) >> (k * self.stride[i])
        out = 0
        for k in range(self.n):
            out |= proj << (k * self.stride[i])
        return out

    def _guard(self, i, others):
        g = self.full
        for j in others:
            g &= self._mask(lambda v, j=j: v[i] != v[j])
        return g

    def run(self, max_length):
        levels = {}
        guards = {}
        for L in range(2, max_length + 1):
            cur = list(self.atoms.get(L, ()))
            for fv, d, m in levels.get(L - 1, ()):
                cur.append((fv, d, self.full & ~m))
            for c1 in range(2, L - 2):
                c2 = L - 1 - c1
                for fa, da, ma in levels.get(c1, ()):
                    for fb, db, mb in levels.get(c2, ()):
                        fv, d = fa | fb, max(da, db)
                        cur.append((fv, d, ma & mb))
                        cur.append((fv, d, ma | mb))
                        cur.append((fv, d, (self.full & ~ma) | mb))
                        cur.append((fv, d, self.full & ~(ma ^ mb)))
            for fv, d, m in levels.get(L - 2, ()):
                if d + 1 > self.D:
                    continue
                for i in range(self.V):
                    rest = fv - {i}
                    ex = self._exists(m, i)
                    fa = self.full & ~self._exists(self.full & ~m, i)
                    key = (i, rest)
                    if key not in guards:
                        guards[key] = self._guard(i, rest)
                    g = guards[key]
                    dex = self._exists(m & g, i)
                    dfa = self.full & ~self._exists((self.full & ~m) & g, i)
                    for r in (ex, fa, dex, dfa):
                        cur.append((rest, d + 1, r))
            levels[L] = cur
        self.levels = levels
        return levels

    def min_lengths(self, max_length):
        """{frozenset of elements: minimal length} over formulas with free variables within {v1}."""
        levels = self.run(max_length)
        out = {}
        for L in range(2, max_length + 1):
            for fv, _, m in levels[L]:
                if fv - {0}:
                    continue
                s = frozenset(self.elems[a] for a in range(self.n) if m >> a & 1)
                out.setdefault(s, L)
        return out

    def count(self):
        return sum(len(v) for v in self.levels.values())
