"""Group backends with a decidable word problem.

Two kinds of backend live here:

* FiniteGroup -- element list plus a multiplication table, fully verified
  at construction (Latin square, identity, inverses, associativity).
* RewritingGroup -- a finitely generated group presented by a confluent
  shortlex-reducing string rewriting system.  Words are plain strings of
  single-character letters; the normal form of a word is its unique
  irreducible descendant, so equality of elements is string equality.

Both expose the small backend protocol the coset machinery needs:
identity(), multiply(a, b), inverse(a) and sort_key(a).
"""

from __future__ import annotations

from .errors import BudgetExceeded

DEFAULT_CAP = 200_000


class FiniteGroup:
    """Finite group on indices 0..n-1 with a verified Cayley table."""

    def __init__(self, elements, table, name="G"):
        self.elements = list(elements)
        self.table = [list(row) for row in table]
        self.name = name
        n = len(self.elements)
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise ValueError("table shape does not match element count")
        for row in self.table:
            if sorted(row) != list(range(n)):
                raise ValueError("table rows must permute 0..n-1")
        for j in range(n):
            if sorted(self.table[i][j] for i in range(n)) != list(range(n)):
                raise ValueError("table columns must permute 0..n-1")
        self.identity = None
        for e in range(n):
            if all(self.table[e][x] == x == self.table[x][e] for x in range(n)):
                self.identity = e
                break
        if self.identity is None:
            raise ValueError("no identity element")
        self.inverse_table = [None] * n
        for a in range(n):
            for b in range(n):
                if self.table[a][b] == self.identity == self.table[b][a]:
                    self.inverse_table[a] = b
                    break
            if self.inverse_table[a] is None:
                raise ValueError(f"element {a} has no inverse")
        # desk scale: cubic associativity check is fine
        for a in range(n):
            for b in range(n):
                ab = self.table[a][b]
                for c in range(n):
                    if self.table[ab][c] != self.table[a][self.table[b][c]]:
                        raise ValueError(f"not associative at ({a},{b},{c})")

    @classmethod
    def cyclic(cls, n, name=None):
        table = [[(i + j) % n for j in range(n)] for i in range(n)]
        return cls(list(range(n)), table, name or f"C{n}")

    @classmethod
    def trivial(cls):
        return cls.cyclic(1, name="1")

    def __len__(self):
        return len(self.elements)

    def mul(self, a, b):
        return self.table[a][b]

    def inv(self, a):
        return self.inverse_table[a]

    def is_subgroup(self, indices):
        s = set(indices)
        if self.identity not in s:
            return False
        return all(self.mul(a, b) in s and self.inv(a) in s for a in s for b in s)

    def subgroup_closure(self, indices):
        s = {self.identity, *indices}
        frontier = list(s)
        while frontier:
            a = frontier.pop()
            for b in list(s):
                for c in (self.mul(a, b), self.mul(b, a), self.inv(a)):
                    if c not in s:
                        s.add(c)
                        frontier.append(c)
        return tuple(sorted(s))

    def __repr__(self):
        return f"FiniteGroup({self.name}, order {len(self)})"


def shortlex_key(word, order):
    return (len(word), tuple(order[c] for c in word))


class RewritingGroup:
    """Group given by a shortlex-reducing string rewriting system.

    Generators and their formal inverses are single-character letters.  A
    letter may be declared its own inverse (an involution), in which case
    the free-reduction rule for it is xx -> empty.  Free-reduction rules
    are added automatically.  Confluence is checked at construction unless
    check=False; ball enumeration refuses to run on an unverified system.
    """

    def __init__(self, generators, inverses, rules=(), name="G", check=True):
        self.name = name
        self.generators = list(generators)
        self.inverses = dict(inverses)
        for g in self.generators:
            if g not in self.inverses:
                raise ValueError(f"no inverse letter declared for {g!r}")
        alphabet = []
        for g in self.generators:
            if g not in alphabet:
                alphabet.append(g)
            gi = self.inverses[g]
            if gi not in alphabet:
                alphabet.append(gi)
        for c in alphabet:
            if len(c) != 1:
                raise ValueError(f"letters must be single characters, got {c!r}")
        self.alphabet = alphabet
        self.letter_order = {c: i for i, c in enumerate(alphabet)}
        # the inverse map on the full alphabet
        inv = dict(self.inverses)
        for g, gi in self.inverses.items():
            inv.setdefault(gi, g)
        self.letter_inverse = inv
        if set(inv) != set(alphabet):
            raise ValueError("inverse map must close over the alphabet")

        seen = set()
        self.rules = []
        for c in alphabet:
            pair = (c + inv[c], "")
            if pair not in seen:
                seen.add(pair)
                self.rules.append(pair)
        for lhs, rhs in rules:
            self._check_letters(lhs)
            self._check_letters(rhs)
            if self._key(rhs) >= self._key(lhs):
                raise ValueError(f"rule {lhs!r} -> {rhs!r} does not reduce shortlex order")
            if (lhs, rhs) not in seen:
                seen.add((lhs, rhs))
                self.rules.append((lhs, rhs))
        self.rules.sort(key=lambda r: (self._key(r[0]), self._key(r[1])))
        self._max_lhs = max(len(l) for l, _ in self.rules)
        self.confluence_checked = False
        if check:
            ok, pair = self.verify_confluence()
            if not ok:
                raise ValueError(f"rewriting system is not confluent: {pair}")

    def _check_letters(self, word):
        for c in word:
            if c not in self.letter_order:
                raise ValueError(f"unknown letter {c!r}")

    def _key(self, word):
        return shortlex_key(word, self.letter_order)

    def sort_key(self, word):
        return self._key(word)

    def identity(self):
        return ""

    def normal_form(self, word):
        """The unique irreducible descendant of word."""
        self._check_letters(word)
        w = word
        pos = 0
        while pos < len(w):
            hit = None
            for lhs, rhs in self.rules:
                if w.startswith(lhs, pos):
                    hit = (lhs, rhs)
                    break
            if hit is None:
                pos += 1
                continue
            lhs, rhs = hit
            w = w[:pos] + rhs + w[pos + len(lhs):]
            pos = max(0, pos - self._max_lhs + 1)
        return w

    def multiply(self, a, b):
        return self.normal_form(a + b)

    def inverse(self, word):
        self._check_letters(word)
        return self.normal_form("".join(self.letter_inverse[c] for c in reversed(word)))

    def verify_confluence(self):
        """Resolve every critical pair; returns (ok, counterexample).

        The counterexample is (word, descendant1, descendant2) for an
        overlap word with two distinct normal forms.
        """
        for l1, r1 in self.rules:
            for l2, r2 in self.rules:
                # proper overlap: a suffix of l1 is a prefix of l2
                for k in range(1, min(len(l1), len(l2))):
                    if l1[-k:] == l2[:k]:
                        word = l1 + l2[k:]
                        one = self.normal_form(r1 + l2[k:])
                        two = self.normal_form(l1[:-k] + r2)
                        if one != two:
                            self.confluence_checked = False
                            return False, (word, one, two)
                # containment: l2 occurs strictly inside l1
                if l1 != l2:
                    start = l1.find(l2)
                    while start != -1:
                        one = self.normal_form(r1)
                        two = self.normal_form(l1[:start] + r2 + l1[start + len(l2):])
                        if one != two:
                            self.confluence_checked = False
                            return False, (l1, one, two)
                        start = l1.find(l2, start + 1)
        self.confluence_checked = True
        return True, None

    def ball_enumerate(self, gens, radius, cap=DEFAULT_CAP):
        """All normal forms of gens-length <= radius, BFS order."""
        if not self.confluence_checked:
            raise ValueError("confluence not verified; refuse to enumerate")
        return ball_enumerate(self, gens, radius, cap)

    def to_json(self):
        free = {(c + self.letter_inverse[c], "") for c in self.alphabet}
        return {
            "type": "rewriting_group",
            "name": self.name,
            "generators": list(self.generators),
            "inverses": dict(self.inverses),
            "rules": [[l, r] for l, r in self.rules if (l, r) not in free],
        }

    @classmethod
    def from_json(cls, data):
        if data.get("type") != "rewriting_group":
            raise ValueError("not a rewriting_group spec")
        return cls(
            data["generators"],
            data["inverses"],
            [tuple(r) for r in data.get("rules", [])],
            name=data.get("name", "G"),
        )

    def __repr__(self):
        return f"RewritingGroup({self.name})"


class BallEnumeration:
    """Deduplicated ball with BFS parent edges and depths."""

    def __init__(self, elements, depth, parent):
        self.elements = elements
        self.depth = depth
        self.parent = parent

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def ball_enumerate(backend, gens, radius, cap=DEFAULT_CAP):
    """BFS ball over any backend: elements of gens-length <= radius.

    gens must be symmetric (closed under backend.inverse).  Elements within
    one BFS layer are emitted in sort_key order; parent edges record the
    first (parent, generator index) that discovered each element.
    """
    e = backend.identity()
    gens = [backend.multiply(e, g) for g in gens]  # normalize user input
    have = set(gens)
    for g in gens:
        if backend.inverse(g) not in have:
            raise ValueError("generator list is not symmetric")
    elements = [e]
    depth = {e: 0}
    parent = {}
    frontier = [e]
    for d in range(1, radius + 1):
        found = {}
        for x in frontier:
            for i, s in enumerate(gens):
                y = backend.multiply(x, s)
                if y in depth or y in found:
                    continue
                found[y] = (x, i)
        layer = sorted(found, key=backend.sort_key)
        for y in layer:
            depth[y] = d
            parent[y] = found[y]
            elements.append(y)
            if len(elements) > cap:
                raise BudgetExceeded(f"ball exceeded cap {cap} at radius {d}")
        frontier = layer
        if not frontier:
            break
    return BallEnumeration(elements, depth, parent)
