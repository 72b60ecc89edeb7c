"""Finitely presented unital *-algebras over the Gaussian rationals.

Polynomials live in the free unital *-algebra on declared generators;
a presentation is a *-closed set of polynomials read as relations = 0.
Equality of presented elements is semi-decidable, so the rewriting
machinery reports a tri-state verdict: equal with a checkable trace,
distinct with a separating certificate, or unknown when the step
budget runs out.

Term order: degree-lexicographic over generator declaration order,
with each adjoint letter ranked immediately after its base letter.
Relations are oriented largest-word-first; rewriting with this
orientation always terminates, the budget only caps long runs.
"""

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Optional

from .scalars import GQ_ONE, GQ_ZERO, GaussianRational, gq

DEFAULT_BUDGET = 100_000

Letter = tuple[str, bool]  # (generator name, starred?)
Word = tuple[Letter, ...]


class UnknownGeneratorError(KeyError):
    """A polynomial mentions a symbol the presentation does not declare."""


class UnsupportedSpectrumError(ValueError):
    """A generator is not provably a self-adjoint idempotent."""


@dataclass(frozen=True)
class GenDecl:
    """A declared generator; norm bounds are recorded, never used."""

    name: str
    self_adjoint: bool = False
    norm_bound: Optional[float] = None


class FreeStarAlgebra:
    """The free unital *-algebra on an ordered tuple of generators."""

    def __init__(self, gens):
        self.gens = tuple(gens)
        self._index = {g.name: k for k, g in enumerate(self.gens)}
        if len(self._index) != len(self.gens):
            raise ValueError("duplicate generator names")
        self._decl = {g.name: g for g in self.gens}

    def letter(self, name: str, star: bool = False) -> Letter:
        decl = self._decl.get(name)
        if decl is None:
            raise UnknownGeneratorError(name)
        return (name, star and not decl.self_adjoint)

    def star_letter(self, letter: Letter) -> Letter:
        name, star = letter
        return self.letter(name, not star)

    def letter_key(self, letter: Letter):
        name, star = letter
        idx = self._index.get(name)
        if idx is None:
            raise UnknownGeneratorError(name)
        return (idx, 1 if star else 0)

    def word_key(self, word: Word):
        return (len(word), tuple(self.letter_key(l) for l in word))

    # -- element constructors -----------------------------------------

    def gen(self, name: str, star: bool = False) -> "FreeStarPoly":
        return FreeStarPoly(self, {(self.letter(name, star),): GQ_ONE})

    def unit(self) -> "FreeStarPoly":
        return FreeStarPoly(self, {(): GQ_ONE})

    def zero(self) -> "FreeStarPoly":
        return FreeStarPoly(self, {})

    def scalar(self, c) -> "FreeStarPoly":
        return FreeStarPoly(self, {(): gq(c)})

    def poly(self, terms) -> "FreeStarPoly":
        return FreeStarPoly(self, terms)

    def word(self, *letters) -> "FreeStarPoly":
        w = tuple(self.letter(n, s) for n, s in letters)
        return FreeStarPoly(self, {w: GQ_ONE})

    def __eq__(self, other):
        return isinstance(other, FreeStarAlgebra) and self.gens == other.gens

    def __hash__(self):
        return hash(self.gens)

    def __repr__(self):
        return f"FreeStarAlgebra({[g.name for g in self.gens]})"


class FreeStarPoly:
    """Formal sum of (coefficient, word) pairs in canonical form."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: FreeStarAlgebra, terms):
        self.alg = alg
        clean = {}
        for w, c in terms.items():
            c = c if isinstance(c, GaussianRational) else gq(c)
            if not c.is_zero():
                clean[w] = c
        self.terms = clean

    def _check(self, other):
        if self.alg != other.alg:
            raise UnknownGeneratorError(
                "polynomials over different generator universes"
            )

    def __add__(self, other):
        if isinstance(other, (int, GaussianRational)):
            other = self.alg.scalar(other)
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, GQ_ZERO) + c
        return FreeStarPoly(self.alg, out)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, GaussianRational)):
            other = self.alg.scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return FreeStarPoly(self.alg, {w: -c for w, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, GaussianRational)):
            c = gq(other)
            return FreeStarPoly(
                self.alg, {w: v * c for w, v in self.terms.items()}
            )
        self._check(other)
        out = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                out[w] = out.get(w, GQ_ZERO) + c1 * c2
        return FreeStarPoly(self.alg, out)

    def __rmul__(self, other):
        if isinstance(other, (int, GaussianRational)):
            return self * other
        return NotImplemented

    def __pow__(self, n: int):
        out = self.alg.unit()
        for _ in range(n):
            out = out * self
        return out

    def adjoint(self) -> "FreeStarPoly":
        out = {}
        for w, c in self.terms.items():
            sw = tuple(self.alg.star_letter(l) for l in reversed(w))
            out[sw] = out.get(sw, GQ_ZERO) + c.conjugate()
        return FreeStarPoly(self.alg, out)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(w == () for w in self.terms)

    def constant_term(self) -> GaussianRational:
        return self.terms.get((), GQ_ZERO)

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def leading_word(self) -> Word:
        return max(self.terms, key=self.alg.word_key)

    def monic(self) -> "FreeStarPoly":
        if self.is_zero():
            return self
        c = self.terms[self.leading_word()]
        return self * (GQ_ONE / c)

    def sorted_terms(self):
        return sorted(
            self.terms.items(), key=lambda t: self.alg.word_key(t[0]), reverse=True
        )

    def sort_key(self):
        return tuple(
            (self.alg.word_key(w), c.sort_key()) for w, c in self.sorted_terms()
        )

    def substitute(self, mapping) -> "FreeStarPoly":
        """Apply a *-compatible substitution letter-name → polynomial.

        Names missing from the mapping stay themselves; starred letters
        are sent to the adjoint of the mapped polynomial.
        """
        target_alg = next(iter(mapping.values())).alg if mapping else self.alg
        out = FreeStarPoly(target_alg, {})
        for w, c in self.terms.items():
            prod = FreeStarPoly(target_alg, {(): c})
            for name, star in w:
                img = mapping.get(name)
                if img is None:
                    img = target_alg.gen(name, star)
                elif star:
                    img = img.adjoint()
                prod = prod * img
            out = out + prod
        return out

    def __eq__(self, other):
        if not isinstance(other, FreeStarPoly):
            return NotImplemented
        return self.alg == other.alg and self.terms == other.terms

    def __hash__(self):
        return hash((self.alg, frozenset(self.terms.items())))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.sorted_terms():
            letters = " ".join(n + ("^*" if s else "") for n, s in w)
            if not w:
                body = str(c)
            elif c == GQ_ONE:
                body = letters
            else:
                cs = str(c)
                if "+" in cs[1:] or "-" in cs[1:]:
                    cs = f"({cs})"
                body = f"{cs} {letters}"
            parts.append(body)
        return " + ".join(parts)

    def __repr__(self):
        return f"<poly {self}>"


# ---------------------------------------------------------------------------
# presentations
# ---------------------------------------------------------------------------


def star_close(alg: FreeStarAlgebra, relations):
    """Close a relation list under adjoints (monic, deduplicated)."""
    seen = {}
    for r in relations:
        for cand in (r, r.adjoint()):
            cand = cand.monic()
            if cand.is_zero():
                continue
            key = cand.sort_key()
            if key not in seen:
                seen[key] = cand
    return [seen[k] for k in sorted(seen)]


class Presentation:
    """Generators plus a *-closed, monic, sorted relation list.

    A relation equal to a nonzero constant presents the zero algebra;
    it is kept (downstream semantics stay correct: everything rewrites
    to 0, no characters, no representations) but flagged loudly.
    """

    def __init__(self, alg: FreeStarAlgebra, relations=()):
        self.alg = alg
        for r in relations:
            if r.alg != alg:
                raise UnknownGeneratorError("relation over a different algebra")
        self.relations = tuple(star_close(alg, relations))
        self.presents_zero = any(
            r.is_constant() and not r.is_zero() for r in self.relations
        )
        if self.presents_zero:
            warnings.warn(
                "a relation is a nonzero constant: this presents the zero algebra",
                stacklevel=2,
            )
        self._rules = None

    @property
    def gens(self):
        return self.alg.gens

    def gen(self, name, star=False):
        return self.alg.gen(name, star)

    def rules(self):
        """Oriented rewrite rules lead-word → (negated tail, index)."""
        if self._rules is None:
            rules = {}
            maxlen = 0
            for idx, r in enumerate(self.relations):
                lead = r.leading_word()
                tail = r - FreeStarPoly(self.alg, {lead: GQ_ONE})
                if lead not in rules:
                    rules[lead] = (-tail, idx)
                    maxlen = max(maxlen, len(lead))
            self._rules = (rules, maxlen)
        return self._rules

    def with_relations(self, extra) -> "Presentation":
        return Presentation(self.alg, list(self.relations) + list(extra))

    def __eq__(self, other):
        return (
            isinstance(other, Presentation)
            and self.alg == other.alg
            and self.relations == other.relations
        )

    def __hash__(self):
        return hash((self.alg, self.relations))

    def __repr__(self):
        return (
            f"Presentation({[g.name for g in self.gens]}, "
            f"{len(self.relations)} relations)"
        )


@dataclass
class NormalFormResult:
    poly: FreeStarPoly
    exhausted: bool
    steps: int
    # trace entries (coeff, left word, relation index, right word):
    # input - output == Σ coeff·left·relation·right, exactly.
    trace: tuple = ()


def normal_form(
    p: FreeStarPoly, pres: Presentation, bound: int = DEFAULT_BUDGET
) -> NormalFormResult:
    """Rewrite p with the oriented relations, at most `bound` steps."""
    if p.alg != pres.alg:
        raise UnknownGeneratorError("polynomial over a different algebra")
    rules, maxlen = pres.rules()
    if () in rules:
        # nonzero constant relation: the ideal is everything
        if len(p.terms) > bound:
            return NormalFormResult(p, True, 0, ())
        trace = tuple((c, w, rules[()][1], ()) for w, c in p.sorted_terms())
        return NormalFormResult(pres.alg.zero(), False, len(trace), trace)
    terms = dict(p.terms)
    steps = 0
    trace = []
    while steps < bound:
        hit = None
        for w in sorted(terms, key=pres.alg.word_key, reverse=True):
            for pos in range(len(w)):
                for ln in range(1, min(maxlen, len(w) - pos) + 1):
                    rule = rules.get(w[pos : pos + ln])
                    if rule is not None:
                        hit = (w, pos, ln, rule)
                        break
                if hit:
                    break
            if hit:
                break
        if hit is None:
            return NormalFormResult(
                FreeStarPoly(pres.alg, terms), False, steps, tuple(trace)
            )
        w, pos, ln, (repl, ridx) = hit
        c = terms.pop(w)
        left, right = w[:pos], w[pos + ln :]
        for rw, rc in repl.terms.items():
            nw = left + rw + right
            nv = terms.get(nw, GQ_ZERO) + c * rc
            if nv.is_zero():
                terms.pop(nw, None)
            else:
                terms[nw] = nv
        trace.append((c, left, ridx, right))
        steps += 1
    return NormalFormResult(FreeStarPoly(pres.alg, terms), True, steps, tuple(trace))


def check_trace(original: FreeStarPoly, result: NormalFormResult, pres) -> bool:
    """Re-check that the trace is an exact ideal combination."""
    acc = pres.alg.zero()
    for c, left, ridx, right in result.trace:
        lw = FreeStarPoly(pres.alg, {left: GQ_ONE})
        rw = FreeStarPoly(pres.alg, {right: GQ_ONE})
        acc = acc + (lw * pres.relations[ridx] * rw) * c
    return original - result.poly == acc


# ---------------------------------------------------------------------------
# tri-state equality
# ---------------------------------------------------------------------------


@dataclass
class EqualityVerdict:
    """equal (rewrite trace) / distinct (certificate) / unknown (budget)."""

    status: str
    steps: int = 0
    trace: tuple = ()
    certificate: object = None

    @classmethod
    def equal(cls, steps, trace):
        return cls("equal", steps=steps, trace=trace)

    @classmethod
    def distinct(cls, certificate, steps=0):
        return cls("distinct", steps=steps, certificate=certificate)

    @classmethod
    def unknown(cls, steps):
        return cls("unknown", steps=steps)

    @property
    def is_equal(self):
        return self.status == "equal"

    def __repr__(self):
        return f"EqualityVerdict({self.status})"


@dataclass
class CheckReport:
    """Outcome of one structural check: labelled verdicts plus notes.

    `failures` records hard violations (failed preconditions, distinct
    verdicts); any failure forces status 'fail', any unverified item
    leaves 'unknown', otherwise 'pass'.
    """

    kind: str
    items: list = field(default_factory=list)  # (label, EqualityVerdict)
    failures: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def add(self, label: str, verdict: EqualityVerdict):
        self.items.append((label, verdict))
        if verdict.status == "distinct":
            self.failures.append(f"{label}: distinct")

    @property
    def status(self) -> str:
        if self.failures:
            return "fail"
        if any(v.status == "unknown" for _, v in self.items):
            return "unknown"
        return "pass"

    @property
    def steps(self) -> int:
        return sum(v.steps for _, v in self.items)


def presentation_equal(
    p: FreeStarPoly,
    q: FreeStarPoly,
    pres: Presentation,
    bound: int = DEFAULT_BUDGET,
    characters=(),
    models=(),
) -> EqualityVerdict:
    """Decide p = q modulo the presented relations, tri-state.

    `characters` are scalar assignments already verified against the
    relations; `models` are numerical representations exposing
    separation(p, q) and a residual (a separation counts only when its
    margin exceeds 1000× the model residual).
    """
    diff = p - q
    nf = normal_form(diff, pres, bound)
    if not nf.exhausted and nf.poly.is_zero():
        return EqualityVerdict.equal(nf.steps, nf.trace)
    for chi in characters:
        v = eval_poly_at(chi, diff)
        if not v.is_zero():
            return EqualityVerdict.distinct(("character", chi), steps=nf.steps)
    for model in models:
        margin = model.separation(p, q)
        if margin > 1000.0 * max(model.residual, 1e-300):
            return EqualityVerdict.distinct(
                ("model", model, margin), steps=nf.steps
            )
    return EqualityVerdict.unknown(nf.steps)


# ---------------------------------------------------------------------------
# abelianization and the classical oracle
# ---------------------------------------------------------------------------


def _all_letters(alg: FreeStarAlgebra):
    out = []
    for g in alg.gens:
        out.append((g.name, False))
        if not g.self_adjoint:
            out.append((g.name, True))
    return out


def abelianize(pres: Presentation) -> Presentation:
    """Add all commutators of generator letters (and their adjoints)."""
    letters = _all_letters(pres.alg)
    extra = []
    for a, b in itertools.combinations(letters, 2):
        ab = FreeStarPoly(pres.alg, {(a, b): GQ_ONE})
        ba = FreeStarPoly(pres.alg, {(b, a): GQ_ONE})
        extra.append(ba - ab)
    return pres.with_relations(extra)


def eval_poly_at(assignment, poly: FreeStarPoly) -> GaussianRational:
    """Evaluate at a scalar assignment generator-name → value."""
    total = GQ_ZERO
    for w, c in poly.terms.items():
        v = c
        for name, star in w:
            x = assignment[name]
            v = v * (x.conjugate() if star else x)
        total = total + v
    return total


def enumerate_characters(
    pres: Presentation, bound: int = 4000
) -> list[dict[str, GaussianRational]]:
    """All characters, for presentations of classical finite spaces.

    Works after abelianization and requires every generator to be a
    self-adjoint provable idempotent (g² − g rewrites to 0), so its
    scalar spectrum is {0, 1}; anything else is refused.  Assignments
    are found by backtracking and each is re-verified against every
    relation before being returned.
    """
    ab = abelianize(pres)
    names = [g.name for g in ab.gens]
    for g in ab.gens:
        if not g.self_adjoint:
            raise UnsupportedSpectrumError(
                f"generator {g.name} is not self-adjoint"
            )
        x = ab.gen(g.name)
        nf = normal_form(x * x - x, ab, bound)
        if nf.exhausted or not nf.poly.is_zero():
            raise UnsupportedSpectrumError(
                f"generator {g.name} has no finite spectrum constraint"
            )

    pos = {n: k for k, n in enumerate(names)}
    readiness = [[] for _ in names]  # relations checkable once gen k is set
    constant_rels = []
    for r in ab.relations:
        support = {n for w in r.terms for n, _ in w}
        if support:
            readiness[max(pos[n] for n in support)].append(r)
        else:
            constant_rels.append(r)
    if any(not r.is_zero() for r in constant_rels):
        return []

    found = []
    values = (GQ_ZERO, GQ_ONE)
    assignment: dict[str, GaussianRational] = {}

    def backtrack(k: int):
        if k == len(names):
            found.append(dict(assignment))
            return
        for v in values:
            assignment[names[k]] = v
            if all(eval_poly_at(assignment, r).is_zero() for r in readiness[k]):
                backtrack(k + 1)
        del assignment[names[k]]

    backtrack(0)
    verified = [
        chi
        for chi in found
        if all(eval_poly_at(chi, r).is_zero() for r in ab.relations)
    ]
    verified.sort(key=lambda chi: tuple(chi[n].sort_key() for n in names))
    return verified


# ---------------------------------------------------------------------------
# optional bounded completion (off by default)
# ---------------------------------------------------------------------------


def critical_pair_completion(
    pres: Presentation, max_new: int = 32, bound: int = 4000
) -> Presentation:
    """One bounded critical-pair pass; no confluence guarantee.

    Overlaps of oriented leading words are resolved both ways; any
    nonzero reduced difference joins the relation set, up to `max_new`
    additions.
    """
    relations = list(pres.relations)
    current = pres
    added = 0
    changed = True
    while changed and added < max_new:
        changed = False
        rules, _ = current.rules()
        leads = sorted(rules, key=current.alg.word_key)
        for u, v in itertools.product(leads, repeat=2):
            # proper overlap: a suffix of u equals a prefix of v
            for k in range(1, min(len(u), len(v))):
                if u[len(u) - k :] != v[:k]:
                    continue
                left = FreeStarPoly(current.alg, {u + v[k:]: GQ_ONE})
                ru = rules[u][0]
                rv = rules[v][0]
                red_u = ru * FreeStarPoly(current.alg, {v[k:]: GQ_ONE})
                red_v = FreeStarPoly(current.alg, {u[: len(u) - k]: GQ_ONE}) * rv
                s = normal_form(red_u - red_v, current, bound)
                if not s.poly.is_zero() and not s.exhausted:
                    relations.append(s.poly)
                    current = Presentation(current.alg, relations)
                    added += 1
                    changed = True
                    break
            if changed or added >= max_new:
                break
    return current
