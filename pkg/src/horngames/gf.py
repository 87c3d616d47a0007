"""Guarded-fragment formulas, guarded (Horn) simulation games, guarded tgds,
the hornGF <-> guarded-tgd translations, and a bounded oblivious chase.

Formulas are plain frozen dataclasses.  Quantifiers are guarded: the guard
atom must contain every free variable of the body.  Users may write
`forall x . phi` / `exists x . phi`; the parser inserts the equality guard
x=x and flags the formula as sugared.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .structures import CapExceeded, Structure, StructureError, Vocabulary


class GFSyntaxError(ValueError):
    pass


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GTop:
    def __str__(self):
        return "top"


@dataclass(frozen=True)
class GBot:
    def __str__(self):
        return "bot"


@dataclass(frozen=True)
class GEq:
    left: str
    right: str

    def __str__(self):
        return f"{self.left}={self.right}"


@dataclass(frozen=True)
class GAtom:
    pred: str
    args: Tuple[str, ...]

    def __str__(self):
        return f"{self.pred}({','.join(self.args)})"


@dataclass(frozen=True)
class GAnd:
    children: Tuple

    def __str__(self):
        return "(" + " & ".join(map(str, self.children)) + ")"


@dataclass(frozen=True)
class GOr:
    children: Tuple

    def __str__(self):
        return "(" + " | ".join(map(str, self.children)) + ")"


@dataclass(frozen=True)
class GNot:
    sub: object

    def __str__(self):
        return f"!{self.sub}"


@dataclass(frozen=True)
class GImplies:
    left: object
    right: object

    def __str__(self):
        return f"({self.left} -> {self.right})"


@dataclass(frozen=True)
class GExists:
    guard: object          # GAtom or GEq
    bound: Tuple[str, ...]
    body: object
    sugared: bool = False  # guard was inserted for an unguarded quantifier

    def __str__(self):
        return f"exists {' '.join(self.bound)} : {self.guard} . {self.body}"


@dataclass(frozen=True)
class GForall:
    guard: object
    bound: Tuple[str, ...]
    body: object
    sugared: bool = False

    def __str__(self):
        return f"forall {' '.join(self.bound)} : {self.guard} . {self.body}"


GFFormula = object  # alias for readability in signatures


def free_vars(phi) -> FrozenSet[str]:
    if isinstance(phi, (GTop, GBot)):
        return frozenset()
    if isinstance(phi, GEq):
        return frozenset({phi.left, phi.right})
    if isinstance(phi, GAtom):
        return frozenset(phi.args)
    if isinstance(phi, (GAnd, GOr)):
        out = frozenset()
        for c in phi.children:
            out |= free_vars(c)
        return out
    if isinstance(phi, GNot):
        return free_vars(phi.sub)
    if isinstance(phi, GImplies):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, (GExists, GForall)):
        return (free_vars(phi.guard) | free_vars(phi.body)) - frozenset(phi.bound)
    raise TypeError(f"not a GF formula node: {phi!r}")


def _check_guarded(phi) -> None:
    """Raise GFSyntaxError if some quantifier's guard misses a body variable."""
    if isinstance(phi, (GTop, GBot, GEq, GAtom)):
        return
    if isinstance(phi, (GAnd, GOr)):
        for c in phi.children:
            _check_guarded(c)
        return
    if isinstance(phi, GNot):
        _check_guarded(phi.sub)
        return
    if isinstance(phi, GImplies):
        _check_guarded(phi.left)
        _check_guarded(phi.right)
        return
    if isinstance(phi, (GExists, GForall)):
        gv = free_vars(phi.guard)
        if not free_vars(phi.body) <= gv:
            missing = sorted(free_vars(phi.body) - gv)
            raise GFSyntaxError(f"unguarded quantifier: {missing} not covered by {phi.guard}")
        if not set(phi.bound) <= gv:
            raise GFSyntaxError(f"bound variables {phi.bound} missing from guard {phi.guard}")
        _check_guarded(phi.body)
        return
    raise TypeError(f"not a GF formula node: {phi!r}")


def gf_depth(phi) -> int:
    """Nesting depth of guarded quantifiers."""
    if isinstance(phi, (GTop, GBot, GEq, GAtom)):
        return 0
    if isinstance(phi, (GAnd, GOr)):
        return max((gf_depth(c) for c in phi.children), default=0)
    if isinstance(phi, GNot):
        return gf_depth(phi.sub)
    if isinstance(phi, GImplies):
        return max(gf_depth(phi.left), gf_depth(phi.right))
    if isinstance(phi, (GExists, GForall)):
        return 1 + gf_depth(phi.body)
    raise TypeError(f"not a GF formula node: {phi!r}")


def is_gf_exists(phi) -> bool:
    """Positive existential guarded fragment: atoms, &, |, guarded exists."""
    if isinstance(phi, (GTop, GBot, GEq, GAtom)):
        return True
    if isinstance(phi, (GAnd, GOr)):
        return all(is_gf_exists(c) for c in phi.children)
    if isinstance(phi, GExists):
        return is_gf_exists(phi.body)
    return False


def is_horngf(phi) -> bool:
    """hornGF grammar: bot | top | x=y | R(xs) | phi & phi' | lambda -> phi |
    guarded exists | guarded forall, with lambda in GF-exists."""
    if isinstance(phi, (GTop, GBot, GEq, GAtom)):
        return True
    if isinstance(phi, GAnd):
        return all(is_horngf(c) for c in phi.children)
    if isinstance(phi, GImplies):
        return is_gf_exists(phi.left) and is_horngf(phi.right)
    if isinstance(phi, (GExists, GForall)):
        return is_horngf(phi.body)
    return False


def has_sugared_guard(phi) -> bool:
    if isinstance(phi, (GTop, GBot, GEq, GAtom)):
        return False
    if isinstance(phi, (GAnd, GOr)):
        return any(has_sugared_guard(c) for c in phi.children)
    if isinstance(phi, GNot):
        return has_sugared_guard(phi.sub)
    if isinstance(phi, GImplies):
        return has_sugared_guard(phi.left) or has_sugared_guard(phi.right)
    if isinstance(phi, (GExists, GForall)):
        return phi.sugared or has_sugared_guard(phi.guard) or has_sugared_guard(phi.body)
    raise TypeError


@dataclass
class GFClassification:
    is_gf: bool
    is_gf_exists: bool
    is_horngf: bool
    depth: int
    sugared_guards: bool


def classify_gf(phi) -> GFClassification:
    _check_guarded(phi)
    return GFClassification(True, is_gf_exists(phi), is_horngf(phi),
                            gf_depth(phi), has_sugared_guard(phi))


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(->|[()=.:,&|!]|[A-Za-z_][A-Za-z0-9_]*|\S)")


def _tokenize(text: str) -> List[str]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        tok = m.group(1)
        out.append(tok)
        pos = m.end()
    out.append("<end>")
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, expect=None):
        tok = self.toks[self.i]
        if expect is not None and tok != expect:
            raise GFSyntaxError(f"expected {expect!r}, got {tok!r} at token {self.i}")
        self.i += 1
        return tok

    def parse(self):
        phi = self.implication()
        if self.peek() != "<end>":
            raise GFSyntaxError(f"trailing input at token {self.i}: {self.peek()!r}")
        return phi

    def implication(self):
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            right = self.implication()
            return GImplies(left, right)
        return left

    def disjunction(self):
        parts = [self.conjunction()]
        while self.peek() == "|":
            self.take()
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else GOr(tuple(parts))

    def conjunction(self):
        parts = [self.unary()]
        while self.peek() == "&":
            self.take()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else GAnd(tuple(parts))

    def unary(self):
        tok = self.peek()
        if tok == "!":
            self.take()
            return GNot(self.unary())
        if tok == "(":
            self.take()
            phi = self.implication()
            self.take(")")
            return phi
        if tok in ("exists", "forall"):
            return self.quantifier()
        if tok == "top":
            self.take()
            return GTop()
        if tok == "bot":
            self.take()
            return GBot()
        return self.atom()

    def quantifier(self):
        kind = self.take()
        bound = []
        while re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", self.peek()):
            bound.append(self.take())
        if not bound:
            raise GFSyntaxError("quantifier without bound variables")
        sugared = False
        if self.peek() == ":":
            self.take(":")
            guard = self.atom()
        else:
            # omitted guard: equality-guard sugar, only for one variable
            if len(bound) != 1:
                raise GFSyntaxError("omitted guard allowed for a single variable only")
            guard = GEq(bound[0], bound[0])
            sugared = True
        self.take(".")
        body = self.implication()
        cls = GExists if kind == "exists" else GForall
        return cls(guard, tuple(bound), body, sugared)

    def atom(self):
        name = self.take()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
            raise GFSyntaxError(f"expected an atom, got {name!r}")
        if self.peek() == "(":
            self.take("(")
            args = []
            if self.peek() != ")":
                args.append(self.take())
                while self.peek() == ",":
                    self.take(",")
                    args.append(self.take())
            self.take(")")
            return GAtom(name, tuple(args))
        if self.peek() == "=":
            self.take("=")
            other = self.take()
            return GEq(name, other)
        # 0-ary predicate written bare
        return GAtom(name, ())


def parse_gf(text: str):
    phi = _Parser(text).parse()
    _check_guarded(phi)
    return phi


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _guard_matches(guard, s: Structure, asg: Dict[str, str], bound: Sequence[str]):
    """Yield extensions of `asg` over `bound` that satisfy the guard."""
    if isinstance(guard, GEq):
        names = [v for v in (guard.left, guard.right) if v in bound]
        fixed = {v: asg[v] for v in (guard.left, guard.right) if v in asg}
        for combo in itertools.product(s.domain, repeat=len(set(names))):
            ext = dict(asg)
            for v, e in zip(sorted(set(names)), combo):
                ext[v] = e
            l = ext.get(guard.left, fixed.get(guard.left))
            r = ext.get(guard.right, fixed.get(guard.right))
            if l == r and l is not None:
                yield ext
        return
    assert isinstance(guard, GAtom)
    for t in s.interpretation.get(guard.pred, set()):
        ext = dict(asg)
        ok = True
        for v, e in zip(guard.args, t):
            if v in ext and ext[v] != e:
                ok = False
                break
            ext[v] = e
        if ok:
            yield ext


def eval_gf(phi, s: Structure, assignment: Optional[Dict[str, str]] = None) -> bool:
    asg = assignment or {}
    missing = free_vars(phi) - set(asg)
    if missing:
        raise StructureError(f"unassigned free variables: {sorted(missing)}")
    return _eval(phi, s, asg)


def _eval(phi, s: Structure, asg: Dict[str, str]) -> bool:
    if isinstance(phi, GTop):
        return True
    if isinstance(phi, GBot):
        return False
    if isinstance(phi, GEq):
        return asg[phi.left] == asg[phi.right]
    if isinstance(phi, GAtom):
        return s.holds(phi.pred, tuple(asg[v] for v in phi.args))
    if isinstance(phi, GAnd):
        return all(_eval(c, s, asg) for c in phi.children)
    if isinstance(phi, GOr):
        return any(_eval(c, s, asg) for c in phi.children)
    if isinstance(phi, GNot):
        return not _eval(phi.sub, s, asg)
    if isinstance(phi, GImplies):
        return (not _eval(phi.left, s, asg)) or _eval(phi.right, s, asg)
    if isinstance(phi, GExists):
        for ext in _guard_matches(phi.guard, s, asg, phi.bound):
            if _eval(phi.body, s, ext):
                return True
        return False
    if isinstance(phi, GForall):
        for ext in _guard_matches(phi.guard, s, asg, phi.bound):
            if not _eval(phi.body, s, ext):
                return False
        return True
    raise TypeError(f"not a GF formula node: {phi!r}")


def gf_answers(phi, s: Structure) -> Set[Tuple[str, ...]]:
    """All assignments to the (sorted) free variables making phi true."""
    fv = sorted(free_vars(phi))
    out = set()
    for combo in itertools.product(s.domain, repeat=len(fv)):
        if _eval(phi, s, dict(zip(fv, combo))):
            out.add(combo)
    return out


# ---------------------------------------------------------------------------
# Guarded tuples and homomorphisms
# ---------------------------------------------------------------------------

def guarded_sets(s: Structure) -> Set[FrozenSet[str]]:
    out: Set[FrozenSet[str]] = {frozenset({e}) for e in s.domain}
    for pred, tuples in s.interpretation.items():
        if s.vocab.predicates[pred] == 0:
            continue
        for t in tuples:
            out.add(frozenset(t))
    return out


def is_guarded(s: Structure, t: Sequence[str]) -> bool:
    return frozenset(t) in guarded_sets(s)


def guarded_tuples(s: Structure, max_len: Optional[int] = None, cap: int = 200000,
                   allow_repeats: bool = False) -> List[Tuple[str, ...]]:
    """Guarded tuples of length <= max_len (default: max arity, at least 1).

    By default tuples are duplicate-free: a tuple with repeated elements
    carries the same information as its collapsed form, and link responses
    may still map distinct target positions to one source element.
    """
    if max_len is None:
        max_len = max(s.vocab.max_arity, 1)
    gsets = guarded_sets(s)
    out: List[Tuple[str, ...]] = []
    for gs in sorted(gsets, key=lambda fs: (len(fs), sorted(fs))):
        elems = sorted(gs)
        if len(elems) > max_len:
            continue
        if allow_repeats:
            candidates = (t for length in range(len(elems), max_len + 1)
                          for t in itertools.product(elems, repeat=length))
        else:
            candidates = itertools.permutations(elems)
        for t in candidates:
            if set(t) == gs:
                out.append(tuple(t))
                if len(out) > cap:
                    raise CapExceeded("too many guarded tuples")
    return out


def is_homomorphism(src: Structure, dst: Structure, mapping: Dict[str, str]) -> bool:
    """mapping is a homomorphism src|_dom(mapping) -> dst on all predicates."""
    dom = set(mapping)
    for pred, tuples in src.interpretation.items():
        for t in tuples:
            if set(t) <= dom:
                if tuple(mapping[e] for e in t) not in dst.interpretation[pred]:
                    return False
    return True


def _tuple_map(src_tuple: Sequence[str], dst_tuple: Sequence[str]) -> Optional[Dict[str, str]]:
    """The map src_i -> dst_i if well defined, else None."""
    m: Dict[str, str] = {}
    for a, b in zip(src_tuple, dst_tuple):
        if m.get(a, b) != b:
            return None
        m[a] = b
    return m


# ---------------------------------------------------------------------------
# Guarded simulation (characterizes GF-exists)
# ---------------------------------------------------------------------------

def _gsim_arena(A: Structure, B: Structure, extra_sets: Iterable[FrozenSet[str]] = ()):
    """All homomorphism positions p: S -> dom(B) with S a guarded set of A."""
    gsets = guarded_sets(A) | set(extra_sets)
    positions = []
    for S in sorted(gsets, key=lambda fs: (len(fs), sorted(fs))):
        elems = sorted(S)
        for image in itertools.product(B.domain, repeat=len(elems)):
            p = dict(zip(elems, image))
            if is_homomorphism(A, B, p):
                positions.append((S, tuple(sorted(p.items()))))
    return gsets, set(positions)


def gsim_table(A: Structure, B: Structure, depth: Optional[int] = None):
    """Greatest guarded simulation from A to B as a set of surviving map
    positions; `depth` bounds the rounds (None = run to stabilization)."""
    gsets, alive = _gsim_arena(A, B)
    gsets = sorted(gsets, key=lambda fs: (len(fs), sorted(fs)))
    by_set: Dict[FrozenSet[str], Set[Tuple]] = {}
    for S, p in alive:
        by_set.setdefault(S, set()).add(p)

    def compatible(p_items, q_items, overlap):
        pd, qd = dict(p_items), dict(q_items)
        return all(pd[e] == qd[e] for e in overlap)

    rounds = 0
    while depth is None or rounds < depth:
        dead = []
        for S, p in alive:
            ok = True
            for S2 in gsets:
                overlap = S & S2
                cands = by_set.get(S2, set())
                if not any((S2, q) in alive and compatible(p, q, overlap) for q in cands):
                    ok = False
                    break
            if not ok:
                dead.append((S, p))
        if not dead:
            break
        for pos in dead:
            alive.discard(pos)
        rounds += 1
    return alive


def gsim(A: Structure, a: Sequence[str], B: Structure, b: Sequence[str],
         depth: Optional[int] = None) -> bool:
    """A,a guarded-simulates into B,b (player 2 wins the guarded simulation
    game from the map a |-> b)."""
    a, b = tuple(a), tuple(b)
    if len(a) != len(b):
        raise StructureError("tuples must have equal length")
    if not is_guarded(A, a):
        raise StructureError(f"tuple {a} not guarded in the source structure")
    p = _tuple_map(a, b)
    if p is None:
        return False
    alive = gsim_table(A, B, depth)
    return (frozenset(a), tuple(sorted(p.items()))) in alive


# ---------------------------------------------------------------------------
# Links and guarded Horn simulation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Link:
    """A link (P, b): guarded target tuple b in B plus a nonempty set of
    homomorphisms from B|[b] into A, stored by their images of b."""
    target: Tuple[str, ...]
    maps: FrozenSet[Tuple[Tuple[str, str], ...]]  # each map as sorted item-tuples

    def images(self) -> FrozenSet[Tuple[str, ...]]:
        out = set()
        for m in self.maps:
            d = dict(m)
            out.add(tuple(d[e] for e in self.target))
        return frozenset(out)


def make_link(target: Sequence[str], images: Iterable[Sequence[str]]) -> Link:
    target = tuple(target)
    maps = set()
    for img in images:
        m = _tuple_map(target, tuple(img))
        if m is None:
            raise StructureError(f"image {tuple(img)} inconsistent with target {target}")
        maps.add(tuple(sorted(m.items())))
    if not maps:
        raise StructureError("a link needs at least one map")
    return Link(target, frozenset(maps))


def _atom_patterns(vocab: Vocabulary, tuple_len_limit: int):
    """(pred, arity) move alphabet.  Equality enters only as the reflexive
    single-variable atom (y=y), written "=1"; general x=y guards are
    substitution instances and add no moves."""
    pats = [(p, a) for p, a in sorted(vocab.predicates.items()) if 1 <= a <= tuple_len_limit]
    pats.append(("=1", 1))
    return [p for p in pats if p[1] <= tuple_len_limit]


def _pattern_tuples(s: Structure, pred: str, arity: int) -> Set[Tuple[str, ...]]:
    if pred == "=":
        return {(e, e) for e in s.domain}
    if pred == "=1":
        return {(e,) for e in s.domain}
    return set(s.interpretation[pred])


def _sub_anchor_tuples(base: Tuple[str, ...], length: int) -> List[Tuple[str, ...]]:
    """Anchor tuples over the elements of `base` with the given length."""
    elems = sorted(set(base))
    return list(itertools.product(elems, repeat=length))


def _suffix_moves(maps: List[Dict[str, str]], anchor: Tuple[str, ...], k0: int,
                  tuples_k: Set[Tuple[str, ...]]) -> List[Set[Tuple[str, ...]]]:
    """Minimal player-1 moves for an anchored atom pattern.

    A set Y is an R(anchor..y)-successor of the link when some common
    continuation tuple a exists with p(anchor)a in Y and R true at it for
    every map p; the minimal moves are the per-continuation witness families
    {p(anchor)a : p in maps}, and a response for one serves every superset.
    """
    imgs = [tuple(m[e] for e in anchor) for m in maps]
    suffixes = {t[k0:] for t in tuples_k if t[:k0] == imgs[0]}
    moves = []
    for suf in sorted(suffixes):
        family = set()
        ok = True
        for img in imgs:
            t = img + suf
            if t not in tuples_k:
                ok = False
                break
            family.add(t)
        if ok:
            moves.append(family)
    return moves


def _atom_h_ok(link: Link, A: Structure, B: Structure) -> bool:
    """(atom) for guarded Horn links: atoms (and equalities) true at every
    image must be true at the target."""
    tgt = link.target
    maps = [dict(m) for m in link.maps]
    elems = sorted(set(tgt))
    # equality
    for u, v in itertools.combinations(elems, 2):
        if all(m[u] == m[v] for m in maps):
            return False  # u != v in B but identified by every image
    for pred, ar in B.vocab.predicates.items():
        if ar == 0:
            continue
        for c in itertools.product(elems, repeat=ar):
            if all(tuple(m[e] for e in c) in A.interpretation[pred] for m in maps):
                if tuple(c) not in B.interpretation[pred]:
                    return False
    return True


class GuardedHornSolver:
    """Greatest-fixpoint solver for guarded Horn simulations between A and B.

    Link targets are restricted to guarded tuples of length <= ar(tau) plus
    the optional input link target (the normality bound); map sets per target
    are subsets of the guarded-simulation survivors from B into A.
    """

    def __init__(self, A: Structure, B: Structure,
                 extra_target: Optional[Tuple[str, ...]] = None,
                 depth: Optional[int] = None,
                 link_cap: int = 300000):
        self.A, self.B = A, B
        self.depth = depth
        ar = max(A.vocab.max_arity, 1)
        targets = guarded_tuples(B, max_len=ar)
        if extra_target is not None and extra_target not in targets:
            if not is_guarded(B, extra_target):
                raise StructureError(f"tuple {extra_target} not guarded")
            targets = targets + [extra_target]
        self.targets = targets
        # (sim) seed: guarded-simulation survivors from B into A, keyed by set
        self._stage_tables = self._make_stage_tables()
        self.alive = self._solve(link_cap)

    def _make_stage_tables(self):
        if self.depth is None:
            return [gsim_table(self.B, self.A, None)]
        return [gsim_table(self.B, self.A, k) for k in range(self.depth + 1)]

    def _candidate_maps(self, target, sim_alive) -> List[Tuple]:
        S = frozenset(target)
        return [p for (S2, p) in sim_alive if S2 == S]

    def _links_for(self, target, sim_alive, link_cap) -> List[Link]:
        cands = self._candidate_maps(target, sim_alive)
        links = []
        total = 0
        for r in range(1, len(cands) + 1):
            for combo in itertools.combinations(cands, r):
                link = Link(tuple(target), frozenset(combo))
                if _atom_h_ok(link, self.A, self.B):
                    links.append(link)
                total += 1
                if total > link_cap:
                    raise CapExceeded("guarded Horn link arena exceeds cap")
        return links

    def _forth_ok(self, link: Link, alive: Set[Link]) -> bool:
        A = self.A
        maps = [dict(m) for m in link.maps]
        ar_limit = max(A.vocab.max_arity, 1)
        for pred, k in _atom_patterns(A.vocab, ar_limit):
            tuples_k = _pattern_tuples(A, pred, k)
            for k0 in range(0, min(k, len(link.target)) + 1):
                for anchor in _sub_anchor_tuples(link.target, k0):
                    moves = _suffix_moves(maps, anchor, k0, tuples_k)
                    if not moves:
                        continue
                    seeds = [set(l.images()) for l in alive
                             if l.target[:k0] == anchor and len(l.target) == k]
                    for Y in moves:
                        if not any(sd <= Y for sd in seeds):
                            return False
        return True

    def _back_ok(self, link: Link, alive: Set[Link]) -> bool:
        maps = [dict(m) for m in link.maps]
        overlap_src = set(link.target)
        for target2 in self.targets:
            found = False
            for l2 in alive:
                if l2.target != tuple(target2):
                    continue
                shared = overlap_src & set(l2.target)
                ok = True
                for m2 in l2.maps:
                    d2 = dict(m2)
                    if not any(all(m[e] == d2[e] for e in shared) for m in maps):
                        ok = False
                        break
                if ok:
                    found = True
                    break
            if not found:
                return False
        return True

    def _solve(self, link_cap) -> Set[Link]:
        if self.depth is None:
            alive: Set[Link] = set()
            sim_alive = self._stage_tables[0]
            for t in self.targets:
                alive.update(self._links_for(t, sim_alive, link_cap))
            while True:
                dead = [l for l in alive
                        if not (self._forth_ok(l, alive) and self._back_ok(l, alive))]
                if not dead:
                    return alive
                alive.difference_update(dead)
        # staged: level 0 = atom+sim^0 links, level k+1 refines against level k
        level: Set[Link] = set()
        for t in self.targets:
            level.update(self._links_for(t, self._stage_tables[0], link_cap))
        for k in range(1, self.depth + 1):
            stage_k: Set[Link] = set()
            for t in self.targets:
                stage_k.update(self._links_for(t, self._stage_tables[k], link_cap))
            prev = level
            level = {l for l in stage_k
                     if self._forth_ok(l, prev) and self._back_ok(l, prev)}
        return level


def ghsim(A: Structure, X: Iterable[Sequence[str]], B: Structure, b: Sequence[str],
          depth: Optional[int] = None) -> bool:
    """Decide A,X <=_hornGF B,b by the guarded Horn simulation game, applying
    the canonical filter X0 = {a in X : gsim(B,b,A,a)} from the
    Ehrenfeucht-Fraisse proof."""
    b = tuple(b)
    X = [tuple(t) for t in X]
    if not X:
        raise StructureError("X must be nonempty")
    if not is_guarded(B, b):
        raise StructureError(f"target tuple {b} not guarded")
    for t in X:
        if len(t) != len(b):
            raise StructureError("tuples in X must match the target length")
        if not is_guarded(A, t):
            raise StructureError(f"tuple {t} not guarded in the source structure")
    solver = GuardedHornSolver(A, B, extra_target=b, depth=depth)
    sim_alive = solver._stage_tables[-1]
    maps = []
    for t in X:
        m = _tuple_map(b, t)
        if m is None:
            continue
        key = tuple(sorted(m.items()))
        if (frozenset(b), key) in sim_alive:
            maps.append(key)
    if not maps:
        return False
    link = Link(b, frozenset(maps))
    return link in solver.alive


def global_ghsim(A: Structure, B: Structure, depth: Optional[int] = None) -> bool:
    """Every guarded tuple of B (length <= ar(tau)) is the target of a
    surviving link.  This global notion extrapolates the TBox-level Horn
    simulation to hornGF and is used for inexpressibility demonstrations."""
    solver = GuardedHornSolver(A, B, depth=depth)
    covered = {l.target for l in solver.alive}
    return all(tuple(t) in covered for t in solver.targets)


def _close_links(Z: Iterable[Link]) -> List[Link]:
    """Close a link set under permutation of target coordinates.  Maps are
    element-keyed, so each reordering of a target carries the same map set;
    supplied relations are understood up to this closure."""
    out: Set[Link] = set()
    for link in Z:
        for perm in itertools.permutations(sorted(set(link.target))):
            out.add(Link(tuple(perm), link.maps))
    return sorted(out, key=lambda l: (len(l.target), l.target))


def check_ghsim_relation(Z: Iterable[Link], A: Structure, B: Structure,
                         max_back_len: Optional[int] = None) -> Tuple[bool, Optional[str]]:
    """Literal check of the guarded Horn simulation conditions for a supplied
    link set (closed under target permutation).  Back challenges are bounded
    by max(ar(tau), longest target)."""
    Z = _close_links(Z)
    Zset = set(Z)
    sim_alive = gsim_table(B, A, None)
    if max_back_len is None:
        max_back_len = max([max(A.vocab.max_arity, 1)] + [len(l.target) for l in Z])
    back_targets = guarded_tuples(B, max_len=max_back_len)
    solver = GuardedHornSolver.__new__(GuardedHornSolver)
    solver.A, solver.B = A, B
    for link in Z:
        if not link.maps:
            return False, f"link {link.target}: empty map set"
        for m in link.maps:
            if not is_homomorphism(B, A, {**dict(m)}):
                return False, f"link {link.target}: map {m} is not a homomorphism"
            if (frozenset(link.target), m) not in sim_alive:
                return False, f"link {link.target}: (sim) fails for map {m}"
        if not _atom_h_ok(link, A, B):
            return False, f"link {link.target}: (atom) fails"
        if not GuardedHornSolver._forth_ok(solver, link, Zset):
            return False, f"link {link.target}: (forth) fails"
        # back over the bounded challenge set
        maps = [dict(m) for m in link.maps]
        for t2 in back_targets:
            found = False
            for l2 in Z:
                if l2.target != t2:
                    continue
                shared = set(link.target) & set(t2)
                if all(any(all(m[e] == dict(m2)[e] for e in shared) for m in maps)
                       for m2 in l2.maps):
                    found = True
                    break
            if not found:
                return False, f"link {link.target}: (back) fails at {t2}"
    return True, None


def check_generalized_ghsim(parts: Sequence[Structure], Z: Iterable[Link],
                            B: Structure) -> Tuple[bool, Optional[str]]:
    """Literal check of the generalized guarded Horn simulation conditions
    between a family of structures and B (finite case)."""
    from .structures import disjoint_union
    A, mapping = disjoint_union(parts)
    part_of = {mapping[(k, e)]: k for k in range(len(parts)) for e in parts[k].domain}
    Z = _close_links(Z)
    Zset = set(Z)
    # per-part (sim)
    for link in Z:
        for m in link.maps:
            d = dict(m)
            img = tuple(d[e] for e in link.target)
            ks = {part_of[e] for e in img}
            if len(ks) != 1:
                return False, f"link {link.target}: image {img} crosses parts"
            k = ks.pop()
            back = {mapping[(k, e)]: e for e in parts[k].domain}
            local_img = tuple(back[e] for e in img)
            if not gsim(B, link.target, parts[k], local_img):
                return False, f"link {link.target}: (sim) fails for {img} in part {k}"
        if not _atom_h_ok(link, A, B):
            return False, f"link {link.target}: (atom) fails"
    # (back) as in the plain case
    ar = max(A.vocab.max_arity, 1)
    back_targets = guarded_tuples(B, max_len=max([ar] + [len(l.target) for l in Z]))
    for link in Z:
        maps = [dict(m) for m in link.maps]
        for t2 in back_targets:
            found = False
            for l2 in Z:
                if l2.target != t2:
                    continue
                shared = set(link.target) & set(t2)
                if all(any(all(m[e] == dict(m2)[e] for e in shared) for m in maps)
                       for m2 in l2.maps):
                    found = True
                    break
            if not found:
                return False, f"link {link.target}: (back) fails at {t2}"
    # (forth^gg): anchored moves as usual; unanchored moves must intersect all parts
    all_guarded = guarded_tuples(A, max_len=ar)
    by_part: Dict[Tuple[int, int], List[Tuple[str, ...]]] = {}
    for t in all_guarded:
        ks = {part_of[e] for e in t}
        if len(ks) == 1:
            by_part.setdefault((ks.pop(), len(t)), []).append(t)
    for link in Z:
        maps = [dict(m) for m in link.maps]
        for pred, k in _atom_patterns(A.vocab, ar):
            tuples_k = _pattern_tuples(A, pred, k)
            for k0 in range(0, min(k, len(link.target)) + 1):
                for anchor in _sub_anchor_tuples(link.target, k0):
                    moves = _suffix_moves(maps, anchor, k0, tuples_k)
                    if not moves:
                        continue
                    if k0 > 0:
                        seeds = [set(l.images()) for l in Z
                                 if l.target[:k0] == anchor and len(l.target) == k]
                        for Y in moves:
                            if not any(sd <= Y for sd in seeds):
                                return False, (f"link {link.target}: (forth) fails "
                                               f"at {pred}/{anchor}")
                    else:
                        # unanchored: player 1 must pad the move so that it
                        # intersects every part; any guarded tuples will do
                        seeds_any = [set(l.images()) for l in Z if len(l.target) == k]
                        pads = [by_part.get((i, k), []) for i in range(len(parts))]
                        if any(not p for p in pads):
                            continue
                        for Y0 in moves:
                            for pad in itertools.product(*pads):
                                Y = set(Y0) | set(pad)
                                if not any(sd <= Y for sd in seeds_any):
                                    return False, (f"link {link.target}: (forth-gg) "
                                                   f"fails at {pred}")
    return True, None


# ---------------------------------------------------------------------------
# Guarded tgds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TGD:
    """forall x,y (body -> exists z head); empty body means top, empty head
    means bottom.  Guardedness: some body atom contains all body variables."""
    body: Tuple[GAtom, ...]
    head: Tuple[GAtom, ...]
    exist: Tuple[str, ...] = ()

    def body_vars(self) -> Set[str]:
        out: Set[str] = set()
        for a in self.body:
            out.update(a.args)
        return out

    def head_vars(self) -> Set[str]:
        out: Set[str] = set()
        for a in self.head:
            out.update(a.args)
        return out

    def guard(self) -> Optional[GAtom]:
        bv = self.body_vars()
        for a in self.body:
            if set(a.args) >= bv:
                return a
        return None

    def is_guarded(self) -> bool:
        return not self.body or self.guard() is not None

    def validate(self):
        if not self.is_guarded():
            raise GFSyntaxError(f"tgd has no guard atom: {self}")
        if not self.head_vars() <= self.body_vars() | set(self.exist):
            raise GFSyntaxError(f"head variables escape frontier and existentials: {self}")

    def __str__(self):
        body = " & ".join(map(str, self.body)) if self.body else "top"
        head = " & ".join(map(str, self.head)) if self.head else "bot"
        ex = f"exists {' '.join(self.exist)} . " if self.exist else ""
        return f"{body} -> {ex}{head}"


def tgd_from_dict(doc: dict) -> TGD:
    def atoms(lst):
        return tuple(GAtom(a[0], tuple(a[1:])) for a in lst)
    t = TGD(atoms(doc.get("body", [])), atoms(doc.get("head", [])),
            tuple(doc.get("exist", [])))
    t.validate()
    return t


def tgd_to_dict(t: TGD) -> dict:
    return {"body": [[a.pred, *a.args] for a in t.body],
            "head": [[a.pred, *a.args] for a in t.head],
            "exist": list(t.exist)}


@dataclass(frozen=True)
class ConjunctiveQuery:
    atoms: Tuple[GAtom, ...]
    answer_vars: Tuple[str, ...]


def cq_answers(q: ConjunctiveQuery, s: Structure) -> Set[Tuple[str, ...]]:
    """Answers by homomorphism enumeration (backtracking over atoms)."""
    out: Set[Tuple[str, ...]] = set()
    atoms = sorted(q.atoms, key=lambda a: -len(a.args))

    def extend(i: int, asg: Dict[str, str]):
        if i == len(atoms):
            free = [v for v in q.answer_vars if v not in asg]
            for combo in itertools.product(s.domain, repeat=len(free)):
                full = dict(asg)
                full.update(zip(free, combo))
                out.add(tuple(full[v] for v in q.answer_vars))
            return
        a = atoms[i]
        for t in s.interpretation.get(a.pred, set()):
            ext = dict(asg)
            ok = True
            for v, e in zip(a.args, t):
                if ext.get(v, e) != e:
                    ok = False
                    break
                ext[v] = e
            if ok:
                extend(i + 1, ext)

    extend(0, {})
    return out


# ---------------------------------------------------------------------------
# hornGF -> guarded tgds
# ---------------------------------------------------------------------------

class _NameGen:
    def __init__(self, reserved: Set[str]):
        self.reserved = set(reserved)
        self.counter = {}

    def fresh(self, prefix: str) -> str:
        k = self.counter.get(prefix, 0)
        while True:
            name = f"{prefix}/{k}"
            k += 1
            if name not in self.reserved:
                self.counter[prefix] = k
                self.reserved.add(name)
                return name


def _ordered_free(phi) -> Tuple[str, ...]:
    return tuple(sorted(free_vars(phi)))


def horngf_to_tgds(phi, vocab: Vocabulary) -> Tuple[List[TGD], Vocabulary]:
    """Translate a hornGF sentence into an equisatisfiable set of guarded
    tgds over an extended vocabulary (fresh predicates are namespaced
    "__sub/k" and "__aux/k"; equality is eliminated via "__E")."""
    cls = classify_gf(phi)
    if not cls.is_horngf:
        raise GFSyntaxError("input is not a hornGF formula")
    if free_vars(phi):
        raise GFSyntaxError("input must be a sentence")
    for reserved in ("__E",):
        if reserved in vocab.predicates:
            raise GFSyntaxError(f"vocabulary already uses reserved name {reserved!r}")
    if any(p.startswith("__sub/") or p.startswith("__aux/") for p in vocab.predicates):
        raise GFSyntaxError("vocabulary clashes with generated predicate namespace")
    gen = _NameGen(set(vocab.predicates))
    preds: Dict[str, int] = dict(vocab.predicates)
    names: Dict[int, GAtom] = {}  # id(subformula) -> its R_phi atom
    rules: List[TGD] = []

    def rel_atom(psi) -> Optional[GAtom]:
        """R_psi; None encodes top, GAtom('__bot') encodes bottom."""
        if isinstance(psi, GTop):
            return None
        if isinstance(psi, GBot):
            return GAtom("__bot", ())
        if isinstance(psi, GAtom):
            return psi
        if isinstance(psi, GEq):
            return GAtom("=", (psi.left, psi.right))
        if id(psi) in names:
            return names[id(psi)]
        name = gen.fresh("__sub")
        fv = _ordered_free(psi)
        preds[name] = len(fv)
        atom = GAtom(name, fv)
        names[id(psi)] = atom
        return atom

    def add(body: List[Optional[GAtom]], head: List[Optional[GAtom]], exist=()):
        b = tuple(a for a in body if a is not None)
        if any(a.pred == "__bot" for a in b):
            return
        h = tuple(a for a in head if a is not None)
        if any(a.pred == "__bot" for a in h):
            h = ()
        rules.append(TGD(b, h, tuple(exist)))

    def walk_lambda(lam, guard: Optional[GAtom]):
        """Decomposition rules deriving R_lam for GF-exists subformulas."""
        if isinstance(lam, (GTop, GBot, GAtom, GEq)):
            return
        if isinstance(lam, GAnd):
            for c in lam.children:
                walk_lambda(c, guard)
            add([guard] + [rel_atom(c) for c in lam.children], [rel_atom(lam)])
            return
        if isinstance(lam, GOr):
            for c in lam.children:
                walk_lambda(c, guard)
                add([guard, rel_atom(c)], [rel_atom(lam)])
            return
        if isinstance(lam, GExists):
            g2 = lam.guard if isinstance(lam.guard, GAtom) else \
                GAtom("=", (lam.guard.left, lam.guard.right))
            walk_lambda(lam.body, g2)
            name = gen.fresh("__aux")
            fv = _ordered_free(lam)
            preds[name] = len(fv)
            r = GAtom(name, fv)
            add([g2, rel_atom(lam.body)], [r])
            add([guard, r], [rel_atom(lam)])
            return
        raise GFSyntaxError(f"not a GF-exists formula: {lam}")

    def walk(psi, guard: Optional[GAtom]):
        """Rules forcing R_psi -> psi for hornGF subformulas."""
        if isinstance(psi, (GTop, GBot, GAtom, GEq)):
            return
        if isinstance(psi, GAnd):
            for c in psi.children:
                add([rel_atom(psi)], [rel_atom(c)])
                walk(c, guard)
            return
        if isinstance(psi, GExists):
            g = psi.guard if isinstance(psi.guard, GAtom) else \
                GAtom("=", (psi.guard.left, psi.guard.right))
            name = gen.fresh("__aux")
            allv = _ordered_free(psi) + tuple(psi.bound)
            preds[name] = len(allv)
            r = GAtom(name, allv)
            add([rel_atom(psi)], [r], exist=psi.bound)
            add([r], [g])
            add([r], [rel_atom(psi.body)])
            walk(psi.body, g)
            return
        if isinstance(psi, GForall):
            g = psi.guard if isinstance(psi.guard, GAtom) else \
                GAtom("=", (psi.guard.left, psi.guard.right))
            add([g, rel_atom(psi)], [rel_atom(psi.body)])
            walk(psi.body, g)
            return
        if isinstance(psi, GImplies):
            add([rel_atom(psi), rel_atom(psi.left)], [rel_atom(psi.right)])
            walk_lambda(psi.left, guard)
            walk(psi.right, guard)
            return
        raise GFSyntaxError(f"not a hornGF formula: {psi}")

    top_atom = rel_atom(phi)
    add([], [top_atom])
    walk(phi, None)

    # equality elimination: substitute body equalities, turn head equalities
    # into __E plus congruence rules under every possible guard predicate
    def subst_atom(a: GAtom, ren: Dict[str, str]) -> GAtom:
        return GAtom(a.pred, tuple(ren.get(v, v) for v in a.args))

    stage1: List[TGD] = []
    for r in rules:
        ren: Dict[str, str] = {}
        body = []
        for a in r.body:
            if a.pred == "=":
                u, v = a.args
                u, v = ren.get(u, u), ren.get(v, v)
                if u != v:
                    for key in list(ren):
                        if ren[key] == v:
                            ren[key] = u
                    ren[v] = u
            else:
                body.append(a)
        body = [subst_atom(a, ren) for a in body]
        head = [subst_atom(a, ren) for a in r.head]
        exist = tuple(ren.get(v, v) for v in r.exist)
        stage1.append(TGD(tuple(body), tuple(head), exist))

    uses_eq = any(a.pred == "=" for r in stage1 for a in r.head)
    stage2: List[TGD] = []
    for r in stage1:
        head = tuple(GAtom("__E", a.args) if a.pred == "=" else a for a in r.head)
        stage2.append(TGD(r.body, head, r.exist))
    if uses_eq:
        preds["__E"] = 2
        for pred, ar in sorted(preds.items()):
            if ar < 1 or pred == "__E":
                continue
            xs = tuple(f"x{i}" for i in range(ar))
            g = GAtom(pred, xs)
            for i, j in itertools.combinations(range(ar), 2):
                e = GAtom("__E", (xs[i], xs[j]))
                stage2.append(TGD((g, e), (GAtom("__E", (xs[j], xs[i])),)))
                sub_ij = tuple(xs[j] if k == i else xs[k] for k in range(ar))
                sub_ji = tuple(xs[i] if k == j else xs[k] for k in range(ar))
                stage2.append(TGD((g, e), (GAtom(pred, sub_ij), GAtom(pred, sub_ji))))
                for k in range(ar):
                    if k != i and k != j:
                        e2 = GAtom("__E", (xs[j], xs[k]))
                        stage2.append(TGD((g, e, e2), (GAtom("__E", (xs[i], xs[k])),)))

    out = []
    for r in stage2:
        r.validate()
        out.append(r)
    return out, Vocabulary(preds)


def tgds_to_horngf(tgds: Sequence[TGD], vocab: Vocabulary):
    """Each full tgd splits into two hornGF sentences via a fresh head
    predicate; the result is their conjunction."""
    gen = _NameGen(set(vocab.predicates))
    preds = dict(vocab.predicates)
    sentences = []

    def close(body_atoms: Tuple[GAtom, ...], head):
        """forall-close `body -> head` using the tgd guard."""
        if not body_atoms:
            return head
        bv = sorted(set(v for a in body_atoms for v in a.args))
        guard = None
        for a in body_atoms:
            if set(a.args) >= set(bv):
                guard = a
                break
        if guard is None:
            raise GFSyntaxError("unguarded tgd")
        rest = tuple(a for a in body_atoms if a is not guard)
        inner = head if not rest else GImplies(_conj(rest), head)
        return GForall(guard, tuple(bv), inner)

    def _conj(atoms):
        if not atoms:
            return GTop()
        return atoms[0] if len(atoms) == 1 else GAnd(tuple(atoms))

    for t in tgds:
        t.validate()
        head_conj = GBot() if not t.head else _conj(t.head)
        if not t.exist:
            sentences.append(close(t.body, head_conj))
            continue
        frontier = tuple(sorted(t.body_vars() & t.head_vars()))
        name = gen.fresh("__aux")
        args = frontier + tuple(t.exist)
        preds[name] = len(args)
        r = GAtom(name, args)
        sentences.append(close(t.body, GExists(r, tuple(t.exist), GTop())))
        sentences.append(GForall(r, args, head_conj))
    phi = _conj(tuple(sentences)) if sentences else GTop()
    _check_guarded(phi)
    return phi, Vocabulary(preds)


# ---------------------------------------------------------------------------
# Oblivious chase and certain answers
# ---------------------------------------------------------------------------

# ---------------------------------------------------------------------------
# Bounded hornGF enumeration (oracle-grade)
# ---------------------------------------------------------------------------

def _formula_sig(phi, family: Sequence[Structure], var_names: Tuple[str, ...]):
    """Satisfying assignments of phi over the fixed variable universe, per
    structure; the dedup signature for enumeration."""
    sig = []
    for s in family:
        sat = set()
        for combo in itertools.product(s.domain, repeat=len(var_names)):
            if _eval(phi, s, dict(zip(var_names, combo))):
                sat.add(combo)
        sig.append(frozenset(sat))
    return tuple(sig)


def enum_horngf(vocab: Vocabulary, max_depth: int, family: Sequence[Structure],
                var_names: Tuple[str, ...] = ("v0", "v1"),
                size_cap: int = 60000) -> List[object]:
    """All hornGF formulas of quantifier depth <= max_depth over the given
    variable universe, one representative per answer signature across
    `family`.  Guards range over predicate atoms and the reflexive equality
    (y=y).  Test-oracle scale only.

    Signatures are bitmasks over the assignment grid, so the boolean closure
    runs on mask algebra; only quantified formulas are evaluated directly.
    """
    if not family:
        raise ValueError("enum_horngf needs a nonempty dedup family")
    grids = [list(itertools.product(s.domain, repeat=len(var_names))) for s in family]

    def eval_sig(phi):
        masks = []
        for s, grid in zip(family, grids):
            m = 0
            for k, combo in enumerate(grid):
                if _eval(phi, s, dict(zip(var_names, combo))):
                    m |= 1 << k
            masks.append(m)
        return tuple(masks)

    full = tuple((1 << len(g)) - 1 for g in grids)

    class Pool:
        """signature -> formula, with mask-level boolean combination."""

        def __init__(self):
            self.by_sig: Dict[Tuple[int, ...], object] = {}

        def add(self, phi, sig=None):
            g = sig if sig is not None else eval_sig(phi)
            if g not in self.by_sig:
                self.by_sig[g] = phi
                if len(self.by_sig) > size_cap:
                    raise CapExceeded(f"enum_horngf: more than {size_cap} signatures")
                return g
            return None

        def items(self):
            return list(self.by_sig.items())

    atoms: List[object] = [GTop(), GBot()]
    for p, ar in sorted(vocab.predicates.items()):
        for args in itertools.product(var_names, repeat=ar):
            atoms.append(GAtom(p, args))
    for u, v in itertools.combinations(var_names, 2):
        atoms.append(GEq(u, v))

    guards: List[Tuple[object, Tuple[str, ...]]] = []
    for p, ar in sorted(vocab.predicates.items()):
        if ar == 0:
            continue
        for args in itertools.product(var_names, repeat=ar):
            for rbound in range(1, len(set(args)) + 1):
                for bound in itertools.combinations(sorted(set(args)), rbound):
                    guards.append((GAtom(p, args), bound))
    for v in var_names:
        guards.append((GEq(v, v), (v,)))

    def close_bool(pool: Pool, with_or: bool, lam_items=None):
        frontier = pool.items()
        while frontier:
            new = []
            items = pool.items()
            for ga, a in frontier:
                for gb, b in items:
                    gc = tuple(x & y for x, y in zip(ga, gb))
                    got = pool.add(GAnd((a, b)), gc)
                    if got:
                        new.append((got, pool.by_sig[got]))
                    if with_or:
                        gd = tuple(x | y for x, y in zip(ga, gb))
                        got = pool.add(GOr((a, b)), gd)
                        if got:
                            new.append((got, pool.by_sig[got]))
                if lam_items is not None:
                    for gl, lam in lam_items:
                        gi = tuple((f & ~x) | y for f, x, y in zip(full, gl, ga))
                        got = pool.add(GImplies(lam, a), gi)
                        if got:
                            new.append((got, pool.by_sig[got]))
            frontier = new
        return pool

    # GF-exists pools per depth
    lpool = Pool()
    for a in atoms:
        lpool.add(a)
    close_bool(lpool, with_or=True)
    lpools = [lpool]
    for d in range(1, max_depth + 1):
        nxt = Pool()
        nxt.by_sig.update(lpools[-1].by_sig)
        for guard, bound in guards:
            gv = free_vars(guard)
            for _, body in lpools[-1].items():
                if free_vars(body) <= gv:
                    nxt.add(GExists(guard, bound, body))
        close_bool(nxt, with_or=True)
        lpools.append(nxt)

    # hornGF pools per depth
    hpool = Pool()
    for a in atoms:
        hpool.add(a)
    close_bool(hpool, with_or=False, lam_items=lpools[0].items())
    hpools = [hpool]
    for d in range(1, max_depth + 1):
        nxt = Pool()
        nxt.by_sig.update(hpools[-1].by_sig)
        for guard, bound in guards:
            gv = free_vars(guard)
            for _, body in hpools[-1].items():
                if free_vars(body) <= gv:
                    nxt.add(GExists(guard, bound, body))
                    nxt.add(GForall(guard, bound, body))
        close_bool(nxt, with_or=False, lam_items=lpools[d].items())
        hpools.append(nxt)
    return list(hpools[max_depth].by_sig.values())


def leq_horngf_by_enumeration(A: Structure, X: Sequence[Tuple[str, ...]],
                              B: Structure, b: Tuple[str, ...], depth: int,
                              size_cap: int = 60000) -> bool:
    """Oracle for A,X <=_hornGF^depth B,b via bounded enumeration."""
    b = tuple(b)
    X = [tuple(t) for t in X]
    m = len(b)
    var_names = tuple(f"v{i}" for i in range(max(m, 2)))
    qvars = var_names[:m]
    for phi in enum_horngf(A.vocab, depth, (A, B), var_names, size_cap):
        fv = free_vars(phi)
        if not fv <= set(qvars):
            continue
        if all(_eval(phi, A, dict(zip(qvars, t))) for t in X):
            if not _eval(phi, B, dict(zip(qvars, b))):
                return False
    return True


@dataclass
class ChaseResult:
    structure: Optional[Structure]
    cap_exceeded: bool
    inconsistent: bool
    steps: int


def chase(db: Structure, tgds: Sequence[TGD], step_cap: int = 2000) -> ChaseResult:
    """Oblivious chase with labeled nulls "_:k".  Every (tgd, body match)
    fires at most once; returns the fixpoint if reached within `step_cap`
    firings, else flags cap_exceeded."""
    for t in tgds:
        t.validate()
    facts: Dict[str, Set[Tuple[str, ...]]] = {p: set(ts) for p, ts in db.interpretation.items()}
    preds = dict(db.vocab.predicates)
    for t in tgds:
        for a in t.body + t.head:
            if preds.setdefault(a.pred, len(a.args)) != len(a.args):
                raise StructureError(f"arity clash for {a.pred!r} in tgds")
            facts.setdefault(a.pred, set())
    domain = list(db.domain)
    domset = set(domain)
    fired: Set[Tuple[int, Tuple[Tuple[str, str], ...]]] = set()
    nulls = 0
    steps = 0
    inconsistent = False

    def matches(atoms: Tuple[GAtom, ...]):
        def extend(i, asg):
            if i == len(atoms):
                yield dict(asg)
                return
            a = atoms[i]
            for t in facts.get(a.pred, set()):
                ext = dict(asg)
                ok = True
                for v, e in zip(a.args, t):
                    if ext.get(v, e) != e:
                        ok = False
                        break
                    ext[v] = e
                if ok:
                    yield from extend(i + 1, ext)
        yield from extend(0, {})

    changed = True
    while changed and not inconsistent:
        changed = False
        for ti, t in enumerate(tgds):
            for asg in list(matches(t.body)):
                key = (ti, tuple(sorted((v, asg[v]) for v in sorted(t.body_vars()))))
                if key in fired:
                    continue
                fired.add(key)
                steps += 1
                if steps > step_cap:
                    return ChaseResult(None, True, False, steps)
                if not t.head:
                    inconsistent = True
                    break
                ext = dict(asg)
                for z in t.exist:
                    ext[z] = f"_:{nulls}"
                    nulls += 1
                for a in t.head:
                    tup = tuple(ext[v] for v in a.args)
                    for e in tup:
                        if e not in domset:
                            domset.add(e)
                            domain.append(e)
                    if tup not in facts[a.pred]:
                        facts[a.pred].add(tup)
                        changed = True
            if inconsistent:
                break
    if not domain:
        domain = ["_:seed"]
    model = Structure(Vocabulary(preds), domain, facts)
    return ChaseResult(model, False, inconsistent, steps)


@dataclass
class CertainAnswers:
    answers: Optional[Set[Tuple[str, ...]]]
    status: str  # "exact" | "unknown" | "inconsistent"


def certain_answers(q: ConjunctiveQuery, db: Structure, tgds: Sequence[TGD],
                    step_cap: int = 2000) -> CertainAnswers:
    res = chase(db, tgds, step_cap)
    if res.cap_exceeded:
        return CertainAnswers(None, "unknown")
    if res.inconsistent:
        return CertainAnswers(None, "inconsistent")
    raw = cq_answers(q, res.structure)
    non_null = {t for t in raw if all(not e.startswith("_:") for e in t)}
    return CertainAnswers(non_null, "exact")
