"""ALC concept ASTs: parsing, fragment classification, evaluation, the
standard translation into the guarded fragment, characteristic concepts for
simulations, and a bounded enumeration used as a test oracle.

The nabla operator is syntactic sugar for (some R. top) & (all R. C) and is
expanded before NNF and before polarity computation.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from . import gf
from .structures import CapExceeded, Structure, StructureError, Vocabulary, iter_bits


class ConceptSyntaxError(ValueError):
    pass


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Top:
    def __str__(self):
        return "top"


@dataclass(frozen=True)
class Bot:
    def __str__(self):
        return "bot"


@dataclass(frozen=True)
class Name:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Not:
    sub: object

    def __str__(self):
        return f"!{_paren(self.sub)}"


@dataclass(frozen=True)
class And:
    children: Tuple

    def __str__(self):
        return " & ".join(_paren(c) for c in self.children)


@dataclass(frozen=True)
class Or:
    children: Tuple

    def __str__(self):
        return " | ".join(_paren(c) for c in self.children)


@dataclass(frozen=True)
class Implies:
    left: object
    right: object

    def __str__(self):
        return f"{_paren(self.left)} -> {_paren(self.right)}"


@dataclass(frozen=True)
class Exists:
    role: str
    sub: object

    def __str__(self):
        return f"some {self.role} . {_paren(self.sub)}"


@dataclass(frozen=True)
class Forall:
    role: str
    sub: object

    def __str__(self):
        return f"all {self.role} . {_paren(self.sub)}"


@dataclass(frozen=True)
class Nabla:
    role: str
    sub: object

    def __str__(self):
        return f"nabla {self.role} . {_paren(self.sub)}"


def _paren(c) -> str:
    if isinstance(c, (Top, Bot, Name, Not, Exists, Forall, Nabla)):
        return str(c)
    return f"({c})"


Concept = object


def make_and(children: Sequence) -> Concept:
    flat: List = []
    for c in children:
        if isinstance(c, And):
            flat.extend(c.children)
        else:
            flat.append(c)
    if not flat:
        return Top()
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def make_or(children: Sequence) -> Concept:
    flat: List = []
    for c in children:
        if isinstance(c, Or):
            flat.extend(c.children)
        else:
            flat.append(c)
    if not flat:
        return Bot()
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def depth(c: Concept) -> int:
    """Maximal nesting of role restrictions; nabla counts one level."""
    if isinstance(c, (Top, Bot, Name)):
        return 0
    if isinstance(c, Not):
        return depth(c.sub)
    if isinstance(c, (And, Or)):
        return max(depth(k) for k in c.children)
    if isinstance(c, Implies):
        return max(depth(c.left), depth(c.right))
    if isinstance(c, (Exists, Forall, Nabla)):
        return 1 + depth(c.sub)
    raise TypeError(f"not a concept: {c!r}")


def expand_nabla(c: Concept) -> Concept:
    if isinstance(c, (Top, Bot, Name)):
        return c
    if isinstance(c, Not):
        return Not(expand_nabla(c.sub))
    if isinstance(c, And):
        return And(tuple(expand_nabla(k) for k in c.children))
    if isinstance(c, Or):
        return Or(tuple(expand_nabla(k) for k in c.children))
    if isinstance(c, Implies):
        return Implies(expand_nabla(c.left), expand_nabla(c.right))
    if isinstance(c, Exists):
        return Exists(c.role, expand_nabla(c.sub))
    if isinstance(c, Forall):
        return Forall(c.role, expand_nabla(c.sub))
    if isinstance(c, Nabla):
        sub = expand_nabla(c.sub)
        return And((Exists(c.role, Top()), Forall(c.role, sub)))
    raise TypeError(f"not a concept: {c!r}")


def nnf(c: Concept) -> Concept:
    """Negation normal form; -> is rewritten, nabla expanded first."""
    return _nnf(expand_nabla(c), False)


def _nnf(c: Concept, neg: bool) -> Concept:
    if isinstance(c, Top):
        return Bot() if neg else Top()
    if isinstance(c, Bot):
        return Top() if neg else Bot()
    if isinstance(c, Name):
        return Not(c) if neg else c
    if isinstance(c, Not):
        return _nnf(c.sub, not neg)
    if isinstance(c, And):
        kids = tuple(_nnf(k, neg) for k in c.children)
        return Or(kids) if neg else And(kids)
    if isinstance(c, Or):
        kids = tuple(_nnf(k, neg) for k in c.children)
        return And(kids) if neg else Or(kids)
    if isinstance(c, Implies):
        if neg:
            return And((_nnf(c.left, False), _nnf(c.right, True)))
        return make_or([_nnf(c.left, True), _nnf(c.right, False)])
    if isinstance(c, Exists):
        return Forall(c.role, _nnf(c.sub, True)) if neg else Exists(c.role, _nnf(c.sub, False))
    if isinstance(c, Forall):
        return Exists(c.role, _nnf(c.sub, True)) if neg else Forall(c.role, _nnf(c.sub, False))
    raise TypeError(f"not a concept: {c!r}")


# ---------------------------------------------------------------------------
# Parser: top, bot, names, !C, &, |, -> (right assoc, lowest), some/all/nabla
# ---------------------------------------------------------------------------

_CTOKEN = re.compile(r"\s*(->|<=|[()&|!.]|[A-Za-z_][A-Za-z0-9_]*|\S)")


class _CParser:
    def __init__(self, text: str):
        self.toks = []
        pos = 0
        while pos < len(text):
            m = _CTOKEN.match(text, pos)
            if not m:
                break
            self.toks.append(m.group(1))
            pos = m.end()
        self.toks.append("<end>")
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, expect=None):
        tok = self.toks[self.i]
        if expect is not None and tok != expect:
            raise ConceptSyntaxError(f"expected {expect!r} at token {self.i}, got {tok!r}")
        self.i += 1
        return tok

    def parse(self):
        c = self.implication()
        if self.peek() != "<end>":
            raise ConceptSyntaxError(f"trailing input at token {self.i}: {self.peek()!r}")
        return c

    def implication(self):
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        parts = [self.conjunction()]
        while self.peek() == "|":
            self.take()
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self):
        parts = [self.unary()]
        while self.peek() == "&":
            self.take()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self):
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok == "(":
            self.take()
            c = self.implication()
            self.take(")")
            return c
        if tok in ("some", "all", "nabla"):
            self.take()
            role = self.take()
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", role):
                raise ConceptSyntaxError(f"bad role name {role!r}")
            self.take(".")
            sub = self.unary()
            return {"some": Exists, "all": Forall, "nabla": Nabla}[tok](role, sub)
        if tok == "top":
            self.take()
            return Top()
        if tok == "bot":
            self.take()
            return Bot()
        if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok):
            self.take()
            return Name(tok)
        raise ConceptSyntaxError(f"unexpected token {tok!r} at {self.i}")


def parse_concept(text: str) -> Concept:
    return _CParser(text).parse()


TBox = List[Tuple[Concept, Concept]]


def parse_tbox(text: str) -> TBox:
    """One inclusion `C <= D` per line; '#' starts a comment."""
    out: TBox = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "<=" not in line:
            raise ConceptSyntaxError(f"line {lineno}: expected 'C <= D'")
        l, r = line.split("<=", 1)
        out.append((parse_concept(l), parse_concept(r)))
    return out


def tbox_depth(t: TBox) -> int:
    return max((max(depth(c), depth(d)) for c, d in t), default=0)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def eval_concept(c: Concept, s: Structure) -> int:
    """Extension of c in s as a bitmask over the domain order."""
    if isinstance(c, Top):
        return s.full_mask
    if isinstance(c, Bot):
        return 0
    if isinstance(c, Name):
        return s.unary_mask(c.name)
    if isinstance(c, Not):
        return s.full_mask & ~eval_concept(c.sub, s)
    if isinstance(c, And):
        m = s.full_mask
        for k in c.children:
            m &= eval_concept(k, s)
        return m
    if isinstance(c, Or):
        m = 0
        for k in c.children:
            m |= eval_concept(k, s)
        return m
    if isinstance(c, Implies):
        return (s.full_mask & ~eval_concept(c.left, s)) | eval_concept(c.right, s)
    if isinstance(c, Exists):
        sub = eval_concept(c.sub, s)
        m = 0
        for i in range(len(s.domain)):
            if s.succ_mask(c.role, i) & sub:
                m |= 1 << i
        return m
    if isinstance(c, Forall):
        sub = eval_concept(c.sub, s)
        m = 0
        for i in range(len(s.domain)):
            if not (s.succ_mask(c.role, i) & ~sub):
                m |= 1 << i
        return m
    if isinstance(c, Nabla):
        return eval_concept(expand_nabla(c), s)
    raise TypeError(f"not a concept: {c!r}")


def eval_tbox(t: TBox, s: Structure) -> bool:
    return all(eval_concept(c, s) & ~eval_concept(d, s) == 0 for c, d in t)


# ---------------------------------------------------------------------------
# Fragment classification
# ---------------------------------------------------------------------------

def is_el(c: Concept) -> bool:
    if isinstance(c, (Top, Name)):
        return True
    if isinstance(c, And):
        return all(is_el(k) for k in c.children)
    if isinstance(c, Exists):
        return is_el(c.sub)
    return False


def is_elu(c: Concept) -> bool:
    if isinstance(c, (Top, Name)):
        return True
    if isinstance(c, (And, Or)):
        return all(is_elu(k) for k in c.children)
    if isinstance(c, Exists):
        return is_elu(c.sub)
    return False


def is_elu_nabla(c: Concept) -> bool:
    if isinstance(c, (Top, Name)):
        return True
    if isinstance(c, (And, Or)):
        return all(is_elu_nabla(k) for k in c.children)
    if isinstance(c, (Exists, Nabla)):
        return is_elu_nabla(c.sub)
    return False


def _is_horn(c: Concept, left_ok) -> bool:
    if isinstance(c, (Top, Bot, Name)):
        return True
    if isinstance(c, And):
        return all(_is_horn(k, left_ok) for k in c.children)
    if isinstance(c, Implies):
        return left_ok(c.left) and _is_horn(c.right, left_ok)
    if isinstance(c, (Exists, Forall)):
        return _is_horn(c.sub, left_ok)
    return False


def is_hornalc(c: Concept) -> bool:
    return _is_horn(c, is_elu)


def is_hornalc_nabla(c: Concept) -> bool:
    return _is_horn(c, is_elu_nabla)


def polarity(c: Concept) -> Tuple[int, int]:
    """(pl+, pl-) per the polarity table, on the general form."""
    if isinstance(c, (Top, Bot)):
        return (0, 0)
    if isinstance(c, Name):
        return (1, 0)
    if isinstance(c, Not):
        p, m = polarity(c.sub)
        return (m, p)
    if isinstance(c, And):
        ps = [polarity(k) for k in c.children]
        return (max(p for p, _ in ps), sum(m for _, m in ps))
    if isinstance(c, Or):
        ps = [polarity(k) for k in c.children]
        return (sum(p for p, _ in ps), max(m for _, m in ps))
    if isinstance(c, Implies):
        lp, lm = polarity(c.left)
        rp, rm = polarity(c.right)
        return (lm + rp, max(lp, rm))
    if isinstance(c, Exists):
        p, m = polarity(c.sub)
        return (max(1, p), m)
    if isinstance(c, Forall):
        p, m = polarity(c.sub)
        return (p, max(1, m))
    if isinstance(c, Nabla):
        return polarity(expand_nabla(c))
    raise TypeError(f"not a concept: {c!r}")


def _is_sturm_base(c: Concept) -> bool:
    """H_b ::= bot | !A | H_b & H_b | H_b | H_b | all R. H_b"""
    if isinstance(c, Bot):
        return True
    if isinstance(c, Not) and isinstance(c.sub, Name):
        return True
    if isinstance(c, (And, Or)):
        return all(_is_sturm_base(k) for k in c.children)
    if isinstance(c, Forall):
        return _is_sturm_base(c.sub)
    return False


def is_s_horn(c: Concept) -> bool:
    """Smallest set containing H_b and concept names, closed under &, some,
    all, and disjunctions where one side is in H_b."""
    if _is_sturm_base(c) or isinstance(c, Name):
        return True
    if isinstance(c, And):
        return all(is_s_horn(k) for k in c.children)
    if isinstance(c, (Exists, Forall)):
        return is_s_horn(c.sub)
    if isinstance(c, Or):
        if len(c.children) != 2:
            # n-ary disjunction: fold left
            folded = Or((c.children[0], make_or(list(c.children[1:]))))
            return is_s_horn(folded)
        l, r = c.children
        return (is_s_horn(l) and is_s_horn(r)
                and (_is_sturm_base(l) or _is_sturm_base(r)))
    return False


def _is_nguyen_pos(c: Concept) -> bool:
    if isinstance(c, (Top, Bot, Name)):
        return True
    if isinstance(c, (And, Or)):
        return all(_is_nguyen_pos(k) for k in c.children)
    if isinstance(c, (Exists, Forall)):
        return _is_nguyen_pos(c.sub)
    return False


def is_n_horn(c: Concept) -> bool:
    """G ::= A | !P | G & G | some R.G | all R.G | P -> G with positive P."""
    if isinstance(c, Name):
        return True
    if isinstance(c, Not):
        return _is_nguyen_pos(c.sub)
    if isinstance(c, And):
        return all(is_n_horn(k) for k in c.children)
    if isinstance(c, (Exists, Forall)):
        return is_n_horn(c.sub)
    if isinstance(c, Implies):
        return _is_nguyen_pos(c.left) and is_n_horn(c.right)
    return False


@dataclass
class FragmentReport:
    is_EL: bool
    is_ELU: bool
    is_ELU_nabla: bool
    is_hornALC: bool
    is_hornALC_nabla: bool
    is_p_horn: bool
    is_s_horn: bool
    is_n_horn: bool
    pol_plus: int
    pol_minus: int


def classify(c: Concept) -> FragmentReport:
    p, m = polarity(c)
    return FragmentReport(
        is_EL=is_el(c),
        is_ELU=is_elu(c),
        is_ELU_nabla=is_elu_nabla(c),
        is_hornALC=is_hornalc(c),
        is_hornALC_nabla=is_hornalc_nabla(c),
        is_p_horn=p <= 1,
        is_s_horn=is_s_horn(c),
        is_n_horn=is_n_horn(c),
        pol_plus=p,
        pol_minus=m,
    )


# ---------------------------------------------------------------------------
# sH: p-horn (NNF) -> hornALC
# ---------------------------------------------------------------------------

def _pol_nnf(c: Concept) -> int:
    if isinstance(c, (Top, Bot)):
        return 0
    if isinstance(c, Not):
        return 0  # NNF: negation on atoms only
    if isinstance(c, Name):
        return 1
    if isinstance(c, And):
        return max(_pol_nnf(k) for k in c.children)
    if isinstance(c, Or):
        return sum(_pol_nnf(k) for k in c.children)
    if isinstance(c, Exists):
        return max(1, _pol_nnf(c.sub))
    if isinstance(c, Forall):
        return _pol_nnf(c.sub)
    raise ConceptSyntaxError(f"not in NNF: {c}")


def _simplify_elu(c: Concept) -> Concept:
    """Fold top/bot constants so negated zero-polarity concepts land in ELU."""
    if isinstance(c, And):
        kids = [_simplify_elu(k) for k in c.children]
        kids = [k for k in kids if not isinstance(k, Top)]
        if any(isinstance(k, Bot) for k in kids):
            return Bot()
        return make_and(kids)
    if isinstance(c, Or):
        kids = [_simplify_elu(k) for k in c.children]
        kids = [k for k in kids if not isinstance(k, Bot)]
        if any(isinstance(k, Top) for k in kids):
            return Top()
        return make_or(kids)
    if isinstance(c, Exists):
        sub = _simplify_elu(c.sub)
        return Bot() if isinstance(sub, Bot) else Exists(c.role, sub)
    return c


def to_horn(c: Concept) -> Concept:
    """The sH translation: an equivalent hornALC concept for a p-horn
    concept in NNF."""
    if _pol_nnf(c) > 1:
        raise ConceptSyntaxError("to_horn requires a p-horn concept (pol <= 1)")
    return _sh(c)


def _sh(c: Concept) -> Concept:
    if isinstance(c, (Top, Bot, Name)):
        return c
    if isinstance(c, Not):
        if isinstance(c.sub, Name):
            return Implies(c.sub, Bot())
        raise ConceptSyntaxError(f"not in NNF: {c}")
    if isinstance(c, And):
        return make_and([_sh(k) for k in c.children])
    if isinstance(c, Or):
        pos = [k for k in c.children if _pol_nnf(k) >= 1]
        if len(pos) > 1 or (pos and _pol_nnf(pos[0]) > 1):
            raise ConceptSyntaxError("not p-horn: positive part too heavy")
        if pos:
            d = pos[0]
            rest = [k for k in c.children if k is not d]
        else:
            d = Bot()
            rest = list(c.children)
        c_or = make_or(rest)
        left = _simplify_elu(_nnf(c_or, True))
        if isinstance(left, Bot):
            return Top()
        if not is_elu(left):
            raise ConceptSyntaxError(f"negated remainder is not ELU: {left}")
        return Implies(left, _sh(d))
    if isinstance(c, Exists):
        return Exists(c.role, _sh(c.sub))
    if isinstance(c, Forall):
        return Forall(c.role, _sh(c.sub))
    raise ConceptSyntaxError(f"not in NNF: {c}")


# ---------------------------------------------------------------------------
# Standard translation
# ---------------------------------------------------------------------------

def std_translation(c: Concept, var: str = "x") -> object:
    """The dagger translation into GF with one free variable."""
    return _std(expand_nabla(c), var, 0)


def _std(c: Concept, var: str, level: int):
    if isinstance(c, Top):
        return gf.GEq(var, var)
    if isinstance(c, Bot):
        return gf.GNot(gf.GEq(var, var))
    if isinstance(c, Name):
        return gf.GAtom(c.name, (var,))
    if isinstance(c, Not):
        return gf.GNot(_std(c.sub, var, level))
    if isinstance(c, And):
        return gf.GAnd(tuple(_std(k, var, level) for k in c.children))
    if isinstance(c, Or):
        return gf.GOr(tuple(_std(k, var, level) for k in c.children))
    if isinstance(c, Implies):
        return gf.GImplies(_std(c.left, var, level), _std(c.right, var, level))
    if isinstance(c, Exists):
        y = f"y{level}"
        return gf.GExists(gf.GAtom(c.role, (var, y)), (y,), _std(c.sub, y, level + 1))
    if isinstance(c, Forall):
        y = f"y{level}"
        return gf.GForall(gf.GAtom(c.role, (var, y)), (y,), _std(c.sub, y, level + 1))
    raise TypeError(f"not a concept: {c!r}")


# ---------------------------------------------------------------------------
# Characteristic EL concepts for the simulation game
# ---------------------------------------------------------------------------

def char_el(s: Structure, level: int, a: str) -> Concept:
    """An EL concept of depth <= level whose extension in any structure is
    exactly the set of level-round simulation targets of (s, a)."""
    i = s.index(a)
    memo: Dict[Tuple[int, int], Concept] = {}

    def lam(k: int, j: int) -> Concept:
        if (k, j) in memo:
            return memo[(k, j)]
        conjuncts: List[Concept] = [Name(p) for p in s.vocab.concept_names()
                                    if s.unary_mask(p) >> j & 1]
        if k > 0:
            for r in s.vocab.role_names():
                for j2 in iter_bits(s.succ_mask(r, j)):
                    conjuncts.append(Exists(r, lam(k - 1, j2)))
        seen = []
        for c in conjuncts:
            if c not in seen:
                seen.append(c)
        out = make_and(seen)
        memo[(k, j)] = out
        return out

    return lam(level, i)


# ---------------------------------------------------------------------------
# Bounded concept enumeration (oracle-grade)
# ---------------------------------------------------------------------------

FRAGMENTS = ("EL", "ELU", "ELU_nabla", "hornALC", "hornALC_nabla")


def enum_concepts(fragment: str, vocab: Vocabulary, level: int,
                  size_cap: int = 4000,
                  dedup_family: Sequence[Structure] = ()) -> List[Concept]:
    """All concepts of the fragment up to depth `level`, one representative
    per extension signature across `dedup_family`.

    Saturates each depth level under the fragment's constructors until the
    signature set stabilizes, so relative to the family the result is
    semantically complete for the fragment at this depth.  Raises
    CapExceeded when more than `size_cap` distinct signatures appear.
    """
    if fragment not in FRAGMENTS:
        raise ValueError(f"unknown fragment {fragment!r}; expected one of {FRAGMENTS}")
    if not dedup_family:
        raise ValueError("enum_concepts needs a nonempty dedup family")

    def sig(c: Concept) -> Tuple[int, ...]:
        return tuple(eval_concept(c, s) for s in dedup_family)

    names = [Name(n) for n in vocab.concept_names()]
    roles = vocab.role_names()
    with_or = fragment in ("ELU", "ELU_nabla", "hornALC", "hornALC_nabla")
    with_nabla = fragment in ("ELU_nabla", "hornALC_nabla")
    horn = fragment in ("hornALC", "hornALC_nabla")

    def saturate(pool: Dict[Tuple, Concept], combiners) -> Dict[Tuple, Concept]:
        work = True
        while work:
            work = False
            items = list(pool.values())
            for combine in combiners:
                for c in combine(items):
                    g = sig(c)
                    if g not in pool:
                        pool[g] = c
                        work = True
                        if len(pool) > size_cap:
                            raise CapExceeded(
                                f"enum_concepts: more than {size_cap} signatures")
        return pool

    def pairs_and(items):
        for a, b in itertools.combinations(items, 2):
            yield make_and([a, b])

    def pairs_or(items):
        for a, b in itertools.combinations(items, 2):
            yield make_or([a, b])

    # left-hand-side pool (EL / ELU / ELU-nabla)
    def lhs_level(prev: Optional[Dict[Tuple, Concept]]) -> Dict[Tuple, Concept]:
        pool: Dict[Tuple, Concept] = {}
        base: List[Concept] = [Top()] + names
        if prev is not None:
            for c in prev.values():
                for r in roles:
                    base.append(Exists(r, c))
                    if with_nabla:
                        base.append(Nabla(r, c))
        for c in base:
            pool.setdefault(sig(c), c)
        combiners = [pairs_and] + ([pairs_or] if with_or else [])
        return saturate(pool, combiners)

    lhs_levels: List[Dict[Tuple, Concept]] = [lhs_level(None)]
    for _ in range(level):
        lhs_levels.append(lhs_level(lhs_levels[-1]))
    if not horn:
        return list(lhs_levels[level].values())

    def horn_level(prev: Optional[Dict[Tuple, Concept]],
                   lhs: Dict[Tuple, Concept]) -> Dict[Tuple, Concept]:
        pool: Dict[Tuple, Concept] = {}
        base: List[Concept] = [Top(), Bot()] + names
        if prev is not None:
            for c in prev.values():
                for r in roles:
                    base.append(Exists(r, c))
                    base.append(Forall(r, c))
        for c in base:
            pool.setdefault(sig(c), c)
        lhs_items = list(lhs.values())

        def implications(items):
            for l in lhs_items:
                for h in items:
                    yield Implies(l, h)

        return saturate(pool, [pairs_and, implications])

    horn_levels: List[Dict[Tuple, Concept]] = [horn_level(None, lhs_levels[0])]
    for d in range(1, level + 1):
        horn_levels.append(horn_level(horn_levels[-1], lhs_levels[d]))
    return list(horn_levels[level].values())


def leq_by_enumeration(fragment: str, A: Structure, x_mask: int,
                       B: Structure, b: str, level: int,
                       size_cap: int = 4000) -> bool:
    """Oracle for A,X <=_fragment^level B,b: every enumerated concept true on
    all of X is true at b."""
    j = B.index(b)
    for c in enum_concepts(fragment, A.vocab, level, size_cap, (A, B)):
        if eval_concept(c, A) & x_mask == x_mask and not (eval_concept(c, B) >> j & 1):
            return False
    return True
