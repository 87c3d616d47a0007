"""User-facing deciders built on the game solvers: entailment, equivalence,
TBox-level variants, concept learning by example, separating-concept
synthesis, the hardness-reduction constructors, and a toy-scale test for
equivalence to a Horn concept.

Separator synthesis follows the staged game: a failed position is analyzed
into an atom, forth, or back failure and the recursion assembles the
separating concept from characteristic concepts of the target side.  Every
returned concept is re-verified by evaluation before being reported.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .concepts import (And, Bot, Concept, Exists, Forall, Implies, Name, Not, Or,
                       Top, char_el, classify, depth as concept_depth, enum_concepts,
                       eval_concept, expand_nabla, make_and, nnf, to_horn)
from .games import (GameVerdict, HornSolver, global_hornsim, hornsim,
                    simulation_table)
from .structures import (CapExceeded, Structure, StructureError, Vocabulary,
                         disjoint_union, elems_from_mask, iter_bits,
                         mask_from_elems)


# ---------------------------------------------------------------------------
# Entailment / equivalence
# ---------------------------------------------------------------------------

def entails(A: Structure, a: str, B: Structure, b: str,
            depth: Optional[int] = None, variant: str = "horn") -> bool:
    """A,a <=_hornALC(^depth) B,b via the Horn simulation game."""
    return hornsim(A, {a}, B, b, depth=depth, variant=variant,
                   want_witness=False).holds


def entails_set(A: Structure, X, B: Structure, b: str,
                depth: Optional[int] = None, variant: str = "horn") -> bool:
    """A,X <=_hornALC(^depth) B,b: filter X to the canonical candidate
    X0 = {a in X : B,b simulates into A,a} and play from (X0, b); empty X0
    means the characteristic implication to bottom separates."""
    x_mask = X if isinstance(X, int) else mask_from_elems(A, X)
    if x_mask == 0:
        raise StructureError("X must be nonempty")
    solver = HornSolver(A, B, variant=variant, depth=depth)
    sim_table = solver.sim_stages[-1]
    j = B.index(b)
    x0 = x_mask & sim_table[j]
    if x0 == 0:
        return False
    return solver.holds(x0, j)


def equiv(A: Structure, a: str, B: Structure, b: str,
          depth: Optional[int] = None) -> bool:
    return entails(A, a, B, b, depth) and entails(B, b, A, a, depth)


def tbox_entails(A: Structure, B: Structure, depth: Optional[int] = None) -> bool:
    """A <=_hornALC(^depth) B on the TBox level (global Horn simulation)."""
    return global_hornsim(A, B, depth=depth)


def tbox_equiv(A: Structure, B: Structure, depth: Optional[int] = None) -> bool:
    return tbox_entails(A, B, depth) and tbox_entails(B, A, depth)


# ---------------------------------------------------------------------------
# Concept learning by example
# ---------------------------------------------------------------------------

@dataclass
class CBEInstance:
    structure: Structure
    positives: Set[str]
    negatives: Set[str]

    def __post_init__(self):
        if not self.positives:
            raise StructureError("positive examples must be nonempty")
        if self.positives & self.negatives:
            raise StructureError("positive and negative examples overlap")
        for e in self.positives | self.negatives:
            self.structure.index(e)


def cbe(inst: CBEInstance, depth: Optional[int] = None) -> bool:
    """Is there a hornALC concept true on all positives and no negative?
    Yes iff no negative is Horn-simulation-entailed by the positive set."""
    A = inst.structure
    return all(not entails_set(A, inst.positives, A, b, depth)
               for b in inst.negatives)


# ---------------------------------------------------------------------------
# Separator synthesis
# ---------------------------------------------------------------------------

@dataclass
class SeparatorResult:
    concept: Optional[Concept]
    verified: bool


def _verify_separator(c: Concept, A: Structure, x_mask: int, B: Structure, j: int) -> bool:
    return (eval_concept(c, A) & x_mask == x_mask
            and not (eval_concept(c, B) >> j & 1))


def _sep_from_stages(solver: HornSolver, A: Structure, B: Structure,
                     x_mask: int, j: int, k: int) -> Optional[Concept]:
    """Extract a separating hornALC concept of depth <= k for a position with
    no surviving subset at stage k (None if the analysis stalls)."""
    lam = char_el(B, k, B.domain[j])
    x_f = x_mask & solver.sim_stages[min(k, len(solver.sim_stages) - 1)][j]
    if x_f == 0:
        return Implies(lam, Bot())
    for p in A.vocab.concept_names():
        if x_f & ~A.unary_mask(p) == 0 and not (B.unary_mask(p) >> j & 1):
            return Implies(lam, Name(p))
    if k == 0:
        return None
    prev = solver.stages[k - 1]
    fail = solver._forth_fail(x_f, j, prev)
    if fail is not None:
        role, move = fail
        parts: List[Concept] = []
        for j2 in iter_bits(B.succ_mask(role, j)):
            d = _sep_from_stages(solver, A, B, move, j2, k - 1)
            if d is None:
                return None
            parts.append(d)
        return Implies(lam, Exists(role, make_and(parts) if parts else Top()))
    fail = solver._back_fail(x_f, j, prev)
    if fail is not None:
        role, j2 = fail
        y_max = A.succ_mask_of_set(role, x_f)
        d = _sep_from_stages(solver, A, B, y_max, j2, k - 1)
        if d is None:
            return None
        return Implies(lam, Forall(role, d))
    return None


def synthesize_separator(A: Structure, X, B: Structure, b: str, depth: int,
                         enum_cap: int = 4000) -> SeparatorResult:
    """A hornALC concept C of depth <= `depth` with X subset of C^A and
    b outside C^B, when the corresponding entailment fails.

    Tries the recursive game-failure analysis first, then falls back to
    bounded enumeration; the result is verified by evaluation before being
    returned.  When the entailment holds, returns an empty result.
    """
    x_mask = X if isinstance(X, int) else mask_from_elems(A, X)
    if x_mask == 0:
        raise StructureError("X must be nonempty")
    j = B.index(b)
    solver = HornSolver(A, B, depth=depth, keep_stages=True)
    x0 = x_mask & solver.sim_stages[-1][j]
    if x0 and solver.holds(x0, j):
        return SeparatorResult(None, False)  # entailment holds, no separator
    cand = _sep_from_stages(solver, A, B, x_mask, j, depth)
    if cand is not None and _verify_separator(cand, A, x_mask, B, j):
        return SeparatorResult(cand, True)
    try:
        for c in enum_concepts("hornALC", A.vocab, depth, enum_cap, (A, B)):
            if _verify_separator(c, A, x_mask, B, j):
                return SeparatorResult(c, True)
    except CapExceeded:
        pass
    return SeparatorResult(None, False)


def cbe_separator(inst: CBEInstance, depth: int) -> SeparatorResult:
    """Conjunction of per-negative separators, verified on the instance."""
    A = inst.structure
    p_mask = mask_from_elems(A, inst.positives)
    parts: List[Concept] = []
    for b in sorted(inst.negatives):
        res = synthesize_separator(A, p_mask, A, b, depth)
        if res.concept is None:
            return SeparatorResult(None, False)
        parts.append(res.concept)
    c = make_and(parts)
    ok = all(_verify_separator(c, A, p_mask, A, A.index(b)) for b in inst.negatives)
    return SeparatorResult(c if ok else None, ok)


# ---------------------------------------------------------------------------
# Reduction constructors
# ---------------------------------------------------------------------------

def reduce_hornsim_to_entailment(A: Structure, B: Structure, X, b: str,
                                 fresh_role: str = "R_red"
                                 ) -> Tuple[Structure, str, Structure, str]:
    """Build (A', a, B', d) with hornsim(A,X,B,b) iff entails(A',a,B',d):
    a is a fresh role-predecessor of X in A; B' is the disjoint union of A
    and B with a fresh d below b and below the copy of X."""
    if fresh_role in A.vocab.predicates:
        raise StructureError(f"role name {fresh_role!r} clashes with the vocabulary")
    x_elems = elems_from_mask(A, X) if isinstance(X, int) else sorted(X)
    vocab = Vocabulary({**A.vocab.predicates, fresh_role: 2})

    def lift(s: Structure) -> Dict[str, Set[Tuple[str, ...]]]:
        out = {p: set(ts) for p, ts in s.interpretation.items()}
        out[fresh_role] = set()
        return out

    interp_a = lift(A)
    interp_a[fresh_role] = {("@a", x) for x in x_elems}
    A2 = Structure(vocab, list(A.domain) + ["@a"], interp_a)

    union, mapping = disjoint_union([A, B])
    interp_b = lift(union)
    interp_b[fresh_role] = ({("@d", mapping[(1, b)])}
                            | {("@d", mapping[(0, x)]) for x in x_elems})
    B2 = Structure(vocab, list(union.domain) + ["@d"], interp_b)
    return A2, "@a", B2, "@d"


def reduce_entailment_to_equivalence(A: Structure, B: Structure, a: str, b: str,
                                     fresh_role: str = "R_red"
                                     ) -> Tuple[Structure, str, str]:
    """Build (A', a', b') with entails(A,a,B,b) iff equiv(A',a',A',b'):
    a' sits above the copies of a and b, b' only above the copy of b."""
    if fresh_role in A.vocab.predicates:
        raise StructureError(f"role name {fresh_role!r} clashes with the vocabulary")
    union, mapping = disjoint_union([A, B])
    vocab = Vocabulary({**A.vocab.predicates, fresh_role: 2})
    interp = {p: set(ts) for p, ts in union.interpretation.items()}
    ca, cb = mapping[(0, a)], mapping[(1, b)]
    interp[fresh_role] = {("@a'", ca), ("@a'", cb), ("@b'", cb)}
    A2 = Structure(vocab, list(union.domain) + ["@a'", "@b'"], interp)
    return A2, "@a'", "@b'"


# ---------------------------------------------------------------------------
# Bounded validity and horn-expressibility (toy scale)
# ---------------------------------------------------------------------------

def _subconcepts(c: Concept) -> List[Concept]:
    seen: List[Concept] = []

    def walk(k):
        if k not in seen:
            seen.append(k)
        if isinstance(k, (Top, Bot, Name)):
            return
        if isinstance(k, Not):
            walk(k.sub)
        elif isinstance(k, (And, Or)):
            for x in k.children:
                walk(x)
        elif isinstance(k, Implies):
            walk(k.left)
            walk(k.right)
        elif isinstance(k, (Exists, Forall)):
            walk(k.sub)

    walk(c)
    return seen


def _eval_on_type(c: Concept, labels: FrozenSet[str],
                  some: Dict[Tuple[str, int], bool], all_: Dict[Tuple[str, int], bool],
                  idx: Dict[int, int], subs: List[Concept]) -> bool:
    if isinstance(c, Top):
        return True
    if isinstance(c, Bot):
        return False
    if isinstance(c, Name):
        return c.name in labels
    if isinstance(c, Not):
        return not _eval_on_type(c.sub, labels, some, all_, idx, subs)
    if isinstance(c, And):
        return all(_eval_on_type(k, labels, some, all_, idx, subs) for k in c.children)
    if isinstance(c, Or):
        return any(_eval_on_type(k, labels, some, all_, idx, subs) for k in c.children)
    if isinstance(c, Implies):
        return ((not _eval_on_type(c.left, labels, some, all_, idx, subs))
                or _eval_on_type(c.right, labels, some, all_, idx, subs))
    if isinstance(c, Exists):
        return some[(c.role, idx[id(c.sub)])]
    if isinstance(c, Forall):
        return all_[(c.role, idx[id(c.sub)])]
    raise TypeError


def valid_inclusion(c: Concept, d: Concept, vocab: Vocabulary,
                    max_depth: Optional[int] = None) -> bool:
    """Is C subsumed by D in every structure?  Decided by exhaustive search
    over tree-shaped countermodel types of depth max(depth C, depth D);
    sound and complete for depth-bounded concepts via unravelling."""
    c, d = expand_nabla(c), expand_nabla(d)
    if max_depth is None:
        max_depth = max(concept_depth(c), concept_depth(d))
    names = vocab.concept_names()
    roles = vocab.role_names()
    subs = _subconcepts(And((c, d)) if c != d else c)
    sub_index = {id(s): i for i, s in enumerate(subs)}
    # role -> list of quantified-subconcept bodies (by position in subs)
    quant: Dict[str, List[int]] = {r: [] for r in roles}
    for s in subs:
        if isinstance(s, (Exists, Forall)):
            i = sub_index[id(s.sub)]
            if i not in quant[s.role]:
                quant[s.role].append(i)

    def node_types(child_types: Set[Tuple[bool, ...]]) -> Set[Tuple[bool, ...]]:
        """All truth vectors realizable with children drawn from child_types."""
        out: Set[Tuple[bool, ...]] = set()
        # reachable (some, all) profiles per role
        profiles: Dict[str, Set[Tuple[FrozenSet[int], FrozenSet[int]]]] = {}
        for r in roles:
            reach = {(frozenset(), frozenset(quant[r]))}  # zero children
            frontier = list(reach)
            while frontier:
                some0, all0 = frontier.pop()
                for t in child_types:
                    sat = frozenset(i for i in quant[r] if t[i])
                    ns, na = some0 | sat, all0 & sat
                    if (ns, na) not in reach:
                        reach.add((ns, na))
                        frontier.append((ns, na))
            profiles[r] = reach
        for label_bits in itertools.product((False, True), repeat=len(names)):
            labels = frozenset(n for n, bit in zip(names, label_bits) if bit)
            for combo in itertools.product(*[sorted(profiles[r], key=str) for r in roles]):
                some = {}
                all_ = {}
                has_children = {}
                for r, (s0, a0) in zip(roles, combo):
                    for i in quant[r]:
                        some[(r, i)] = i in s0
                        all_[(r, i)] = i in a0
                vec = []
                memo: Dict[int, bool] = {}

                def ev(k) -> bool:
                    key = id(k)
                    if key not in memo:
                        memo[key] = _eval_on_type(k, labels, some, all_, sub_index, subs)
                    return memo[key]

                # children-profile consistency: "all" vacuity is encoded by
                # starting from the full set with zero children, matching
                # forall semantics on leaves
                vec = tuple(ev(s) for s in subs)
                out.add(vec)
        return out

    level: Set[Tuple[bool, ...]] = node_types(set())
    for _ in range(max_depth):
        level = node_types(level)
    ci, di = subs.index(c), subs.index(d)
    return not any(v[ci] and not v[di] for v in level)


@dataclass
class HornExpressible:
    status: str  # "yes" | "no" | "unknown"
    concept: Optional[Concept] = None
    witness: Optional[Tuple[Structure, FrozenSet[str], Structure, str]] = None


def _witness_pairs(vocab: Vocabulary):
    """Candidate structure pairs for non-preservation witnesses: the bundled
    Example-8 pattern when the vocabulary fits, then all pairs over tiny
    domains."""
    if set(vocab.predicates) == {"A", "B", "R"}:
        from .fixtures import a0, b0
        yield a0(), b0()
    names = vocab.concept_names()
    roles = vocab.role_names()
    for n_a in (1, 2):
        for n_b in (1, 2):
            doms_a = [f"u{i}" for i in range(n_a)]
            doms_b = [f"v{i}" for i in range(n_b)]
            for sa in _all_structures(vocab, doms_a):
                for sb in _all_structures(vocab, doms_b):
                    yield sa, sb


def _all_structures(vocab: Vocabulary, domain: List[str]):
    names = vocab.concept_names()
    roles = vocab.role_names()
    unary_choices = [list(itertools.chain.from_iterable(
        itertools.combinations(domain, k) for k in range(len(domain) + 1)))
        for _ in names]
    pairs = [(u, v) for u in domain for v in domain]
    for unary in itertools.product(*unary_choices):
        for edge_bits in itertools.product((False, True), repeat=len(pairs) * len(roles)):
            interp = {}
            for n, sel in zip(names, unary):
                interp[n] = {(e,) for e in sel}
            k = 0
            for r in roles:
                interp[r] = set()
                for p in pairs:
                    if edge_bits[k]:
                        interp[r].add(p)
                    k += 1
            yield Structure(vocab, domain, interp)


def horn_expressible(c: Concept, depth_bound: int, vocab: Vocabulary,
                     enum_cap: int = 2500, witness_cap: int = 40000) -> HornExpressible:
    """Toy-scale decision of equivalence to a hornALC concept of depth <=
    depth_bound: yes with a certified concept, no with a preservation
    counterexample, or unknown when the caps bind."""
    if concept_depth(c) > depth_bound:
        return HornExpressible("unknown")
    rep = classify(c)
    if rep.is_hornALC:
        return HornExpressible("yes", c)
    if rep.is_p_horn:
        d = to_horn(nnf(c))
        if valid_inclusion(c, d, vocab) and valid_inclusion(d, c, vocab):
            return HornExpressible("yes", d)
    # search for a preservation counterexample
    checked = 0
    for A, B in _witness_pairs(vocab):
        checked += 1
        if checked > witness_cap:
            break
        try:
            cA = eval_concept(c, A)
            cB = eval_concept(c, B)
        except StructureError:
            continue
        if cA == 0:
            continue
        solver = HornSolver(A, B, depth=depth_bound)
        for j in range(len(B.domain)):
            if cB >> j & 1:
                continue
            for y in solver.alive.get(j, ()):
                if y & ~cA == 0:
                    witness = (A, frozenset(elems_from_mask(A, y)), B, B.domain[j])
                    return HornExpressible("no", witness=witness)
    # last resort: enumerate candidates against a small structure family and
    # certify by bounded-tree validity
    family = []
    for s in _all_structures(vocab, ["w0", "w1"]):
        family.append(s)
        if len(family) >= 60:
            break
    try:
        for cand in enum_concepts("hornALC", vocab, depth_bound, enum_cap, tuple(family)):
            if all(eval_concept(cand, s) == eval_concept(c, s) for s in family):
                if valid_inclusion(c, cand, vocab) and valid_inclusion(cand, c, vocab):
                    return HornExpressible("yes", cand)
    except CapExceeded:
        pass
    return HornExpressible("unknown")
