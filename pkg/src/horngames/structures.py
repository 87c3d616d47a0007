"""Finite relational structures and the constructions used by the game solvers.

Structures are immutable after construction.  Element sets are manipulated as
integer bitmasks indexed by the structure's domain order, which keeps the
exponential position lattices of the Horn games cheap to traverse.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple


class StructureError(ValueError):
    """Raised for malformed structures, vocabulary mismatches and bad input."""


class CapExceeded(RuntimeError):
    """Raised when a construction or solver would exceed a configured cap."""


@dataclass(frozen=True)
class Vocabulary:
    """Predicate names with arities.  Arity-1 predicates are concept names,
    arity-2 predicates are role names (the DL reading)."""

    predicates: Dict[str, int]

    def __post_init__(self):
        for name, ar in self.predicates.items():
            if not isinstance(ar, int) or ar < 0:
                raise StructureError(f"bad arity for predicate {name!r}: {ar}")

    @property
    def max_arity(self) -> int:
        return max(self.predicates.values(), default=0)

    def concept_names(self) -> List[str]:
        return sorted(n for n, a in self.predicates.items() if a == 1)

    def role_names(self) -> List[str]:
        return sorted(n for n, a in self.predicates.items() if a == 2)

    def arity(self, name: str) -> int:
        if name not in self.predicates:
            raise StructureError(f"unknown predicate {name!r}")
        return self.predicates[name]

    def merge(self, other: "Vocabulary") -> "Vocabulary":
        merged = dict(self.predicates)
        for n, a in other.predicates.items():
            if merged.get(n, a) != a:
                raise StructureError(f"arity clash for predicate {n!r}")
            merged[n] = a
        return Vocabulary(merged)


def mask_from_elems(s: "Structure", elems: Iterable[str]) -> int:
    m = 0
    for e in elems:
        m |= 1 << s.index(e)
    return m


def elems_from_mask(s: "Structure", mask: int) -> List[str]:
    return [s.domain[i] for i in range(len(s.domain)) if mask >> i & 1]


def iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Structure:
    """A finite structure: ordered domain plus one tuple set per predicate.

    Precomputes per-role successor/predecessor bitmasks and unary label masks;
    everything downstream works on these.
    """

    def __init__(self, vocab: Vocabulary, domain: Sequence[str],
                 interpretation: Dict[str, Set[Tuple[str, ...]]]):
        if not domain:
            raise StructureError("domain must be nonempty")
        if len(set(domain)) != len(domain):
            raise StructureError("duplicate element identifiers")
        self.vocab = vocab
        self.domain: List[str] = list(domain)
        self._index = {e: i for i, e in enumerate(self.domain)}
        self.interpretation: Dict[str, Set[Tuple[str, ...]]] = {}
        for pred, ar in vocab.predicates.items():
            tuples = set(map(tuple, interpretation.get(pred, set())))
            for t in tuples:
                if len(t) != ar:
                    raise StructureError(
                        f"tuple {t} under {pred!r} has length {len(t)}, arity is {ar}")
                for e in t:
                    if e not in self._index:
                        raise StructureError(f"unknown element {e!r} in tuple under {pred!r}")
            self.interpretation[pred] = tuples
        for pred in interpretation:
            if pred not in vocab.predicates:
                raise StructureError(f"interpretation mentions unknown predicate {pred!r}")
        n = len(self.domain)
        self.full_mask = (1 << n) - 1
        self._unary: Dict[str, int] = {}
        for p in vocab.concept_names():
            m = 0
            for (e,) in self.interpretation[p]:
                m |= 1 << self._index[e]
            self._unary[p] = m
        self._succ: Dict[str, List[int]] = {}
        self._pred: Dict[str, List[int]] = {}
        for r in vocab.role_names():
            succ = [0] * n
            pred = [0] * n
            for (a, b) in self.interpretation[r]:
                ia, ib = self._index[a], self._index[b]
                succ[ia] |= 1 << ib
                pred[ib] |= 1 << ia
            self._succ[r] = succ
            self._pred[r] = pred

    # -- basic access -----------------------------------------------------

    def __len__(self) -> int:
        return len(self.domain)

    def index(self, e: str) -> int:
        if e not in self._index:
            raise StructureError(f"element {e!r} not in domain")
        return self._index[e]

    def has_element(self, e: str) -> bool:
        return e in self._index

    def unary_mask(self, p: str) -> int:
        if p not in self._unary:
            raise StructureError(f"unknown concept name {p!r}")
        return self._unary[p]

    def succ_mask(self, role: str, i: int) -> int:
        if role not in self._succ:
            raise StructureError(f"unknown role name {role!r}")
        return self._succ[role][i]

    def pred_mask(self, role: str, i: int) -> int:
        if role not in self._pred:
            raise StructureError(f"unknown role name {role!r}")
        return self._pred[role][i]

    def succ_mask_of_set(self, role: str, mask: int) -> int:
        out = 0
        for i in iter_bits(mask):
            out |= self._succ[role][i]
        return out

    def labels(self, e: str) -> Set[str]:
        i = self.index(e)
        return {p for p, m in self._unary.items() if m >> i & 1}

    def holds(self, pred: str, t: Tuple[str, ...]) -> bool:
        if pred not in self.interpretation:
            raise StructureError(f"unknown predicate {pred!r}")
        return tuple(t) in self.interpretation[pred]

    def __repr__(self):
        return f"Structure(|dom|={len(self.domain)}, preds={sorted(self.vocab.predicates)})"

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        unary = {p: sorted(e for (e,) in self.interpretation[p])
                 for p in self.vocab.concept_names()}
        relations = {}
        for pred, ar in sorted(self.vocab.predicates.items()):
            if ar == 1:
                continue
            relations[pred] = {"arity": ar,
                               "tuples": sorted(list(t) for t in self.interpretation[pred])}
        return {"domain": list(self.domain), "unary": unary, "relations": relations}


def parse_structure(text: str) -> Structure:
    """Parse the JSON structure format.

    { "domain": [...], "unary": {name: [elem...]},
      "relations": {name: {"arity": k, "tuples": [[...]...]}},
      "roles": {name: [[a,b]...]} }   -- "roles" is convenience for arity 2
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureError(f"malformed JSON: {exc}") from exc
    return structure_from_dict(doc)


def structure_from_dict(doc: dict) -> Structure:
    if not isinstance(doc, dict) or "domain" not in doc:
        raise StructureError("document must be an object with a 'domain' key")
    domain = doc["domain"]
    if not isinstance(domain, list) or not domain:
        raise StructureError("empty or malformed domain")
    preds: Dict[str, int] = {}
    interp: Dict[str, Set[Tuple[str, ...]]] = {}
    for name, elems in (doc.get("unary") or {}).items():
        preds[name] = 1
        interp[name] = {(e,) for e in elems}
    for name, spec in (doc.get("relations") or {}).items():
        ar = spec.get("arity")
        if not isinstance(ar, int) or ar < 1:
            raise StructureError(f"relation {name!r} needs a positive integer arity")
        if name in preds:
            raise StructureError(f"predicate {name!r} declared twice")
        preds[name] = ar
        interp[name] = {tuple(t) for t in spec.get("tuples", [])}
    for name, pairs in (doc.get("roles") or {}).items():
        if name in preds:
            raise StructureError(f"predicate {name!r} declared twice")
        preds[name] = 2
        interp[name] = {tuple(t) for t in pairs}
    return Structure(Vocabulary(preds), domain, interp)


def serialize_structure(s: Structure) -> str:
    return json.dumps(s.to_json(), indent=2, sort_keys=True)


@dataclass
class PointedStructure:
    """A structure with a focus: a nonempty set of elements (DL games) or a
    nonempty set of guarded tuples of equal length (guarded games)."""

    structure: Structure
    focus: Set

    def __post_init__(self):
        if not self.focus:
            raise StructureError("focus must be nonempty")


# -- constructions ---------------------------------------------------------

def disjoint_union(parts: Sequence[Structure]) -> Tuple[Structure, Dict[Tuple[int, str], str]]:
    """Tagged disjoint union.  Returns the union and the (part, element) ->
    new-element mapping.  Element names follow "part#index/original"."""
    if not parts:
        raise StructureError("disjoint union of an empty family")
    vocab = parts[0].vocab
    for p in parts[1:]:
        if p.vocab.predicates != vocab.predicates:
            raise StructureError("vocabulary mismatch in disjoint union")
    mapping: Dict[Tuple[int, str], str] = {}
    domain: List[str] = []
    for k, part in enumerate(parts):
        for e in part.domain:
            name = f"part{k}/{e}"
            mapping[(k, e)] = name
            domain.append(name)
    interp: Dict[str, Set[Tuple[str, ...]]] = {p: set() for p in vocab.predicates}
    for k, part in enumerate(parts):
        for pred, tuples in part.interpretation.items():
            for t in tuples:
                interp[pred].add(tuple(mapping[(k, e)] for e in t))
    return Structure(vocab, domain, interp), mapping


def product(parts: Sequence[Structure], cap: int = 10000) -> Structure:
    """Direct product; a predicate holds at a tuple-of-tuples iff it holds
    componentwise.  Materializes eagerly, guarded by `cap`."""
    if not parts:
        raise StructureError("product of an empty family")
    vocab = parts[0].vocab
    for p in parts[1:]:
        if p.vocab.predicates != vocab.predicates:
            raise StructureError("vocabulary mismatch in product")
    size = 1
    for p in parts:
        size *= len(p.domain)
        if size > cap:
            raise CapExceeded(f"product domain would exceed cap {cap}")
    combos = list(itertools.product(*[p.domain for p in parts]))
    name = {c: "(" + ",".join(c) + ")" for c in combos}
    interp: Dict[str, Set[Tuple[str, ...]]] = {p: set() for p in vocab.predicates}
    for pred, ar in vocab.predicates.items():
        if ar == 1:
            for c in combos:
                if all(parts[i].holds(pred, (c[i],)) for i in range(len(parts))):
                    interp[pred].add((name[c],))
        else:
            # k-ary over tuples: componentwise membership
            for cs in itertools.product(combos, repeat=ar):
                if all(parts[i].holds(pred, tuple(cs[j][i] for j in range(ar)))
                       for i in range(len(parts))):
                    interp[pred].add(tuple(name[c] for c in cs))
    return Structure(vocab, [name[c] for c in combos], interp)


def unravel(s: Structure, root: str, depth: int) -> Structure:
    """Unravel (s, root) into a tree-shaped structure of the given depth.

    Node identity is the full path of (role, element) steps, so the result is
    a directed tree with pairwise disjoint role extensions even when the
    original has multi-role edges.  The root is depth-bisimilar to (s, root).
    """
    s.index(root)
    vocab = s.vocab
    # path: tuple of (role, elem) steps starting at root
    paths: List[Tuple[Tuple[str, str], ...]] = [()]
    frontier = [()]
    for _ in range(depth):
        nxt = []
        for path in frontier:
            cur = root if not path else path[-1][1]
            i = s.index(cur)
            for r in vocab.role_names():
                for j in iter_bits(s.succ_mask(r, i)):
                    child = path + ((r, s.domain[j]),)
                    nxt.append(child)
        paths.extend(nxt)
        frontier = nxt
    def node_name(path):
        if not path:
            return root
        return root + "/" + "/".join(f"{r}.{e}" for r, e in path)
    domain = [node_name(p) for p in paths]
    interp: Dict[str, Set[Tuple[str, ...]]] = {p: set() for p in vocab.predicates}
    for path in paths:
        cur = root if not path else path[-1][1]
        i = s.index(cur)
        for p in vocab.concept_names():
            if s.unary_mask(p) >> i & 1:
                interp[p].add((node_name(path),))
    for path in paths:
        if path:
            parent = path[:-1]
            r, _ = path[-1]
            interp[r].add((node_name(parent), node_name(path)))
    return Structure(vocab, domain, interp)


def _forest_depths(s: Structure) -> Dict[str, int]:
    """Depths of nodes in a forest; raises StructureError if `s` is not a
    forest (role overlap, indegree > 1, or a cycle)."""
    n = len(s.domain)
    parent = [-1] * n
    seen_edge: Set[Tuple[int, int]] = set()
    for r in s.vocab.role_names():
        for (a, b) in s.interpretation[r]:
            ia, ib = s.index(a), s.index(b)
            if (ia, ib) in seen_edge:
                raise StructureError("role extensions overlap: not a forest")
            seen_edge.add((ia, ib))
            if parent[ib] != -1:
                raise StructureError(f"node {b!r} has two predecessors: not a forest")
            parent[ib] = ia
    depths: Dict[str, int] = {}
    for i in range(n):
        trail = []
        j = i
        while parent[j] != -1:
            trail.append(j)
            j = parent[j]
            if len(trail) > n:
                raise StructureError("edge cycle: not a forest")
        depths[s.domain[i]] = len(trail)
    return depths


def tree_depth(s: Structure) -> int:
    return max(_forest_depths(s).values(), default=0)


def truncate(s: Structure, depth: int) -> Structure:
    """Remove all nodes of depth > `depth` from a tree-shaped structure or
    forest, keeping unary labels on the survivors."""
    depths = _forest_depths(s)
    keep = [e for e in s.domain if depths[e] <= depth]
    keepset = set(keep)
    interp: Dict[str, Set[Tuple[str, ...]]] = {}
    for pred, tuples in s.interpretation.items():
        interp[pred] = {t for t in tuples if all(e in keepset for e in t)}
    return Structure(s.vocab, keep, interp)


# -- the successor-set relations ------------------------------------------

def r_up_holds(s: Structure, role: str, x_mask: int, y_mask: int) -> bool:
    """X R^up Y: every member of X has an R-successor in Y."""
    for i in iter_bits(x_mask):
        if not (s.succ_mask(role, i) & y_mask):
            return False
    return True


def r_down_holds(s: Structure, role: str, x_mask: int, y_mask: int) -> bool:
    """X R^down Y: every member of Y has an R-predecessor in X."""
    for j in iter_bits(y_mask):
        if not (s.pred_mask(role, j) & x_mask):
            return False
    return True


def isomorphic(s: Structure, t: Structure) -> bool:
    """Exact isomorphism test by backtracking; test-oracle scale only."""
    if s.vocab.predicates != t.vocab.predicates or len(s.domain) != len(t.domain):
        return False
    n = len(s.domain)

    def extend(assign: Dict[int, int], used: Set[int]) -> bool:
        if len(assign) == n:
            for pred, tuples in s.interpretation.items():
                mapped = {tuple(t.domain[assign[s.index(e)]] for e in tp) for tp in tuples}
                if mapped != t.interpretation[pred]:
                    return False
            return True
        i = len(assign)
        for j in range(n):
            if j in used:
                continue
            if s.labels(s.domain[i]) != t.labels(t.domain[j]):
                continue
            assign[i] = j
            used.add(j)
            if extend(assign, used):
                return True
            del assign[i]
            used.remove(j)
        return False

    return extend({}, set())
