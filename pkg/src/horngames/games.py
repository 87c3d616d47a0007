"""Game solvers: simulation, bisimulation, the nabla-simulation, and the Horn
simulation games (plain and nabla), each in unbounded and round-bounded form,
plus literal validators for externally supplied relations.

Positions of the Horn games are pairs (X, b) with X a nonempty subset of the
source domain, stored as bitmasks.  Condition (sim) confines live positions
to X inside SimSet(b) = {a : B,b simulates into A,a}, which keeps the arena
far below the full 2^|dom(A)| lattice on structured instances.

Player 1's (forth) moves are reduced to choice functions: a response that
serves a minimal move (one chosen successor per element of X) serves every
superset, so the solver searches for a "blocking set" of successors that
escapes every surviving response; the move exists iff the search succeeds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .structures import (CapExceeded, Structure, StructureError, elems_from_mask,
                         iter_bits, mask_from_elems, r_down_holds, r_up_holds)


# ---------------------------------------------------------------------------
# Pairwise simulation-style tables
# ---------------------------------------------------------------------------

def _atom_seed(A: Structure, B: Structure) -> List[int]:
    """table[a] = mask of b with labels(a) subset of labels(b)."""
    nA, nB = len(A.domain), len(B.domain)
    table = [B.full_mask] * nA
    for p in A.vocab.concept_names():
        mA, mB = A.unary_mask(p), B.unary_mask(p)
        for i in range(nA):
            if mA >> i & 1:
                table[i] &= mB
    return table


def _check_vocab(A: Structure, B: Structure):
    if A.vocab.predicates != B.vocab.predicates:
        raise StructureError("vocabulary mismatch between structures")


def simulation_table(A: Structure, B: Structure, depth: Optional[int] = None) -> List[int]:
    """Greatest simulation from A into B (or its depth-round approximant):
    table[a] = mask of b with A,a <=sim B,b."""
    _check_vocab(A, B)
    table = _atom_seed(A, B)
    roles = A.vocab.role_names()
    rounds = 0
    while depth is None or rounds < depth:
        new_table = list(table)
        for i in range(len(A.domain)):
            cur = table[i]
            if not cur:
                continue
            new = cur
            for j in iter_bits(cur):
                ok = True
                for r in roles:
                    for i2 in iter_bits(A.succ_mask(r, i)):
                        found = False
                        for j2 in iter_bits(B.succ_mask(r, j)):
                            if table[i2] >> j2 & 1:
                                found = True
                                break
                        if not found:
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    new &= ~(1 << j)
            new_table[i] = new
        if new_table == table:
            break
        table = new_table
        rounds += 1
    return table


def sim_holds(A: Structure, a: str, B: Structure, b: str) -> bool:
    return simulation_table(A, B)[A.index(a)] >> B.index(b) & 1 == 1


def sim_k(A: Structure, a: str, B: Structure, b: str, depth: int) -> bool:
    return simulation_table(A, B, depth)[A.index(a)] >> B.index(b) & 1 == 1


def _stage_tables(A: Structure, B: Structure, maker, depth: Optional[int]):
    """[table_0, ..., table_depth]; depth None gives the stable table only."""
    if depth is None:
        return [maker(A, B, None)]
    return [maker(A, B, k) for k in range(depth + 1)]


def bisimulation_table(A: Structure, B: Structure, depth: Optional[int] = None) -> List[int]:
    """table[a] = mask of b with (a, b) in the greatest (depth-)bisimulation."""
    _check_vocab(A, B)
    nA = len(A.domain)
    table = _atom_seed(A, B)
    back_seed = _atom_seed(B, A)
    for i in range(nA):
        mask = 0
        for j in iter_bits(table[i]):
            if back_seed[j] >> i & 1:
                mask |= 1 << j
        table[i] = mask
    roles = A.vocab.role_names()
    rounds = 0
    while depth is None or rounds < depth:
        new_table = list(table)
        for i in range(nA):
            cur = table[i]
            new = cur
            for j in iter_bits(cur):
                ok = True
                for r in roles:
                    for i2 in iter_bits(A.succ_mask(r, i)):
                        if not any(table[i2] >> j2 & 1 for j2 in iter_bits(B.succ_mask(r, j))):
                            ok = False
                            break
                    if not ok:
                        break
                    for j2 in iter_bits(B.succ_mask(r, j)):
                        if not any(table[i2] >> j2 & 1 for i2 in iter_bits(A.succ_mask(r, i))):
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    new &= ~(1 << j)
            new_table[i] = new
        if new_table == table:
            break
        table = new_table
        rounds += 1
    return table


def bisim_holds(A: Structure, a: str, B: Structure, b: str) -> bool:
    return bisimulation_table(A, B)[A.index(a)] >> B.index(b) & 1 == 1


def bisim_k(A: Structure, a: str, B: Structure, b: str, depth: int) -> bool:
    return bisimulation_table(A, B, depth)[A.index(a)] >> B.index(b) & 1 == 1


def elu_nabla_table(A: Structure, B: Structure, depth: Optional[int] = None) -> List[int]:
    """Greatest nabla-simulation: (atom), (forth), and the guarded (back):
    when a has an R-successor at all, every R-move of b must be answered."""
    _check_vocab(A, B)
    table = _atom_seed(A, B)
    roles = A.vocab.role_names()
    rounds = 0
    while depth is None or rounds < depth:
        new_table = list(table)
        for i in range(len(A.domain)):
            cur = table[i]
            new = cur
            for j in iter_bits(cur):
                ok = True
                for r in roles:
                    for i2 in iter_bits(A.succ_mask(r, i)):
                        if not any(table[i2] >> j2 & 1 for j2 in iter_bits(B.succ_mask(r, j))):
                            ok = False
                            break
                    if not ok:
                        break
                    if A.succ_mask(r, i):
                        for j2 in iter_bits(B.succ_mask(r, j)):
                            if not any(table[i2] >> j2 & 1 for i2 in iter_bits(A.succ_mask(r, i))):
                                ok = False
                                break
                    if not ok:
                        break
                if not ok:
                    new &= ~(1 << j)
            new_table[i] = new
        if new_table == table:
            break
        table = new_table
        rounds += 1
    return table


def elu_nabla_sim(A: Structure, a: str, B: Structure, b: str,
                  depth: Optional[int] = None) -> bool:
    return elu_nabla_table(A, B, depth)[A.index(a)] >> B.index(b) & 1 == 1


@dataclass
class SimRelation:
    """A simulation relation as explicit pairs."""
    pairs: Set[Tuple[str, str]]


def greatest_simulation(A: Structure, B: Structure) -> SimRelation:
    table = simulation_table(A, B)
    pairs = {(A.domain[i], B.domain[j])
             for i in range(len(A.domain)) for j in iter_bits(table[i])}
    return SimRelation(pairs)


def greatest_bisimulation(A: Structure, B: Structure) -> SimRelation:
    table = bisimulation_table(A, B)
    pairs = {(A.domain[i], B.domain[j])
             for i in range(len(A.domain)) for j in iter_bits(table[i])}
    return SimRelation(pairs)


# ---------------------------------------------------------------------------
# Horn simulation solver
# ---------------------------------------------------------------------------

@dataclass
class HornRelation:
    """Positions (X, b) of a Horn simulation; round is an int for staged
    output or "stable" for a greatest fixpoint."""
    positions: FrozenSet[Tuple[FrozenSet[str], str]]
    round: object = "stable"


@dataclass
class GameVerdict:
    holds: bool
    witness: Optional[HornRelation] = None
    failure: Optional[List[str]] = None


def _blocking_exists(succs: List[int], seeds: List[int]) -> Optional[int]:
    """Search for a blocking set C (as a mask): C hits every seed while every
    element keeps a successor outside C.  Returns C or None.

    A blocking set corresponds to a player-1 choice function whose range
    avoids every surviving response; its existence refutes (forth).
    """
    union = 0
    for s in succs:
        union |= s
    # seeds with elements outside every successor set can never be covered
    seeds = [m for m in set(seeds) if m & ~union == 0]
    seeds.sort(key=lambda m: bin(m).count("1"))
    minimal: List[int] = []
    for m in seeds:
        if not any(k & ~m == 0 for k in minimal):
            minimal.append(m)
    seeds = minimal
    if not seeds:
        return 0  # any move works, no response exists

    def search(blocked: int, remaining: List[int]) -> Optional[int]:
        for s in succs:
            if not (s & ~blocked):
                return None
        rem = [m for m in remaining if not (m & blocked)]
        if not rem:
            return blocked
        seed = rem[0]
        for bit in iter_bits(seed):
            got = search(blocked | (1 << bit), rem)
            if got is not None:
                return got
        return None

    return search(0, seeds)


class HornSolver:
    """Greatest-fixpoint (or staged) solver for the Horn simulation game
    between A and B.

    variant "horn" seeds condition (sim) with plain simulations; variant
    "nabla" with nabla-simulations.  `depth` selects the round-bounded game;
    None runs to stabilization.  The arena per target b consists of the
    atom-consistent nonempty subsets of SimSet(b); `position_cap` bounds its
    total size.
    """

    def __init__(self, A: Structure, B: Structure, variant: str = "horn",
                 depth: Optional[int] = None, position_cap: int = 1 << 21,
                 keep_stages: bool = False):
        _check_vocab(A, B)
        self.A, self.B, self.variant, self.depth = A, B, variant, depth
        maker = simulation_table if variant == "horn" else elu_nabla_table
        # (sim) runs from B into A
        self.sim_stages = _stage_tables(B, A, maker, depth)
        self.roles = A.vocab.role_names()
        self._succ_B = {r: [B.succ_mask(r, j) for j in range(len(B.domain))]
                        for r in self.roles}
        self.position_cap = position_cap
        self.stages: List[Dict[int, Set[int]]] = []
        self.deletion_log: Dict[Tuple[int, int], Tuple[int, str]] = {}
        self.alive = self._solve(keep_stages)

    # -- arena ---------------------------------------------------------------

    def _simset(self, sim_table: List[int], j: int) -> int:
        # sim tables run from B into A: row j is already a mask over dom(A)
        return sim_table[j]

    def _atom_constraints(self, j: int) -> List[int]:
        """Masks M with the requirement X & M != 0 (one per concept name
        false at b: X must not be contained in its extension)."""
        out = []
        for p in self.A.vocab.concept_names():
            if not (self.B.unary_mask(p) >> j & 1):
                out.append(self.A.full_mask & ~self.A.unary_mask(p))
        return out

    def _arena_for(self, sim_table: List[int]) -> Dict[int, Set[int]]:
        arena: Dict[int, Set[int]] = {}
        total = 0
        for j in range(len(self.B.domain)):
            simset = self._simset(sim_table, j)
            constraints = self._atom_constraints(j)
            masks: Set[int] = set()
            count = 1 << bin(simset).count("1")
            total += count
            if total > self.position_cap:
                raise CapExceeded(
                    f"Horn game arena exceeds {self.position_cap} positions; "
                    f"raise position_cap to proceed")
            bits = list(iter_bits(simset))
            for sub in range(1, 1 << len(bits)):
                x = 0
                for k, bit in enumerate(bits):
                    if sub >> k & 1:
                        x |= 1 << bit
                if all(x & m for m in constraints):
                    masks.add(x)
            arena[j] = masks
        return arena

    # -- condition checks ------------------------------------------------------

    @staticmethod
    def _antichain(masks) -> List[int]:
        """The inclusion-minimal masks; sufficient both as (forth) response
        seeds and for the (back) subset queries."""
        out: List[int] = []
        for m in sorted(set(masks), key=lambda v: bin(v).count("1")):
            if not any(k & ~m == 0 for k in out):
                out.append(m)
        return out

    def _seed_cache(self, prev: Dict[int, Set[int]]) -> Dict[int, List[int]]:
        return {j: self._antichain(masks) for j, masks in prev.items()}

    def _forth_fail(self, x: int, j: int, seeds_of: Dict[int, List[int]]
                    ) -> Optional[Tuple[str, int]]:
        """Return (role, blocking move mask) violating (forth), or None."""
        for r in self.roles:
            succs = [self.A.succ_mask(r, i) for i in iter_bits(x)]
            if any(s == 0 for s in succs):
                continue  # no joint move along r
            seeds: List[int] = []
            for j2 in iter_bits(self._succ_B[r][j]):
                seeds.extend(seeds_of.get(j2, ()))
            blocked = _blocking_exists(succs, seeds)
            if blocked is not None:
                move = 0
                for s in succs:
                    esc = s & ~blocked
                    move |= esc & -esc
                return (r, move)
        return None

    def _back_fail(self, x: int, j: int, seeds_of: Dict[int, List[int]]
                   ) -> Optional[Tuple[str, int]]:
        """Return (role, b' index) violating (back), or None."""
        for r in self.roles:
            succ_union = self.A.succ_mask_of_set(r, x)
            for j2 in iter_bits(self._succ_B[r][j]):
                if not any(y & ~succ_union == 0 for y in seeds_of.get(j2, ())):
                    return (r, j2)
        return None

    # -- fixpoints ---------------------------------------------------------------

    def _refine_bucket(self, j: int, masks: Set[int], seeds_of, tick) -> Set[int]:
        keep = set()
        for x in masks:
            forth = self._forth_fail(x, j, seeds_of)
            if forth is not None:
                tick[0] += 1
                self.deletion_log[(x, j)] = (tick[0], f"(forth) via {forth[0]}")
                continue
            back = self._back_fail(x, j, seeds_of)
            if back is not None:
                tick[0] += 1
                self.deletion_log[(x, j)] = (
                    tick[0], f"(back) via {back[0]} to {self.B.domain[back[1]]}")
                continue
            keep.add(x)
        return keep

    def _refine(self, arena: Dict[int, Set[int]], prev: Dict[int, Set[int]],
                tick: List[int]) -> Dict[int, Set[int]]:
        seeds_of = self._seed_cache(prev)
        return {j: self._refine_bucket(j, masks, seeds_of, tick)
                for j, masks in arena.items()}

    def _solve(self, keep_stages: bool) -> Dict[int, Set[int]]:
        tick = [0]
        if self.depth is not None:
            level = self._arena_for(self.sim_stages[0])
            if keep_stages:
                self.stages.append({j: set(m) for j, m in level.items()})
            for k in range(1, self.depth + 1):
                arena_k = self._arena_for(self.sim_stages[k])
                prev = level
                level = self._refine(arena_k, prev, tick)
                if keep_stages:
                    self.stages.append({j: set(m) for j, m in level.items()})
            return level
        # unbounded: worklist over target buckets; a deletion at bucket j
        # dirties every predecessor bucket of j in B
        alive = self._arena_for(self.sim_stages[0])
        nB = len(self.B.domain)
        preds_of = [set() for _ in range(nB)]
        for r in self.roles:
            for j in range(nB):
                for j2 in iter_bits(self._succ_B[r][j]):
                    preds_of[j2].add(j)
        dirty = set(alive)
        while dirty:
            seeds_of = self._seed_cache(alive)
            batch, dirty = dirty, set()
            changed_buckets = []
            for j in batch:
                keep = self._refine_bucket(j, alive[j], seeds_of, tick)
                if keep != alive[j]:
                    alive[j] = keep
                    changed_buckets.append(j)
            for j in changed_buckets:
                dirty.update(preds_of[j])
        return alive

    # -- public views -------------------------------------------------------------

    def relation(self) -> HornRelation:
        positions = frozenset(
            (frozenset(elems_from_mask(self.A, x)), self.B.domain[j])
            for j, masks in self.alive.items() for x in masks)
        return HornRelation(positions, "stable" if self.depth is None else self.depth)

    def holds(self, x_mask: int, j: int) -> bool:
        return x_mask in self.alive.get(j, ())

    def failure_trace(self, x_mask: int, j: int, limit: int = 12) -> List[str]:
        trace: List[str] = []
        x, cur = x_mask, j
        for _ in range(limit):
            name_x = "{" + ",".join(elems_from_mask(self.A, x)) + "}"
            key = (x, cur)
            if key in self.deletion_log:
                _, why = self.deletion_log[key]
                trace.append(f"position ({name_x}, {self.B.domain[cur]}) dies by {why}")
                return trace
            sim_table = self.sim_stages[-1]
            bad_sim = [self.A.domain[i] for i in iter_bits(x_mask)
                       if not (sim_table[cur] >> i & 1)]
            if x == 0:
                trace.append("empty X is not a legal position")
                return trace
            if bad_sim:
                trace.append(
                    f"position ({name_x}, {self.B.domain[cur]}) violates (sim) at "
                    + ",".join(bad_sim))
                return trace
            for m in self._atom_constraints(cur):
                if not (x & m):
                    trace.append(f"position ({name_x}, {self.B.domain[cur]}) violates (atom)")
                    return trace
            trace.append(f"position ({name_x}, {self.B.domain[cur]}) not in the arena")
            return trace
        return trace


def _as_mask(A: Structure, X) -> int:
    if isinstance(X, int):
        return X
    return mask_from_elems(A, X)


def hornsim(A: Structure, X, B: Structure, b: str,
            depth: Optional[int] = None, variant: str = "horn",
            position_cap: int = 1 << 21, want_witness: bool = True) -> GameVerdict:
    """Does some (depth-round) Horn simulation between A and B contain the
    position (X, b)?"""
    x_mask = _as_mask(A, X)
    if x_mask == 0:
        raise StructureError("X must be nonempty")
    j = B.index(b)
    solver = HornSolver(A, B, variant=variant, depth=depth, position_cap=position_cap)
    if solver.holds(x_mask, j):
        return GameVerdict(True, solver.relation() if want_witness else None, None)
    return GameVerdict(False, None, solver.failure_trace(x_mask, j))


def hornsim_k(A: Structure, X, B: Structure, b: str, depth: int,
              variant: str = "horn", position_cap: int = 1 << 21) -> GameVerdict:
    return hornsim(A, X, B, b, depth=depth, variant=variant, position_cap=position_cap)


def hornsim_nabla(A: Structure, X, B: Structure, b: str,
                  depth: Optional[int] = None, position_cap: int = 1 << 21) -> GameVerdict:
    return hornsim(A, X, B, b, depth=depth, variant="nabla", position_cap=position_cap)


def global_hornsim(A: Structure, B: Structure, depth: Optional[int] = None,
                   variant: str = "horn", position_cap: int = 1 << 21) -> bool:
    """Every b in dom(B) is the target of some surviving position."""
    solver = HornSolver(A, B, variant=variant, depth=depth, position_cap=position_cap)
    return all(solver.alive.get(j) for j in range(len(B.domain)))


# ---------------------------------------------------------------------------
# Literal validation of supplied relations
# ---------------------------------------------------------------------------

def check_horn_relation(Z, A: Structure, B: Structure, variant: str = "horn",
                        naive: bool = False) -> Tuple[bool, Optional[str]]:
    """Check the four Horn simulation conditions literally for a supplied
    relation Z (iterable of (elements, b) pairs).

    With naive=True, (forth) quantifies over every subset Y of dom(A) instead
    of the choice-function reduction; feasible only for small domains.
    """
    _check_vocab(A, B)
    pairs: List[Tuple[int, int]] = []
    for X, b in Z:
        x_mask = _as_mask(A, X)
        j = B.index(b)
        if x_mask == 0:
            return False, "(X,b) in Z implies X nonempty"
        pairs.append((x_mask, j))
    maker = simulation_table if variant == "horn" else elu_nabla_table
    sim_table = maker(B, A)
    by_target: Dict[int, List[int]] = {}
    for x, j in pairs:
        by_target.setdefault(j, []).append(x)
    roles = A.vocab.role_names()
    for x, j in pairs:
        bname = B.domain[j]
        xname = "{" + ",".join(elems_from_mask(A, x)) + "}"
        for p in A.vocab.concept_names():
            if x & ~A.unary_mask(p) == 0 and not (B.unary_mask(p) >> j & 1):
                return False, f"(atom) fails at ({xname},{bname}) for {p}"
        for i in iter_bits(x):
            if not (sim_table[j] >> i & 1):
                return False, f"(sim) fails at ({xname},{bname}) for {A.domain[i]}"
        for r in roles:
            succs = [A.succ_mask(r, i) for i in iter_bits(x)]
            seeds = []
            for j2 in iter_bits(B.succ_mask(r, j)):
                seeds.extend(y for y in by_target.get(j2, []))
            if naive:
                n = len(A.domain)
                for sub in range(1, 1 << n):
                    if not r_up_holds(A, r, x, sub):
                        continue
                    if not any(y & ~sub == 0 for y in seeds):
                        return False, f"(forth) fails at ({xname},{bname}) via {r}"
            else:
                if any(s == 0 for s in succs):
                    continue
                if _blocking_exists(succs, seeds) is not None:
                    return False, f"(forth) fails at ({xname},{bname}) via {r}"
        for r in roles:
            succ_union = A.succ_mask_of_set(r, x)
            for j2 in iter_bits(B.succ_mask(r, j)):
                if not any(y & ~succ_union == 0 for y in by_target.get(j2, [])):
                    return False, (f"(back) fails at ({xname},{bname}) via {r} "
                                   f"to {B.domain[j2]}")
    return True, None
