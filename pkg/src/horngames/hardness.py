"""Alternating Turing machines with a direct AND-OR acceptance oracle, and
the compiler from (machine, input word) to Horn-simulation instances whose
verdict equals acceptance.

The compiled source structure is the disjoint union of one cell structure
per tape position plus an embedded copy of the 20-element controller; the
controller elements are truth-table rows (op, l, r, val, dir) over AND/OR
plus final value carriers (val, dir).  Transition roles R[q,a,i,d] move every
cell of a configuration jointly to the d-branch successor configuration;
the V_i concept names force responses to keep one element per cell.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .structures import Structure, StructureError, Vocabulary

Cell = object  # str (tape symbol) or (state, symbol)
Config = Tuple


class ATMError(ValueError):
    pass


@dataclass(frozen=True)
class ATM:
    q_exist: FrozenSet[str]
    q_univ: FrozenSet[str]
    f_acc: FrozenSet[str]
    f_rej: FrozenSet[str]
    sigma: Tuple[str, ...]
    gamma: Tuple[str, ...]
    blank: str
    q0: str
    trans: Dict[Tuple[str, str], Tuple[Tuple[str, str, str], Tuple[str, str, str]]]
    space: int

    def states(self) -> FrozenSet[str]:
        return self.q_exist | self.q_univ | self.f_acc | self.f_rej

    def finals(self) -> FrozenSet[str]:
        return self.f_acc | self.f_rej

    def validate(self):
        groups = [self.q_exist, self.q_univ, self.f_acc, self.f_rej]
        for g1, g2 in itertools.combinations(groups, 2):
            if g1 & g2:
                raise ATMError("state groups must be pairwise disjoint")
        if self.q0 not in self.q_univ:
            raise ATMError("the initial state must be universal")
        if not set(self.sigma) <= set(self.gamma):
            raise ATMError("input alphabet must be contained in the tape alphabet")
        if self.blank not in self.gamma:
            raise ATMError("blank symbol missing from the tape alphabet")
        if self.space < 1:
            raise ATMError("space bound must be positive")
        for q in self.q_exist | self.q_univ:
            for a in self.gamma:
                if (q, a) not in self.trans:
                    raise ATMError(f"missing transition for ({q},{a})")
        for (q, a), (left, right) in self.trans.items():
            if q in self.finals():
                raise ATMError("final states carry no explicit transitions")
            for (q2, b, d) in (left, right):
                if q2 not in self.states() or b not in self.gamma or d not in "LRH":
                    raise ATMError(f"bad transition entry ({q2},{b},{d})")


def atm_from_dict(doc: dict) -> ATM:
    trans = {}
    for item in doc["transitions"]:
        (q, a), left, right = item
        trans[(q, a)] = (tuple(left), tuple(right))
    m = ATM(
        q_exist=frozenset(doc.get("existential", [])),
        q_univ=frozenset(doc.get("universal", [])),
        f_acc=frozenset(doc.get("accepting", [])),
        f_rej=frozenset(doc.get("rejecting", [])),
        sigma=tuple(doc.get("input_alphabet", doc.get("tape_alphabet", []))),
        gamma=tuple(doc["tape_alphabet"]),
        blank=doc.get("blank", doc["tape_alphabet"][0]),
        q0=doc["initial"],
        trans=trans,
        space=int(doc["space"]),
    )
    m.validate()
    return m


def atm_to_dict(m: ATM) -> dict:
    return {
        "existential": sorted(m.q_exist), "universal": sorted(m.q_univ),
        "accepting": sorted(m.f_acc), "rejecting": sorted(m.f_rej),
        "input_alphabet": list(m.sigma), "tape_alphabet": list(m.gamma),
        "blank": m.blank, "initial": m.q0, "space": m.space,
        "transitions": [[[q, a], list(l), list(r)]
                        for (q, a), (l, r) in sorted(m.trans.items())],
    }


def initial_config(m: ATM, word: str) -> Config:
    if len(word) > m.space:
        raise ATMError("input word exceeds the space bound")
    symbols = list(word) + [m.blank] * (m.space - len(word))
    if not all(s in m.sigma or s == m.blank for s in symbols):
        raise ATMError("word uses symbols outside the input alphabet")
    cells: List[Cell] = list(symbols)
    cells[0] = (m.q0, symbols[0])
    return tuple(cells)


def head_of(config: Config) -> Tuple[int, str, str]:
    """(position, state, symbol) of the unique head cell."""
    for i, c in enumerate(config):
        if isinstance(c, tuple):
            return i, c[0], c[1]
    raise ATMError("configuration has no head cell")


def step(m: ATM, config: Config, branch: int) -> Config:
    """The branch-successor configuration (0 = left, 1 = right)."""
    i, q, a = head_of(config)
    if q in m.finals():
        return config
    entry = m.trans[(q, a)][branch]
    q2, b, d = entry
    cells = list(config)
    if d == "H":
        cells[i] = (q2, b)
    elif d == "L":
        if i == 0:
            raise ATMError("head moved off the left end")
        cells[i] = b
        sym = cells[i - 1]
        cells[i - 1] = (q2, sym)
    else:
        if i == len(cells) - 1:
            raise ATMError("head moved off the right end")
        cells[i] = b
        sym = cells[i + 1]
        cells[i + 1] = (q2, sym)
    return tuple(cells)


def atm_accepts(m: ATM, word: str, config_cap: int = 200000) -> bool:
    """AND-OR evaluation over the reachable configuration graph.  Requires
    every non-final cycle-free run (a cycle among non-final configurations is
    reported as an ill-formed machine)."""
    m.validate()
    memo: Dict[Config, int] = {}
    on_stack: Set[Config] = set()

    def value(cfg: Config) -> int:
        if cfg in memo:
            return memo[cfg]
        _, q, _ = head_of(cfg)
        if q in m.f_acc:
            memo[cfg] = 1
            return 1
        if q in m.f_rej:
            memo[cfg] = 0
            return 0
        if cfg in on_stack:
            raise ATMError("non-final configuration cycle; acceptance undefined")
        if len(memo) + len(on_stack) > config_cap:
            raise ATMError("configuration graph exceeds the cap")
        on_stack.add(cfg)
        l = value(step(m, cfg, 0))
        r = value(step(m, cfg, 1))
        on_stack.discard(cfg)
        memo[cfg] = min(l, r) if q in m.q_univ else max(l, r)
        return memo[cfg]

    return value(initial_config(m, word)) == 1


# ---------------------------------------------------------------------------
# The Horn-simulation instance
# ---------------------------------------------------------------------------

DIRS = ("l", "r")


def _b_elements() -> List[Tuple]:
    out: List[Tuple] = []
    for op in ("and", "or"):
        for l in (0, 1):
            for r in (0, 1):
                val = min(l, r) if op == "and" else max(l, r)
                for d in DIRS:
                    out.append((op, l, r, val, d))
    for val in (0, 1):
        for d in DIRS:
            out.append((val, d))
    return out


def _b_name(e: Tuple) -> str:
    return "B(" + ",".join(str(x) for x in e) + ")"


def _cell_name(i: int, sym: Cell, d: str) -> str:
    s = sym if isinstance(sym, str) else f"{sym[0]},{sym[1]}"
    return f"cell{i}/{s}/{d}"


def _role_name(q: str, a: str, i: int, d: str) -> str:
    return f"R[{q},{a},{i},{d}]"


@dataclass
class HardnessInstance:
    A: Structure
    B: Structure
    X: FrozenSet[str]
    b: str
    machine: ATM
    word: str


def _controller() -> Tuple[List[Tuple], Dict[Tuple, Set[str]]]:
    """Controller elements and their unary labels."""
    elements = _b_elements()
    labels: Dict[Tuple, Set[str]] = {}
    for e in elements:
        if len(e) == 5:
            labels[e] = {"U" + e[4]}
        else:
            val, d = e
            labels[e] = {f"U{val}", "U" + d}
    return elements, labels


def _b_edges(m: ATM, roles: List[Tuple[str, str, int, str]]
             ) -> Dict[str, Set[Tuple[Tuple, Tuple]]]:
    """Controller edges per role: alternation with branch-value matching;
    the role's direction picks which operand the next value must equal."""
    elements = _b_elements()
    internal = [e for e in elements if len(e) == 5]
    finals = [e for e in elements if len(e) == 2]
    edges: Dict[str, Set[Tuple[Tuple, Tuple]]] = {}
    for (q, a, i, d) in roles:
        rn = _role_name(q, a, i, d)
        es: Set[Tuple[Tuple, Tuple]] = set()
        for src in internal:
            op, l, r, val, t = src
            want = l if d == "l" else r
            for dst in internal:
                if dst[0] != op and dst[3] == want and dst[4] == d:
                    es.add((src, dst))
            es.add((src, (want, d)))
        edges[rn] = es
    edges["Rid"] = {(f, f) for f in finals}
    return edges


def _cell_update(m: ATM, sym: Cell, cell: int, q: str, a: str, head: int,
                 branch: int) -> Optional[Cell]:
    """Content of `cell` after the branch-transition of (q,a) at `head`,
    given its current content `sym`; None when the move does not apply."""
    if q in m.finals():
        entry = (q, a, "H")
    else:
        entry = m.trans[(q, a)][branch]
    q2, b, d = entry
    is_head_cell = isinstance(sym, tuple)
    if is_head_cell:
        if cell != head or sym != (q, a):
            return None
        if d == "H":
            return (q2, b)
        return b
    if cell == head:
        return None  # the role claims the head sits here
    if d == "L" and cell == head - 1:
        return (q2, sym)
    if d == "R" and cell == head + 1:
        return (q2, sym)
    return sym


def build_hornsim_instance(m: ATM, word: str,
                           mark_global: bool = False) -> HardnessInstance:
    """Compile (M, w) into (A, B, X, b) with
    M accepts w  iff  hornsim(A, X, B, b).

    A is the disjoint union of one structure per tape cell plus a copy of the
    controller B; cell elements are (content, direction) pairs, and the
    transition roles implement joint configuration moves.  Cell elements are
    wired into the copy so that conditions (sim) and (back) can always be
    answered inside the copy.
    """
    m.validate()
    s = m.space
    if len(word) > s:
        raise ATMError("word longer than the space bound")
    gamma = list(m.gamma)
    cells_syms: List[Cell] = list(gamma) + [(q, a) for q in sorted(m.states())
                                            for a in gamma]
    roles = [(q, a, i, d) for q in sorted(m.states()) for a in gamma
             for i in range(1, s + 1) for d in DIRS]
    unary = ["U0", "U1", "Ul", "Ur"] + [f"V{j}" for j in range(1, s + 1)]
    if mark_global:
        unary.append("Sstar")
    preds = {u: 1 for u in unary}
    preds["Rid"] = 2
    for r in roles:
        preds[_role_name(*r)] = 2
    vocab = Vocabulary(preds)

    # controller B
    b_elems, b_labels = _controller()
    b_edges = _b_edges(m, roles)
    interp_b: Dict[str, Set[Tuple[str, ...]]] = {p: set() for p in preds}
    for e in b_elems:
        for lab in b_labels[e]:
            interp_b[lab].add((_b_name(e),))
    for rn, es in b_edges.items():
        for (u, v) in es:
            interp_b[rn].add((_b_name(u), _b_name(v)))
    b_hat = ("and", 1, 1, 1, "l")
    if mark_global:
        interp_b["Sstar"].add((_b_name(b_hat),))
    B = Structure(vocab, [_b_name(e) for e in b_elems], interp_b)

    # source structure A: cell parts plus a copy of B
    domain: List[str] = []
    interp: Dict[str, Set[Tuple[str, ...]]] = {p: set() for p in preds}
    finals = m.finals()
    for i in range(1, s + 1):
        for sym in cells_syms:
            for d in DIRS:
                name = _cell_name(i, sym, d)
                domain.append(name)
                interp["U" + d].add((name,))
                for j in range(1, s + 1):
                    if j != i:
                        interp[f"V{j}"].add((name,))
                if isinstance(sym, tuple):
                    if sym[0] in m.f_acc:
                        interp["U1"].add((name,))
                    if sym[0] in m.f_rej:
                        interp["U0"].add((name,))
        # within-part transition edges
        for (q, a, hpos, d) in roles:
            rn = _role_name(q, a, hpos, d)
            branch = 0 if d == "l" else 1
            for sym in cells_syms:
                new = _cell_update(m, sym, i, q, a, hpos, branch)
                if new is None:
                    continue
                for t in DIRS:
                    interp[rn].add((_cell_name(i, sym, t), _cell_name(i, new, d)))
        # Rid: identity on tape symbols and final heads
        for sym in cells_syms:
            if isinstance(sym, str) or sym[0] in finals:
                for t in DIRS:
                    interp["Rid"].add((_cell_name(i, sym, t), _cell_name(i, sym, t)))

    # embedded copy of the controller
    copy_name = {e: "A/" + _b_name(e) for e in b_elems}
    for e in b_elems:
        domain.append(copy_name[e])
        for lab in b_labels[e]:
            interp[lab].add((copy_name[e],))
    for rn, es in b_edges.items():
        for (u, v) in es:
            interp[rn].add((copy_name[u], copy_name[v]))

    # connections: every cell element reaches every copy element under every
    # role except Rid; final heads stay unconnected
    role_names = [_role_name(*r) for r in roles]
    for i in range(1, s + 1):
        for sym in cells_syms:
            if isinstance(sym, tuple) and sym[0] in finals:
                continue
            for t in DIRS:
                src = _cell_name(i, sym, t)
                for e in b_elems:
                    for rn in role_names:
                        interp[rn].add((src, copy_name[e]))

    alpha0 = initial_config(m, word)
    X = frozenset(_cell_name(i + 1, alpha0[i], "l") for i in range(s))
    if mark_global:
        for x in X:
            interp["Sstar"].add((x,))
    A = Structure(vocab, domain, interp)
    return HardnessInstance(A, B, X, _b_name(b_hat), m, word)


def build_global_instance(m: ATM, word: str) -> Tuple[Structure, Structure]:
    """The S*-marked variant: global_hornsim(A, B) iff M accepts w."""
    inst = build_hornsim_instance(m, word, mark_global=True)
    return inst.A, inst.B


# ---------------------------------------------------------------------------
# Machine zoo
# ---------------------------------------------------------------------------

def _simple_machine(left_accepts: bool, right_accepts: bool) -> ATM:
    """One universal step, both branches final."""
    ql = "qa" if left_accepts else "qr"
    qr = "qa" if right_accepts else "qr"
    return ATM(
        q_exist=frozenset(), q_univ=frozenset({"q0"}),
        f_acc=frozenset({"qa"}), f_rej=frozenset({"qr"}),
        sigma=("a",), gamma=("a",), blank="a", q0="q0",
        trans={("q0", "a"): ((ql, "a", "H"), (qr, "a", "H"))},
        space=1,
    )


def _alternation_machine(pattern: str) -> ATM:
    """Universal root over two existential nodes; `pattern` gives the four
    leaf verdicts (e.g. "arra"), value = min(max(p0,p1), max(p2,p3))."""
    leaf = {"a": "qa", "r": "qr"}
    return ATM(
        q_exist=frozenset({"e0", "e1"}), q_univ=frozenset({"q0"}),
        f_acc=frozenset({"qa"}), f_rej=frozenset({"qr"}),
        sigma=("a",), gamma=("a",), blank="a", q0="q0",
        trans={
            ("q0", "a"): (("e0", "a", "H"), ("e1", "a", "H")),
            ("e0", "a"): ((leaf[pattern[0]], "a", "H"), (leaf[pattern[1]], "a", "H")),
            ("e1", "a"): ((leaf[pattern[2]], "a", "H"), (leaf[pattern[3]], "a", "H")),
        },
        space=1,
    )


def _mover_machine(accept_on: str, word_sym: str = "0") -> ATM:
    """Two cells: writes and moves right, then decides by the symbol read;
    exercises L/R head moves and tape contents."""
    return ATM(
        q_exist=frozenset({"e"}), q_univ=frozenset({"q0"}),
        f_acc=frozenset({"qa"}), f_rej=frozenset({"qr"}),
        sigma=("0", "1"), gamma=("0", "1"), blank="0", q0="q0",
        trans={
            ("q0", "0"): (("e", "1", "R"), ("e", "0", "R")),
            ("q0", "1"): (("e", "1", "R"), ("e", "1", "R")),
            ("e", "0"): (("qa" if accept_on == "0" else "qr", "0", "H"),
                          ("qr", "0", "H")),
            ("e", "1"): (("qa" if accept_on == "1" else "qr", "1", "H"),
                          ("qr", "1", "H")),
        },
        space=2,
    )


def _walk_machine(accepting: bool) -> ATM:
    """Three cells: walk right to the end, then back left, then halt."""
    final = "qa" if accepting else "qr"
    return ATM(
        q_exist=frozenset({"w1", "w2"}), q_univ=frozenset({"q0"}),
        f_acc=frozenset({"qa"}), f_rej=frozenset({"qr"}),
        sigma=("a",), gamma=("a",), blank="a", q0="q0",
        trans={
            ("q0", "a"): (("w1", "a", "R"), ("w1", "a", "R")),
            ("w1", "a"): (("w2", "a", "R"), ("w2", "a", "R")),
            ("w2", "a"): ((final, "a", "L"), (final, "a", "L")),
        },
        space=3,
    )


def machine_zoo() -> List[Tuple[str, ATM, str, bool]]:
    """(name, machine, word, accepts) with verdicts pinned by atm_accepts."""
    zoo: List[Tuple[str, ATM, str, bool]] = []
    for la in (True, False):
        for ra in (True, False):
            m = _simple_machine(la, ra)
            zoo.append((f"simple_{int(la)}{int(ra)}", m, "a", la and ra))
    for pattern, expect in (("araa", True), ("arrr", False), ("rrra", False)):
        zoo.append((f"alt_{pattern}", _alternation_machine(pattern), "a",
                    expect))
    zoo.append(("mover_acc", _mover_machine("0"), "0", True))
    zoo.append(("mover_rej", _mover_machine("1"), "0", False))
    zoo.append(("walk3", _walk_machine(True), "a", True))
    for name, m, w, expect in zoo:
        assert atm_accepts(m, w) == expect, name
    return zoo
