"""Bundled example structures, TBoxes and relations used in tests, docs and
the CLI's --examples generator."""

from __future__ import annotations

from typing import Dict, List, Tuple

from . import gf
from .concepts import parse_concept, parse_tbox
from .gf import Link, make_link, parse_gf
from .structures import Structure, Vocabulary

DL_VOCAB = Vocabulary({"A": 1, "B": 1, "R": 2})


def a0() -> Structure:
    return Structure(DL_VOCAB, ["a", "b", "c", "d", "e"], {
        "A": {("c",), ("e",)},
        "B": {("d",)},
        "R": {("a", "b"), ("a", "c"), ("d", "e")},
    })


def b0() -> Structure:
    return Structure(DL_VOCAB, ["a'", "b'"], {
        "A": {("b'",)},
        "B": set(),
        "R": {("a'", "b'")},
    })


C_NABLA = parse_concept("(some R . top & all R . A) -> B")

# the Horn-FO rewriting of C_nabla
C_NABLA_HORN_FO = parse_gf(
    "(exists y : R(x,y) . top) -> (exists z : R(x,z) . (A(z) -> B(x)))")

Z_8I: List[Tuple[frozenset, str]] = [
    (frozenset({"a", "d"}), "a'"),
    (frozenset({"e"}), "b'"),
]

TBOX_VOCAB = Vocabulary({"E": 1, "A1": 1, "A2": 1, "B1": 1, "B2": 1, "R": 2})

T_HORN = parse_tbox("""
E <= A1 | A2 | some R . (!B1 & !B2)
some R . (B1 & B2) <= bot
E <= some R . top
some R . B1 <= some R . B2
some R . B2 <= some R . B1
""")

# the displayed Horn conjunction equivalent to T_horn
T_HORN_FO = parse_gf(
    "(forall x . (exists y : R(x,y) . B1(y) & B2(y)) -> bot)"
    " & (forall x . E(x) -> exists y : R(x,y) . top)"
    " & (forall x . (exists y : R(x,y) . B1(y)) -> (exists y : R(x,y) . B2(y)))"
    " & (forall x . (exists y : R(x,y) . B2(y)) -> (exists y : R(x,y) . B1(y)))"
    " & (forall x . E(x) -> exists y : R(x,y) . ((B1(y) -> A1(x)) & (B2(y) -> A2(x))))")


def a1() -> Structure:
    return Structure(TBOX_VOCAB, ["a1", "c1", "d1", "a2", "c2", "d2"], {
        "E": {("a1",), ("a2",)},
        "A1": {("a1",)},
        "A2": {("a2",)},
        "B1": {("c1",), ("c2",)},
        "B2": {("d1",), ("d2",)},
        "R": {("a1", "c1"), ("a1", "d1"), ("a2", "c2"), ("a2", "d2")},
    })


def b1() -> Structure:
    return Structure(TBOX_VOCAB, ["b", "e", "f"], {
        "E": {("b",)},
        "A1": set(),
        "A2": set(),
        "B1": {("e",)},
        "B2": {("f",)},
        "R": {("b", "e"), ("b", "f")},
    })


Z_8II: List[Tuple[frozenset, str]] = [
    (frozenset({"a1", "a2"}), "b"),
    (frozenset({"c1"}), "e"),
    (frozenset({"c2"}), "e"),
    (frozenset({"d1"}), "f"),
    (frozenset({"d2"}), "f"),
]

GUARD_VOCAB = Vocabulary({"A": 1, "B": 1, "D": 1, "E": 1, "R": 2, "S": 2})

T_GUARD = parse_tbox("""
E <= some R . top & some S . top
E & all R . A & all S . B <= D
""")

T_GUARD_FO = parse_gf(
    "(forall x . E(x) -> (exists y : R(x,y) . top) & (exists y : S(x,y) . top))"
    " & (forall x . (E(x) & (forall y : R(x,y) . A(y)) & (forall y : S(x,y) . B(y)))"
    " -> D(x))")

T_GUARD_HORN_FO = parse_gf(
    "forall x . E(x) -> exists y1 y2 : T(x,y1,y2) ."
    " (R(x,y1) & S(x,y2) & ((A(y1) & B(y2)) -> D(x)))")


def example19_a() -> Structure:
    return Structure(GUARD_VOCAB, ["a", "b", "c", "d", "e"], {
        "A": {("d",)},
        "B": {("a",)},
        "D": {("b",)},
        "E": {("b",), ("c",)},
        "R": {("b", "d"), ("c", "d"), ("c", "e")},
        "S": {("b", "a"), ("c", "a")},
    })


def example19_b() -> Structure:
    return Structure(GUARD_VOCAB, ["a'", "b'", "c'", "d'", "e'", "f"], {
        "A": {("d'",)},
        "B": {("a'",)},
        "D": {("b'",)},
        "E": {("b'",), ("c'",), ("f",)},
        "R": {("b'", "d'"), ("c'", "d'"), ("c'", "e'"), ("f", "d'")},
        "S": {("b'", "a'"), ("c'", "a'"), ("f", "a'")},
    })


def example19_links() -> List[Link]:
    A, B = example19_a(), example19_b()
    prime = {"a": "a'", "b": "b'", "c": "c'", "d": "d'", "e": "e'"}
    links = [make_link((prime[u],), [(u,)]) for u in A.domain]
    for r in ("R", "S"):
        for (u, v) in A.interpretation[r]:
            links.append(make_link((prime[u], prime[v]), [(u, v)]))
    links.append(make_link(("f",), [("b",), ("c",)]))
    links.append(make_link(("f", "d'"), [("b", "d"), ("c", "d")]))
    links.append(make_link(("f", "a'"), [("b", "a"), ("c", "a")]))
    return links


GGG_VOCAB = Vocabulary({"A1": 1, "A2": 1})


def ggg_parts() -> Tuple[Structure, Structure]:
    p1 = Structure(GGG_VOCAB, ["u1"], {"A1": {("u1",)}, "A2": set()})
    p2 = Structure(GGG_VOCAB, ["u2"], {"A1": set(), "A2": {("u2",)}})
    return p1, p2


def all_examples() -> Dict[str, Structure]:
    return {
        "A0": a0(), "B0": b0(), "A1": a1(), "B1": b1(),
        "Ex19A": example19_a(), "Ex19B": example19_b(),
        "GGG1": ggg_parts()[0], "GGG2": ggg_parts()[1],
    }
