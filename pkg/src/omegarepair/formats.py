"""Line-oriented text formats for Kripke structures, Buchi automata and
repair machines, with precise line/column diagnostics and byte-stable
(sorted) serialization."""

from __future__ import annotations

from fractions import Fraction
from typing import Union

from .core import (NBA, Aggregator, AggregatorKind, KripkeStructure,
                   RepairMachine, RMTransition)


class FormatError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, col {col}: {message}")


def parse_rational(text: str) -> Fraction:
    try:
        if "/" in text:
            p, q = text.split("/", 1)
            return Fraction(int(p), int(q))
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad rational {text!r}") from exc


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _lines(text: str):
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        yield i, line, line.split()


def _col(line: str, token: str) -> int:
    idx = line.find(token)
    return idx + 1 if idx >= 0 else 1


def parse_model(text: str) -> Union[KripkeStructure, NBA, RepairMachine]:
    rows = list(_lines(text))
    if not rows:
        raise FormatError("empty model file", 0, 0)
    i, line, toks = rows[0]
    head = toks[0]
    if head == "KRIPKE":
        return _parse_kripke(rows[1:])
    if head == "NBA":
        return _parse_nba(rows[1:])
    if head == "RM":
        return _parse_rm(toks, i, line, rows[1:])
    raise FormatError(f"unknown header {head!r}", i, _col(line, head))


def _parse_kripke(rows) -> KripkeStructure:
    states, initial, labeling, edges = [], set(), {}, set()
    for i, line, toks in rows:
        if toks[0] == "STATE":
            if len(toks) < 4 or toks[2] != "LABEL":
                raise FormatError("expected STATE <id> LABEL <sym> [INIT]",
                                  i, _col(line, toks[0]))
            sid, sym = toks[1], toks[3]
            if sid in labeling:
                raise FormatError(f"duplicate state {sid}", i, _col(line, sid))
            states.append(sid)
            labeling[sid] = sym
            for flag in toks[4:]:
                if flag == "INIT":
                    initial.add(sid)
                else:
                    raise FormatError(f"unknown flag {flag!r}", i, _col(line, flag))
        elif toks[0] == "EDGE":
            if len(toks) != 3:
                raise FormatError("expected EDGE <src> <dst>", i, _col(line, toks[0]))
            edges.add((toks[1], toks[2]))
        else:
            raise FormatError(f"unknown directive {toks[0]!r}", i, _col(line, toks[0]))
    for i, line, toks in rows:
        if toks[0] == "EDGE":
            for s in toks[1:3]:
                if s not in labeling:
                    raise FormatError(f"unknown state {s!r}", i, _col(line, s))
    return KripkeStructure(
        states=frozenset(states),
        transitions=frozenset(edges),
        initial=frozenset(initial),
        propositions=frozenset(labeling.values()),
        labeling=labeling,
    )


def _parse_nba(rows) -> NBA:
    alphabet, states, initial, accepting, edges = set(), [], set(), set(), set()
    for i, line, toks in rows:
        if toks[0] == "ALPHABET":
            alphabet.update(toks[1:])
        elif toks[0] == "STATE":
            sid = toks[1]
            if sid in states:
                raise FormatError(f"duplicate state {sid}", i, _col(line, sid))
            states.append(sid)
            for flag in toks[2:]:
                if flag == "INIT":
                    initial.add(sid)
                elif flag == "ACC":
                    accepting.add(sid)
                else:
                    raise FormatError(f"unknown flag {flag!r}", i, _col(line, flag))
        elif toks[0] == "EDGE":
            if len(toks) != 4:
                raise FormatError("expected EDGE <src> <sym> <dst>",
                                  i, _col(line, toks[0]))
            src, sym, dst = toks[1:]
            for s in (src, dst):
                if s not in states:
                    raise FormatError(f"unknown state {s!r}", i, _col(line, s))
            if sym not in alphabet:
                raise FormatError(f"unknown symbol {sym!r}", i, _col(line, sym))
            edges.add((src, sym, dst))
        else:
            raise FormatError(f"unknown directive {toks[0]!r}", i, _col(line, toks[0]))
    return NBA(
        states=frozenset(states),
        alphabet=frozenset(alphabet),
        initial=frozenset(initial),
        accepting=frozenset(accepting),
        transitions=frozenset(edges),
    )


def _parse_rm(header_toks, hi, hline, rows) -> RepairMachine:
    if len(header_toks) < 2:
        raise FormatError("expected RM <DSUM p/q | MEAN | SUP | LIMSUP>",
                          hi, _col(hline, "RM"))
    kind_name = header_toks[1]
    try:
        kind = AggregatorKind(kind_name)
    except ValueError:
        raise FormatError(f"unknown aggregator {kind_name!r}",
                          hi, _col(hline, kind_name))
    if kind is AggregatorKind.DSUM:
        if len(header_toks) != 3:
            raise FormatError("DSUM needs a discount factor p/q",
                              hi, _col(hline, kind_name))
        try:
            lam = parse_rational(header_toks[2])
        except ValueError as exc:
            raise FormatError(str(exc), hi, _col(hline, header_toks[2]))
        agg = Aggregator(kind, lam)
    else:
        agg = Aggregator(kind)
    in_alpha, out_alpha = set(), set()
    states, initial, accepting, edges = [], set(), set(), set()
    for i, line, toks in rows:
        if toks[0] == "IN":
            in_alpha.update(toks[1:])
        elif toks[0] == "OUT":
            out_alpha.update(toks[1:])
        elif toks[0] == "STATE":
            sid = toks[1]
            if sid in states:
                raise FormatError(f"duplicate state {sid}", i, _col(line, sid))
            states.append(sid)
            for flag in toks[2:]:
                if flag == "INIT":
                    initial.add(sid)
                elif flag == "ACC":
                    accepting.add(sid)
                else:
                    raise FormatError(f"unknown flag {flag!r}", i, _col(line, flag))
        elif toks[0] == "EDGE":
            if len(toks) != 6:
                raise FormatError(
                    "expected EDGE <src> <insym> <dst> <outword|-> <cost>",
                    i, _col(line, toks[0]))
            src, insym, dst, outword, cost_s = toks[1:]
            for s in (src, dst):
                if s not in states:
                    raise FormatError(f"unknown state {s!r}", i, _col(line, s))
            if insym not in in_alpha:
                raise FormatError(f"unknown input symbol {insym!r}",
                                  i, _col(line, insym))
            out = () if outword == "-" else tuple(outword.split("."))
            for sym in out:
                if sym not in out_alpha:
                    raise FormatError(f"unknown output symbol {sym!r}",
                                      i, _col(line, outword))
            try:
                cost = int(cost_s)
            except ValueError:
                raise FormatError(f"bad cost {cost_s!r}", i, _col(line, cost_s))
            if cost < 0:
                raise FormatError(f"negative cost {cost}", i, _col(line, cost_s))
            edges.add(RMTransition(src, insym, dst, out, cost))
        else:
            raise FormatError(f"unknown directive {toks[0]!r}", i, _col(line, toks[0]))
    return RepairMachine(
        states=frozenset(states),
        input_alphabet=frozenset(in_alpha),
        output_alphabet=frozenset(out_alpha),
        initial=frozenset(initial),
        accepting=frozenset(accepting),
        transitions=frozenset(edges),
        aggregator=agg,
    )


def serialize_model(x: Union[KripkeStructure, NBA, RepairMachine]) -> str:
    if isinstance(x, KripkeStructure):
        lines = ["KRIPKE"]
        for s in sorted(x.states):
            flag = " INIT" if s in x.initial else ""
            lines.append(f"STATE {s} LABEL {x.labeling[s]}{flag}")
        for (a, b) in sorted(x.transitions):
            lines.append(f"EDGE {a} {b}")
    elif isinstance(x, NBA):
        lines = ["NBA", "ALPHABET " + " ".join(sorted(x.alphabet))]
        for s in sorted(x.states):
            flags = ("" if s not in x.initial else " INIT") + \
                    ("" if s not in x.accepting else " ACC")
            lines.append(f"STATE {s}{flags}")
        for (a, sym, b) in sorted(x.transitions):
            lines.append(f"EDGE {a} {sym} {b}")
    elif isinstance(x, RepairMachine):
        lines = [f"RM {x.aggregator}",
                 "IN " + " ".join(sorted(x.input_alphabet)),
                 "OUT " + " ".join(sorted(x.output_alphabet))]
        for s in sorted(x.states):
            flags = ("" if s not in x.initial else " INIT") + \
                    ("" if s not in x.accepting else " ACC")
            lines.append(f"STATE {s}{flags}")
        for tr in sorted(x.transitions):
            outword = ".".join(tr.out) if tr.out else "-"
            lines.append(f"EDGE {tr.src} {tr.inp} {tr.dst} {outword} {tr.cost}")
    else:
        raise TypeError(f"cannot serialize {type(x).__name__}")
    return "\n".join(lines) + "\n"
