"""Synchronized product of Kripke structure, repair machine and Buchi
automaton, the derived two-player arena, and the transducer product
constructions used by mask synthesis.

The product degeneralizes the two Buchi conditions (accepting states of the
machine and of the automaton) with a two-valued counter; the arena splits
every product edge into a weighted Min move (rewrite choice) followed by a
zero-weight Max move (trace successor choice).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from .core import NBA, KripkeStructure, RepairMachine, RMTransition, validate, ModelError


@dataclass(frozen=True, order=True)
class ProductVertex:
    kripke: str
    rm: str
    nba: str
    counter: int

    def __str__(self):
        return f"{self.kripke}|{self.rm}|{self.nba}|{self.counter}"


@dataclass(frozen=True)
class ExtendedMove:
    """A multi-letter automaton move (src, word, dst) with a flag recording
    whether any state met while reading the word (including dst, excluding
    src) is accepting."""

    src: str
    word: Tuple[str, ...]
    dst: str
    visits_accepting: bool


@dataclass(frozen=True, order=True)
class ProductEdge:
    src: ProductVertex
    dst: ProductVertex
    weight: int
    rm_transition: Optional[RMTransition] = None
    nba_move: Optional[ExtendedMove] = None
    traversed_accepting: bool = False


@dataclass
class ProductGraph:
    vertices: frozenset
    edges: tuple  # sorted ProductEdges
    initial: frozenset
    final: frozenset
    kripke: Optional[KripkeStructure] = None
    rm: Optional[RepairMachine] = None
    nba: Optional[NBA] = None

    def successor_edges(self, v):
        return [e for e in self.edges if e.src == v]

    def succ_map(self):
        out = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.src].append(e.dst)
        return out

    def edge_map(self):
        out = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.src].append(e)
        return out

    def induced(self, keep):
        """Subgraph induced by the vertex set ``keep``."""
        keep = frozenset(keep)
        return ProductGraph(
            vertices=keep,
            edges=tuple(e for e in self.edges if e.src in keep and e.dst in keep),
            initial=self.initial & keep,
            final=self.final & keep,
            kripke=self.kripke,
            rm=self.rm,
            nba=self.nba,
        )


@dataclass(frozen=True, order=True)
class ArenaVertex:
    """Arena vertex; counter 3 marks the intermediate (Max-owned) vertex.

    ``pending`` carries the already-determined counter value the play resumes
    with after Max picks the trace successor (0 on Min-owned vertices).
    """

    kripke: str
    rm: str
    nba: str
    counter: int
    pending: int = 0

    def __str__(self):
        if self.counter == 3:
            return f"{self.kripke}|{self.rm}|{self.nba}|3>{self.pending}"
        return f"{self.kripke}|{self.rm}|{self.nba}|{self.counter}"


@dataclass(frozen=True, order=True)
class ArenaEdge:
    src: ArenaVertex
    dst: ArenaVertex
    weight: int
    product_edge: Optional[ProductEdge] = None


@dataclass
class GameArena:
    vertices: frozenset
    edges: tuple
    min_vertices: frozenset
    max_vertices: frozenset
    initial: frozenset
    final: frozenset

    def edge_map(self):
        out = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.src].append(e)
        return out

    def restricted(self, keep, allowed_edges=None):
        """Subarena induced by ``keep``; optionally restrict to listed edges."""
        keep = frozenset(keep)
        edges = tuple(
            e for e in self.edges
            if e.src in keep and e.dst in keep
            and (allowed_edges is None or e in allowed_edges)
        )
        return GameArena(
            vertices=keep,
            edges=edges,
            min_vertices=self.min_vertices & keep,
            max_vertices=self.max_vertices & keep,
            initial=self.initial & keep,
            final=self.final & keep,
        )


def extended_moves(b: NBA, src: str, word) -> set:
    """All moves of ``b`` from ``src`` reading the (possibly empty) word."""
    word = tuple(word)
    for sym in word:
        if sym not in b.alphabet:
            raise ValueError(f"symbol {sym!r} not in automaton alphabet")
    if not word:
        return {ExtendedMove(src, (), src, False)}
    return {
        ExtendedMove(src, word, dst, vis or interior)
        for dst, vis, interior in _walk_word(b, src, word)
    }


def _walk_word(b: NBA, src: str, word):
    """(endpoint, endpoint_accepting, interior_accepting) triples after
    reading ``word`` from ``src``; interior excludes both endpoints."""
    level = {(src, False)}
    for i, sym in enumerate(word):
        nxt = set()
        last = i == len(word) - 1
        for q, interior in level:
            for q2 in b.successors(q, sym):
                if last:
                    nxt.add((q2, interior))
                else:
                    nxt.add((q2, interior or q2 in b.accepting))
        level = nxt
    return {(q, q in b.accepting, interior) for q, interior in level}


def build_product(k: KripkeStructure, t: RepairMachine, b: NBA,
                  endpoints_only: bool = False) -> ProductGraph:
    """Synchronized product of Kripke structure, repair machine and NBA.

    Counter update: 1 -> 2 when the machine's target state is accepting;
    2 -> 1 when the automaton's source state is accepting (or, unless
    ``endpoints_only``, when the minimum-cost witness traverses an accepting
    automaton state strictly inside a multi-letter output).  Edge weight is
    the minimum cost over witnesses consistent with the automaton move.
    """
    for x in (k, t, b):
        diag = validate(x)
        if not diag.ok:
            raise ModelError(diag)
    if not set(k.labeling.values()) <= set(t.input_alphabet):
        raise ValueError("repair machine does not read every Kripke label")
    if not set(t.output_alphabet) <= set(b.alphabet):
        raise ValueError("automaton does not read every machine output symbol")

    vertices = frozenset(
        ProductVertex(s, q, p, i)
        for s in k.states for q in t.states for p in b.states for i in (1, 2)
    )
    # group candidate witnesses by (source vertex, target core); the chosen
    # (min-cost, accepting-traversal-preferring) witness fixes the counter
    best = {}
    for s in sorted(k.states):
        label = k.labeling[s]
        rm_moves = [tr for tr in sorted(t.transitions) if tr.inp == label]
        succs = k.successors(s)
        for tr in rm_moves:
            for p in sorted(b.states):
                for p2, end_acc, interior in sorted(_walk_word(b, p, tr.out)):
                    for i in (1, 2):
                        src_core = (s, tr.src, p, i)
                        for s2 in succs:
                            key = (src_core, (s2, tr.dst, p2))
                            vis = (end_acc or interior) if tr.out else False
                            move = ExtendedMove(p, tr.out, p2, vis)
                            cand = (tr.cost, not interior, tr, move, interior)
                            if key not in best or cand < best[key]:
                                best[key] = cand
    edges = []
    for (src_core, dst_core), (cost, _, tr, move, interior) in best.items():
        s, q, p, i = src_core
        s2, q2, p2 = dst_core
        if i == 1:
            i2 = 2 if q2 in t.accepting else 1
        else:
            credited = p in b.accepting or (interior and not endpoints_only)
            i2 = 1 if credited else 2
        edges.append(ProductEdge(
            src=ProductVertex(s, q, p, i),
            dst=ProductVertex(s2, q2, p2, i2),
            weight=cost,
            rm_transition=tr,
            nba_move=move,
            traversed_accepting=interior,
        ))
    initial = frozenset(
        ProductVertex(s, q, p, 1)
        for s in k.initial for q in t.initial for p in b.initial
    )
    final = frozenset(v for v in vertices if v.nba in b.accepting and v.counter == 2)
    return ProductGraph(
        vertices=vertices,
        edges=tuple(sorted(edges)),
        initial=initial,
        final=final,
        kripke=k, rm=t, nba=b,
    )


def min_vertex(v: ProductVertex) -> ArenaVertex:
    return ArenaVertex(v.kripke, v.rm, v.nba, v.counter, 0)


def build_arena(g: ProductGraph) -> GameArena:
    """Split each product edge into a weighted Min move and a zero-weight Max
    move; Min owns counters 1 and 2, Max owns the intermediate vertices."""
    min_vs = {min_vertex(v) for v in g.vertices}
    mid_vs = set()
    edges = set()
    for e in g.edges:
        mid = ArenaVertex(e.src.kripke, e.dst.rm, e.dst.nba, 3, e.dst.counter)
        mid_vs.add(mid)
        edges.add(ArenaEdge(min_vertex(e.src), mid, e.weight, e))
        edges.add(ArenaEdge(mid, min_vertex(e.dst), 0, None))
    return GameArena(
        vertices=frozenset(min_vs | mid_vs),
        edges=tuple(sorted(edges)),
        min_vertices=frozenset(min_vs),
        max_vertices=frozenset(mid_vs),
        initial=frozenset(min_vertex(v) for v in g.initial),
        final=frozenset(min_vertex(v) for v in g.final),
    )


def _pair_state(a: str, b: str, i: int) -> str:
    return f"{a}&{b}&{i}"


def restrict_domain(t: RepairMachine, n: NBA) -> RepairMachine:
    """Repair machine behaving like ``t`` on inputs accepted by ``n``.

    Standard two-flag degeneralization of the conjunction of the machine's
    and the automaton's Buchi conditions, with ``n`` reading input letters.
    """
    if frozenset(n.alphabet) != frozenset(t.input_alphabet):
        raise ValueError("domain automaton alphabet must equal the input alphabet")
    states = set()
    transitions = set()
    for tr in sorted(t.transitions):
        for (p, sym, p2) in sorted(n.transitions):
            if sym != tr.inp:
                continue
            for i in (1, 2):
                if i == 1:
                    i2 = 2 if tr.dst in t.accepting else 1
                else:
                    i2 = 1 if p in n.accepting else 2
                src = _pair_state(tr.src, p, i)
                dst = _pair_state(tr.dst, p2, i2)
                transitions.add(RMTransition(src, tr.inp, dst, tr.out, tr.cost))
    for q in t.states:
        for p in n.states:
            for i in (1, 2):
                states.add(_pair_state(q, p, i))
    return RepairMachine(
        states=frozenset(states),
        input_alphabet=t.input_alphabet,
        output_alphabet=t.output_alphabet,
        initial=frozenset(
            _pair_state(q, p, 1) for q in t.initial for p in n.initial
        ),
        accepting=frozenset(
            _pair_state(q, p, 2)
            for q in t.states for p in n.accepting
        ),
        transitions=frozenset(transitions),
        aggregator=t.aggregator,
    )


def output_product(t: RepairMachine, a: NBA) -> RepairMachine:
    """Repair machine whose accepting runs are the runs of ``t`` whose output
    word is accepted by ``a`` (``a`` reads the produced output words)."""
    if not set(t.output_alphabet) <= set(a.alphabet):
        raise ValueError("automaton does not read every machine output symbol")
    states = set()
    transitions = set()
    for q in t.states:
        for p in a.states:
            for i in (1, 2):
                states.add(_pair_state(q, p, i))
    for tr in sorted(t.transitions):
        for p in sorted(a.states):
            for p2, end_acc, interior in sorted(_walk_word(a, p, tr.out)):
                for i in (1, 2):
                    if i == 1:
                        i2 = 2 if tr.dst in t.accepting else 1
                    else:
                        i2 = 1 if (p in a.accepting or interior) else 2
                    transitions.add(RMTransition(
                        _pair_state(tr.src, p, i), tr.inp,
                        _pair_state(tr.dst, p2, i2), tr.out, tr.cost,
                    ))
    return RepairMachine(
        states=frozenset(states),
        input_alphabet=t.input_alphabet,
        output_alphabet=t.output_alphabet,
        initial=frozenset(
            _pair_state(q, p, 1) for q in t.initial for p in a.initial
        ),
        accepting=frozenset(
            _pair_state(q, p, 2) for q in t.states for p in a.accepting
        ),
        transitions=frozenset(transitions),
        aggregator=t.aggregator,
    )
