"""Probabilistic spiking machines over word lengths.

States are word lengths. Transition counts come from consecutive words inside
each sentence; the filtered graph keeps, for every state, only its most
frequent successor, which makes it a functional graph.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .lexicon import Sentence


@dataclass(frozen=True)
class TransitionGraph:
    states: frozenset[int]
    counts: dict[tuple[int, int], int]

    @classmethod
    def from_counts(cls, counts: Mapping[tuple[int, int], int],
                    states: Iterable[int] = ()) -> "TransitionGraph":
        counts = {(int(i), int(j)): int(c) for (i, j), c in counts.items() if c > 0}
        st = set(states)
        for i, j in counts:
            st.update((i, j))
        return cls(frozenset(st), counts)

    @property
    def probabilities(self) -> dict[tuple[int, int], float]:
        out_tot = Counter()
        for (i, _), c in self.counts.items():
            out_tot[i] += c
        return {(i, j): c / out_tot[i] for (i, j), c in sorted(self.counts.items())}

    def successors(self, i: int) -> dict[int, int]:
        return {j: c for (a, j), c in self.counts.items() if a == i}

    def scaled(self, k: int) -> "TransitionGraph":
        return TransitionGraph(self.states, {e: c * k for e, c in self.counts.items()})


@dataclass(frozen=True)
class FunctionalGraph:
    successor: dict[int, int]
    states: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states) | set(self.successor)
                           | set(self.successor.values()))

    @classmethod
    def from_map(cls, successor: Mapping[int, int], states: Iterable[int] = ()) -> "FunctionalGraph":
        return cls(dict(successor), frozenset(states))


@dataclass(frozen=True)
class MachineReport:
    states: list[int]
    transitions: list[dict]
    leaves: list[int]
    absorbing: list[int]
    cycles: list[list[int]]
    max_transient: int | None
    core: list[int]
    filtered_leaves: list[int]

    def to_dict(self) -> dict:
        return {
            "states": self.states,
            "transitions": self.transitions,
            "leaves": self.leaves,
            "absorbing": self.absorbing,
            "cycles": self.cycles,
            "max_transient": self.max_transient,
            "core": self.core,
            "filtered_leaves": self.filtered_leaves,
        }


def build_machine(sentences: Sequence[Sentence] | Sequence[Sequence[int]],
                  max_state: int | None = None) -> TransitionGraph:
    """Count word-to-word transitions inside each sentence.

    Words longer than ``max_state`` are dropped before pairing. Pairs never span
    two sentences.
    """
    counts: Counter = Counter()
    states: set[int] = set()
    for s in sentences:
        words = s.word_lengths if isinstance(s, Sentence) else tuple(s)
        if max_state is not None:
            words = [l for l in words if l <= max_state]
        states.update(words)
        counts.update(zip(words, words[1:]))
    if not counts:
        raise ValueError("no transitions: every sentence has fewer than 2 words")
    return TransitionGraph(frozenset(states), dict(counts))


def filter_graph(g: TransitionGraph) -> FunctionalGraph:
    """Keep the most frequent outgoing transition of each state (smallest target on ties)."""
    best: dict[int, tuple[int, int]] = {}
    for (i, j), c in g.counts.items():
        cur = best.get(i)
        if cur is None or c > cur[1] or (c == cur[1] and j < cur[0]):
            best[i] = (j, c)
    return FunctionalGraph({i: j for i, (j, _) in sorted(best.items())}, g.states)


def _edges(g: TransitionGraph | FunctionalGraph) -> Iterable[tuple[int, int]]:
    if isinstance(g, FunctionalGraph):
        return g.successor.items()
    return g.counts.keys()


def leaves(g: TransitionGraph | FunctionalGraph) -> set[int]:
    """States without predecessors; a self-loop counts as a predecessor."""
    has_pred = {j for _, j in _edges(g)}
    return set(g.states) - has_pred


def absorbing_states(f: FunctionalGraph) -> set[int]:
    return {i for i, j in f.successor.items() if i == j}


def cycles(f: FunctionalGraph) -> list[list[int]]:
    """All cycles, each rotated to start at its smallest state, sorted by that state."""
    colour: dict[int, int] = {}  # 1 = on current path, 2 = done
    found = []
    for start in sorted(f.states):
        if start in colour:
            continue
        path = []
        node = start
        while node is not None and node not in colour:
            colour[node] = 1
            path.append(node)
            node = f.successor.get(node)
        if node is not None and colour[node] == 1:
            cyc = path[path.index(node):]
            k = cyc.index(min(cyc))
            found.append(cyc[k:] + cyc[:k])
        for v in path:
            colour[v] = 2
    return sorted(found)


def max_transient(f: FunctionalGraph) -> int:
    """Longest run of transitions from a leaf until a cycle (or a dead end) is reached."""
    lv = leaves(f)
    if not lv:
        raise ValueError("functional graph has no leaves")
    on_cycle = {v for c in cycles(f) for v in c}
    depth: dict[int, int] = {v: 0 for v in on_cycle}

    def walk(v: int) -> int:
        path = []
        while v not in depth:
            nxt = f.successor.get(v)
            if nxt is None:
                depth[v] = 0
                break
            path.append(v)
            v = nxt
        d = depth[v]
        for u in reversed(path):
            d += 1
            depth[u] = d
        return depth[path[0]] if path else depth[v]

    return max(walk(v) for v in lv)


def stationary_distribution(g: TransitionGraph, restart: float = 0.01,
                            tol: float = 1e-10, max_iter: int = 100_000) -> dict[int, float]:
    """Fixed point of the restart-smoothed chain.

    With probability ``1 - restart`` the chain follows the empirical transition
    probabilities, otherwise it jumps to a uniformly chosen state. States with no
    outgoing transitions jump uniformly.
    """
    states = sorted(g.states)
    if not states:
        raise ValueError("graph has no states")
    n = len(states)
    probs = g.probabilities
    rows: dict[int, list[tuple[int, float]]] = {}
    for (i, j), p in probs.items():
        rows.setdefault(i, []).append((j, p))
    pi = {s: 1.0 / n for s in states}
    for _ in range(max_iter):
        dangling = sum(pi[s] for s in states if s not in rows)
        base = restart / n + (1 - restart) * dangling / n
        nxt = {s: base for s in states}
        for i, out in rows.items():
            m = (1 - restart) * pi[i]
            for j, p in out:
                nxt[j] += m * p
        total = sum(nxt.values())
        nxt = {s: v / total for s, v in nxt.items()}
        diff = sum(abs(nxt[s] - pi[s]) for s in states)
        pi = nxt
        if diff < tol:
            return pi
    raise RuntimeError(f"stationary distribution did not converge in {max_iter} iterations")


def attractive_core(g: TransitionGraph, mass: float = 0.8, restart: float = 0.01) -> list[int]:
    """Smallest set of highest-mass states whose stationary mass reaches ``mass``."""
    pi = stationary_distribution(g, restart=restart)
    ranked = sorted(pi, key=lambda s: (-pi[s], s))
    core, acc = [], 0.0
    for s in ranked:
        core.append(s)
        acc += pi[s]
        if acc >= mass - 1e-12:
            break
    return core


def analyze(g: TransitionGraph, mass: float = 0.8) -> MachineReport:
    f = filter_graph(g)
    try:
        mt = max_transient(f)
    except ValueError:
        mt = None
    probs = g.probabilities
    return MachineReport(
        states=sorted(g.states),
        transitions=[{"from": i, "to": j, "count": g.counts[(i, j)], "p": p}
                     for (i, j), p in probs.items()],
        leaves=sorted(leaves(g)),
        absorbing=sorted(absorbing_states(f)),
        cycles=cycles(f),
        max_transient=mt,
        core=attractive_core(g, mass),
        filtered_leaves=sorted(leaves(f)),
    )


def to_dot(g: TransitionGraph | FunctionalGraph, name: str = "machine") -> str:
    """Graphviz DOT text; probabilistic edges are labelled with their probability."""
    lines = [f"digraph {name} {{"]
    for s in sorted(g.states):
        lines.append(f"  {s};")
    if isinstance(g, FunctionalGraph):
        for i, j in sorted(g.successor.items()):
            lines.append(f"  {i} -> {j};")
    else:
        for (i, j), p in g.probabilities.items():
            lines.append(f'  {i} -> {j} [label="{p:.3g}", weight={g.counts[(i, j)]}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
