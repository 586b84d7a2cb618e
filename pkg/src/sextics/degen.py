"""Degenerations of sets of singularities and the adjacency graphs of non-real strata."""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from functools import lru_cache

import networkx as nx

from .classify import enumerate_all, maximizing_table, reference_rows
from .lattices import SingularitySet, degenerates_to, parse_set
from .lattices import degeneration_classes as degeneration_classes  # noqa: F401 re-export
from .lattices import perturbations as _perturbations

EXCEPTIONAL_CHAINS = (("2D8", "D9+D8", "2D9"), ("2D4+4A2", "D7+D4+3A2", "2D7+2A2"))


def perturbations(S: SingularitySet, include_empty: bool = False) -> list[SingularitySet]:
    """All sets whose Dynkin graph is an induced subgraph of that of S, sorted."""
    return sorted(_perturbations(S, include_empty))


def maximizing_closure(S: SingularitySet, family: str = "ns") -> set[SingularitySet]:
    """The maximizing reference sets of the family that S degenerates to."""
    return {M for M in maximizing_table(family) if degenerates_to(S, M)}


def exceptional_sets() -> set[SingularitySet]:
    return {parse_set(s) for chain in EXCEPTIONAL_CHAINS for s in chain}


@dataclass
class DegenerationPoset:
    """Realized sets with corank-one degeneration edges S' -> S."""

    graph: nx.DiGraph

    @classmethod
    def build(cls, sets) -> "DegenerationPoset":
        g = nx.DiGraph()
        by_mu: dict = {}
        for S in sets:
            g.add_node(S)
            by_mu.setdefault(S.mu, []).append(S)
        for mu, lower in by_mu.items():
            for S1 in lower:
                for S2 in by_mu.get(mu + 1, ()):
                    if degenerates_to(S1, S2):
                        g.add_edge(S1, S2)
        return cls(g)

    def degenerations(self, S: SingularitySet) -> set:
        return nx.descendants(self.graph, S)


# cluster graphs -------------------------------------------------------------

@dataclass(frozen=True)
class Vertex:
    S: SingularitySet
    k: int = 0

    @property
    def id(self) -> str:
        return f"{self.S}#{self.k}"


@lru_cache(maxsize=None)
def asymmetric_vertices() -> tuple[Vertex, ...]:
    """One vertex per pair of complex conjugate components, over all realized sets."""
    out = []
    for rep in enumerate_all(18, "ns"):
        out += [Vertex(rep.S, k) for k in range(rep.components[1])]
    for S, entry in maximizing_table("ns").items():
        out += [Vertex(S, k) for k in range(entry.c)]
    return tuple(sorted(out, key=lambda v: (v.S.mu, str(v.S), v.k)))


def adjacency_graph() -> nx.DiGraph:
    """Vertices: asymmetric types; edges: corank-one degenerations between them.

    A perturbation with one class is joined to every class of the
    degenerate set; no set with several classes has asymmetric
    perturbations of corank one.
    """
    g = nx.DiGraph()
    verts = asymmetric_vertices()
    for v in verts:
        g.add_node(v.id, S=str(v.S), mu=v.S.mu)
    for v in verts:
        for w in verts:
            if w.S.mu == v.S.mu + 1 and degenerates_to(v.S, w.S):
                g.add_edge(v.id, w.id)
    return g


def _cluster_seeds(p: int) -> list[SingularitySet]:
    return [parse_set(r["set_spec"]) for r in reference_rows("nonreal.tsv") if r["test_prime"] == str(p)]


@dataclass
class ClusterGraph:
    p: int
    graph: nx.DiGraph
    distinguished: list = field(default_factory=list)

    @property
    def vertices(self) -> list[str]:
        return sorted(self.graph.nodes)

    def is_connected(self) -> bool:
        return nx.is_weakly_connected(self.graph)

    def cycle_rank(self) -> int:
        """dim H_1 over F_2 of the underlying undirected graph."""
        u = self.graph.to_undirected()
        return u.number_of_edges() - u.number_of_nodes() + nx.number_connected_components(u)

    def minimal_vertices(self) -> list[str]:
        return sorted(v for v in self.graph.nodes if self.graph.in_degree(v) == 0)

    def to_dot(self) -> str:
        buf = io.StringIO()
        buf.write(f"digraph C{self.p} {{\n")
        for v in sorted(self.graph.nodes):
            style = ' style=filled fillcolor=grey' if v in self.distinguished else ""
            buf.write(f'  "{v}" [label="{self.graph.nodes[v]["S"]}"{style}];\n')
        for a, b in sorted(self.graph.edges):
            buf.write(f'  "{a}" -> "{b}";\n')
        buf.write("}\n")
        return buf.getvalue()

    def to_csv(self) -> str:
        lines = ["source,target"]
        lines += [f"{a},{b}" for a, b in sorted(self.graph.edges)]
        return "\n".join(lines) + "\n"


def build_cluster_graph(p: int) -> ClusterGraph:
    if p not in (2, 3, 7):
        raise ValueError("clusters exist for p = 2, 3, 7 only")
    g = adjacency_graph()
    seeds = {f"{S}#0" for S in _cluster_seeds(p)}
    nodes = set()
    for comp in nx.weakly_connected_components(g):
        if comp & seeds:
            nodes |= comp
    sub = g.subgraph(nodes).copy()
    cg = ClusterGraph(p, sub)
    if p == 3:
        cg.distinguished = cg.minimal_vertices()
    return cg
