"""Feature trees, feature graphs, witnesses, and a bounded evaluator.

A feature tree is a sort-labeled, feature-deterministic rooted value;
only the rational ones (finitely many distinct subtrees) are
representable here, as finite rooted graphs.  Two representations
denote the same tree exactly when their roots are bisimilar, so tree
values are minimized and canonically numbered on construction and
equality is plain structural equality.  Feature graphs keep their node
structure: they are identified up to renaming only, implemented by the
same canonical numbering without minimization, and their nodes may lack
sort labels.

Both kinds of value support exact evaluation of quantifier-free
formulae.  Quantified formulae are approximated by enumerating small
candidate values, which yields a sound three-valued verdict: True,
False, or None for unknown.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union

from .core import (
    And,
    Atomic,
    Bottom,
    Eq,
    Excl,
    Exists,
    FeatC,
    FeatId,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Path,
    SortC,
    SortId,
    SugarAgree,
    SugarSortAt,
    Symbols,
    Top,
    VarId,
    atom_vars,
)
from .paths import Agree, PathConstraint, Reach, SortAt
from .prime import PrimeFormula, projection
from .solve import SolvedClause, constrained_vars

Label = Union[SortId, None]
EdgeRow = tuple[tuple[FeatId, int], ...]


@dataclass(frozen=True)
class FeatureTree:
    """Canonical minimal representation of a rational feature tree.

    Node 0 is the root; every node carries a sort and the per-node edge
    rows are sorted by feature name.  Distinct values denote distinct
    trees, so ``==`` is tree equality.
    """

    labels: tuple[SortId, ...]
    edges: tuple[EdgeRow, ...]


@dataclass(frozen=True)
class FeatureGraph:
    """Canonical representative of a feature graph (labels optional).

    The identification up to renaming is load-bearing.  Were rooted
    clause representations taken literally as values, two values could
    pin incompatible constraints on one shared root name: f(x, y) and
    g(x, z) would then have no solution for y and z chosen as literal
    representations sharing a root that carries clashing sorts, since a
    single clause cannot hold both.  The quotient removes exactly that
    obstacle, and with it the solved-clause satisfiability principle
    holds in this structure.
    """

    labels: tuple[Label, ...]
    edges: tuple[EdgeRow, ...]


Value = Union[FeatureTree, FeatureGraph]
Valuation = dict[VarId, Value]


def _reachable(root, edges: Mapping) -> list:
    seen = [root]
    index = {root}
    i = 0
    while i < len(seen):
        u = seen[i]
        i += 1
        for (src, _feat), dst in edges.items():
            if src == u and dst not in index:
                index.add(dst)
                seen.append(dst)
    return seen


def _minimize(nodes: list, labels: Mapping, edges: Mapping) -> tuple[Mapping, Mapping, dict]:
    """Quotient by bisimilarity via partition refinement."""
    out_feats = {n: tuple(sorted(f.name for (m, f) in edges if m == n)) for n in nodes}
    block = {n: (labels.get(n), out_feats[n]) for n in nodes}
    while True:
        sig = {
            n: (
                block[n],
                tuple(
                    sorted(
                        (f.name, block[dst])
                        for (m, f), dst in edges.items()
                        if m == n
                    )
                ),
            )
            for n in nodes
        }
        if len(set(sig.values())) == len(set(block.values())):
            renum = {}
            rep = {}
            for n in nodes:
                if block[n] not in renum:
                    renum[block[n]] = n
                rep[n] = renum[block[n]]
            new_nodes = [n for n in nodes if rep[n] == n]
            new_labels = {n: labels.get(n) for n in new_nodes}
            new_edges = {
                (rep[src], f): rep[dst]
                for (src, f), dst in edges.items()
                if rep[src] == src
            }
            return new_labels, new_edges, rep
        block = sig


def _renumber(root, labels: Mapping, edges: Mapping) -> tuple[tuple, tuple]:
    """Depth-first canonical numbering, features in name order."""
    adj: dict = {}
    for (src, f), dst in edges.items():
        adj.setdefault(src, []).append((f, dst))
    for lst in adj.values():
        lst.sort(key=lambda e: e[0].name)
    order: list = []
    number: dict = {}

    def visit(u) -> None:
        number[u] = len(order)
        order.append(u)
        for _f, w in adj.get(u, ()):
            if w not in number:
                visit(w)

    visit(root)
    out_labels = tuple(labels.get(u) for u in order)
    out_edges = tuple(
        tuple((f, number[w]) for f, w in adj.get(u, ()) if w in number)
        for u in order
    )
    return out_labels, out_edges


def _build(root, labels: Mapping, edges: Mapping, minimize: bool) -> tuple[tuple, tuple]:
    nodes = _reachable(root, edges)
    labels = {n: labels.get(n) for n in nodes}
    edges = {
        (src, f): dst for (src, f), dst in edges.items() if src in labels
    }
    if minimize:
        labels, edges, rep = _minimize(nodes, labels, edges)
        root = rep[root]
    return _renumber(root, labels, edges)


def feature_tree(root, labels: Mapping, edges: Mapping) -> FeatureTree:
    """Build a tree value from node maps; nodes unreachable from the
    root are discarded and the rest must be totally labeled."""
    out_labels, out_edges = _build(root, labels, edges, minimize=True)
    if any(lab is None for lab in out_labels):
        raise ValueError("feature trees need a sort on every node")
    return FeatureTree(out_labels, out_edges)


def feature_graph(root, labels: Mapping, edges: Mapping) -> FeatureGraph:
    out_labels, out_edges = _build(root, labels, edges, minimize=False)
    return FeatureGraph(out_labels, out_edges)


def single_node_tree(sort: SortId) -> FeatureTree:
    return FeatureTree((sort,), ((),))


def graph_canonical(g: FeatureGraph) -> FeatureGraph:
    """Canonical form under consistent node renaming (idempotent)."""
    labels = dict(enumerate(g.labels))
    edges = {(i, f): j for i, row in enumerate(g.edges) for f, j in row}
    return feature_graph(0, labels, edges)


def pregraph_to_graph(root: VarId, clause: SolvedClause) -> FeatureGraph:
    """The feature graph rooted at a variable of an exclusion-free clause."""
    if clause.exclusions:
        raise ValueError("feature graphs come from clauses without exclusions")
    labels: dict = dict(clause.sorts)
    edges: dict = dict(clause.edges)
    return feature_graph(root, labels, edges)


def value_nodes(v: Value) -> int:
    return len(v.labels)


def root_sort(v: Value) -> Label:
    return v.labels[0]


def subvalue(v: Value, f: FeatId) -> Value | None:
    """The direct subvalue at a feature, re-rooted canonically."""
    target = None
    for g, j in v.edges[0]:
        if g == f:
            target = j
            break
    if target is None:
        return None
    labels = dict(enumerate(v.labels))
    edges = {(i, g): j for i, row in enumerate(v.edges) for g, j in row}
    if isinstance(v, FeatureTree):
        return feature_tree(target, labels, edges)
    return feature_graph(target, labels, edges)


def walk_value(v: Value, p: Path) -> Value | None:
    out: Value | None = v
    for f in p.feats:
        if out is None:
            return None
        out = subvalue(out, f)
    return out


def tree_subtree(t: FeatureTree, p: Path) -> FeatureTree | None:
    """Subtree at a path, None when the path leaves the domain."""
    out = walk_value(t, p)
    assert out is None or isinstance(out, FeatureTree)
    return out


def subvalues(v: Value) -> set[Value]:
    """All distinct sub-rooted values (for trees: the distinct subtrees)."""
    out: set[Value] = set()
    labels = dict(enumerate(v.labels))
    edges = {(i, g): j for i, row in enumerate(v.edges) for g, j in row}
    for node in range(len(v.labels)):
        if isinstance(v, FeatureTree):
            out.add(feature_tree(node, labels, edges))
        else:
            out.add(feature_graph(node, labels, edges))
    return out


# ---------------------------------------------------------------------------
# Witness construction


def witness_solved_clause(
    delta: SolvedClause,
    params: Mapping[VarId, FeatureTree],
    default_sort: SortId,
) -> Valuation:
    """Trees satisfying a solved clause, for given parameter trees.

    Every constrained variable becomes a node labeled by its sort (or
    the default), edges follow the clause, and parameter positions graft
    the supplied parameter trees.  Exclusions hold because the clause
    admits no edge beside them.  The result maps constrained variables
    to rational trees and passes the parameters through unchanged.
    """
    cv = constrained_vars(delta)
    pvars = set(delta.variables) - cv
    missing = sorted(v.name for v in pvars if v not in params)
    if missing:
        raise ValueError(f"no parameter trees for: {', '.join(missing)}")

    labels: dict = {}
    edges: dict = {}
    for x in cv:
        labels[("v", x)] = delta.sorts.get(x, default_sort)
    for y in pvars:
        tree = params[y]
        for i, lab in enumerate(tree.labels):
            labels[("p", y, i)] = lab
        for i, row in enumerate(tree.edges):
            for f, j in row:
                edges[(("p", y, i), f)] = ("p", y, j)
    for (x, f), y in delta.edges.items():
        target = ("v", y) if y in cv else ("p", y, 0)
        edges[(("v", x), f)] = target

    out: Valuation = {y: params[y] for y in pvars}
    for x in cv:
        out[x] = feature_tree(("v", x), labels, edges)
    return out


def witness_prime(beta: PrimeFormula, default_sort: SortId) -> Valuation:
    """Trees satisfying a prime formula.

    The graph of the body is witnessed as a solved clause with default
    one-node trees at the unconstrained positions, then the equations
    copy values onto their eliminated left-hand sides.  Bound variables
    receive values too; their part of the witness is determined by the
    free part anyway, and callers evaluating the body need them.
    """
    body = beta.body
    clause = SolvedClause(body.graph)
    cv = constrained_vars(clause)
    pvars = set(clause.variables) - cv
    params = {y: single_node_tree(default_sort) for y in pvars}
    val = witness_solved_clause(clause, params, default_sort)
    for eq in body.normalizer:
        if eq.rhs not in val:
            val[eq.rhs] = single_node_tree(default_sort)
    for eq in body.normalizer:
        val[eq.lhs] = val[eq.rhs]
    return val


# ---------------------------------------------------------------------------
# Evaluation


def holds_path_constraint(alpha: Mapping[VarId, Value], pi: PathConstraint) -> bool:
    """Exact truth of a path constraint under a valuation."""
    if isinstance(pi, Reach):
        got = walk_value(alpha[pi.src], pi.path)
        return got is not None and got == alpha[pi.dst]
    if isinstance(pi, Agree):
        a = walk_value(alpha[pi.lsrc], pi.lpath)
        b = walk_value(alpha[pi.rsrc], pi.rpath)
        return a is not None and a == b
    if isinstance(pi, SortAt):
        a = walk_value(alpha[pi.src], pi.path)
        return a is not None and root_sort(a) == pi.sort
    raise TypeError(f"not a path constraint: {pi!r}")


def satisfies_prime(alpha: Mapping[VarId, Value], beta: PrimeFormula) -> bool:
    """Exact satisfaction of a prime formula on its free variables.

    A prime formula is equivalent to its projection, a finite
    conjunction of proper path constraints over free variables only, so
    no quantifier enumeration is needed.
    """
    return all(holds_path_constraint(alpha, pi) for pi in projection(beta))


def _eval_atom(alpha: Mapping[VarId, Value], atom) -> bool:
    if isinstance(atom, SortC):
        return root_sort(alpha[atom.var]) == atom.sort
    if isinstance(atom, FeatC):
        got = subvalue(alpha[atom.src], atom.feat)
        return got is not None and got == alpha[atom.dst]
    if isinstance(atom, Eq):
        return alpha[atom.lhs] == alpha[atom.rhs]
    assert isinstance(atom, Excl)
    return all(f != atom.feat for f, _ in alpha[atom.var].edges[0])


def _collect_symbols(phi: Formula, alpha: Mapping[VarId, Value]) -> tuple[set, set]:
    sorts: set[SortId] = set()
    feats: set[FeatId] = set()

    def go(psi: Formula) -> None:
        if isinstance(psi, Atomic):
            a = psi.atom
            if isinstance(a, SortC):
                sorts.add(a.sort)
            elif isinstance(a, FeatC):
                feats.add(a.feat)
            elif isinstance(a, Excl):
                feats.add(a.feat)
        elif isinstance(psi, Not):
            go(psi.body)
        elif isinstance(psi, (And, Or, Implies, Iff)):
            go(psi.lhs)
            go(psi.rhs)
        elif isinstance(psi, (Exists, Forall)):
            go(psi.body)
        elif isinstance(psi, SugarSortAt):
            sorts.add(psi.sort)
            feats.update(psi.path.feats)
        elif isinstance(psi, SugarAgree):
            feats.update(psi.lpath.feats)
            feats.update(psi.rpath.feats)

    go(phi)
    for v in alpha.values():
        sorts.update(lab for lab in v.labels if lab is not None)
        for row in v.edges:
            feats.update(f for f, _ in row)
    return sorts, feats


def _shapes(k: int, feats: list[FeatId]) -> Iterator[dict]:
    """Edge structures on nodes 0..k-1 numbered in discovery order.

    Slots are scanned breadth-first; a target is either absent, an
    already known node, or the next new node.  Each isomorphism class of
    reachable deterministic rooted structures on exactly k nodes shows
    up once.
    """
    m = len(feats)

    def rec(node: int, slot: int, created: int, edges: dict) -> Iterator[dict]:
        if node == created:
            if created == k:
                yield dict(edges)
            return
        if slot == m:
            yield from rec(node + 1, 0, created, edges)
            return
        yield from rec(node, slot + 1, created, edges)
        for tgt in range(created):
            edges[(node, feats[slot])] = tgt
            yield from rec(node, slot + 1, created, edges)
            del edges[(node, feats[slot])]
        if created < k:
            edges[(node, feats[slot])] = created
            yield from rec(node, slot + 1, created + 1, edges)
            del edges[(node, feats[slot])]

    yield from rec(0, 0, 1, {})


def enumerate_values(
    kind: str,
    sorts: Iterable[SortId],
    feats: Iterable[FeatId],
    max_nodes: int,
) -> Iterator[Value]:
    """Stream canonical values over finite alphabets, smallest first.

    Tree values may coincide after minimization, so duplicates are
    filtered.  The stream can be very long for larger bounds; consumers
    are expected to impose their own budget.
    """
    sorts = sorted(set(sorts))
    feats = sorted(set(feats))
    if kind == "tree":
        options: list[Label] = list(sorts)
    elif kind == "graph":
        options = [None] + list(sorts)
    else:
        raise ValueError("kind must be 'tree' or 'graph'")
    if not options:
        return
    seen: set[Value] = set()
    for k in range(1, max_nodes + 1):
        for edges in _shapes(k, feats):
            for labeling in itertools.product(options, repeat=k):
                labels = dict(enumerate(labeling))
                try:
                    if kind == "tree":
                        v: Value = feature_tree(0, labels, edges)
                    else:
                        v = feature_graph(0, labels, edges)
                except ValueError:
                    continue
                if v not in seen:
                    seen.add(v)
                    yield v


def evaluate(
    sym: Symbols,
    kind: str,
    alpha: Mapping[VarId, Value],
    phi: Formula,
    node_bound: int = 4,
    budget: int = 20000,
) -> bool | None:
    """Three-valued evaluation; None means unknown.

    Quantifier-free formulae (exclusions and path sugar included) are
    decided exactly.  A quantifier enumerates candidate values up to the
    node bound over the symbols of the formula and valuation plus one
    extra sort and one extra feature; an existential returns True on a
    witness and None otherwise, a universal returns False on a
    counterexample and None otherwise.  The shared budget caps the total
    number of candidates tried across all quantifiers.
    """
    sorts, feats = _collect_symbols(phi, alpha)
    sorts.add(sym.fresh_sort("S"))
    feats.add(sym.fresh_feat("f"))
    remaining = [budget]

    def ev(psi: Formula, env: Mapping[VarId, Value]) -> bool | None:
        if isinstance(psi, Top):
            return True
        if isinstance(psi, Bottom):
            return False
        if isinstance(psi, Atomic):
            return _eval_atom(env, psi.atom)
        if isinstance(psi, SugarAgree):
            return holds_path_constraint(
                env, Agree(psi.lhs, psi.lpath, psi.rhs, psi.rpath)
            )
        if isinstance(psi, SugarSortAt):
            return holds_path_constraint(env, SortAt(psi.sort, psi.var, psi.path))
        if isinstance(psi, Not):
            r = ev(psi.body, env)
            return None if r is None else not r
        if isinstance(psi, And):
            a = ev(psi.lhs, env)
            if a is False:
                return False
            b = ev(psi.rhs, env)
            if b is False:
                return False
            return True if (a is True and b is True) else None
        if isinstance(psi, Or):
            a = ev(psi.lhs, env)
            if a is True:
                return True
            b = ev(psi.rhs, env)
            if b is True:
                return True
            return False if (a is False and b is False) else None
        if isinstance(psi, Implies):
            return ev(Or(Not(psi.lhs), psi.rhs), env)
        if isinstance(psi, Iff):
            a = ev(psi.lhs, env)
            b = ev(psi.rhs, env)
            if a is None or b is None:
                return None
            return a == b
        if isinstance(psi, (Exists, Forall)):
            existential = isinstance(psi, Exists)
            for v in enumerate_values(kind, sorts, feats, node_bound):
                if remaining[0] <= 0:
                    return None
                remaining[0] -= 1
                inner = dict(env)
                inner[psi.var] = v
                r = ev(psi.body, inner)
                if existential and r is True:
                    return True
                if not existential and r is False:
                    return False
            return None
        raise ValueError(f"cannot evaluate {psi!r}")

    return ev(phi, dict(alpha))


# ---------------------------------------------------------------------------
# JSON serialization


def value_to_json(v: Value) -> dict:
    nodes = []
    for i, lab in enumerate(v.labels):
        node: dict = {"id": i}
        if lab is not None:
            node["sort"] = lab.name
        nodes.append(node)
    edges = [
        {"src": i, "feature": f.name, "dst": j}
        for i, row in enumerate(v.edges)
        for f, j in row
    ]
    edges.sort(key=lambda e: (e["src"], e["feature"], e["dst"]))
    return {"root": 0, "nodes": nodes, "edges": edges}


def valuation_to_json(alpha: Mapping[VarId, Value]) -> dict:
    """One shared node pool; equal values share their block of nodes."""
    blocks: dict[Value, int] = {}
    nodes: list[dict] = []
    edges: list[dict] = []
    for name in sorted(v.name for v in alpha):
        var = next(v for v in alpha if v.name == name)
        value = alpha[var]
        if value not in blocks:
            offset = len(nodes)
            blocks[value] = offset
            for i, lab in enumerate(value.labels):
                node: dict = {"id": offset + i}
                if lab is not None:
                    node["sort"] = lab.name
                nodes.append(node)
            for i, row in enumerate(value.edges):
                for f, j in row:
                    edges.append(
                        {"src": offset + i, "feature": f.name, "dst": offset + j}
                    )
    edges.sort(key=lambda e: (e["src"], e["feature"], e["dst"]))
    variables = {v.name: blocks[alpha[v]] for v in alpha}
    return {
        "nodes": nodes,
        "edges": edges,
        "vars": {name: variables[name] for name in sorted(variables)},
    }
