"""Solved forms and the basic simplification engine.

A conjunction of sort, feature, and equation atoms is rewritten to an
equivalent solved formula or to ``false``.  The five rules:

    1. f(x,y) & f(x,z) & rest   =>  f(x,z) & y = z & rest
    2. A(x) & B(x) & rest       =>  false                     (A distinct from B)
    3. A(x) & A(x) & rest       =>  A(x) & rest
    4. x = y & rest             =>  x = y & rest[x := y]      (x in rest, x /= y)
    5. x = x & rest             =>  rest

Rules never add variables and preserve equivalence over every structure
with functional features and disjoint sorts, so the result describes the
same solutions as the input.  A formula is solved exactly when no rule
applies: every equation's left-hand variable occurs nowhere else, and
the remaining atoms form a solved clause (no duplicates, at most one
sort per variable, deterministic features, no edge next to a matching
exclusion).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Union

from .core import (
    BOTTOM,
    Atom,
    Atomic,
    BasicFormula,
    Bottom,
    Eq,
    Excl,
    FeatC,
    FeatId,
    Formula,
    SortC,
    SortId,
    Top,
    VarId,
    And,
    atom_key,
    atom_vars,
    conj,
    substitute_atom,
)

ClauseAtom = Union[SortC, FeatC, Excl]
GraphAtom = Union[SortC, FeatC]


@dataclass(frozen=True)
class SolvedClause:
    """Duplicate-free sort/feature/exclusion atoms with deterministic edges."""

    atoms: tuple[ClauseAtom, ...]

    @classmethod
    def from_atoms(cls, atoms: Iterable[ClauseAtom]) -> "SolvedClause":
        clause = cls(tuple(atoms))
        if not is_solved_clause(clause.atoms):
            raise ValueError("atoms do not form a solved clause")
        return clause

    @cached_property
    def edges(self) -> dict[tuple[VarId, FeatId], VarId]:
        return {(a.src, a.feat): a.dst for a in self.atoms if isinstance(a, FeatC)}

    @cached_property
    def sorts(self) -> dict[VarId, SortId]:
        return {a.var: a.sort for a in self.atoms if isinstance(a, SortC)}

    @cached_property
    def exclusions(self) -> frozenset[tuple[VarId, FeatId]]:
        return frozenset((a.var, a.feat) for a in self.atoms if isinstance(a, Excl))

    @cached_property
    def variables(self) -> frozenset[VarId]:
        out: set[VarId] = set()
        for a in self.atoms:
            out.update(atom_vars(a))
        return frozenset(out)

    # solved clauses carry no equations
    @property
    def normalizer(self) -> tuple[Eq, ...]:
        return ()

    @property
    def graph(self) -> tuple[ClauseAtom, ...]:
        return self.atoms

    def __str__(self) -> str:
        return str(clause_to_formula(self))


@dataclass(frozen=True)
class SolvedFormula:
    """Equations that eliminate their left-hand sides, plus a solved graph."""

    normalizer: tuple[Eq, ...]
    graph: tuple[GraphAtom, ...]

    @property
    def atoms(self) -> tuple[Atom, ...]:
        return self.normalizer + self.graph

    @cached_property
    def binding(self) -> dict[VarId, VarId]:
        return {eq.lhs: eq.rhs for eq in self.normalizer}

    @cached_property
    def edges(self) -> dict[tuple[VarId, FeatId], VarId]:
        return {(a.src, a.feat): a.dst for a in self.graph if isinstance(a, FeatC)}

    @cached_property
    def sorts(self) -> dict[VarId, SortId]:
        return {a.var: a.sort for a in self.graph if isinstance(a, SortC)}

    @cached_property
    def variables(self) -> frozenset[VarId]:
        out: set[VarId] = set()
        for a in self.atoms:
            out.update(atom_vars(a))
        return frozenset(out)

    def graph_clause(self) -> SolvedClause:
        return SolvedClause(self.graph)

    def is_top(self) -> bool:
        return not self.normalizer and not self.graph

    def __str__(self) -> str:
        return str(solved_to_formula(self))


TOP_SOLVED = SolvedFormula((), ())


def basic_simplify(phi: BasicFormula | Bottom) -> SolvedFormula | Bottom:
    """Rewrite a basic formula to a solved formula or ``false``.

    The rules are applied in a fixed strategy so results are
    reproducible: reflexive equations first, then the least applicable
    substitution, then the clause rules (sort clash, duplicate sort,
    feature merge).  Any maximal strategy reaches an equivalent solved
    form; this one pins the orientation of derived equations and the
    retained copy of merged feature constraints.
    """
    if isinstance(phi, Bottom):
        return BOTTOM
    atoms: list[Atom] = list(phi.atoms)

    while True:
        # rule 5: drop x = x
        drop = next(
            (i for i, a in enumerate(atoms) if isinstance(a, Eq) and a.lhs == a.rhs),
            None,
        )
        if drop is not None:
            atoms.pop(drop)
            continue

        # rule 4: substitute through the least applicable equation
        occ: Counter[VarId] = Counter()
        for a in atoms:
            occ.update(atom_vars(a))
        pick: tuple | None = None
        pick_at = -1
        for i, a in enumerate(atoms):
            if isinstance(a, Eq) and occ[a.lhs] >= 2:
                k = atom_key(a)
                if pick is None or k < pick:
                    pick = k
                    pick_at = i
        if pick is not None:
            eq = atoms[pick_at]
            assert isinstance(eq, Eq)
            atoms = [
                a if i == pick_at else substitute_atom(a, eq.lhs, eq.rhs)
                for i, a in enumerate(atoms)
            ]
            continue

        # rule 2: clashing sorts give false
        sort_at: dict[VarId, int] = {}
        dup_sort = None
        for i, a in enumerate(atoms):
            if isinstance(a, SortC):
                j = sort_at.get(a.var)
                if j is None:
                    sort_at[a.var] = i
                elif atoms[j].sort != a.sort:
                    return BOTTOM
                elif dup_sort is None:
                    dup_sort = i
        # rule 3: drop one duplicate sort constraint
        if dup_sort is not None:
            atoms.pop(dup_sort)
            continue

        # rule 1: merge feature constraints with the same source and feature
        edge_at: dict[tuple[VarId, FeatId], int] = {}
        merged = False
        for i, a in enumerate(atoms):
            if isinstance(a, FeatC):
                key = (a.src, a.feat)
                j = edge_at.get(key)
                if j is None:
                    edge_at[key] = i
                else:
                    first = atoms[j]
                    assert isinstance(first, FeatC)
                    atoms.pop(j)
                    atoms.append(Eq(first.dst, a.dst))
                    merged = True
                    break
        if merged:
            continue
        break

    # enforce "no atomic formula occurs twice"; a no-op at the fixed point
    seen: set[Atom] = set()
    unique: list[Atom] = []
    for a in atoms:
        if a not in seen:
            seen.add(a)
            unique.append(a)

    normalizer = tuple(a for a in unique if isinstance(a, Eq))
    graph = tuple(a for a in unique if not isinstance(a, Eq))
    result = SolvedFormula(normalizer, graph)
    assert is_solved_formula(result), "simplification did not reach a solved form"
    return result


def is_solved_clause(atoms: Iterable[ClauseAtom] | SolvedClause) -> bool:
    """Check the four solved-clause conditions on a multiset of atoms."""
    if isinstance(atoms, SolvedClause):
        atoms = atoms.atoms
    atoms = tuple(atoms)
    seen: set[Atom] = set()
    sorts: dict[VarId, SortId] = {}
    edges: dict[tuple[VarId, FeatId], VarId] = {}
    excls: set[tuple[VarId, FeatId]] = set()
    for a in atoms:
        if a in seen:
            return False
        seen.add(a)
        if isinstance(a, SortC):
            if sorts.get(a.var, a.sort) != a.sort:
                return False
            sorts[a.var] = a.sort
        elif isinstance(a, FeatC):
            key = (a.src, a.feat)
            if edges.get(key, a.dst) != a.dst:
                return False
            edges[key] = a.dst
        elif isinstance(a, Excl):
            excls.add((a.var, a.feat))
        else:
            return False
    return not (excls & set(edges))


def is_solved_formula(phi: BasicFormula | SolvedFormula) -> bool:
    """Equations eliminate their left-hand sides and the graph is solved."""
    if isinstance(phi, SolvedFormula):
        atoms = phi.atoms
    else:
        atoms = phi.atoms
    occ: Counter[VarId] = Counter()
    for a in atoms:
        occ.update(atom_vars(a))
    eqs = [a for a in atoms if isinstance(a, Eq)]
    graph = [a for a in atoms if not isinstance(a, Eq)]
    for eq in eqs:
        if eq.lhs == eq.rhs or occ[eq.lhs] != 1:
            return False
    if any(isinstance(a, Excl) for a in graph):
        return False
    return is_solved_clause(graph)


def constrained_vars(delta: SolvedClause | SolvedFormula | Iterable[Atom]) -> set[VarId]:
    """Variables carrying a sort, an outgoing edge, or an exclusion."""
    if isinstance(delta, (SolvedClause, SolvedFormula)):
        atoms: Iterable[Atom] = delta.graph
    else:
        atoms = delta
    out: set[VarId] = set()
    for a in atoms:
        if isinstance(a, SortC):
            out.add(a.var)
        elif isinstance(a, FeatC):
            out.add(a.src)
        elif isinstance(a, Excl):
            out.add(a.var)
    return out


def parameters(delta: SolvedClause) -> set[VarId]:
    return set(delta.variables) - constrained_vars(delta)


# ---------------------------------------------------------------------------
# conversions


def formula_to_basic(phi: Formula) -> BasicFormula | Bottom:
    """View a conjunction of atoms as a basic formula.

    Raises ValueError when the formula contains anything beyond
    true/false, sort, feature and equation atoms, and conjunction.
    """
    if isinstance(phi, Bottom):
        return BOTTOM
    atoms: list[Atom] = []

    def go(psi: Formula) -> None:
        if isinstance(psi, Top):
            return
        if isinstance(psi, And):
            go(psi.lhs)
            go(psi.rhs)
            return
        if isinstance(psi, Atomic) and not isinstance(psi.atom, Excl):
            atoms.append(psi.atom)
            return
        raise ValueError("not a conjunction of sort, feature, and equation atoms")

    go(phi)
    return BasicFormula(tuple(atoms))


def solved_to_formula(gamma: SolvedFormula) -> Formula:
    """Canonically ordered conjunction equivalent to the solved formula."""
    atoms = sorted(gamma.normalizer, key=atom_key) + sorted(gamma.graph, key=atom_key)
    return conj(Atomic(a) for a in atoms)


def clause_to_formula(delta: SolvedClause) -> Formula:
    atoms = sorted(delta.atoms, key=atom_key)
    return conj(Atomic(a) for a in atoms)
