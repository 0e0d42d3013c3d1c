"""Integer-program model of the connected group problem, exportable as LP text.

Binary x_i marks selected nodes and y_i_j collects arc tightness into the
objective; root/path/flow variables (r_i, p_i_j_m_n, d_i_j_m) force every
selected node to be reachable from a single selected root along selected
nodes.  The model is verified by substitution rather than by a solver: for a
candidate member set the checker builds a witness assignment and evaluates
every constraint row numerically.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import ScaleGuardError
from .graph import SocialGraph

MAX_MODEL_NODES = 60


@dataclass(frozen=True)
class Variable:
    name: str
    lower: float
    upper: float
    integer: bool


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: tuple[tuple[float, str], ...]   # (coefficient, variable name)
    sense: str                             # "<=", ">=", "="
    rhs: float

    def evaluate(self, assignment: dict[str, float]) -> bool:
        lhs = sum(c * assignment[v] for c, v in self.terms)
        if self.sense == "<=":
            return lhs <= self.rhs + 1e-9
        if self.sense == ">=":
            return lhs >= self.rhs - 1e-9
        return abs(lhs - self.rhs) <= 1e-9


@dataclass
class IlpModel:
    """Objective, variables, and constraint rows with deterministic names."""

    objective: tuple[tuple[float, str], ...]
    variables: list[Variable]
    constraints: list[Constraint]
    maximize: bool = True
    comment: str = ""

    def variable_names(self) -> set[str]:
        return {v.name for v in self.variables}

    def objective_value(self, assignment: dict[str, float]) -> float:
        return sum(c * assignment[v] for c, v in self.objective)

    def check(self, assignment: dict[str, float]) -> list[str]:
        """Names of violated constraints under a full assignment."""
        return [c.name for c in self.constraints if not c.evaluate(assignment)]

    def to_lp_text(self) -> str:
        """Serialize in LP text format."""
        lines: list[str] = []
        if self.comment:
            lines.append(f"\\ {self.comment}")
        lines.append("Maximize" if self.maximize else "Minimize")
        lines.append(" obj: " + _expr(self.objective))
        lines.append("Subject To")
        for con in self.constraints:
            op = {"<=": "<=", ">=": ">=", "=": "="}[con.sense]
            lines.append(f" {con.name}: {_expr(con.terms)} {op} {_num(con.rhs)}")
        bounds = [v for v in self.variables if not (v.lower == 0 and v.upper == 1)]
        if bounds:
            lines.append("Bounds")
            for v in bounds:
                lines.append(f" {_num(v.lower)} <= {v.name} <= {_num(v.upper)}")
        binaries = [v.name for v in self.variables
                    if v.integer and v.lower == 0 and v.upper == 1]
        if binaries:
            lines.append("Binaries")
            lines.extend(" " + " ".join(chunk) for chunk in _wrap(binaries))
        generals = [v.name for v in self.variables
                    if v.integer and not (v.lower == 0 and v.upper == 1)]
        if generals:
            lines.append("Generals")
            lines.extend(" " + " ".join(chunk) for chunk in _wrap(generals))
        lines.append("End")
        return "\n".join(lines) + "\n"


def _num(x: float) -> str:
    return repr(int(x)) if float(x).is_integer() else repr(float(x))


def _expr(terms: Iterable[tuple[float, str]]) -> str:
    parts: list[str] = []
    for coef, name in terms:
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        parts.append(f"{sign} {_num(mag)} {name}")
    if not parts:
        return "0"
    first = parts[0]
    first = first[2:] if first.startswith("+ ") else "-" + first[2:]
    return " ".join([first] + parts[1:])


def _wrap(names: list[str], width: int = 8) -> Iterator[list[str]]:
    for i in range(0, len(names), width):
        yield names[i:i + width]


def _undirected_arcs(graph: SocialGraph) -> list[tuple[int, int]]:
    """Both orientations of every adjacent pair; paths may use either."""
    arcs = []
    for i in range(graph.n):
        for j in graph.nbrs[i]:
            arcs.append((i, j))
    return arcs


def export_ilp(graph: SocialGraph, k: int, override: bool = False,
               relaxed_endpoints: bool = False) -> IlpModel:
    """Build the group-selection integer program.

    By default path arcs require both endpoints selected (p <= x_m, p <= x_n),
    which makes the feasible x-sets exactly the connected k-subsets; the
    relaxed form p <= 2(x_m + x_n) admits one-hop detours through unselected
    nodes and is kept only for comparison.
    """
    n = graph.n
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside 1..{n}")
    if n > MAX_MODEL_NODES and not override:
        raise ScaleGuardError(
            f"model would need O(n^2 |E|) variables at n={n}; "
            "pass override=True to force")

    arcs = _undirected_arcs(graph)
    neighbors = graph.nbrs
    variables: list[Variable] = []
    constraints: list[Constraint] = []

    x = [f"x_{i}" for i in range(n)]
    variables += [Variable(name, 0, 1, True) for name in x]
    y = {}
    for i, j, _t in graph.arcs():
        y[(i, j)] = f"y_{i}_{j}"
        variables.append(Variable(y[(i, j)], 0, 1, True))
    r = [f"r_{i}" for i in range(n)]
    variables += [Variable(name, 0, 1, True) for name in r]
    p = {}
    d = {}
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    for i, j in pairs:
        for m, q in arcs:
            p[(i, j, m, q)] = f"p_{i}_{j}_{m}_{q}"
            variables.append(Variable(p[(i, j, m, q)], 0, 1, True))
        for m in range(n):
            d[(i, j, m)] = f"d_{i}_{j}_{m}"
            variables.append(Variable(d[(i, j, m)], 0, n, True))

    # Term order interleaves each node's eta with its outgoing tau terms so
    # that evaluating the objective reproduces the willingness sum bit-exact.
    obj_terms: list[tuple[float, str]] = []
    for i in range(n):
        obj_terms.append((float(graph.eta[i]), x[i]))
        for j, t in graph.adj_out[i]:
            obj_terms.append((t, y[(i, j)]))
    objective = tuple(obj_terms)

    constraints.append(Constraint(
        "size", tuple((1.0, x[i]) for i in range(n)), "=", float(k)))
    for i, j, _t in graph.arcs():
        constraints.append(Constraint(
            f"pair_{i}_{j}",
            ((1.0, x[i]), (1.0, x[j]), (-2.0, y[(i, j)])), ">=", 0.0))
    constraints.append(Constraint(
        "one_root", tuple((1.0, r[i]) for i in range(n)), "=", 1.0))
    for i in range(n):
        constraints.append(Constraint(
            f"root_sel_{i}", ((1.0, r[i]), (-1.0, x[i])), "<=", 0.0))

    for i, j in pairs:
        # Path must leave the root and enter the destination.
        constraints.append(Constraint(
            f"leave_{i}_{j}",
            tuple((1.0, p[(i, j, i, q)]) for q in neighbors[i])
            + ((-1.0, r[i]), (-1.0, x[j])), ">=", -1.0))
        constraints.append(Constraint(
            f"enter_{i}_{j}",
            tuple((1.0, p[(i, j, m, j)]) for m in neighbors[j])
            + ((-1.0, r[i]), (-1.0, x[j])), ">=", -1.0))
        # Flow continuity at intermediate nodes.
        for m in range(n):
            if m in (i, j):
                continue
            terms = tuple((1.0, p[(i, j, q, m)]) for q in neighbors[m]) + \
                tuple((-1.0, p[(i, j, m, q)]) for q in neighbors[m])
            constraints.append(Constraint(f"flow_{i}_{j}_{m}", terms, "=", 0.0))
        for m, q in arcs:
            # Acyclic: d_m + 1 <= d_q on used arcs (integer big-M form).
            constraints.append(Constraint(
                f"order_{i}_{j}_{m}_{q}",
                ((1.0, d[(i, j, m)]), (-1.0, d[(i, j, q)]),
                 (float(n), p[(i, j, m, q)])), "<=", float(n - 1)))
            if relaxed_endpoints:
                constraints.append(Constraint(
                    f"onpath_{i}_{j}_{m}_{q}",
                    ((1.0, p[(i, j, m, q)]), (-2.0, x[m]), (-2.0, x[q])),
                    "<=", 0.0))
            else:
                constraints.append(Constraint(
                    f"onpath_tail_{i}_{j}_{m}_{q}",
                    ((1.0, p[(i, j, m, q)]), (-1.0, x[m])), "<=", 0.0))
                constraints.append(Constraint(
                    f"onpath_head_{i}_{j}_{m}_{q}",
                    ((1.0, p[(i, j, m, q)]), (-1.0, x[q])), "<=", 0.0))

    return IlpModel(objective=objective, variables=variables,
                    constraints=constraints, maximize=True,
                    comment=f"connected group selection, n={n} k={k}")


# -- substitution checking ----------------------------------------------------

def _base_assignment(model: IlpModel) -> dict[str, float]:
    return {v.name: 0.0 for v in model.variables}


def _witness(graph: SocialGraph, members: frozenset[int], root: int,
             relaxed: bool) -> dict[tuple, float] | None:
    """p/d values routing the root to every member, or None if impossible."""
    allowed: dict[int, list[int]] = {}
    for u in range(graph.n):
        row = []
        for v in graph.nbrs[u]:
            if relaxed:
                if u in members or v in members:
                    row.append(v)
            else:
                if u in members and v in members:
                    row.append(v)
        allowed[u] = row
    values: dict[tuple, float] = {}
    for target in sorted(members):
        if target == root:
            continue
        # BFS from root over allowed arcs.
        prev: dict[int, int] = {root: root}
        queue = deque([root])
        while queue and target not in prev:
            u = queue.popleft()
            for v in allowed[u]:
                if v not in prev:
                    prev[v] = u
                    queue.append(v)
        if target not in prev:
            return None
        path = [target]
        while path[-1] != root:
            path.append(prev[path[-1]])
        path.reverse()
        for pos, (m, q) in enumerate(zip(path, path[1:])):
            values[("p", root, target, m, q)] = 1.0
            values[("d", root, target, m)] = float(pos)
            values[("d", root, target, q)] = float(pos + 1)
    return values


def check_member_set(model: IlpModel, graph: SocialGraph,
                     members: Iterable[int],
                     relaxed_endpoints: bool = False
                     ) -> tuple[bool, float | None]:
    """Is this member set feasible in the exported model, and at what objective?

    Tries every member as the root; for each, a path witness is constructed
    and the full assignment is substituted into every constraint row.  The
    objective is evaluated with y_i_j = x_i * x_j, which mirrors the
    willingness sum exactly.
    """
    mem = frozenset(int(v) for v in members)
    base = _base_assignment(model)
    for i in mem:
        base[f"x_{i}"] = 1.0
    for i, j, _t in graph.arcs():
        if i in mem and j in mem:
            base[f"y_{i}_{j}"] = 1.0
    objective = model.objective_value(base)

    for root in sorted(mem):
        witness = _witness(graph, mem, root, relaxed_endpoints)
        if witness is None:
            continue
        assignment = dict(base)
        assignment[f"r_{root}"] = 1.0
        for key, val in witness.items():
            kind, i, j, *rest = key
            name = (f"p_{i}_{j}_{rest[0]}_{rest[1]}" if kind == "p"
                    else f"d_{i}_{j}_{rest[0]}")
            assignment[name] = val
        if not model.check(assignment):
            return True, objective
    return False, None


def feasible_member_sets(model: IlpModel, graph: SocialGraph, k: int,
                         relaxed_endpoints: bool = False
                         ) -> dict[frozenset[int], float]:
    """Every feasible x-set of size k with its objective value."""
    from itertools import combinations
    out: dict[frozenset[int], float] = {}
    for combo in combinations(range(graph.n), k):
        ok, obj = check_member_set(model, graph, combo, relaxed_endpoints)
        if ok:
            assert obj is not None
            out[frozenset(combo)] = obj
    return out


def write_lp(model: IlpModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(model.to_lp_text())
