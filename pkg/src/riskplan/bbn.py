"""Discrete Bayesian belief networks with exact inference.

Networks are immutable after construction. Inference is exact variable
elimination with a min-degree heuristic; :func:`enumerate_joint` provides an
independent brute-force oracle over the full joint for testing. Hazardous
event nodes (the query targets of the risk model) are declared on the
network together with the state label that means "the event occurs".
"""

from __future__ import annotations

import itertools
import json
import math
import os
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

ROW_SUM_TOL = 1e-9
ENUMERATION_LIMIT = 2**20

DEFAULT_OCCURS_STATE = "occurs"


class NetworkFormatError(ValueError):
    """Malformed network definition (parse or validation failure)."""


class InconsistentEvidenceError(ValueError):
    """The supplied evidence has zero probability under the network."""


class StateSpaceLimitError(ValueError):
    """Joint enumeration refused: state space exceeds the configured limit."""


@dataclass(frozen=True)
class NetNode:
    """One discrete variable: states, parents and a CPT.

    ``cpt`` holds one probability row per combination of parent states, in
    row-major order over the parents as declared (first parent varies
    slowest). Each row is a distribution over this node's states.
    """

    name: str
    states: Tuple[str, ...]
    parents: Tuple[str, ...] = ()
    cpt: Tuple[Tuple[float, ...], ...] = ()

    def state_index(self, label: str) -> int:
        try:
            return self.states.index(label)
        except ValueError:
            raise KeyError(f"node {self.name!r} has no state {label!r}") from None


@dataclass(frozen=True)
class Evidence:
    """Observed states, node name -> state label."""

    assignments: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "assignments", dict(self.assignments))

    def __bool__(self) -> bool:
        return bool(self.assignments)

    def items(self):
        return self.assignments.items()


@dataclass(frozen=True)
class BayesNet:
    """A directed acyclic network of :class:`NetNode` with event targets.

    ``event_nodes`` names the hazardous-event query nodes; ``occurs_states``
    optionally overrides the "event occurs" state label per event node
    (default ``"occurs"``).
    """

    nodes: Tuple[NetNode, ...]
    event_nodes: Tuple[str, ...] = ()
    occurs_states: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "event_nodes", tuple(self.event_nodes))
        object.__setattr__(self, "occurs_states", dict(self.occurs_states))
        object.__setattr__(self, "_by_name", {n.name: n for n in self.nodes})

    def node(self, name: str) -> NetNode:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"unknown node {name!r}") from None

    def has_node(self, name: str) -> bool:
        return name in self._by_name

    def occurs_state(self, event: str) -> str:
        return self.occurs_states.get(event, DEFAULT_OCCURS_STATE)


def validate(net: BayesNet) -> List[str]:
    """Check every structural invariant; returns violations (empty = ok).

    Never raises: a malformed network yields a report whose first entry
    names the offending node.
    """
    report: List[str] = []
    seen = set()
    for node in net.nodes:
        if node.name in seen:
            report.append(f"{node.name}: duplicate node name")
        seen.add(node.name)

    for node in net.nodes:
        if len(node.states) < 2:
            report.append(f"{node.name}: needs at least 2 states, has {len(node.states)}")
        if len(set(node.states)) != len(node.states):
            report.append(f"{node.name}: duplicate state labels")
        for parent in node.parents:
            if not net.has_node(parent):
                report.append(f"{node.name}: unknown parent {parent!r}")

    cycle_node = _find_cycle(net)
    if cycle_node is not None:
        report.append(f"{cycle_node}: graph contains a directed cycle through this node")

    for node in net.nodes:
        if any(not net.has_node(p) for p in node.parents):
            continue  # arity unverifiable with unresolved parents
        expected_rows = 1
        for parent in node.parents:
            expected_rows *= len(net.node(parent).states)
        if len(node.cpt) != expected_rows:
            report.append(
                f"{node.name}: CPT has {len(node.cpt)} rows, expected {expected_rows}"
            )
            continue
        for r, row in enumerate(node.cpt):
            if len(row) != len(node.states):
                report.append(f"{node.name}: CPT row {r} has {len(row)} entries, expected {len(node.states)}")
                continue
            if any(p < 0.0 or p > 1.0 for p in row):
                report.append(f"{node.name}: CPT row {r} has probabilities outside [0, 1]")
            if abs(sum(row) - 1.0) > ROW_SUM_TOL:
                report.append(f"{node.name}: CPT row {r} sums to {sum(row):.12f}, expected 1")

    for event in net.event_nodes:
        if not net.has_node(event):
            report.append(f"{event}: event node not defined")
            continue
        occurs = net.occurs_state(event)
        if occurs not in net.node(event).states:
            report.append(f"{event}: missing designated occurs state {occurs!r}")
    return report


def _find_cycle(net: BayesNet) -> Optional[str]:
    """Kahn's algorithm; returns a node on a cycle or None."""
    names = [n.name for n in net.nodes]
    indeg = {name: 0 for name in names}
    children: Dict[str, List[str]] = {name: [] for name in names}
    for node in net.nodes:
        for parent in node.parents:
            if parent in indeg:
                indeg[node.name] += 1
                children[parent].append(node.name)
    queue = [name for name in names if indeg[name] == 0]
    removed = 0
    while queue:
        name = queue.pop()
        removed += 1
        for child in children[name]:
            indeg[child] -= 1
            if indeg[child] == 0:
                queue.append(child)
    if removed == len(names):
        return None
    return next(name for name in names if indeg[name] > 0)


def check_evidence(net: BayesNet, ev: Evidence) -> None:
    """Raise KeyError if evidence references unknown nodes or states."""
    for name, state in ev.items():
        net.node(name).state_index(state)


# --------------------------------------------------------------------------
# Exact inference

def _cpt_factor(net: BayesNet, node: NetNode) -> Tuple[Tuple[str, ...], np.ndarray]:
    shape = [len(net.node(p).states) for p in node.parents] + [len(node.states)]
    table = np.asarray(node.cpt, dtype=float).reshape(shape)
    return node.parents + (node.name,), table


def _reduce(factor_vars: Tuple[str, ...], table: np.ndarray, net: BayesNet, ev: Evidence):
    """Slice out evidenced axes."""
    for name, state in ev.items():
        if name in factor_vars:
            axis = factor_vars.index(name)
            idx = net.node(name).state_index(state)
            table = np.take(table, idx, axis=axis)
            factor_vars = factor_vars[:axis] + factor_vars[axis + 1 :]
    return factor_vars, table


def _aligned(factor_vars: Tuple[str, ...], table: np.ndarray, out_vars: Tuple[str, ...]) -> np.ndarray:
    order = [factor_vars.index(v) for v in out_vars if v in factor_vars]
    t = np.transpose(table, order)
    shape = []
    k = 0
    for v in out_vars:
        if v in factor_vars:
            shape.append(t.shape[k])
            k += 1
        else:
            shape.append(1)
    return t.reshape(shape)


def _multiply(factors) -> Tuple[Tuple[str, ...], np.ndarray]:
    out_vars: Tuple[str, ...] = ()
    for fv, _ in factors:
        out_vars = out_vars + tuple(v for v in fv if v not in out_vars)
    result = np.array(1.0)
    for fv, table in factors:
        result = result * _aligned(fv, table, out_vars)
    return out_vars, result


def posterior(net: BayesNet, ev: Evidence, target: str) -> Dict[str, float]:
    """Exact posterior P(target | ev) by variable elimination.

    Raises :class:`InconsistentEvidenceError` when the evidence has zero
    joint probability.
    """
    target_node = net.node(target)
    check_evidence(net, ev)

    factors = []
    for node in net.nodes:
        fv, table = _reduce(*_cpt_factor(net, node), net=net, ev=ev)
        factors.append((fv, table))

    evidenced = set(ev.assignments)
    to_eliminate = {n.name for n in net.nodes} - evidenced - {target}

    while to_eliminate:
        var = _min_degree_var(factors, to_eliminate)
        involved = [f for f in factors if var in f[0]]
        rest = [f for f in factors if var not in f[0]]
        pv, ptable = _multiply(involved)
        axis = pv.index(var)
        summed = ptable.sum(axis=axis)
        rest.append((pv[:axis] + pv[axis + 1 :], summed))
        factors = rest
        to_eliminate.discard(var)

    out_vars, table = _multiply(factors)
    total = float(table.sum())
    if not (total > 0.0) or not math.isfinite(total):
        raise InconsistentEvidenceError(
            f"evidence {dict(ev.items())} has zero probability"
        )

    if target in evidenced:
        # The posterior of an observed node is a point mass.
        observed = ev.assignments[target]
        return {s: (1.0 if s == observed else 0.0) for s in target_node.states}

    axis = out_vars.index(target)
    marginal = np.moveaxis(table, axis, 0).reshape(len(target_node.states), -1).sum(axis=1)
    marginal = np.clip(marginal / total, 0.0, None)
    marginal = marginal / marginal.sum()
    return {s: float(marginal[i]) for i, s in enumerate(target_node.states)}


def _min_degree_var(factors, candidates) -> str:
    """Variable whose elimination touches the fewest neighbor variables."""
    best = None
    best_key = None
    for var in candidates:
        neighbors = set()
        for fv, _ in factors:
            if var in fv:
                neighbors.update(fv)
        key = (len(neighbors), var)  # tie-break by name for determinism
        if best_key is None or key < best_key:
            best = var
            best_key = key
    assert best is not None
    return best


def enumerate_joint(net: BayesNet, ev: Evidence, target: str) -> Dict[str, float]:
    """Posterior by brute-force summation over every joint assignment.

    Deliberately naive (explicit product over full assignments) so it can
    serve as an independent oracle for :func:`posterior`. Refuses state
    spaces above 2**20.
    """
    target_node = net.node(target)
    check_evidence(net, ev)

    names = [n.name for n in net.nodes]
    index_of = {name: i for i, name in enumerate(names)}
    cards = [len(n.states) for n in net.nodes]

    space = 1
    for c in cards:
        space *= c
        if space > ENUMERATION_LIMIT:
            raise StateSpaceLimitError(
                f"joint state space exceeds {ENUMERATION_LIMIT} assignments"
            )

    # Evidence pins its variable's range to a single index.
    ranges = []
    for node in net.nodes:
        if node.name in ev.assignments:
            ranges.append((node.state_index(ev.assignments[node.name]),))
        else:
            ranges.append(tuple(range(len(node.states))))

    parent_idx = [tuple(index_of[p] for p in node.parents) for node in net.nodes]
    parent_cards = [tuple(cards[index_of[p]] for p in node.parents) for node in net.nodes]

    target_i = index_of[target]
    accum = [0.0] * len(target_node.states)
    for assignment in itertools.product(*ranges):
        p = 1.0
        for i, node in enumerate(net.nodes):
            row = 0
            for j, pc in zip(parent_idx[i], parent_cards[i]):
                row = row * pc + assignment[j]
            p *= node.cpt[row][assignment[i]]
            if p == 0.0:
                break
        accum[assignment[target_i]] += p

    total = sum(accum)
    if not (total > 0.0):
        raise InconsistentEvidenceError(
            f"evidence {dict(ev.items())} has zero probability"
        )
    return {s: accum[i] / total for i, s in enumerate(target_node.states)}


# --------------------------------------------------------------------------
# Serialization (JSON)

def network_from_dict(data: dict, context: str = "network") -> BayesNet:
    """Build and validate a network from its dict form."""
    if not isinstance(data, dict) or "nodes" not in data:
        raise NetworkFormatError(f"{context}: expected an object with a 'nodes' list")
    nodes = []
    for k, entry in enumerate(data["nodes"]):
        where = f"{context}: nodes[{k}]"
        try:
            name = entry["name"]
            states = tuple(entry["states"])
            parents = tuple(entry.get("parents", ()))
            cpt = tuple(tuple(float(x) for x in row) for row in entry["cpt"])
        except (KeyError, TypeError, ValueError) as exc:
            raise NetworkFormatError(f"{where}: {exc}") from exc
        nodes.append(NetNode(name=name, states=states, parents=parents, cpt=cpt))

    event_nodes: List[str] = []
    occurs: Dict[str, str] = {}
    for entry in data.get("event_nodes", ()):
        if isinstance(entry, str):
            event_nodes.append(entry)
        else:
            try:
                event_nodes.append(entry["name"])
            except (KeyError, TypeError) as exc:
                raise NetworkFormatError(f"{context}: event_nodes entry {entry!r}") from exc
            if "occurs_state" in entry:
                occurs[entry["name"]] = entry["occurs_state"]

    net = BayesNet(nodes=tuple(nodes), event_nodes=tuple(event_nodes), occurs_states=occurs)
    report = validate(net)
    if report:
        raise NetworkFormatError(f"{context}: {report[0]}")
    return net


def network_to_dict(net: BayesNet) -> dict:
    return {
        "nodes": [
            {
                "name": n.name,
                "states": list(n.states),
                "parents": list(n.parents),
                "cpt": [list(row) for row in n.cpt],
            }
            for n in net.nodes
        ],
        "event_nodes": [
            {"name": e, "occurs_state": net.occurs_state(e)} for e in net.event_nodes
        ],
    }


def load_network(source) -> BayesNet:
    """Load a network from a JSON file path or an open file object."""
    if hasattr(source, "read"):
        text = source.read()
        context = getattr(source, "name", "<stream>")
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
        context = os.fspath(source)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(f"{context}: line {exc.lineno}: {exc.msg}") from exc
    return network_from_dict(data, context=context)


def save_network(net: BayesNet, destination) -> None:
    """Write a network as JSON (round-trips through :func:`load_network`)."""
    data = network_to_dict(net)
    if hasattr(destination, "write"):
        json.dump(data, destination, indent=2)
    else:
        with open(destination, "w", encoding="utf-8") as fh:
            json.dump(data, fh, indent=2)
            fh.write("\n")
