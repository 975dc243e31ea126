"""Outcome-tree construction, DAG compression, and DOT/JSON emission.

The feasible elimination orders form a prefix tree: the root is the empty
prefix, each edge adds the next eliminated candidate, and every root-to-leaf
path is one complete order (so each leaf's label is a possible winner).

Compression merges structurally identical subtrees. Every node is
serialized canonically (its own label plus its children's digests, children
ordered by label) and hashed; nodes sharing a digest collapse into one DAG
node. The digest is an internal key only, so any collision-resistant
>=128-bit hash works; path label sets are preserved exactly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import EmptyOutcomeSet, InconsistentInput

_ROOT_LABEL = ""


@dataclass
class TreeNode:
    """Prefix-tree node; ``label`` is the candidate eliminated on the incoming edge."""

    label: str
    children: dict[str, "TreeNode"] = field(default_factory=dict)


@dataclass(frozen=True)
class DagNode:
    node_id: str
    label: str
    children: tuple[tuple[str, str], ...]  # (edge label, child node id), label-sorted

    @property
    def is_winner(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class OutcomeDag:
    nodes: dict[str, DagNode]
    root_id: str


def build_tree(orders: Iterable[Sequence[str]]) -> TreeNode:
    """Prefix tree containing exactly the given complete orders."""
    root = TreeNode(_ROOT_LABEL)
    count = 0
    depth = None
    for order in orders:
        count += 1
        if len(set(order)) != len(order):
            raise InconsistentInput(f"order {order!r} repeats a candidate")
        if depth is None:
            depth = len(order)
        elif len(order) != depth:
            raise InconsistentInput("orders have differing lengths")
        node = root
        for label in order:
            node = node.children.setdefault(label, TreeNode(label))
    if count == 0:
        raise EmptyOutcomeSet("no complete elimination orders to build a tree from")
    return root


def tree_from_report(report, candidates: Sequence[str]) -> TreeNode:
    """Convenience: build the tree from a search report's id-based orders."""
    return build_tree([tuple(candidates[c] for c in order) for order in report.orders])


def tree_size(root: TreeNode) -> int:
    return 1 + sum(tree_size(child) for child in root.children.values())


def tree_paths(root: TreeNode) -> set[tuple[str, ...]]:
    out: set[tuple[str, ...]] = set()

    def walk(node: TreeNode, prefix: tuple[str, ...]) -> None:
        if not node.children:
            out.add(prefix)
            return
        for label in sorted(node.children):
            walk(node.children[label], prefix + (label,))

    walk(root, ())
    return out


def _digest(label: str, child_ids: Sequence[str]) -> str:
    payload = label + "[" + ",".join(child_ids) + "]"
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def compress(root: TreeNode) -> OutcomeDag:
    """Merge identical subtrees bottom-up into a minimal DAG."""
    nodes: dict[str, DagNode] = {}

    def walk(node: TreeNode) -> str:
        child_entries = []
        for label in sorted(node.children):
            child_entries.append((label, walk(node.children[label])))
        node_id = _digest(node.label, [cid for _, cid in child_entries])
        if node_id not in nodes:
            nodes[node_id] = DagNode(node_id, node.label, tuple(child_entries))
        return node_id

    root_id = walk(root)
    return OutcomeDag(nodes=nodes, root_id=root_id)


def expand_tree(root: TreeNode) -> OutcomeDag:
    """The uncompressed tree in DAG form (unique node per tree position)."""
    nodes: dict[str, DagNode] = {}
    counter = 0

    def walk(node: TreeNode) -> str:
        nonlocal counter
        node_id = f"t{counter:06d}"
        counter += 1
        child_entries = tuple(
            (label, walk(node.children[label])) for label in sorted(node.children)
        )
        nodes[node_id] = DagNode(node_id, node.label, child_entries)
        return node_id

    root_id = walk(root)
    return OutcomeDag(nodes=nodes, root_id=root_id)


def dag_paths(dag: OutcomeDag) -> set[tuple[str, ...]]:
    out: set[tuple[str, ...]] = set()

    def walk(node_id: str, prefix: tuple[str, ...]) -> None:
        node = dag.nodes[node_id]
        if not node.children:
            out.add(prefix)
            return
        for label, child_id in node.children:
            walk(child_id, prefix + (label,))

    walk(dag.root_id, ())
    return out


def _initials(label: str) -> str:
    parts = [w[0] for w in label.split() if w]
    return "".join(parts).upper() if parts else label


def emit_dot(dag: OutcomeDag) -> bytes:
    """Graphviz digraph; byte-deterministic for a given DAG.

    Nodes are labeled with candidate initials; winner nodes (sinks) are
    drawn as double circles.
    """
    ordered = sorted(dag.nodes)
    short = {node_id: f"n{i}" for i, node_id in enumerate(ordered)}
    lines = ["digraph outcomes {", "  rankdir=TB;"]
    for node_id in ordered:
        node = dag.nodes[node_id]
        if node_id == dag.root_id and node.label == _ROOT_LABEL:
            lines.append(f'  {short[node_id]} [shape=point, label=""];')
        elif node.is_winner:
            lines.append(
                f'  {short[node_id]} [shape=doublecircle, label="{_initials(node.label)}"];'
            )
        else:
            lines.append(
                f'  {short[node_id]} [shape=circle, label="{_initials(node.label)}"];'
            )
    for node_id in ordered:
        for label, child_id in dag.nodes[node_id].children:
            lines.append(
                f'  {short[node_id]} -> {short[child_id]} [label="{_initials(label)}"];'
            )
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def emit_json(dag: OutcomeDag) -> bytes:
    """Node/edge-list JSON; byte-deterministic for a given DAG."""
    nodes = [
        {
            "id": node_id,
            "label": dag.nodes[node_id].label,
            "is_winner": dag.nodes[node_id].is_winner,
        }
        for node_id in sorted(dag.nodes)
    ]
    edges = sorted(
        (
            {"from": node_id, "to": child_id, "label": label}
            for node_id in dag.nodes
            for label, child_id in dag.nodes[node_id].children
        ),
        key=lambda e: (e["from"], e["label"]),
    )
    payload = {"root": dag.root_id, "nodes": nodes, "edges": edges}
    return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("utf-8")


def emit(dag: OutcomeDag, fmt: str) -> bytes:
    if fmt == "dot":
        return emit_dot(dag)
    if fmt == "json":
        return emit_json(dag)
    raise ValueError(f"unknown format {fmt!r}")


def load_dag_json(data: bytes) -> OutcomeDag:
    """Rebuild a DAG from ``emit_json`` output."""
    payload = json.loads(data.decode("utf-8"))
    labels = {n["id"]: n["label"] for n in payload["nodes"]}
    children: dict[str, list[tuple[str, str]]] = {nid: [] for nid in labels}
    for edge in payload["edges"]:
        children[edge["from"]].append((edge["label"], edge["to"]))
    nodes = {
        nid: DagNode(nid, labels[nid], tuple(sorted(children[nid])))
        for nid in labels
    }
    return OutcomeDag(nodes=nodes, root_id=payload["root"])
