"""Labeling and programs for diameter-3 trees and for stars.

Both schemes spread the binary representation of a leaf count over a few
carrier leaves, in chunks of max(1, floor(log2 floor(log2 delta))) bits; the
carrier holding the final chunk is flagged so the decoding hub knows when the
stream is complete.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .engine import NodeProgram
from .labels import LabelKind, StructuredLabel
from .scheme import bits_of, chunk, unchunk
from .trees import Tree


def chunk_len(delta: int) -> int:
    """max(1, floor(log2(log2(delta)))) via exact bit-length arithmetic."""
    return max(1, (delta.bit_length() - 1).bit_length() - 1)


@lru_cache(maxsize=1024)
def star_tree(k: int) -> Tree:
    # Shared per size: every node of a run outputs the same object.
    return Tree(k + 1, [(0, i) for i in range(1, k + 1)])


@dataclass(frozen=True)
class D3Label:
    kind: LabelKind
    count_bits: str = ""  # hub only: binary of the far side's carrier count
    last: bool = False  # carriers only
    carrier_id: int = 0
    piece: str = ""

    def to_structured(self) -> StructuredLabel:
        if self.kind is LabelKind.D3_LEAF:
            fields = ("1" if self.last else "0", bits_of(self.carrier_id), self.piece)
        elif self.kind is LabelKind.D3_HUB:
            fields = (self.count_bits,)
        else:
            fields = ()
        return StructuredLabel(kind=self.kind, fields=fields)

    @staticmethod
    def from_structured(label: StructuredLabel) -> "D3Label":
        if label.kind is LabelKind.D3_LEAF:
            flag, ident, piece = label.fields
            return D3Label(kind=label.kind, last=flag == "1", carrier_id=int(ident, 2), piece=piece)
        if label.kind is LabelKind.D3_HUB:
            return D3Label(kind=label.kind, count_bits=label.fields[0])
        return D3Label(kind=label.kind)


def label_d3(tree: Tree) -> dict[int, D3Label]:
    """Labels for a diameter-3 tree: two adjacent hubs, all else leaves."""
    if tree.diameter != 3:
        raise ValueError(f"diameter is {tree.diameter}, not 3")
    delta = tree.max_degree
    if delta < 3:
        raise ValueError("need maximum degree >= 3")
    hubs = [v for v in range(tree.n) if tree.degree(v) >= 2]
    assert len(hubs) == 2
    u, v = hubs
    size_u = tree.degree(u)  # own leaves + the other hub
    size_v = tree.degree(v)
    if size_u != size_v:
        root = u if size_u > size_v else v
    else:
        root = min(u, v)
    hub = v if root == u else u

    c = chunk_len(delta)
    labels: dict[int, D3Label] = {}
    side_counts = {}
    for node, owner in ((root, LabelKind.D3_ROOT), (hub, LabelKind.D3_HUB)):
        leaves = sorted(w for w in tree.adjacency[node] if w not in hubs)
        pieces = chunk(bits_of(len(leaves)), c)
        side_counts[node] = len(pieces)
        for i, leaf in enumerate(leaves, start=1):
            if i <= len(pieces):
                labels[leaf] = D3Label(
                    kind=LabelKind.D3_LEAF,
                    last=i == len(pieces),
                    carrier_id=i,
                    piece=pieces[i - 1][1],
                )
            else:
                labels[leaf] = D3Label(kind=LabelKind.D3_LEAF_NULL)
    labels[root] = D3Label(kind=LabelKind.D3_ROOT)
    labels[hub] = D3Label(kind=LabelKind.D3_HUB, count_bits=bits_of(side_counts[root]))
    return labels


def _d3_output_tree(root_leaves: int, hub_leaves: int) -> Tree:
    """Canonical output: root 0, hub 1, hub's leaves 2.., root's leaves after."""
    edges = [(0, 1)]
    edges.extend((1, 2 + i) for i in range(hub_leaves))
    edges.extend((0, 2 + hub_leaves + i) for i in range(root_leaves))
    return Tree(2 + root_leaves + hub_leaves, edges)


class D3LeafProgram(NodeProgram):
    def __init__(self, label: D3Label):
        self.label = label
        self.output = None

    def decide(self, round_no: int):
        if self.label.kind is LabelKind.D3_LEAF and round_no == self.label.carrier_id:
            return ("d3_leaf", self.label)
        return None

    def receive(self, round_no: int, message) -> None:
        if message is None or self.output is not None:
            return
        if message[0] == "d3_tree":
            _, tree, from_root, hub_leaves = message
            place = 2 + hub_leaves if from_root else 2
            self.output = (tree, place)


class D3HubProgram(NodeProgram):
    def __init__(self, label: D3Label):
        self.far_carriers = int(label.count_bits, 2)
        self.pieces: dict[int, str] = {}
        self.own_count: Optional[int] = None
        self.near_total: Optional[int] = None
        self.outbox: dict[int, tuple] = {}
        self.output = None

    def decide(self, round_no: int):
        return self.outbox.pop(round_no, None)

    def receive(self, round_no: int, message) -> None:
        if message is None:
            return
        if message[0] == "d3_leaf":
            lab: D3Label = message[1]
            self.pieces[lab.carrier_id] = lab.piece
            if lab.last:
                self.own_count = lab.carrier_id
                self.near_total = int(unchunk(sorted(self.pieces.items())), 2)
                tx = max(self.far_carriers, self.own_count) + 1
                self.outbox[tx] = ("d3_count", self.far_carriers, self.near_total)
        elif message[0] == "d3_tree" and self.output is None:
            _, tree, _from_root, hub_leaves = message
            self.output = (tree, 1)
            self.outbox[round_no + 1] = ("d3_tree", tree, False, hub_leaves)


class D3RootProgram(NodeProgram):
    def __init__(self) -> None:
        self.pieces: dict[int, str] = {}
        self.near_total: Optional[int] = None
        self.outbox: dict[int, tuple] = {}
        self.output = None

    def decide(self, round_no: int):
        return self.outbox.pop(round_no, None)

    def receive(self, round_no: int, message) -> None:
        if message is None:
            return
        if message[0] == "d3_leaf":
            lab: D3Label = message[1]
            self.pieces[lab.carrier_id] = lab.piece
            if lab.last:
                self.near_total = int(unchunk(sorted(self.pieces.items())), 2)
        elif message[0] == "d3_count" and self.output is None:
            _, _, hub_leaves = message
            tree = _d3_output_tree(root_leaves=self.near_total, hub_leaves=hub_leaves)
            self.output = (tree, 0)
            self.outbox[round_no + 1] = ("d3_tree", tree, True, hub_leaves)


def d3_programs(labels: dict[int, D3Label]) -> dict[int, NodeProgram]:
    out: dict[int, NodeProgram] = {}
    for node, lab in labels.items():
        if lab.kind is LabelKind.D3_ROOT:
            out[node] = D3RootProgram()
        elif lab.kind is LabelKind.D3_HUB:
            out[node] = D3HubProgram(lab)
        else:
            out[node] = D3LeafProgram(lab)
    return out


@dataclass(frozen=True)
class StarLabel:
    kind: LabelKind
    last: bool = False
    carrier_id: int = 0
    piece: str = ""

    def to_structured(self) -> StructuredLabel:
        if self.kind is LabelKind.STAR_LEAF:
            fields = ("1" if self.last else "0", bits_of(self.carrier_id), self.piece)
        else:
            fields = ()
        return StructuredLabel(kind=self.kind, fields=fields)

    @staticmethod
    def from_structured(label: StructuredLabel) -> "StarLabel":
        if label.kind is LabelKind.STAR_LEAF:
            flag, ident, piece = label.fields
            return StarLabel(kind=label.kind, last=flag == "1", carrier_id=int(ident, 2), piece=piece)
        return StarLabel(kind=label.kind)


def label_star(tree: Tree, delta: int) -> dict[int, StarLabel]:
    """Labels for a star of at most delta leaves; the leaf count is spread
    over the first carriers in chunks sized for the class bound delta."""
    k = tree.n - 1
    if k < 1 or k > delta:
        raise ValueError(f"star with {k} leaves outside class bound {delta}")
    if delta < 3:
        raise ValueError("class bound must be at least 3")
    if tree.n == 2:
        hub = 0
    else:
        hub = max(range(tree.n), key=tree.degree)
    if tree.degree(hub) != k:
        raise ValueError("not a star")
    pieces = chunk(bits_of(k), chunk_len(delta))
    labels = {hub: StarLabel(kind=LabelKind.STAR_CENTER)}
    leaves = sorted(v for v in range(tree.n) if v != hub)
    for i, leaf in enumerate(leaves, start=1):
        if i <= len(pieces):
            labels[leaf] = StarLabel(
                kind=LabelKind.STAR_LEAF, last=i == len(pieces), carrier_id=i, piece=pieces[i - 1][1]
            )
        else:
            labels[leaf] = StarLabel(kind=LabelKind.STAR_LEAF_NULL)
    return labels


class StarLeafProgram(NodeProgram):
    def __init__(self, label: StarLabel):
        self.label = label
        self.output = None

    def decide(self, round_no: int):
        if self.label.kind is LabelKind.STAR_LEAF and round_no == self.label.carrier_id:
            return ("star_leaf", self.label)
        return None

    def receive(self, round_no: int, message) -> None:
        if message is not None and message[0] == "star_size" and self.output is None:
            self.output = (star_tree(message[1]), 1)


class StarCenterProgram(NodeProgram):
    def __init__(self) -> None:
        self.pieces: dict[int, str] = {}
        self.tx_round: Optional[int] = None
        self.size: Optional[int] = None
        self.output = None

    def decide(self, round_no: int):
        if self.tx_round == round_no:
            return ("star_size", self.size)
        return None

    def receive(self, round_no: int, message) -> None:
        if message is None or self.size is not None:
            return
        if message[0] == "star_leaf":
            lab: StarLabel = message[1]
            self.pieces[lab.carrier_id] = lab.piece
            if lab.last:
                self.size = int(unchunk(sorted(self.pieces.items())), 2)
                self.output = (star_tree(self.size), 0)
                self.tx_round = round_no + 1


def star_programs(labels: dict[int, StarLabel]) -> dict[int, NodeProgram]:
    out: dict[int, NodeProgram] = {}
    for node, lab in labels.items():
        if lab.kind is LabelKind.STAR_CENTER:
            out[node] = StarCenterProgram()
        else:
            out[node] = StarLeafProgram(lab)
    return out
