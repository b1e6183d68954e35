"""Constant-size labeling and programs for lines (maximum degree 2).

A line of k edges is cut into segments of stride L = 3 + floor(log2 k).  In
each complete segment a starter node launches a forward wave that collects
one bit of k and one bit of the segment number from every inner node; the
segment's boundary node decodes both and answers with a backward wave that
tells everyone (k, segment).  Every transmission happens in a round congruent
to the transmitter's position mod 3, so simultaneous transmitters are at
least three apart and no listener ever faces two transmitting neighbors.

Node types: 0 boundary/terminator, 1 starter, 2 bit carrier, 3 plain relay.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .engine import NodeProgram
from .labels import LabelKind, StructuredLabel
from .scheme import bits_of
from .trees import Tree


@lru_cache(maxsize=1024)
def path_tree(k: int) -> Tree:
    # Shared per length: every node of a run outputs the same object.
    return Tree(k + 1, [(i, i + 1) for i in range(k)])


def line_positions(tree: Tree) -> list[int]:
    """Node ids in path order, starting from the smaller-id endpoint."""
    if tree.n == 1:
        return [0]
    if tree.max_degree > 2:
        raise ValueError("not a line")
    first = min(v for v in range(tree.n) if tree.degree(v) == 1)
    order = [first]
    prev = None
    cur = first
    while len(order) < tree.n:
        nxt = [w for w in tree.adjacency[cur] if w != prev]
        assert len(nxt) == 1
        prev, cur = cur, nxt[0]
        order.append(cur)
    return order


def stride_for(k: int) -> int:
    return 3 + k.bit_length() - 1


@dataclass(frozen=True)
class LineLabel:
    kind: LabelKind
    node_type: int = 0
    k_bit: str = "0"
    seg_bit: str = "0"
    pos_mod3: int = 0
    tiny_len: int = 0
    tiny_pos: int = 0

    def to_structured(self) -> StructuredLabel:
        if self.kind is LabelKind.LINE_TINY:
            return StructuredLabel(
                kind=self.kind,
                fields=(format(self.tiny_len, "02b"), format(self.tiny_pos - 1, "02b")),
            )
        return StructuredLabel(
            kind=self.kind,
            fields=(
                format(self.node_type, "02b"),
                self.k_bit,
                self.seg_bit,
                format(self.pos_mod3, "02b"),
            ),
        )

    @staticmethod
    def from_structured(label: StructuredLabel) -> "LineLabel":
        if label.kind is LabelKind.LINE_TINY:
            return LineLabel(
                kind=label.kind,
                tiny_len=int(label.fields[0], 2),
                tiny_pos=int(label.fields[1], 2) + 1,
            )
        t, kb, sb, d = label.fields
        return LineLabel(
            kind=label.kind, node_type=int(t, 2), k_bit=kb, seg_bit=sb, pos_mod3=int(d, 2)
        )


def label_line(tree: Tree) -> dict[int, LineLabel]:
    """Per-node labels; positions run 1..k+1 from the smaller-id endpoint."""
    order = line_positions(tree)
    k = tree.n - 1
    if k <= 3:
        return {
            node: LineLabel(kind=LabelKind.LINE_TINY, tiny_len=k, tiny_pos=pos)
            for pos, node in enumerate(order, start=1)
        }
    stride = stride_for(k)
    segments = k // stride
    width = k.bit_length()  # payload positions per complete segment
    k_bits = bits_of(k)
    type_of: dict[int, tuple[int, str, str]] = {}

    def put(pos: int, node_type: int, k_bit: str = "0", seg_bit: str = "0") -> None:
        if pos not in type_of:  # precedence: boundary > starter > carrier > relay
            type_of[pos] = (node_type, k_bit, seg_bit)

    put(k + 1, 0)
    for j in range(1, max(segments, 1)):
        put(j * stride, 0)
    complete = range(segments - 1) if segments >= 2 else range(1)
    for j in complete:
        put(j * stride + 1, 1)
        seg_bits = bits_of(j, width=width)
        for i in range(1, width + 1):
            put(j * stride + 1 + i, 2, k_bits[i - 1], seg_bits[i - 1])
    labels = {}
    for pos, node in enumerate(order, start=1):
        node_type, kb, sb = type_of.get(pos, (3, "0", "0"))
        labels[node] = LineLabel(
            kind=LabelKind.LINE, node_type=node_type, k_bit=kb, seg_bit=sb, pos_mod3=pos % 3
        )
    return labels


def first_dedicated(residue: int) -> int:
    return residue if residue in (1, 2) else 3


def next_dedicated(residue: int, after: int) -> int:
    gap = (residue - after) % 3
    return after + (gap if gap else 3)


def starter_round(segment: int, stride: int) -> int:
    """Round in which segment j's starter transmits its empty forward probe."""
    return first_dedicated((segment * stride + 1) % 3)


def boundary_tx_round(segment: int, stride: int) -> int:
    """Round in which segment j's boundary answers: probe arrival plus one."""
    return starter_round(segment, stride) + stride - 1


class LineProgram(NodeProgram):
    def __init__(self, label: LineLabel):
        self.label = label
        self.first_rx: Optional[int] = None  # forward-probe arrival round
        self.outbox: dict[int, tuple] = {}
        self.started = False
        self.resolved = False
        self.output = None

    def _place(self, k: int, pos: int) -> None:
        self.output = (path_tree(k), pos - 1)

    def decide(self, round_no: int):
        lab = self.label
        if lab.kind is LabelKind.LINE_TINY:
            if self.output is None:
                self._place(lab.tiny_len, lab.tiny_pos)
            return None
        if (
            lab.node_type == 1
            and not self.started
            and round_no == first_dedicated(lab.pos_mod3)
        ):
            self.started = True
            return ("probe", "", "")
        return self.outbox.pop(round_no, None)

    def receive(self, round_no: int, message) -> None:
        if message is None:
            return
        lab = self.label
        if lab.kind is LabelKind.LINE_TINY:
            return
        tag = message[0]
        if tag == "probe":
            if self.first_rx is not None or lab.node_type == 1:
                return
            _, kbits, segbits = message
            if lab.node_type == 2:
                self.first_rx = round_no
                grown = ("probe", kbits + lab.k_bit, segbits + lab.seg_bit)
                self.outbox[next_dedicated(lab.pos_mod3, round_no)] = grown
            elif lab.node_type == 3:
                self.first_rx = round_no
                self.outbox[next_dedicated(lab.pos_mod3, round_no)] = message
            elif lab.node_type == 0 and kbits:
                self.first_rx = round_no
                k = int(kbits, 2)
                segment = int(segbits, 2)
                stride = stride_for(k)
                self.resolved = True
                self._place(k, segment * stride + (round_no - starter_round(segment, stride) + 1) + 1)
                self.outbox[next_dedicated(lab.pos_mod3, round_no)] = (
                    "resolve",
                    k,
                    segment,
                    lab.pos_mod3,
                )
            return
        if tag == "resolve":
            if self.resolved:
                return
            _, k, segment, entry = message
            stride = stride_for(k)
            if lab.node_type == 1:
                if entry == (lab.pos_mod3 + 1) % 3:
                    self.resolved = True
                    self._place(k, segment * stride + 1)
                return
            self.resolved = True
            if lab.node_type == 0:
                self._place(k, k + 1)  # terminator reached through the tail
                return
            if self.first_rx is not None:
                pos = segment * stride + (self.first_rx - starter_round(segment, stride) + 1) + 1
            else:
                pos = (segment + 1) * stride + (round_no - boundary_tx_round(segment, stride) + 1)
            self._place(k, pos)
            self.outbox[next_dedicated(lab.pos_mod3, round_no)] = ("resolve", k, segment, lab.pos_mod3)
            return


def line_programs(labels: dict[int, LineLabel]) -> dict[int, NodeProgram]:
    return {node: LineProgram(lab) for node, lab in labels.items()}
