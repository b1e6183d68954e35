"""Label construction for the general tree-recognition scheme (degree >= 3, diameter >= 4).

Every node gets a seven-marker vector plus up to six short bit fields.  The
fields spread a handful of integers across small connected node groups so
that, at protocol time, each group can reassemble its integer by gossip:

  degree_share   chunk of binary(max degree) over the root's core group
  slot_share     chunk of binary(slot) over the core group of a heavy node
                 whose children are all light
  slot_echo      flag on the one heavy child that inherits its parent's slot
  shape_share    chunk of binary(shape index) over a whole light subtree
  count_share    chunk of binary(group size) over same-shape light siblings
  core_size_bits binary(core group size), present everywhere
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .labels import LabelKind, StructuredLabel
from .trees import (
    RootedTree,
    ShapeCatalog,
    Tree,
    center,
    classify_heavy,
    core_subtree,
    enumerate_rooted_trees,
    index_in_sequence,
    root_at,
)

MARK_ROOT = 0
MARK_DEEP_LEAF = 1
MARK_ROOT_CORE = 2
MARK_HEAVY = 3
MARK_LIGHT = 4
MARK_GOSSIP_CORE = 5
MARK_LIGHT_SUB = 6


class UnsupportedShape(ValueError):
    """The tree belongs to one of the small-parameter protocols instead."""


def bits_of(value: int, width: int = 0) -> str:
    s = format(value, "b")
    if width and len(s) < width:
        s = "0" * (width - len(s)) + s
    return s


def chunk(s: str, chunk_len: int) -> list[tuple[int, str]]:
    """Greedy split into 1-based indexed chunks; all but the last are full."""
    if not s:
        raise ValueError("cannot chunk an empty string")
    if chunk_len < 1:
        raise ValueError("chunk length must be positive")
    out = []
    for i in range(0, len(s), chunk_len):
        out.append((i // chunk_len + 1, s[i : i + chunk_len]))
    return out


def unchunk(pairs) -> str:
    """Inverse of chunk: concatenate by ascending index."""
    items = sorted(pairs)
    if [i for i, _ in items] != list(range(1, len(items) + 1)):
        raise ValueError(f"chunk indices not contiguous: {[i for i, _ in items]}")
    return "".join(b for _, b in items)


@dataclass(frozen=True)
class SchemeParams:
    """Constants every node can derive from the maximum degree alone."""

    delta: int
    core_size: int  # m: size of the spreading groups
    catalog: ShapeCatalog  # shapes of size < core_size
    catalog_len: int  # q
    block_len: int  # E: half-epoch length; an epoch is 2*block_len rounds


def derive_params(delta: int) -> SchemeParams:
    if delta < 3:
        raise UnsupportedShape("scheme needs maximum degree >= 3")
    m = -(-delta.bit_length() // 4)
    catalog = enumerate_rooted_trees(m - 1)
    q = len(catalog)
    block = max(2 * delta, delta + q * m + 1)
    return SchemeParams(delta=delta, core_size=m, catalog=catalog, catalog_len=q, block_len=block)


@dataclass(frozen=True)
class MainLabel:
    markers: tuple[int, ...]  # seven 0/1 flags
    degree_share: Optional[tuple[int, str]]  # (group id, chunk)
    slot_share: Optional[tuple[int, str]]
    slot_echo: bool
    shape_share: Optional[tuple[int, str]]  # chunk may be empty
    count_share: Optional[tuple[int, str]]
    core_size_bits: str

    def marker(self, i: int) -> bool:
        return bool(self.markers[i])

    @property
    def core_size(self) -> int:
        return int(self.core_size_bits, 2)

    def to_structured(self) -> StructuredLabel:
        def pair(p):
            return (bits_of(p[0]), p[1]) if p is not None else ("", "")

        d = pair(self.degree_share)
        s = pair(self.slot_share)
        z = pair(self.shape_share)
        c = pair(self.count_share)
        fields = (
            "".join(str(b) for b in self.markers),
            d[0], d[1],
            s[0], s[1],
            "1" if self.slot_echo else "",
            z[0], z[1],
            c[0], c[1],
            self.core_size_bits,
        )
        return StructuredLabel(kind=LabelKind.MAIN_SCHEME, fields=fields)

    @staticmethod
    def from_structured(label: StructuredLabel) -> "MainLabel":
        if label.kind is not LabelKind.MAIN_SCHEME:
            raise ValueError(f"not a main-scheme label: {label.kind}")
        f = label.fields

        def pair(id_bits: str, chunk_bits: str):
            return (int(id_bits, 2), chunk_bits) if id_bits else None

        return MainLabel(
            markers=tuple(int(b) for b in f[0]),
            degree_share=pair(f[1], f[2]),
            slot_share=pair(f[3], f[4]),
            slot_echo=f[5] == "1",
            shape_share=pair(f[6], f[7]),
            count_share=pair(f[8], f[9]),
            core_size_bits=f[10],
        )


@dataclass
class GroundTruth:
    """Labeler-side values used only by verification, never by node programs."""

    root: int
    deep_leaf: int
    slots: dict[int, int]  # heavy non-root node -> transmission slot
    shapes: dict[int, int]  # light node with heavy parent -> catalog index
    heavy: frozenset[int]


def choose_root(tree: Tree) -> int:
    """Central node, or for an odd diameter the central-edge endpoint whose
    side is larger (ties to the smaller id)."""
    c = center(tree)
    if c.kind == "node":
        return c.node
    u, v = c.edge
    # Side sizes after deleting the central edge, counted from u.
    seen = {u, v}
    stack = [u]
    size_u = 1
    while stack:
        x = stack.pop()
        for w in tree.adjacency[x]:
            if w not in seen:
                seen.add(w)
                size_u += 1
                stack.append(w)
    size_v = tree.n - size_u
    if size_u != size_v:
        return u if size_u > size_v else v
    return min(u, v)


def assign_markers(rt: RootedTree, heavy: frozenset[int], core_size: int) -> tuple[dict[int, list[int]], int]:
    n = rt.tree.n
    markers = {v: [0] * 7 for v in range(n)}
    markers[rt.root][MARK_ROOT] = 1
    deep_leaf = next(v for v in rt.bfs_order if rt.level[v] == rt.height)
    markers[deep_leaf][MARK_DEEP_LEAF] = 1
    for v in core_subtree(rt, rt.root, core_size):
        markers[v][MARK_ROOT_CORE] = 1
    for v in range(n):
        markers[v][MARK_HEAVY if v in heavy else MARK_LIGHT] = 1
    for v in range(n):
        if v in heavy and all(c not in heavy for c in rt.children[v]):
            for u in core_subtree(rt, v, core_size):
                markers[u][MARK_GOSSIP_CORE] = 1
    for v in range(n):
        p = rt.parent[v]
        if v not in heavy and p is not None and p in heavy:
            for u in rt.subtree_nodes(v):
                markers[u][MARK_LIGHT_SUB] = 1
    return markers, deep_leaf


def assign_slots(rt: RootedTree, heavy: frozenset[int]) -> dict[int, int]:
    """Transmission slots: siblings' slots are pairwise distinct, and the
    lowest-id heavy child always repeats its parent's slot."""
    slots: dict[int, int] = {}
    for order, v in enumerate(c for c in rt.children[rt.root] if c in heavy):
        slots[v] = order + 1
    for v in rt.bfs_order:
        if v == rt.root or v not in slots:
            continue
        kids = [c for c in rt.children[v] if c in heavy]
        if not kids:
            continue
        slots[kids[0]] = slots[v]
        spare = (x for x in range(1, len(kids) + 1) if x != slots[v])
        for c in kids[1:]:
            slots[c] = next(spare)
    return slots


def assign_shapes(rt: RootedTree, heavy: frozenset[int], catalog: ShapeCatalog) -> dict[int, int]:
    shapes: dict[int, int] = {}
    for v in range(rt.tree.n):
        p = rt.parent[v]
        if v not in heavy and p is not None and p in heavy:
            shapes[v] = index_in_sequence(catalog, rt, v)
    return shapes


@dataclass
class LabeledTree:
    tree: Tree
    rooted: RootedTree
    params: SchemeParams
    labels: dict[int, MainLabel]
    truth: GroundTruth


def label_tree(tree: Tree) -> LabeledTree:
    delta = tree.max_degree
    if delta < 3 or tree.diameter < 4:
        raise UnsupportedShape(
            f"degree {delta} / diameter {tree.diameter} belongs to a small-parameter protocol"
        )
    params = derive_params(delta)
    m = params.core_size
    rt = root_at(tree, choose_root(tree))
    heavy = classify_heavy(rt, delta)
    markers, deep_leaf = assign_markers(rt, heavy, m)
    slots = assign_slots(rt, heavy)
    shapes = assign_shapes(rt, heavy, params.catalog)

    degree_share: dict[int, tuple[int, str]] = {}
    slot_share: dict[int, tuple[int, str]] = {}
    slot_echo: set[int] = set()
    shape_share: dict[int, tuple[int, str]] = {}
    count_share: dict[int, tuple[int, str]] = {}

    # Max degree spread over the root's core group (bit length is exactly
    # bit_length(delta), so the greedy split yields exactly m chunks).
    root_core = core_subtree(rt, rt.root, m)
    for (idx, bits), node in zip(chunk(bits_of(delta), 4), root_core):
        degree_share[node] = (idx, bits)

    for v in range(tree.n):
        if v == rt.root or v not in heavy:
            continue
        if all(c not in heavy for c in rt.children[v]):
            group = core_subtree(rt, v, m)
            for (idx, bits), node in zip(chunk(bits_of(slots[v], width=delta.bit_length()), 4), group):
                slot_share[node] = (idx, bits)
        p = rt.parent[v]
        if p is not None and p != rt.root and p in heavy and slots.get(p) == slots[v]:
            slot_echo.add(v)

    for v, shape_index in shapes.items():
        members = rt.subtree_nodes(v)
        pieces = dict(chunk(bits_of(shape_index), 2))
        for pos, node in enumerate(members, start=1):
            shape_share[node] = (pos, pieces.get(pos, ""))

    for v in range(tree.n):
        if v not in heavy:
            continue
        groups: dict[int, list[int]] = {}
        for c in rt.children[v]:
            if c in shapes:
                groups.setdefault(shapes[c], []).append(c)
        for shape_index in sorted(groups):
            members = sorted(groups[shape_index])
            for (idx, bits), node in zip(chunk(bits_of(len(members)), 4), members):
                count_share[node] = (idx, bits)

    core_bits = bits_of(m)
    labels = {
        v: MainLabel(
            markers=tuple(markers[v]),
            degree_share=degree_share.get(v),
            slot_share=slot_share.get(v),
            slot_echo=v in slot_echo,
            shape_share=shape_share.get(v),
            count_share=count_share.get(v),
            core_size_bits=core_bits,
        )
        for v in range(tree.n)
    }
    truth = GroundTruth(root=rt.root, deep_leaf=deep_leaf, slots=slots, shapes=shapes, heavy=heavy)
    return LabeledTree(tree=tree, rooted=rt, params=params, labels=labels, truth=truth)


def truth_to_text(truth: GroundTruth) -> str:
    lines = []
    for node in sorted(truth.slots):
        lines.append(f"t {node} {truth.slots[node]}")
    for node in sorted(truth.shapes):
        lines.append(f"z {node} {truth.shapes[node]}")
    return "\n".join(lines) + "\n"


def truth_from_text(text: str) -> tuple[dict[int, int], dict[int, int]]:
    slots: dict[int, int] = {}
    shapes: dict[int, int] = {}
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln:
            continue
        kind, node, value = ln.split()
        if kind == "t":
            slots[int(node)] = int(value)
        elif kind == "z":
            shapes[int(node)] = int(value)
        else:
            raise ValueError(f"bad truth line {ln!r}")
    return slots, shapes
