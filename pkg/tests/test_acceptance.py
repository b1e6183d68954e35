"""Acceptance criteria, one test per criterion.

The main corpus (criteria 1, 2, 4, 5, 6) is built once per session: random
trees over a degree/diameter grid with at least five seeds each, plus twenty
stick-family trees, at least 600 runs in total.  Each run is summarized
eagerly so the corpus stays small in memory.
"""

from __future__ import annotations

from dataclasses import dataclass

import pytest

from oracles import ROOTED_TREE_COUNTS, all_labeled_trees
from radiotopo.engine import simulate
from radiotopo.generators import SplitMix, family_sticks, random_tree
from radiotopo.harness import (
    check_mod3,
    pigeonhole_certificate,
    run_experiment,
    run_tree,
    scaling_witness,
    structured_labels_for,
    view_collision_search,
)
from radiotopo.labels import encode
from radiotopo.protocol_line import path_tree, stride_for
from radiotopo.protocol_main import rooted_form
from radiotopo.protocol_small import chunk_len, d3_programs, label_d3, star_programs, label_star, star_tree
from radiotopo.scheme import label_tree
from radiotopo.trees import Tree, root_at
from radiotopo.generators import family_feasibility

DELTAS = (3, 4, 6, 8, 16, 32, 64)
DIAMETERS = (4, 5, 6, 8, 10, 16, 20)
SEEDS_SMALL = tuple(range(1, 16))  # deltas up to 16
SEEDS_BIG = tuple(range(1, 7))  # deltas 32 and 64
STICK_COMBOS = ((3, 6), (4, 8), (5, 10), (6, 12), (8, 14))
STICK_SEEDS = (1, 2, 3, 4)


@dataclass
class RunSummary:
    family: str
    delta: int
    diameter: int
    seed: int
    n: int
    all_valid: bool
    completion: int
    core_size: int
    height: int
    block_len: int
    tr_clean: bool
    params_learned_ok: bool
    params_by_deadline: bool
    heavy_subtrees_ok: bool


def summarize(tree, family, seed) -> RunSummary:
    art = run_tree(tree, family=family, seed=seed)
    assert art.report.protocol == "main"
    lb = art.labeled
    rt = lb.rooted
    m2 = lb.params.core_size**2
    deadline = m2 + 3 * rt.height
    learned_ok = True
    by_deadline = True
    subtrees_ok = True
    for v, prog in art.programs.items():
        if (
            prog.delta != tree.max_degree
            or prog.level != rt.level[v]
            or prog.height != rt.height
        ):
            learned_ok = False
        rounds = (prog.round_delta, prog.round_level, prog.round_height)
        if any(r is None or r > deadline for r in rounds):
            by_deadline = False
    for v in lb.truth.heavy:
        prog = art.programs[v]
        if prog.my_subtree is None or rooted_form(prog.my_subtree) != rt.form(v):
            subtrees_ok = False
    return RunSummary(
        family=family,
        delta=tree.max_degree,
        diameter=tree.diameter,
        seed=seed,
        n=tree.n,
        all_valid=all(art.report.node_valid.values()),
        completion=art.metrics.completion_round,
        core_size=lb.params.core_size,
        height=rt.height,
        block_len=lb.params.block_len,
        tr_clean=art.report.checks["tr_delivery"],
        params_learned_ok=learned_ok,
        params_by_deadline=by_deadline,
        heavy_subtrees_ok=subtrees_ok,
    )


@pytest.fixture(scope="session")
def corpus() -> list[RunSummary]:
    runs = []
    for delta in DELTAS:
        seeds = SEEDS_BIG if delta >= 32 else SEEDS_SMALL
        for diameter in DIAMETERS:
            for seed in seeds:
                runs.append(summarize(random_tree(delta, diameter, seed), "random", seed))
    for delta, diameter in STICK_COMBOS:
        for seed in STICK_SEEDS:
            tree = family_sticks(delta, diameter, seed, 1)[0]
            runs.append(summarize(tree, "sticks", seed))
    return runs


def test_c01_correctness(corpus):
    sticks = [r for r in corpus if r.family == "sticks"]
    assert len(corpus) >= 600, f"corpus has only {len(corpus)} runs"
    assert len(sticks) == 20
    bad = [r for r in corpus if not r.all_valid]
    assert not bad, f"{len(bad)} runs with invalid placements"
    print(f"\nACCEPTANCE 1 PASS: {len(corpus)} runs, 100% valid placements")


def test_c02_round_bound(corpus):
    for r in corpus:
        bound = 3 * r.core_size**2 + 4 * r.height + 2 * r.height * r.block_len + 1
        assert r.completion <= bound, (r.delta, r.diameter, r.seed, r.completion, bound)
        if r.delta >= 16:
            assert r.block_len == 2 * r.delta
            loose = 3 * r.core_size**2 + 4 * r.height + 4 * r.height * r.delta + 1
            assert r.completion <= loose <= 6 * r.diameter * r.delta
    print(f"\nACCEPTANCE 2 PASS: completion within 3m^2+4h+2hE+1 on all {len(corpus)} runs")


def test_c03_label_length_scaling():
    bits = {}
    for exp in range(4, 17):
        lb = label_tree(scaling_witness(1 << exp))
        bits[exp] = max(len(encode(lab.to_structured())) for lab in lb.labels.values())
    total = bits[16] - bits[4]
    steps = [bits[e + 1] - bits[e] for e in range(4, 16)]
    assert total <= 12, bits
    assert all(step <= 4 for step in steps), bits
    print(
        f"\nACCEPTANCE 3 PASS: max label bits {bits[4]} at 2^4 -> {bits[16]} at 2^16 "
        f"(growth {total} <= 12; max per doubling {max(steps)} <= 4)"
    )


def test_c04_collision_freedom(corpus):
    dirty = [r for r in corpus if not r.tr_clean]
    assert not dirty
    print(f"\nACCEPTANCE 4 PASS: zero parent-delivery violations across {len(corpus)} runs")


def test_c05_subtree_correctness(corpus):
    assert len(corpus) >= 50
    bad = [r for r in corpus if not r.heavy_subtrees_ok]
    assert not bad
    print(f"\nACCEPTANCE 5 PASS: heavy subtrees match ground truth in all {len(corpus)} runs")


def test_c06_parameter_learning(corpus):
    bad_values = [r for r in corpus if not r.params_learned_ok]
    late = [r for r in corpus if not r.params_by_deadline]
    assert not bad_values and not late
    print(
        f"\nACCEPTANCE 6 PASS: degree/level/height learned correctly by round m^2+3h "
        f"in all {len(corpus)} runs"
    )


def test_c07_diameter_three():
    rng = SplitMix(11)
    worst = {}
    for delta in (8, 64, 4096):
        c = chunk_len(delta)
        for _ in range(8):
            small = rng.randint(1, delta - 1)
            k1, k2 = (delta - 1, small) if rng.randint(0, 1) else (small, delta - 1)
            edges = [(0, 1)]
            edges += [(0, 2 + i) for i in range(k1)]
            edges += [(1, 2 + k1 + i) for i in range(k2)]
            tree = Tree(2 + k1 + k2, edges)
            labels = label_d3(tree)
            outputs, transcript, metrics = simulate(tree, d3_programs(labels), 64)
            from radiotopo.harness import check_run

            assert all(check_run(tree, outputs).values())
            p = -(-k1.bit_length() // c)
            q = -(-k2.bit_length() // c)
            assert metrics.completion_round <= max(p, q) + 3
            worst[delta] = max(worst.get(delta, 0), metrics.completion_round)
    assert worst[4096] <= 8
    print(f"\nACCEPTANCE 7 PASS: two-hub runs valid; worst rounds {worst}")


def test_c08_stars():
    from radiotopo.harness import check_run

    worst = {}
    for delta in (8, 64, 256):
        c = chunk_len(delta)
        cap = -(-delta.bit_length() // c) + 1
        for k in range(1, delta + 1):
            tree = star_tree(k)
            outputs, transcript, metrics = simulate(tree, star_programs(label_star(tree, delta)), 64)
            assert all(check_run(tree, outputs).values())
            assert metrics.completion_round <= cap, (delta, k)
            worst[delta] = max(worst.get(delta, 0), metrics.completion_round)
    print(f"\nACCEPTANCE 8 PASS: star sweeps valid; worst rounds {worst} within bounds")


def test_c09_lines():
    from radiotopo.harness import check_run

    worst_bits = 0
    for k in range(1, 513):
        tree = path_tree(k)
        from radiotopo.protocol_line import label_line, line_programs

        labels = label_line(tree)
        outputs, transcript, metrics = simulate(tree, line_programs(labels), 12 * stride_for(k) + 40)
        for node in range(k + 1):
            out_tree, pos = outputs[node]
            assert out_tree.n == k + 1 and pos == node, (k, node)
        if k >= 16:
            assert metrics.completion_round <= 12 * stride_for(k)
        assert check_mod3(transcript, labels) == []
        worst_bits = max(
            worst_bits, max(len(encode(lab.to_structured())) for lab in labels.values())
        )
    assert worst_bits <= 24
    print(f"\nACCEPTANCE 9 PASS: lines 1..512 exact positions, max label {worst_bits} <= 24 bits")


def test_c10_lower_bound_certificate():
    cert = pigeonhole_certificate(2**36, 2)
    assert not cert.separable
    assert cert.views_upper_bound == 2**22 and cert.family_size == 2**35
    trees = family_feasibility(64)
    labelings = []
    for t in trees:
        structured, _ = structured_labels_for(t, "d3")
        labelings.append({v: encode(s)[:1] for v, s in structured.items()})
    hit = view_collision_search(trees, labelings)
    assert hit is not None and trees[hit[0]].n != trees[hit[1]].n
    print(
        f"\nACCEPTANCE 10 PASS: 2^22 views < 2^35 family members (not separable); "
        f"1-bit labels collide members {hit}"
    )


def test_c11_oracles():
    # Canonical forms classify every rooted tree up to 7 nodes exactly.
    for n in range(1, 8):
        forms = set()
        for tree in all_labeled_trees(n):
            for r in range(n):
                forms.add(root_at(tree, r).form(r))
        assert len(forms) == ROOTED_TREE_COUNTS[n]

    # Group gossip equals direct member-topology computation on random cores
    # (tested at unit level on 100 cores; spot-check again here).
    from test_protocol_main import TestRoundRobin

    TestRoundRobin().test_matches_direct_member_topology_on_random_cores()

    # Batch determinism: byte-identical CSV on rerun.
    config = "delta=3,8\ndiameter=4,6\nseeds=1..3\n"
    a, ok_a = run_experiment(config)
    b, ok_b = run_experiment(config)
    assert ok_a and ok_b and a == b
    print("\nACCEPTANCE 11 PASS: form-class counts exact to n=7; gossip matches direct "
          "computation; batch reruns byte-identical")
