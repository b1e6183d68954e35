from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    ROOTED_TREE_COUNTS,
    all_labeled_trees,
    all_longest_paths,
    brute_placement_valid,
    brute_rooted_isomorphic,
)
from radiotopo.trees import (
    FormInterner,
    NotInCatalog,
    Tree,
    TreeError,
    all_root_form_ids,
    center,
    classify_heavy,
    core_subtree,
    enumerate_rooted_trees,
    index_in_sequence,
    parse_form,
    parse_tree_text,
    placement_valid,
    root_at,
    tree_to_text,
)


def path(n):
    return Tree(n, [(i, i + 1) for i in range(n - 1)])


def star(k):
    return Tree(k + 1, [(0, i) for i in range(1, k + 1)])


@st.composite
def random_trees(draw, max_n=24):
    n = draw(st.integers(min_value=1, max_value=max_n))
    edges = []
    for v in range(1, n):
        edges.append((draw(st.integers(min_value=0, max_value=v - 1)), v))
    return Tree(n, edges)


class TestTreeConstruction:
    def test_rejects_cycle(self):
        with pytest.raises(TreeError):
            Tree(3, [(0, 1), (1, 2), (2, 0)])

    def test_rejects_disconnected(self):
        with pytest.raises(TreeError):
            Tree(4, [(0, 1), (2, 3), (0, 1)])

    def test_rejects_wrong_edge_count(self):
        with pytest.raises(TreeError):
            Tree(3, [(0, 1)])

    def test_file_round_trip(self):
        t = path(5)
        assert parse_tree_text(tree_to_text(t)) == t

    def test_file_rejects_garbage(self):
        with pytest.raises(TreeError):
            parse_tree_text("tree 3\n0 1\n1 2\n0 2\n")


class TestCenter:
    def test_odd_length_path_midpoint(self):
        assert center(path(5)).node == 2

    def test_even_node_path_edge(self):
        assert center(path(4)).edge == (1, 2)

    def test_star_center(self):
        assert center(star(4)).node == 0

    @settings(max_examples=60, deadline=None)
    @given(random_trees(max_n=16))
    def test_center_on_every_longest_path(self, tree):
        c = center(tree)
        for p in all_longest_paths(tree):
            if c.kind == "node":
                assert c.node == p[len(p) // 2] or c.node == p[(len(p) - 1) // 2]
                assert c.node in p
            else:
                mid = {p[(len(p) - 1) // 2], p[len(p) // 2]}
                assert set(c.edge) == mid

    @settings(max_examples=40, deadline=None)
    @given(random_trees(max_n=16))
    def test_center_parity_matches_diameter(self, tree):
        c = center(tree)
        assert (c.kind == "node") == (tree.diameter % 2 == 0)


class TestRootAt:
    def test_path_rooted_at_middle(self):
        rt = root_at(path(3), 1)
        assert rt.children[1] == (0, 2)
        assert rt.height == 1

    def test_single_node(self):
        rt = root_at(Tree(1, []), 0)
        assert rt.height == 0 and rt.subtree_size[0] == 1

    def test_path_rooted_at_end(self):
        rt = root_at(path(3), 0)
        assert rt.level == (0, 1, 2) and rt.height == 2

    def test_unknown_root(self):
        with pytest.raises(TreeError):
            root_at(path(3), 7)

    @settings(max_examples=40, deadline=None)
    @given(random_trees())
    def test_subtree_sizes_sum(self, tree):
        rt = root_at(tree, 0)
        for v in range(tree.n):
            assert rt.subtree_size[v] == 1 + sum(rt.subtree_size[c] for c in rt.children[v])


class TestCanonicalForms:
    def test_leaf_form(self):
        rt = root_at(path(2), 0)
        assert rt.form(1) == "01"

    def test_two_leaf_root(self):
        rt = root_at(star(2), 0)
        assert rt.form(0) == "001011"

    def test_form_length_is_twice_size(self):
        rt = root_at(star(5), 0)
        assert len(rt.form(0)) == 2 * 6

    def test_class_counts_match_reference_sequence(self):
        # Bucketing every labeled rooted tree by form must give exactly the
        # known number of classes: forms neither merge nor split classes.
        for n in range(1, 7):
            forms = set()
            for tree in all_labeled_trees(n):
                for r in range(n):
                    forms.add(root_at(tree, r).form(r))
            assert len(forms) == ROOTED_TREE_COUNTS[n]

    def test_agrees_with_bruteforce_on_small_pairs(self):
        pool = []
        for n in (3, 4):
            for tree in all_labeled_trees(n):
                for r in range(n):
                    pool.append((tree, r))
        for t1, r1 in pool:
            for t2, r2 in pool:
                if t1.n != t2.n:
                    continue
                same_form = root_at(t1, r1).form(r1) == root_at(t2, r2).form(r2)
                assert same_form == brute_rooted_isomorphic(t1, r1, t2, r2)


class TestPlacement:
    def test_path_endpoints_equivalent(self):
        t = path(3)
        assert placement_valid(t, 0, t, 2)

    def test_endpoint_vs_midpoint(self):
        t = path(3)
        assert not placement_valid(t, 0, t, 1)

    def test_agrees_with_bijection_oracle(self):
        trees = [path(4), star(3), Tree(5, [(0, 1), (0, 2), (1, 3), (1, 4)]), path(6)]
        for t1 in trees:
            for t2 in trees:
                for v1 in range(t1.n):
                    for v2 in range(t2.n):
                        assert placement_valid(t1, v1, t2, v2) == brute_placement_valid(
                            t1, v1, t2, v2
                        )

    @settings(max_examples=30, deadline=None)
    @given(random_trees(max_n=7), st.data())
    def test_matches_oracle_on_random_pairs(self, tree, data):
        v1 = data.draw(st.integers(min_value=0, max_value=tree.n - 1))
        v2 = data.draw(st.integers(min_value=0, max_value=tree.n - 1))
        assert placement_valid(tree, v1, tree, v2) == brute_placement_valid(tree, v1, tree, v2)

    @settings(max_examples=30, deadline=None)
    @given(random_trees(max_n=40))
    def test_interned_rerooting_matches_pairwise_forms(self, tree):
        ids = all_root_form_ids(tree, FormInterner())
        for v in range(min(tree.n, 6)):
            for w in range(min(tree.n, 6)):
                assert (ids[v] == ids[w]) == (
                    root_at(tree, v).form(v) == root_at(tree, w).form(w)
                )


class TestHeavyClassification:
    def test_delta16_leaves_light(self):
        rt = root_at(path(5), 2)
        heavy = classify_heavy(rt, 16)
        assert 0 not in heavy and 4 not in heavy  # leaves: 4*1 < 5
        assert 2 in heavy and 1 in heavy and 3 in heavy

    def test_delta8_everything_heavy(self):
        rt = root_at(path(5), 2)
        assert classify_heavy(rt, 8) == frozenset(range(5))

    @settings(max_examples=40, deadline=None)
    @given(random_trees(), st.sampled_from([3, 8, 16, 255, 4096]))
    def test_root_heavy_and_monotone(self, tree, delta):
        rt = root_at(tree, 0)
        heavy = classify_heavy(rt, delta)
        if 4 * tree.n >= delta.bit_length():
            # Holds whenever delta can actually occur in the tree (n > delta).
            assert rt.root in heavy
        for v in heavy:
            if rt.parent[v] is not None:
                assert rt.parent[v] in heavy


class TestCoreSubtree:
    def test_size_one(self):
        rt = root_at(star(3), 0)
        assert core_subtree(rt, 0, 1) == [0]

    def test_bfs_prefix_prefers_low_ids(self):
        rt = root_at(star(3), 0)
        assert core_subtree(rt, 0, 3) == [0, 1, 2]

    def test_too_small(self):
        rt = root_at(path(3), 0)
        with pytest.raises(TreeError):
            core_subtree(rt, 2, 2)

    @settings(max_examples=40, deadline=None)
    @given(random_trees(), st.integers(min_value=1, max_value=5))
    def test_connected(self, tree, m):
        rt = root_at(tree, 0)
        if rt.subtree_size[0] < m:
            return
        nodes = core_subtree(rt, 0, m)
        picked = set(nodes)
        # Every non-root member's parent is in the set: connectedness.
        for v in nodes[1:]:
            assert rt.parent[v] in picked


class TestShapeCatalog:
    def test_single_node(self):
        cat = enumerate_rooted_trees(1)
        assert len(cat) == 1 and cat.forms == ("01",)

    def test_counts_to_four(self):
        cat = enumerate_rooted_trees(4)
        assert len(cat) == 1 + 1 + 2 + 4

    def test_counts_match_reference(self):
        cat = enumerate_rooted_trees(8)
        by_size = Counter(len(f) // 2 for f in cat.forms)
        for size in range(1, 9):
            assert by_size[size] == ROOTED_TREE_COUNTS[size]

    def test_size_class_bound(self):
        cat = enumerate_rooted_trees(8)
        by_size = Counter(len(f) // 2 for f in cat.forms)
        for size in range(1, 9):
            assert by_size[size] <= 2 ** (2 * (size - 1))

    def test_no_duplicates_and_stable(self):
        a = enumerate_rooted_trees(7)
        b = enumerate_rooted_trees(7)
        assert a.forms == b.forms
        assert len(set(a.forms)) == len(a.forms)

    def test_forms_parse_back(self):
        cat = enumerate_rooted_trees(6)
        for form, tree in zip(cat.forms, cat.trees):
            assert root_at(tree, 0).form(0) == form

    def test_empty_catalog(self):
        assert len(enumerate_rooted_trees(0)) == 0

    def test_parse_form_rejects_unbalanced(self):
        with pytest.raises(TreeError):
            parse_form("0011" + "1")


class TestIndexInSequence:
    def test_leaf_is_first(self):
        cat = enumerate_rooted_trees(3)
        rt = root_at(path(4), 0)
        assert index_in_sequence(cat, rt, 3) == 1

    def test_isomorphic_siblings_equal(self):
        cat = enumerate_rooted_trees(3)
        t = Tree(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)])
        rt = root_at(t, 0)
        assert index_in_sequence(cat, rt, 1) == index_in_sequence(cat, rt, 2)

    def test_position_bound(self):
        cat = enumerate_rooted_trees(7)
        for form in cat.forms:
            size = len(form) // 2
            assert cat.index_of_form(form) <= 2 ** (2 * size - 1)

    def test_missing_raises(self):
        cat = enumerate_rooted_trees(2)
        rt = root_at(path(5), 0)
        with pytest.raises(NotInCatalog):
            index_in_sequence(cat, rt, 0)
