import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hokt.errors import ConfigError, InputError, MetricError
from hokt.graph import Partition, build_snapshot
from hokt.metrics import confusion, f1_score, honmi, modularity, modularity_many, nmi, nmi_many, rank_sum_test
from oracles import confusion_oracle, exact_rank_sum_p, f1_oracle, modularity_oracle, nmi_oracle


def part(labels):
    return Partition(range(len(labels)), labels)


label_lists = st.integers(1, 20).flatmap(lambda n: st.lists(st.integers(0, 4), min_size=n, max_size=n))


def test_modularity_single_community_is_zero():
    g = build_snapshot(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
    assert modularity(g, part([0] * 5)) == pytest.approx(0.0, abs=1e-15)


def test_modularity_two_triangles():
    g = build_snapshot(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    assert modularity(g, part([0, 0, 0, 1, 1, 1])) == pytest.approx(0.5, abs=1e-15)


def test_modularity_triangle_singletons():
    g = build_snapshot(3, [(0, 1), (1, 2), (0, 2)])
    assert modularity(g, part([0, 1, 2])) == pytest.approx(-1 / 3, abs=1e-15)


def test_modularity_errors():
    with pytest.raises(MetricError):
        modularity(build_snapshot(3, []), part([0, 0, 0]))
    g = build_snapshot(3, [(0, 1)])
    with pytest.raises(InputError):
        modularity(g, Partition([0, 1], [0, 0]))


def test_modularity_matches_oracle():
    rng = np.random.default_rng(1)
    for _ in range(300):
        n = int(rng.integers(2, 9))
        pairs = [tuple(p) for p in rng.integers(0, n, size=(12, 2)).tolist() if p[0] != p[1]]
        if not pairs:
            continue
        g = build_snapshot(n, pairs)
        labels = rng.integers(0, 3, size=n).tolist()
        want = modularity_oracle(n, sorted(g.edge_set()), labels)
        assert abs(modularity(g, part(labels)) - want) <= 1e-12
        assert -0.5 <= want <= 1.0


def test_modularity_many_rows_match_single():
    rng = np.random.default_rng(2)
    g = build_snapshot(10, [tuple(p) for p in rng.integers(0, 10, size=(25, 2)).tolist() if p[0] != p[1]])
    labels = rng.integers(0, 4, size=(6, 10))
    got = modularity_many(g, labels)
    for row, q in zip(labels, got):
        assert q == pytest.approx(modularity(g, part(row.tolist())), abs=1e-12)


def test_confusion_examples():
    a = part([0, 0, 1, 1])
    assert confusion(a, a, range(4)).counts.tolist() == [[2, 0], [0, 2]]
    b = part([0, 1, 0, 1])
    assert confusion(a, b, range(4)).counts.tolist() == [[1, 1], [1, 1]]
    with pytest.raises(InputError):
        confusion(a, b, [])


def test_confusion_matches_pairwise_oracle():
    rng = np.random.default_rng(3)
    for _ in range(200):
        n = int(rng.integers(1, 21))
        a, b = rng.integers(0, 5, size=n).tolist(), rng.integers(0, 5, size=n).tolist()
        cm = confusion(part(a), part(b), range(n))
        assert cm.counts.tolist() == confusion_oracle(a, b).tolist()
        assert cm.total == n
        assert cm.row_sums.tolist() == cm.counts.sum(1).tolist()


def test_nmi_examples():
    a = part([0, 0, 1, 1])
    assert nmi(a, part([7, 7, 3, 3])) == 1.0
    assert nmi(a, part([0, 1, 0, 1])) == pytest.approx(0.0, abs=1e-15)
    assert nmi(part([0, 0, 0]), part([1, 1, 1])) == 1.0
    assert nmi(part([0, 0, 0]), part([0, 1, 1])) == 0.0


def test_nmi_matches_oracle():
    rng = np.random.default_rng(4)
    for _ in range(300):
        n = int(rng.integers(1, 21))
        a, b = rng.integers(0, 4, size=n).tolist(), rng.integers(0, 4, size=n).tolist()
        assert abs(nmi(part(a), part(b)) - nmi_oracle(a, b)) <= 1e-12


def test_nmi_uses_shared_nodes_by_default():
    a = Partition([0, 1, 2, 3], [0, 0, 1, 1])
    b = Partition([1, 2, 3, 4], [5, 6, 6, 6])
    assert nmi(a, b) == pytest.approx(1.0)


def test_nmi_many_matches_single():
    rng = np.random.default_rng(5)
    labels = rng.integers(0, 4, size=(8, 15))
    ref = rng.integers(0, 3, size=15)
    for row, v in zip(labels, nmi_many(labels, ref)):
        assert v == pytest.approx(nmi(part(row.tolist()), part(ref.tolist())), abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(label_lists, st.data())
def test_nmi_properties(a, data):
    n = len(a)
    b = data.draw(st.lists(st.integers(0, 4), min_size=n, max_size=n))
    pa, pb = part(a), part(b)
    v = nmi(pa, pb)
    assert 0.0 <= v <= 1.0
    assert v == pytest.approx(nmi(pb, pa), abs=1e-12)
    assert nmi(pa, pa) == pytest.approx(1.0, abs=1e-12)
    relabeled = part([10 - x for x in b])
    assert nmi(pa, relabeled) == pytest.approx(v, abs=1e-12)


def test_honmi_single_weight_is_plain_nmi():
    rng = np.random.default_rng(6)
    for _ in range(20):
        cur, prev = part(rng.integers(0, 3, 12).tolist()), part(rng.integers(0, 3, 12).tolist())
        assert honmi(cur, [prev], [1.0]) == nmi(cur, prev)


def test_honmi_combinations():
    a = part([0, 0, 1, 1])
    assert honmi(a, [a, a], [0.5, 0.5]) == pytest.approx(1.0)
    # partial match with the most recent entry, exact match with the older one
    half = part([0, 0, 0, 0, 1, 1, 2, 2])
    other = part([0, 0, 1, 1, 2, 2, 2, 2])
    v = nmi(half, other)
    got = honmi(half, [other, half], [0.8, 0.2])
    assert got == pytest.approx(0.8 * v + 0.2)


@pytest.mark.parametrize("weights", [[0.6, 0.6], [1.2, -0.2], [0.5]])
def test_honmi_rejects_bad_weights(weights):
    a = part([0, 1])
    with pytest.raises(ConfigError):
        honmi(a, [a, a], weights)


def test_honmi_rejects_empty_history():
    with pytest.raises(ConfigError):
        honmi(part([0, 1]), [], [])


def test_f1_examples():
    truth = part([0, 0, 1, 1])
    assert f1_score(part([3, 3, 9, 9]), truth) == 1.0
    assert f1_score(part([0, 1, 2, 3]), part([0, 0, 0, 0])) == 0.0
    assert f1_score(part([0, 1, 2]), part([5, 6, 7])) == 1.0


def test_f1_matches_pair_oracle():
    rng = np.random.default_rng(8)
    for _ in range(300):
        n = int(rng.integers(1, 16))
        a, b = rng.integers(0, 4, size=n).tolist(), rng.integers(0, 4, size=n).tolist()
        assert abs(f1_score(part(a), part(b)) - f1_oracle(a, b)) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(label_lists, st.permutations(range(5)))
def test_f1_is_label_permutation_invariant(a, perm):
    b = [perm[x] for x in a]
    truth = part(sorted(a))
    assert f1_score(part(a), truth) == pytest.approx(f1_score(part(b), truth), abs=1e-12)


def test_rank_sum_examples():
    a = [0.91, 0.93, 0.95, 0.97, 0.99, 1.0]
    assert rank_sum_test(a, a)[1] == pytest.approx(1.0, abs=0.05)
    _, p = rank_sum_test(range(1, 31), range(31, 61))
    assert p < 0.001
    assert rank_sum_test([1.0] * 5, [1.0] * 5) == (12.5, 1.0)
    with pytest.raises(InputError):
        rank_sum_test([1, 2, 3, 4], [1, 2, 3, 4, 5])


def test_rank_sum_close_to_exact_enumeration():
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(300):
        pooled = rng.permutation(10).astype(float) + rng.random(10) * 0.1
        a, b = pooled[:5], pooled[5:]
        worst = max(worst, abs(rank_sum_test(a, b)[1] - exact_rank_sum_p(a, b)))
    assert worst <= 0.02
