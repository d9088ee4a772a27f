"""PPMI vectors, cosine, and top-k neighbor queries vs brute force."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from topicdraw import ThresholdTable, UnknownWordError, build_counts, cosine, pmi, pmi_vector, top_k_similar
from topicdraw.corpus import Vocabulary
from topicdraw.errors import ConfigError
from topicdraw.similarity import PmiVector, dim_of
from topicdraw.window_stats import LEFT, RIGHT, CountStore

from conftest import make_handle, random_tagged_lines
from oracles import oracle_cosine, oracle_ppmi_vectors, store_pairs_as_surfaces


def make_store(words: list[str], pairs: dict[tuple[str, str, int], int]) -> CountStore:
    """Hand-built store: pairs keyed by (target, context, side) surfaces."""
    unigram = {w: 1 for w in words}
    for (y, _, _), c in pairs.items():
        unigram[y] += c
    vocab = Vocabulary([(w, unigram[w], "n") for w in words])
    V = len(words)
    packed = {
        (vocab.id_of(y) * V + vocab.id_of(x)) * 2 + side: c
        for (y, x, side), c in pairs.items()
    }
    return CountStore(
        vocab,
        np.array([unigram[w] for w in words], dtype=np.int64),
        packed,
        (2000,),
        "hand-built",
        1,
        None,
    )


class TestPmi:
    def test_hand_arithmetic(self):
        # N_right = 10, c(b<-a) = 4, target marginal 5, context marginal 4.
        store = make_store(
            ["a", "b", "c", "d"],
            {
                ("b", "a", RIGHT): 4,
                ("b", "c", RIGHT): 1,
                ("c", "d", RIGHT): 2,
                ("d", "d", RIGHT): 3,
            },
        )
        b = store.vocab.id_of("b")
        a = store.vocab.id_of("a")
        assert store.total_pairs[RIGHT] == 10
        got = pmi(b, dim_of(a, RIGHT), store)
        assert got == pytest.approx(math.log(2), abs=1e-12)

    def test_independence_is_zero(self):
        # N*c == c_t*c_c exactly for every pair in this 2x2 layout.
        store = make_store(
            ["y1", "y2", "x1", "x2"],
            {
                ("y1", "x1", RIGHT): 1,
                ("y1", "x2", RIGHT): 1,
                ("y2", "x1", RIGHT): 1,
                ("y2", "x2", RIGHT): 1,
            },
        )
        y1 = store.vocab.id_of("y1")
        x1 = store.vocab.id_of("x1")
        assert pmi(y1, dim_of(x1, RIGHT), store) == pytest.approx(0.0, abs=1e-12)

    def test_unseen_pair_is_minus_inf_and_absent(self):
        store = make_store(["a", "b"], {("a", "b", RIGHT): 2})
        a, b = store.vocab.id_of("a"), store.vocab.id_of("b")
        assert pmi(a, dim_of(b, LEFT), store) == -math.inf
        vec = pmi_vector(a, store)
        assert dim_of(b, LEFT) not in vec.dims

    def test_unknown_word_raises(self):
        store = make_store(["a", "b"], {("a", "b", RIGHT): 2})
        with pytest.raises(UnknownWordError):
            pmi(99, 0, store)

    def test_vector_dims_sorted_positive_norm_consistent(self, tmp_path):
        from topicdraw import ThresholdTable, build_counts

        rng = np.random.default_rng(12)
        from conftest import make_handle, random_tagged_lines

        handle = make_handle(tmp_path, {2000: random_tagged_lines(rng, 60, 20)})
        store = build_counts(handle, ThresholdTable.default())
        for wid in range(len(store.vocab)):
            vec = pmi_vector(wid, store)
            assert np.all(np.diff(vec.dims) > 0)  # unique, ascending
            assert np.all(vec.values > 0)         # PPMI truncation
            assert vec.norm == pytest.approx(
                math.sqrt(float(np.sum(vec.values**2))), abs=1e-9
            )


class TestCosine:
    def test_self_similarity_is_one(self):
        v = PmiVector(0, np.array([2, 5, 9]), np.array([0.5, 1.25, 3.0]))
        assert cosine(v, v) == pytest.approx(1.0, abs=1e-12)

    def test_disjoint_supports_are_orthogonal(self):
        u = PmiVector(0, np.array([0, 2]), np.array([1.0, 1.0]))
        v = PmiVector(1, np.array([1, 3]), np.array([1.0, 1.0]))
        assert cosine(u, v) == 0.0

    def test_hand_value(self):
        u = PmiVector(0, np.array([1, 2]), np.array([1.0, 1.0]))
        v = PmiVector(1, np.array([1]), np.array([1.0]))
        assert cosine(u, v) == pytest.approx(1 / math.sqrt(2), abs=1e-12)

    def test_zero_vector_scores_zero(self):
        z = PmiVector(0, np.empty(0, np.int64), np.empty(0, np.float64))
        v = PmiVector(1, np.array([1]), np.array([1.0]))
        assert cosine(z, v) == 0.0
        assert cosine(z, z) == 0.0

    @given(
        st.lists(
            st.tuples(st.integers(0, 30), st.floats(0.01, 10.0)),
            min_size=0,
            max_size=10,
            unique_by=lambda t: t[0],
        ),
        st.lists(
            st.tuples(st.integers(0, 30), st.floats(0.01, 10.0)),
            min_size=0,
            max_size=10,
            unique_by=lambda t: t[0],
        ),
    )
    @settings(max_examples=200)
    def test_symmetry_and_bounds(self, left, right):
        def vec(entries):
            entries = sorted(entries)
            dims = np.array([d for d, _ in entries], dtype=np.int64)
            vals = np.array([v for _, v in entries], dtype=np.float64)
            return PmiVector(0, dims, vals)

        u, v = vec(left), vec(right)
        assert cosine(u, v) == pytest.approx(cosine(v, u), abs=1e-12)
        assert -1e-12 <= cosine(u, v) <= 1 + 1e-12  # PPMI vectors: nonnegative


def two_cluster_corpus(rng: np.random.Generator, n_lines: int = 120) -> list[str]:
    """Two planted clusters with disjoint context vocabularies."""
    lines = []
    for cluster in ("a", "b"):
        members = [f"{cluster}m{i}" for i in range(6)]
        contexts = [f"{cluster}c{i}" for i in range(5)]
        for _ in range(n_lines // 2):
            m = members[int(rng.integers(len(members)))]
            c1 = contexts[int(rng.integers(len(contexts)))]
            c2 = contexts[int(rng.integers(len(contexts)))]
            lines.append(f"{c1}/n {m}/n {c2}/n")
    rng.shuffle(lines)
    return lines


class TestTopK:
    def test_identical_profiles_are_mutual_top_neighbors(self, tmp_path):
        lines = ["a/n p/n b/n"] * 3 + ["a/n q/n b/n"] * 3
        handle = make_handle(tmp_path, {2000: lines})
        store = build_counts(handle, ThresholdTable.default())
        for central, expected in (("p", "q"), ("q", "p")):
            result = top_k_similar(central, 3, store, min_frequency=1)
            assert result.neighbors[0].surface == expected
            assert result.neighbors[0].score == pytest.approx(1.0, abs=1e-12)

    def test_planted_clusters_rank_own_members_first(self, tmp_path):
        rng = np.random.default_rng(42)
        handle = make_handle(tmp_path, {2000: two_cluster_corpus(rng)})
        store = build_counts(handle, ThresholdTable.default())
        # Independent check: brute-force all-pairs cosine on the store.
        vectors = oracle_ppmi_vectors(store_pairs_as_surfaces(store))
        for cluster in ("a", "b"):
            for i in range(6):
                member = f"{cluster}m{i}"
                result = top_k_similar(member, 3, store, min_frequency=1)
                top = [n.surface for n in result.neighbors if n.score > 0]
                assert top, f"no scored neighbors for {member}"
                for neighbor in top:
                    assert neighbor.startswith(cluster)
                oracle_best = max(
                    (
                        (oracle_cosine(vectors.get(member, {}), vectors.get(w, {})), w)
                        for w in vectors
                        if w != member
                    ),
                )
                assert result.neighbors[0].score == pytest.approx(oracle_best[0], abs=1e-9)

    def test_matches_bruteforce_scores_and_order(self, tmp_path):
        rng = np.random.default_rng(17)
        for trial in range(3):
            lines = random_tagged_lines(rng, 40, 18)
            handle = make_handle(tmp_path / f"t{trial}", {2000: lines})
            store = build_counts(handle, ThresholdTable.default())
            vectors = oracle_ppmi_vectors(store_pairs_as_surfaces(store))
            vocab = store.vocab
            central = vocab.surface_of(0)
            result = top_k_similar(central, 10, store, min_frequency=1)
            ranked = sorted(
                (
                    (-oracle_cosine(vectors.get(central, {}), vectors.get(vocab.surface_of(w), {})), w)
                    for w in range(len(vocab))
                    if w != 0
                ),
            )[:10]
            for neighbor, (neg_score, wid) in zip(result.neighbors, ranked):
                assert neighbor.word_id == wid
                assert neighbor.score == pytest.approx(-neg_score, abs=1e-9)

    def test_min_frequency_filter(self, tmp_path):
        lines = ["rare/n common/n"] + ["common/n filler/n"] * 9
        handle = make_handle(tmp_path, {2000: lines})
        store = build_counts(handle, ThresholdTable.default())
        result = top_k_similar("common", 10, store, min_frequency=5)
        assert all(n.surface != "rare" for n in result.neighbors)

    def test_pos_class_filter(self, tmp_path):
        lines = ["x/n go/v big/a y/n"] * 6
        handle = make_handle(tmp_path, {2000: lines})
        store = build_counts(handle, ThresholdTable.default())
        result = top_k_similar("x", 10, store, min_frequency=1, pos_class="verb")
        assert [n.surface for n in result.neighbors] == ["go"]

    def test_central_excluded_and_sorted(self, tmp_path):
        rng = np.random.default_rng(3)
        handle = make_handle(tmp_path, {2000: random_tagged_lines(rng, 50, 15)})
        store = build_counts(handle, ThresholdTable.default())
        central = store.vocab.surface_of(0)
        result = top_k_similar(central, 8, store, min_frequency=1)
        assert len(result.neighbors) <= 8
        assert all(n.surface != central for n in result.neighbors)
        scores = [(-n.score, n.word_id) for n in result.neighbors]
        assert scores == sorted(scores)

    def test_scale_invariance_of_ranking(self, tmp_path):
        rng = np.random.default_rng(23)
        handle = make_handle(tmp_path, {2000: random_tagged_lines(rng, 50, 15)})
        store = build_counts(handle, ThresholdTable.default())
        central_id = 0
        result = top_k_similar(store.vocab.surface_of(central_id), 10, store, min_frequency=1)
        central_vec = pmi_vector(central_id, store)
        scale = 7.3
        rescored = []
        for wid in range(len(store.vocab)):
            if wid == central_id:
                continue
            v = pmi_vector(wid, store)
            scaled_u = PmiVector(central_id, central_vec.dims, central_vec.values * scale)
            scaled_v = PmiVector(wid, v.dims, v.values * scale)
            rescored.append((-cosine(scaled_u, scaled_v), wid))
        rescored.sort()
        assert [n.word_id for n in result.neighbors] == [w for _, w in rescored[:10]]

    def test_unknown_central_names_word(self, tmp_path):
        handle = make_handle(tmp_path, {2000: ["a/n b/n"]})
        store = build_counts(handle, ThresholdTable.default())
        with pytest.raises(UnknownWordError, match="missing"):
            top_k_similar("missing", 5, store)

    def test_k_below_one_rejected(self, tmp_path):
        handle = make_handle(tmp_path, {2000: ["a/n b/n"]})
        store = build_counts(handle, ThresholdTable.default())
        with pytest.raises(ConfigError):
            top_k_similar("a", 0, store)

    def test_include_flag_toggling(self, tmp_path):
        lines = ["a/n p/n b/n"] * 3 + ["a/n q/n b/n"] * 3
        handle = make_handle(tmp_path, {2000: lines})
        store = build_counts(handle, ThresholdTable.default())
        result = top_k_similar("p", 4, store, min_frequency=1)
        assert all(n.included for n in result.neighbors)
        result.set_included("q", False)
        assert "q" not in result.match_surfaces()
        assert "p" in result.match_surfaces()
        with pytest.raises(UnknownWordError):
            result.set_included("nope", False)
