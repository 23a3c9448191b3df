import numpy as np
import pytest

from cellac.embeddings import l2v_sim, load_embeddings, save_embeddings, train_label_embeddings

from util import make_corpus, make_table


def paired_corpus():
    """Labels alpha/beta always co-occur, gamma/delta always co-occur, never across."""
    tables = []
    for i in range(12):
        tables.append(make_table(f"ab{i}", ["alpha", "beta"],
                                 [[("x", f"E{i}"), "2"]]))
        tables.append(make_table(f"cd{i}", ["gamma", "delta"],
                                 [[("y", f"F{i}"), "4"]]))
    return make_corpus(*tables)


@pytest.fixture(scope="module")
def embeddings():
    return train_label_embeddings(paired_corpus(), dim=16, epochs=10, seed=5)


class TestTraining:
    def test_vector_dimensions(self, embeddings):
        for v in embeddings.vectors.values():
            assert v.shape == (16,)
            assert np.isfinite(v).all()

    def test_cooccurring_labels_closer(self, embeddings):
        assert l2v_sim("alpha", "beta", embeddings) > l2v_sim("alpha", "gamma", embeddings)
        assert l2v_sim("gamma", "delta", embeddings) > l2v_sim("gamma", "beta", embeddings)

    def test_oov_similarity_zero(self, embeddings):
        assert l2v_sim("alpha", "nonexistent", embeddings) == 0.0
        assert l2v_sim("nonexistent", "alpha", embeddings) == 0.0

    def test_min_frequency_cutoff(self):
        tables = [make_table("t0", ["name", "rare"], [[("x", "E0"), "1"]]),
                  make_table("t1", ["name", "common"], [[("x", "E0"), "1"]]),
                  make_table("t2", ["name", "common"], [[("x", "E0"), "1"]])]
        emb = train_label_embeddings(make_corpus(*tables), dim=8, epochs=2, seed=0)
        assert "rare" not in emb
        assert "common" in emb and "name" in emb

    def test_identical_label_similarity_one(self, embeddings):
        assert l2v_sim("alpha", "alpha", embeddings) == pytest.approx(1.0)

    def test_deterministic_given_seed(self):
        e1 = train_label_embeddings(paired_corpus(), dim=8, epochs=3, seed=9)
        e2 = train_label_embeddings(paired_corpus(), dim=8, epochs=3, seed=9)
        for label in e1.vectors:
            assert np.array_equal(e1.vectors[label], e2.vectors[label])

    def test_too_few_labels_errors(self):
        single = make_corpus(make_table("t", ["name"], [[("x", "E0")]]),
                             make_table("u", ["name"], [[("x", "E0")]]))
        with pytest.raises(ValueError):
            train_label_embeddings(single, dim=8, epochs=1, seed=0)

    def test_clamped_range(self, embeddings):
        for a in ("alpha", "beta", "gamma", "delta"):
            for b in ("alpha", "beta", "gamma", "delta"):
                assert 0.0 <= l2v_sim(a, b, embeddings) <= 1.0


class TestPersistence:
    def test_round_trip_exact(self, embeddings, tmp_path):
        path = tmp_path / "vectors.txt"
        save_embeddings(embeddings, path)
        loaded = load_embeddings(path)
        assert loaded.dim == embeddings.dim
        assert set(loaded.vectors) == set(embeddings.vectors)
        for label, vec in embeddings.vectors.items():
            assert np.array_equal(loaded.vectors[label], vec)

    def test_labels_with_spaces(self, tmp_path):
        tables = [make_table(f"t{i}", ["name", "home town", "birth date"],
                             [[("x", f"E{i}"), "a", "b"]]) for i in range(3)]
        emb = train_label_embeddings(make_corpus(*tables), dim=4, epochs=2, seed=1)
        save_embeddings(emb, tmp_path / "v.txt")
        loaded = load_embeddings(tmp_path / "v.txt")
        assert "home town" in loaded.vectors and "birth date" in loaded.vectors
