import numpy as np
import pytest

from shrinkcov import DataError
from shrinkcov.genes import GeneTable, REPORT_FIELDS, bw_rank, bw_scores, genes_report, qq_data
from shrinkcov.sampling import draw_noise, replicate_rng


def small_table():
    x = np.array([[1.0, 0.0, 5.0], [3.0, 0.0, 5.0], [5.0, 1.0, 5.0], [7.0, 1.0, 5.0]])
    return GeneTable(x, ["g1", "g2", "g3"], ["A", "A", "B", "B"])


def test_bw_hand_values():
    scores = bw_scores(small_table())
    # g1: between 2*4 + 2*4 = 16, within 4 * 1 = 4
    assert scores[0] == 4.0
    assert np.isinf(scores[1])
    assert scores[2] == 0.0
    rank = bw_rank(small_table())
    assert list(rank.order) == [1, 0, 2]
    assert list(rank.infinite) == [1]


def test_bw_matches_loops(rng):
    x = rng.normal(size=(9, 4))
    labels = list("aaabbbbcc")
    scores = bw_scores(GeneTable(x, None, labels))
    for j in range(4):
        col = x[:, j]
        grand = sum(col) / 9
        between = within = 0.0
        for g in "abc":
            vals = [col[i] for i in range(9) if labels[i] == g]
            m = sum(vals) / len(vals)
            between += len(vals) * (m - grand) ** 2
            within += sum((v - m) ** 2 for v in vals)
        assert scores[j] == pytest.approx(between / within, rel=1e-12)


def test_table_validation():
    with pytest.raises(DataError):
        GeneTable(np.ones((3, 2)), ["a"], ["x", "y", "x"])
    with pytest.raises(DataError):
        GeneTable(np.ones((3, 2)), None, ["x", "y"])
    with pytest.raises(DataError, match="two groups"):
        bw_scores(GeneTable(np.ones((3, 2)), None, ["x"] * 3))
    with pytest.raises(DataError, match="positive"):
        GeneTable(np.zeros((3, 2)), None, ["x", "y", "x"]).log10()


def test_groups_first_appearance():
    t = GeneTable(np.zeros((4, 1)), None, ["t", "n", "t", "n"])
    assert t.groups == ["t", "n"]


def test_genes_report_rows():
    x = np.exp(draw_noise("normal", 30, 60, replicate_rng(8, 0)))
    labels = ["n"] * 12 + ["t"] * 18
    rows, ranking = genes_report(GeneTable(x, None, labels), [5, 20, 60], log10=True)
    assert len(rows) == 2 * 3
    assert [r["group"] for r in rows] == ["n"] * 3 + ["t"] * 3
    for r in rows:
        assert list(r) == list(REPORT_FIELDS)
        for key in ("lambda_spherical", "lambda_diagonal", "lambda_identity"):
            assert 0.0 <= r[key] <= 1.0
        assert r["var_range"] >= 0
    assert len(ranking.order) == 60


def test_genes_report_identity_like_data():
    x = draw_noise("normal", 60, 200, replicate_rng(9, 0))
    rows, _ = genes_report(GeneTable(x, None, ["a"] * 30 + ["b"] * 30), [200], centered=True)
    for r in rows:
        assert r["lambda_spherical"] > 0.9
        assert r["nu_hat"] == pytest.approx(1.0, abs=0.05)


def test_genes_report_errors():
    t = GeneTable(np.random.default_rng(0).normal(size=(7, 5)), None, list("aaaabbb"))
    with pytest.raises(DataError, match="top-6"):
        genes_report(t, [6])
    with pytest.raises(DataError, match="at least 4 observations"):
        genes_report(t, [3])


def test_qq_constant_gene():
    pts = qq_data(small_table(), [2])
    assert len(pts) == 4
    assert {p["sample"] for p in pts} == {5.0}
    a = [p["theoretical"] for p in pts if p["group"] == "A"]
    assert a == pytest.approx([-0.6744897501960817, 0.6744897501960817])


def test_qq_normal_sample_tracks_line():
    x = draw_noise("normal", 1000, 1, replicate_rng(10, 0))
    pts = qq_data(GeneTable(x, None, ["z"] * 1000), [0])
    th = np.array([p["theoretical"] for p in pts])
    sa = np.array([p["sample"] for p in pts])
    inner = np.abs(th) < 2
    assert np.max(np.abs(sa[inner] - th[inner])) < 0.2
    assert [p["rank"] for p in pts] == list(range(1, 1001))


def test_qq_index_out_of_range():
    with pytest.raises(DataError, match="out of range"):
        qq_data(small_table(), [3])
