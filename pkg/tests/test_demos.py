import pytest

from symtens.demos import available, run_demo


def test_registry_lists_every_demo():
    assert available() == ["border-rank", "improvement", "nonuniqueness"]


def test_unknown_demo(cfg):
    with pytest.raises(ValueError, match="Unknown demo"):
        run_demo("nope", {}, cfg)


def test_nonuniqueness_keeps_the_value_at_the_point(cfg):
    result = run_demo("nonuniqueness", {"samples": "500", "a": "-1,0,1"}, cfg)
    assert [row[0] for row in result.rows] == [-1.0, 0.0, 1.0]
    assert result.summary["value_spread"] <= 1e-12
    assert all(row[1] == pytest.approx(1.0) for row in result.rows)
    assert result.summary["max_diagonal"] <= 1 + 1e-9
    assert result.warnings == []


def test_nonuniqueness_needs_three_dimensions(cfg):
    with pytest.raises(ValueError):
        run_demo("nonuniqueness", {"n": "2"}, cfg)


def test_hs_improvement_is_strict_off_the_symmetric_subspace(cfg):
    result = run_demo("improvement", {"pairs": "20"}, cfg)
    assert len(result.rows) == 20
    assert result.summary["min_improvement"] >= -1e-12
    assert result.summary["strict"] == result.summary["asymmetric"] == 20


def test_border_rank_series(cfg):
    result = run_demo("border-rank", {"n_max": "5"}, cfg)
    assert [row[0] for row in result.rows] == [1, 2, 3, 4, 5]
    assert result.summary["max_abs_error"] <= 1e-12
    assert result.summary["image_rank_exact"] == 6
    assert "ratio_10_20" not in result.summary
