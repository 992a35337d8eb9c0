import json
import math

import numpy as np
import pytest

from sreval.ranking import (
    ScoreRecord,
    best_model_table,
    borda_aggregate,
    delta_analysis,
    final_rank,
    format_value,
    psnr_gain,
    read_scores,
    value_ranks,
    write_scores,
)

import oracles


def rec(model, metric, value, dataset="d", scale=2.0, recipe="t", encoder="e"):
    return ScoreRecord(model=model, encoder=encoder, recipe=recipe,
                       dataset=dataset, scale=scale, metric=metric, value=value)


def one_cell(metric, values):
    return [rec(m, metric, v) for m, v in values.items()]


def only_cell(table):
    (cell,) = table
    return table[cell]


# --- value ranks -------------------------------------------------------------


def test_two_model_psnr_cell():
    v = only_cell(value_ranks(one_cell("PSNR", {"A": 30.0, "B": 29.0})))
    assert v == {"A": 2.0, "B": 1.0}


def test_lower_better_reversal():
    v = only_cell(value_ranks(one_cell("GMSD", {"A": 0.02, "B": 0.05})))
    assert v == {"A": 2.0, "B": 1.0}


def test_three_model_tie_averages_positions():
    v = only_cell(value_ranks(one_cell("PSNR", {"A": 1.0, "B": 1.0, "C": 0.0})))
    assert v == {"A": 2.5, "B": 2.5, "C": 1.0}


def test_inf_ranks_best():
    v = only_cell(value_ranks(one_cell("PSNR", {"A": math.inf, "B": 99.0})))
    assert v["A"] == 2.0


def test_incomplete_cell_is_an_error():
    records = one_cell("PSNR", {"A": 30.0, "B": 29.0})
    records += [rec("A", "SSIM", 0.9)]  # B missing from the SSIM cell
    with pytest.raises(ValueError, match="B"):
        value_ranks(records)


def test_rank_sum_conservation_randomized():
    rng = np.random.default_rng(17)
    for _ in range(200):
        n = int(rng.integers(2, 7))
        models = [f"m{i}" for i in range(n)]
        # integer draws force frequent ties
        values = {m: float(rng.integers(0, 4)) for m in models}
        v = only_cell(value_ranks(one_cell("PSNR", values)))
        assert sum(v.values()) == pytest.approx(n * (n + 1) / 2)
        want = oracles.value_ranks_cell_oracle(values, higher_better=True)
        assert v == want


def test_polarity_invariance():
    rng = np.random.default_rng(3)
    values = {f"m{i}": float(rng.uniform(0, 1)) for i in range(5)}
    low = only_cell(value_ranks(one_cell("GMSD", values)))
    negated = {m: -v for m, v in values.items()}
    high = only_cell(value_ranks(one_cell("PSNR", negated)))
    assert low == high


def test_positive_scaling_invariance():
    rng = np.random.default_rng(4)
    values = {f"m{i}": float(rng.uniform(10, 40)) for i in range(6)}
    base = only_cell(value_ranks(one_cell("PSNR", values)))
    scaled = only_cell(value_ranks(
        one_cell("PSNR", {m: 7.5 * v for m, v in values.items()})))
    assert base == scaled


def test_unknown_metric_needs_explicit_polarity():
    records = one_cell("NIQE-ish", {"A": 3.0, "B": 5.0})
    with pytest.raises(ValueError):
        value_ranks(records)
    v = only_cell(value_ranks(records, polarity={"NIQE-ish": "lower_better"}))
    assert v == {"A": 2.0, "B": 1.0}


# --- borda and final rank ----------------------------------------------------


def _three_cell_fixture():
    records = []
    for metric, a_best in (("PSNR", True), ("SSIM", True), ("VIF", False)):
        records.append(rec("A", metric, 2.0 if a_best else 1.0))
        records.append(rec("B", metric, 1.0 if a_best else 2.0))
    return records


def test_borda_hand_example():
    b = borda_aggregate(value_ranks(_three_cell_fixture()))
    assert b == {"A": 5.0, "B": 4.0}
    assert sum(b.values()) == 9.0  # 3 cells x 3


def test_final_rank_hand_examples():
    assert final_rank({"A": 5.0, "B": 4.0}) == [("A", 5.0, 1, False), ("B", 4.0, 2, False)]
    allsame = final_rank({"A": 2.0, "B": 2.0, "C": 2.0})
    assert [(m, r, t) for m, _, r, t in allsame] == [
        ("A", 1, True), ("B", 1, True), ("C", 1, True)]
    skip = final_rank({"A": 7.0, "B": 7.0, "C": 2.0})
    assert [(m, r, t) for m, _, r, t in skip] == [
        ("A", 1, True), ("B", 1, True), ("C", 3, False)]


def test_final_rank_matches_oracle_randomized():
    rng = np.random.default_rng(8)
    for _ in range(300):
        n = int(rng.integers(1, 6))
        borda = {f"m{i}": float(rng.integers(0, 10)) for i in range(n)}
        got = {m: (r, t) for m, _, r, t in final_rank(borda)}
        assert got == oracles.final_rank_oracle(borda)


def test_borda_monotone_in_single_value():
    records = _three_cell_fixture()
    base = borda_aggregate(value_ranks(records))
    # push B's PSNR above A's
    bumped = [r if not (r.model == "B" and r.metric == "PSNR")
              else rec("B", "PSNR", 3.0) for r in records]
    after = borda_aggregate(value_ranks(bumped))
    assert after["B"] >= base["B"]


# --- best table / gain / delta -----------------------------------------------


def test_best_table_polarity():
    records = (one_cell("PSNR", {"A": 30.0, "B": 31.0})
               + one_cell("GMSD", {"A": 0.02, "B": 0.05}))
    table = best_model_table(records, dims=("dataset", "scale", "metric"))
    got = {cell[2]: name for cell, (name, _value) in table.items()}
    assert got == {"PSNR": "B", "GMSD": "A"}


def test_best_table_averages_recipes():
    records = [rec("A", "PSNR", 30.0, recipe="t1"), rec("A", "PSNR", 32.0, recipe="t2"),
               rec("B", "PSNR", 30.9, recipe="t1"), rec("B", "PSNR", 30.9, recipe="t2")]
    table = best_model_table(records, dims=("dataset", "scale", "metric"))
    (name, value) = only_cell(table)
    assert name == "A" and value == pytest.approx(31.0)


def test_best_table_tie_prefers_smallest_id():
    # Numeric ids compare as numbers ("2" before "10"), everything else as text.
    records = one_cell("PSNR", {"10": 30.0, "2": 30.0})
    (name, _) = only_cell(best_model_table(records, dims=("dataset", "scale", "metric")))
    assert name == "2"
    records = one_cell("PSNR", {"beta": 30.0, "alpha": 30.0})
    (name, _) = only_cell(best_model_table(records, dims=("dataset", "scale", "metric")))
    assert name == "alpha"


def test_psnr_gain_fixture():
    records = [rec("A", "PSNR", 28.865, scale=4.0), rec("B", "PSNR", 28.830, scale=4.0)]
    rows = psnr_gain(records, encoder="e", dataset="d")
    assert rows == [(4.0, "A", "B", pytest.approx(0.035), False)]


def test_psnr_gain_tie_flagged():
    records = [rec("A", "PSNR", 30.0, scale=2.0), rec("B", "PSNR", 30.0, scale=2.0)]
    (row,) = psnr_gain(records, encoder="e", dataset="d")
    assert row[3] == 0.0 and row[4] is True


def test_psnr_gain_needs_two_models():
    with pytest.raises(ValueError):
        psnr_gain([rec("A", "PSNR", 30.0)], encoder="e", dataset="d")


def test_delta_analysis_basic():
    a = [rec("A", "PSNR", 34.3357, recipe="l0.05")]
    b = [rec("A", "PSNR", 34.4314, recipe="l0.075")]
    rows = delta_analysis(a, b)
    assert len(rows) == 1
    _key, va, vb, d = rows[0]
    assert d == pytest.approx(0.0957, abs=1e-12)
    assert va == 34.3357 and vb == 34.4314


def test_delta_identity_is_zero():
    a = [rec("A", "PSNR", 30.0), rec("A", "SSIM", 0.9)]
    rows = delta_analysis(a, list(a))
    assert all(d == 0.0 for *_x, d in rows)


def test_delta_key_mismatch_lists_offenders():
    a = [rec("A", "PSNR", 30.0)]
    b = [rec("B", "PSNR", 30.0)]
    with pytest.raises(ValueError, match="B"):
        delta_analysis(a, b)


# --- serialization -----------------------------------------------------------


def test_format_value_specials():
    assert format_value(math.inf) == "inf"
    assert format_value(-math.inf) == "-inf"
    assert format_value(1.23456789) == "1.234568"


def test_csv_round_trip(tmp_path):
    records = [rec("A", "PSNR", math.inf), rec("A", "GMSD", 0.0123456)]
    path = tmp_path / "scores.csv"
    write_scores(records, path)
    back = read_scores(path)
    assert back[0].value == math.inf
    assert back[1].value == pytest.approx(0.012346, abs=1e-9)
    assert {r.metric for r in back} == {"PSNR", "GMSD"}


def test_json_scores_are_accepted(tmp_path):
    # JSON ingestion mirrors the CSV schema: an array of objects, same keys.
    r = rec("A", "PSNR", 31.5)
    path = tmp_path / "scores.json"
    path.write_text(json.dumps([{
        "model": r.model, "encoder": r.encoder, "recipe": r.recipe,
        "dataset": r.dataset, "scale": r.scale, "metric": r.metric,
        "value": r.value,
    }]))
    back = read_scores(path)
    assert back == [r]
    path.write_text(json.dumps([{"model": "A", "encoder": "e", "recipe": "b",
                                 "dataset": "d", "scale": 2.0, "metric": "PSNR",
                                 "value": "inf"}]))
    assert read_scores(path)[0].value == math.inf


def test_duplicate_keys_rejected(tmp_path):
    records = [rec("A", "PSNR", 30.0), rec("A", "PSNR", 31.0)]
    path = tmp_path / "dup.csv"
    write_scores(records, path)
    with pytest.raises(ValueError):
        read_scores(path)


def test_read_scores_rejects_wrong_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("model,value\nA,1.0\n")
    with pytest.raises(ValueError):
        read_scores(path)
