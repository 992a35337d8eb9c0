"""Borda-count rank aggregation over score records, plus the derived reports:
best-per-cell tables, per-scale PSNR gains, and configuration deltas.

A record set is a flat list of ScoreRecord; evaluation cells are formed by
grouping on any subset of (dataset, scale, metric, recipe, encoder). Within
a cell models get value-ranks V (best = |M|, worst = 1, exact ties share the
average of their positions, which preserves the per-cell rank sum
|M|(|M|+1)/2). Borda sums add V over cells; final ranks are competition
ranks of the Borda sums in descending order.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .metrics import HIGHER_BETTER, LOWER_BETTER, METRICS

GROUP_DIMS = ("dataset", "scale", "metric", "recipe", "encoder")

# polarity for every metric the toolkit can ingest; LPIPS appears in published
# score tables even though computing it is out of scope here, and SR-SIM is
# the spelling those tables use for SRSIM
INGEST_POLARITY = {name: spec.polarity for name, spec in METRICS.items()}
INGEST_POLARITY["LPIPS"] = LOWER_BETTER
INGEST_POLARITY["SR-SIM"] = INGEST_POLARITY["SRSIM"]

SCORE_HEADER = ["model", "encoder", "recipe", "dataset", "scale", "metric", "value"]


@dataclass(frozen=True)
class ScoreRecord:
    model: str
    encoder: str
    recipe: str
    dataset: str
    scale: float
    metric: str
    value: float  # math.inf marks the PSNR identical-pair case

    def key(self) -> tuple:
        return (self.model, self.encoder, self.recipe, self.dataset, self.scale, self.metric)

    def dim(self, name: str):
        return getattr(self, name)


def format_value(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.6f}"


def record_to_row(r: ScoreRecord) -> list[str]:
    return [r.model, r.encoder, r.recipe, r.dataset,
            f"{r.scale:.6f}", r.metric, format_value(r.value)]


def _parse_value(text: str) -> float:
    if text.strip().lower() == "inf":
        return math.inf
    return float(text)


def read_scores(path) -> list[ScoreRecord]:
    """Read score records from CSV (canonical) or a JSON array of objects."""
    path = Path(path)
    records = []
    if path.suffix.lower() == ".json":
        for obj in json.loads(path.read_text()):
            records.append(ScoreRecord(
                model=str(obj["model"]), encoder=str(obj["encoder"]),
                recipe=str(obj["recipe"]), dataset=str(obj["dataset"]),
                scale=float(obj["scale"]), metric=str(obj["metric"]),
                value=_parse_value(str(obj["value"])),
            ))
    else:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            missing = set(SCORE_HEADER) - set(reader.fieldnames or ())
            if missing:
                raise ValueError(f"{path}: score file missing columns {sorted(missing)}")
            for row in reader:
                records.append(ScoreRecord(
                    model=row["model"], encoder=row["encoder"], recipe=row["recipe"],
                    dataset=row["dataset"], scale=float(row["scale"]),
                    metric=row["metric"], value=_parse_value(row["value"]),
                ))
    seen = {}
    for r in records:
        if r.key() in seen:
            raise ValueError(f"duplicate score record for {r.key()}")
        seen[r.key()] = r
    return records


def write_scores(records, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SCORE_HEADER)
        for r in records:
            writer.writerow(record_to_row(r))


def _polarity_of(metric: str, polarity: dict) -> str:
    try:
        return polarity[metric]
    except KeyError:
        raise ValueError(
            f"no polarity known for metric {metric!r}; "
            "pass an override (e.g. --lower-better NAME)"
        ) from None


def _cell_key(record: ScoreRecord, group_dims) -> tuple:
    return tuple(record.dim(d) for d in group_dims)


def value_ranks(records, group_dims=("dataset", "scale", "metric"),
                polarity: dict | None = None):
    """Per-cell value-ranks: best model gets |M|, worst gets 1, ties averaged.

    Every cell must contain exactly one record per model; holes are an error
    (silent imputation would bias the Borda sums).
    """
    polarity = INGEST_POLARITY if polarity is None else polarity
    group_dims = tuple(group_dims)
    for d in group_dims:
        if d not in GROUP_DIMS:
            raise ValueError(f"unknown grouping dimension {d!r}")
    models = sorted({r.model for r in records})
    if not records:
        raise ValueError("empty record set")
    cells: dict[tuple, dict[str, ScoreRecord]] = {}
    for r in records:
        cell = cells.setdefault(_cell_key(r, group_dims), {})
        if r.model in cell:
            raise ValueError(
                f"duplicate record for model {r.model!r} in cell {_cell_key(r, group_dims)}"
            )
        cell[r.model] = r

    holes = [(key, m) for key, cell in sorted(cells.items())
             for m in models if m not in cell]
    if holes:
        listing = "; ".join(f"cell {key}: missing {m}" for key, m in holes[:10])
        more = "" if len(holes) <= 10 else f" (+{len(holes) - 10} more)"
        raise ValueError(f"incomplete design: {listing}{more}")

    table: dict[tuple, dict[str, float]] = {}
    for key, cell in cells.items():
        ranks: dict[str, float] = {}
        # orient values so that larger-is-better for every record in the cell
        oriented = []
        for m in models:
            r = cell[m]
            pol = _polarity_of(r.metric, polarity)
            v = r.value if pol == HIGHER_BETTER else -r.value
            oriented.append((v, m))
        oriented.sort(key=lambda t: t[0])  # worst first: position 1 .. n
        pos = 0
        while pos < len(oriented):
            end = pos
            while end + 1 < len(oriented) and oriented[end + 1][0] == oriented[pos][0]:
                end += 1
            avg = (pos + 1 + end + 1) / 2.0  # positions are 1-based
            for i in range(pos, end + 1):
                ranks[oriented[i][1]] = avg
            pos = end + 1
        table[key] = ranks
    return table


def borda_aggregate(value_rank_table) -> dict[str, float]:
    """B_m: sum of value-ranks over all cells."""
    borda: dict[str, float] = {}
    for ranks in value_rank_table.values():
        for model, v in ranks.items():
            borda[model] = borda.get(model, 0.0) + v
    return borda


def final_rank(borda: dict[str, float]) -> list[tuple[str, float, int, bool]]:
    """Competition ranking of Borda sums, descending; ties share the best rank.

    Returns rows (model, borda, rank, tied) ordered by rank then model name.
    """
    if not borda:
        raise ValueError("empty Borda table")
    items = sorted(borda.items(), key=lambda kv: (-kv[1], kv[0]))
    rows = []
    for model, b in items:
        rank = 1 + sum(1 for other in borda.values() if other > b)
        tied = sum(1 for other in borda.values() if other == b) > 1
        rows.append((model, b, rank, tied))
    return rows


def _numeric_aware(candidate: str):
    try:
        return (0, float(candidate), candidate)
    except ValueError:
        return (1, 0.0, candidate)


def _cells_by(records, by: str, dims):
    """Group to cell -> candidate -> list of values."""
    cells: dict[tuple, dict[str, list[float]]] = {}
    for r in records:
        key = tuple(r.dim(d) for d in dims)
        cells.setdefault(key, {}).setdefault(r.dim(by), []).append(r.value)
    return cells


def best_model_table(records, by: str = "model", dims=("dataset", "scale", "metric"),
                     fix: dict | None = None, polarity: dict | None = None,
                     average_duplicates: bool = True):
    """Per-cell polarity-respecting argmax of ``by`` (model or recipe).

    Values sharing a (cell, candidate) pair — e.g. several recipes of one
    model — are reduced by unweighted mean when average_duplicates is set,
    otherwise they are an error. Ties go to the smallest candidate id
    (numerically when the ids parse as numbers). Returns
    {cell: (candidate, value)} with cells ordered by key.
    """
    polarity = INGEST_POLARITY if polarity is None else polarity
    dims = tuple(dims)
    if "metric" not in dims:
        raise ValueError("best table cells must include the metric dimension")
    fix = fix or {}
    records = [r for r in records if all(r.dim(k) == v for k, v in fix.items())]
    if not records:
        raise ValueError("no records left after applying filters")
    cells = _cells_by(records, by, dims)
    metric_pos = dims.index("metric")
    table = {}
    for key in sorted(cells):
        pol = _polarity_of(key[metric_pos], polarity)
        best = None
        for candidate in sorted(cells[key], key=_numeric_aware):
            values = cells[key][candidate]
            if len(values) > 1 and not average_duplicates:
                raise ValueError(f"cell {key}: {len(values)} records for {candidate!r}")
            value = sum(values) / len(values)
            oriented = value if pol == HIGHER_BETTER else -value
            if best is None or oriented > best[0]:
                best = (oriented, candidate, value)
        table[key] = (best[1], best[2])
    return table


def psnr_gain(records, encoder: str | None = None, dataset: str | None = None):
    """Per-scale (best model, runner-up, PSNR gain in dB).

    Averages a model's PSNR over any remaining dimensions first. Exact ties
    report gain 0 with both names and a tie flag. Returns rows
    (scale, best_model, second_model, gain, tied) sorted by scale.
    """
    pool = [r for r in records if r.metric == "PSNR"]
    if encoder is not None:
        pool = [r for r in pool if r.encoder == encoder]
    if dataset is not None:
        pool = [r for r in pool if r.dataset == dataset]
    by_scale: dict[float, dict[str, list[float]]] = {}
    for r in pool:
        by_scale.setdefault(r.scale, {}).setdefault(r.model, []).append(r.value)
    rows = []
    for scale in sorted(by_scale):
        means = {m: sum(v) / len(v) for m, v in by_scale[scale].items()}
        if len(means) < 2:
            raise ValueError(f"scale {scale:g}: need at least 2 models for a gain")
        ordered = sorted(means.items(), key=lambda kv: (-kv[1], _numeric_aware(kv[0])))
        (best, bv), (second, sv) = ordered[0], ordered[1]
        rows.append((scale, best, second, bv - sv, bv == sv))
    return rows


def delta_analysis(records_a, records_b,
                   join_dims=("model", "encoder", "dataset", "scale", "metric")):
    """Per-key value_b - value_a between two record sets.

    Both sets must cover exactly the same keys on join_dims, and a key must
    be unique within each set. Returns rows (key, value_a, value_b, delta)
    sorted by key.
    """
    join_dims = tuple(join_dims)

    def index(records, label):
        out = {}
        for r in records:
            key = tuple(r.dim(d) for d in join_dims)
            if key in out:
                raise ValueError(f"{label}: join key {key} is not unique; "
                                 "narrow the join dims or pre-aggregate")
            out[key] = r.value
        return out

    a, b = index(records_a, "A"), index(records_b, "B")
    only_a = sorted(set(a) - set(b))
    only_b = sorted(set(b) - set(a))
    if only_a or only_b:
        parts = []
        if only_a:
            parts.append(f"only in A: {only_a[:5]}")
        if only_b:
            parts.append(f"only in B: {only_b[:5]}")
        raise ValueError("join key mismatch — " + "; ".join(parts))
    return [(key, a[key], b[key], b[key] - a[key]) for key in sorted(a)]
