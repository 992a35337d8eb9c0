"""Command-line harness: degrade, evaluate, rank, and the report subcommands.

CSV is the canonical output format (floats with 6 decimals, the literal
``inf`` for the PSNR identical-pair marker); JSON mirrors every field.
Evaluation gathers worker results by input order and sorts before emission,
so output bytes are independent of the worker count. Exit codes: 0 clean,
1 when any per-pair error rows were produced, 2 for usage/validation errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import lossmeter, plots, texture
from .imagecore import extract_luma, load_image
from .metrics import METRIC_ORDER, RGB_CAPABLE, canonical_metric, evaluate_pair
from .ranking import (INGEST_POLARITY, HIGHER_BETTER, LOWER_BETTER, ScoreRecord,
                      best_model_table, borda_aggregate, delta_analysis,
                      final_rank, format_value, psnr_gain, read_scores,
                      record_to_row, value_ranks, SCORE_HEADER)
from .resample import PatchSpec, ScaleSampler, degrade_corpus

PAIR_MANIFEST_HEADER = ["ref", "dist", "model", "dataset", "scale", "recipe", "encoder"]
IMAGE_SUFFIXES = {".png", ".ppm", ".pgm"}


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return format_value(v)
    return str(v)


def _emit(header: list[str], rows: list[list], fmt: str, out: str | None) -> None:
    cells = [[_fmt(v) for v in row] for row in rows]
    if fmt == "json":
        text = json.dumps([dict(zip(header, row)) for row in cells], indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(cells)
        text = buf.getvalue()
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _scale_fmt(v) -> str:
    return f"{float(v):.6f}"


# ---------------------------------------------------------------------------
# pair discovery / manifest handling


def _list_images(directory: Path) -> dict[str, Path]:
    return {p.stem: p for p in sorted(directory.iterdir())
            if p.suffix.lower() in IMAGE_SUFFIXES}


def _pairs_from_args(args) -> tuple[list[dict], list[tuple[str, str, str]]]:
    """Build pair rows (dicts keyed like PAIR_MANIFEST_HEADER) plus error rows."""
    errors = []
    if args.manifest:
        rows = []
        seen = set()
        with open(args.manifest, newline="") as fh:
            reader = csv.DictReader(fh)
            missing = set(PAIR_MANIFEST_HEADER) - set(reader.fieldnames or ())
            if missing:
                raise ValueError(f"{args.manifest}: manifest missing columns {sorted(missing)}")
            for row in reader:
                key = tuple(row[c] for c in PAIR_MANIFEST_HEADER)
                if key in seen:
                    raise ValueError(f"{args.manifest}: duplicate manifest row {key}")
                seen.add(key)
                rows.append({c: row[c] for c in PAIR_MANIFEST_HEADER})
        for row in rows:
            for col in ("ref", "dist"):
                if not Path(row[col]).is_file():
                    errors.append((row["ref"], row["dist"], f"missing file: {row[col]}"))
        bad = {(e[0], e[1]) for e in errors}
        rows = [r for r in rows if (r["ref"], r["dist"]) not in bad]
        return rows, errors
    if not (args.ref_dir and args.dist_dir):
        raise ValueError("need either --manifest or both --ref-dir and --dist-dir")
    refs = _list_images(Path(args.ref_dir))
    dists = _list_images(Path(args.dist_dir))
    rows = []
    for stem in sorted(set(refs) | set(dists)):
        if stem not in dists:
            errors.append((str(refs[stem]), "", "no distorted image with this stem"))
        elif stem not in refs:
            errors.append(("", str(dists[stem]), "no reference image with this stem"))
        else:
            rows.append({
                "ref": str(refs[stem]), "dist": str(dists[stem]),
                "model": args.model, "dataset": args.dataset,
                "scale": _scale_fmt(args.scale), "recipe": args.recipe,
                "encoder": args.encoder,
            })
    return rows, errors


def _evaluate_rows(rows, metrics, domain, border, workers):
    """Run evaluate_pair over pair rows; returns (records, errors)."""

    def work(row):
        try:
            ref = load_image(row["ref"])
            dist = load_image(row["dist"])
            results = evaluate_pair(ref, dist, metrics, domain=domain, border=border)
        except Exception as exc:
            return None, (row["ref"], row["dist"], str(exc))
        records = [ScoreRecord(
            model=row["model"], encoder=row["encoder"], recipe=row["recipe"],
            dataset=row["dataset"], scale=float(row["scale"]),
            metric=res.metric, value=res.value,
        ) for res in results]
        return records, None

    if workers <= 1:
        outcomes = [work(r) for r in rows]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(work, rows))
    records, errors = [], []
    for recs, err in outcomes:
        if err:
            errors.append(err)
        else:
            records.extend(recs)
    return records, errors


def _sort_records(records):
    records.sort(key=lambda r: (r.model, r.dataset, r.scale, r.metric,
                                r.recipe, r.encoder))
    return records


def _aggregate_records(records):
    """Unweighted mean per full key, preserving first-seen order within groups."""
    groups: dict[tuple, list[float]] = {}
    for r in records:
        groups.setdefault(r.key(), []).append(r.value)
    out = []
    for key, values in groups.items():
        model, encoder, recipe, dataset, scale, metric = key
        out.append(ScoreRecord(model=model, encoder=encoder, recipe=recipe,
                               dataset=dataset, scale=scale, metric=metric,
                               value=sum(values) / len(values)))
    return out


def _write_errors(errors, out: str | None) -> None:
    if not errors:
        return
    errors = sorted(errors)
    if out:
        path = Path(out).with_suffix(Path(out).suffix + ".errors.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["ref", "dist", "error"])
            writer.writerows(errors)
        print(f"{len(errors)} error row(s) -> {path}", file=sys.stderr)
    else:
        for ref, dist, msg in errors:
            print(f"error: {ref} vs {dist}: {msg}", file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommands


def cmd_degrade(args) -> int:
    spec = PatchSpec(patch_size=args.patch_size, repetitions=args.repetitions)
    sampler = ScaleSampler(lo=args.scale_lo, hi=args.scale_hi, seed=args.seed)
    rows, errors = degrade_corpus(args.hr_dir, spec, sampler, args.out_dir,
                                  workers=args.workers)
    print(f"{Path(args.out_dir) / 'manifest.csv'}: {len(rows)} rows")
    for source, msg in errors:
        print(f"error: {source}: {msg}", file=sys.stderr)
    return 1 if errors else 0


def _metric_list(text: str) -> list[str]:
    return [canonical_metric(m) for m in text.split(",") if m.strip()]


def cmd_evaluate(args) -> int:
    metrics = _metric_list(args.metrics)
    rows, errors = _pairs_from_args(args)
    records, eval_errors = _evaluate_rows(rows, metrics, args.domain,
                                          args.border, args.workers)
    errors.extend(eval_errors)
    if args.aggregate == "mean":
        records = _aggregate_records(records)
    _sort_records(records)
    _emit(SCORE_HEADER, [record_to_row(r) for r in records], args.format, args.out)
    _write_errors(errors, args.out)
    return 1 if errors else 0


def _polarity_from_args(args) -> dict:
    polarity = dict(INGEST_POLARITY)
    for name in args.lower_better or ():
        polarity[name] = LOWER_BETTER
    for name in args.higher_better or ():
        polarity[name] = HIGHER_BETTER
    return polarity


def _load_score_files(paths) -> list:
    records = []
    for path in paths:
        records.extend(read_scores(path))
    seen = set()
    for r in records:
        if r.key() in seen:
            raise ValueError(f"duplicate record across score files: {r.key()}")
        seen.add(r.key())
    return records


def cmd_rank(args) -> int:
    records = _load_score_files(args.scores)
    group_dims = tuple(d.strip() for d in args.group_dims.split(",") if d.strip())
    table = value_ranks(records, group_dims, polarity=_polarity_from_args(args))
    rows = final_rank(borda_aggregate(table))
    out_rows = [[model, f"{b:.6f}", rank, tied] for model, b, rank, tied in rows]
    _emit(["model", "borda", "rank", "tied"], out_rows, args.format, args.out)
    if args.plot:
        plots.plot_rank(rows, args.plot)
    return 0


def cmd_best_table(args) -> int:
    records = _load_score_files(args.scores)
    dims = tuple(d.strip() for d in args.dims.split(",") if d.strip())
    fix = {}
    for dim in ("encoder", "dataset", "model", "recipe"):
        value = getattr(args, dim)
        if value is not None:
            fix[dim] = value
    table = best_model_table(records, by=args.by, dims=dims, fix=fix,
                             polarity=_polarity_from_args(args),
                             average_duplicates=not args.no_average)
    header = list(dims) + [args.by, "value"]
    rows = []
    for key, (candidate, value) in table.items():
        cells = [_scale_fmt(k) if d == "scale" else str(k) for d, k in zip(dims, key)]
        rows.append(cells + [candidate, format_value(value)])
    _emit(header, rows, args.format, args.out)
    if args.plot:
        plots.plot_best_table(header, rows, args.plot)
    return 0


def cmd_gain(args) -> int:
    records = _load_score_files(args.scores)
    rows = psnr_gain(records, encoder=args.encoder, dataset=args.dataset)
    out_rows = [[_scale_fmt(scale), best, second, f"{gain:.6f}", tied]
                for scale, best, second, gain, tied in rows]
    _emit(["scale", "best_model", "second_model", "gain", "tied"],
          out_rows, args.format, args.out)
    if args.plot:
        plots.plot_gain(rows, args.plot)
    return 0


def cmd_delta(args) -> int:
    records_a = _load_score_files([args.a])
    records_b = _load_score_files([args.b])
    join = tuple(d.strip() for d in args.join.split(",") if d.strip())
    rows = delta_analysis(records_a, records_b, join_dims=join)
    header = list(join) + ["value_a", "value_b", "delta_b_minus_a"]
    out_rows = []
    for key, va, vb, dv in rows:
        cells = [_scale_fmt(k) if d == "scale" else str(k) for d, k in zip(join, key)]
        out_rows.append(cells + [format_value(va), format_value(vb), format_value(dv)])
    _emit(header, out_rows, args.format, args.out)
    if args.plot:
        plots.plot_delta(join, rows, args.plot)
    return 0


def cmd_texture(args) -> int:
    paths = []
    for item in args.images:
        p = Path(item)
        if p.is_dir():
            paths.extend(_list_images(p).values())
        else:
            paths.append(p)
    if not paths:
        raise ValueError("no input images")
    cfg = texture.GlcmConfig(levels=args.levels, distance=args.distance,
                             angle=args.angle, symmetric=args.symmetric,
                             normalize=True)
    header = ["image", "levels", "distance", "angle", "symmetric",
              "contrast", "dissimilarity", "energy", "correlation", "asm",
              "edge_pixels", "corners"]
    rows = []
    for path in paths:
        img = load_image(path)
        stats = texture.glcm_stats(texture.glcm(img, cfg))
        _, _, edge_pixels, corners = texture.edge_corner_map(
            img, edge_low=args.edge_low, edge_high=args.edge_high,
            corner_k=args.corner_k, corner_thresh=args.corner_thresh)
        rows.append([path.name, cfg.levels, cfg.distance, cfg.angle,
                     int(cfg.symmetric),
                     f"{stats.contrast:.6f}", f"{stats.dissimilarity:.6f}",
                     f"{stats.energy:.6f}", f"{stats.correlation:.6f}",
                     f"{stats.asm:.6f}", edge_pixels, corners])
    _emit(header, rows, args.format, args.out)
    if args.plot:
        plots.plot_texture(header, rows, args.plot)
    return 0


def _file_pairs(truth: str, pred: str) -> list[tuple[Path, Path]]:
    t, p = Path(truth), Path(pred)
    if t.is_dir() != p.is_dir():
        raise ValueError("--truth and --pred must both be files or both directories")
    if not t.is_dir():
        return [(t, p)]
    truths, preds = _list_images(t), _list_images(p)
    stems = sorted(set(truths) & set(preds))
    if not stems:
        raise ValueError("no matching stems between the two directories")
    return [(truths[s], preds[s]) for s in stems]


def cmd_loss(args) -> int:
    cfg = lossmeter.HybridLossConfig(lambda_l1=args.lambda_l1,
                                     lambda_grad=args.lambda_grad,
                                     reduction=args.reduction)
    rows = []
    for t_path, p_path in _file_pairs(args.truth, args.pred):
        truth = load_image(t_path)
        pred = load_image(p_path)
        if args.luma:
            truth, pred = extract_luma(truth), extract_luma(pred)
        l1 = lossmeter.l1_loss(truth, pred, cfg.reduction)
        grad = lossmeter.grad_loss(truth, pred, cfg.reduction)
        total = cfg.lambda_l1 * l1 + cfg.lambda_grad * grad
        rows.append([t_path.name, p_path.name,
                     f"{cfg.lambda_l1:.6f}", f"{cfg.lambda_grad:.6f}",
                     f"{l1:.6f}", f"{grad:.6f}", f"{total:.6f}"])
    _emit(["truth", "pred", "lambda_l1", "lambda_grad", "l1", "grad", "hybrid"],
          rows, args.format, args.out)
    return 0


def cmd_ycompare(args) -> int:
    metrics = _metric_list(args.metrics)
    outside = [m for m in metrics if m not in RGB_CAPABLE]
    if outside:
        raise ValueError(
            f"ycompare is defined for RGB-capable metrics {sorted(RGB_CAPABLE)}; "
            f"{outside} are luma-only and cannot differ between domains"
        )
    rows, errors = _pairs_from_args(args)
    rgb_records, err1 = _evaluate_rows(rows, metrics, "rgb", args.border, args.workers)
    y_records, err2 = _evaluate_rows(rows, metrics, "y", args.border, args.workers)
    errors.extend(err1)
    errors.extend(err2)
    if args.aggregate == "mean":
        rgb_records = _aggregate_records(rgb_records)
        y_records = _aggregate_records(y_records)
    paired = {}
    for r in rgb_records:
        paired[r.key()] = [r.value, None]
    for r in y_records:
        paired.setdefault(r.key(), [None, None])[1] = r.value
    header = SCORE_HEADER[:-1] + ["value_rgb", "value_y", "delta_y_minus_rgb"]
    out_rows = []
    for key in sorted(paired, key=lambda k: (k[0], k[3], k[4], k[5], k[2], k[1])):
        model, encoder, recipe, dataset, scale, metric = key
        v_rgb, v_y = paired[key]
        if v_rgb is None or v_y is None:
            continue
        delta = v_y - v_rgb if not (math.isinf(v_y) and math.isinf(v_rgb)) else 0.0
        out_rows.append([model, encoder, recipe, dataset, _scale_fmt(scale), metric,
                         format_value(v_rgb), format_value(v_y), format_value(delta)])
    _emit(header, out_rows, args.format, args.out)
    _write_errors(errors, args.out)
    if args.plot:
        plots.plot_ycompare(header, out_rows, args.plot)
    return 1 if errors else 0


# ---------------------------------------------------------------------------
# argument wiring


def _add_output_flags(sub, plot: bool = True):
    sub.add_argument("--out", help="output path (default: stdout)")
    sub.add_argument("--format", choices=["csv", "json"], default="csv")
    if plot:
        sub.add_argument("--plot", help="also render a figure to this file")


def _add_pair_flags(sub):
    sub.add_argument("--manifest", help="pair manifest CSV "
                     f"(columns {','.join(PAIR_MANIFEST_HEADER)})")
    sub.add_argument("--ref-dir", help="reference images, matched to --dist-dir by stem")
    sub.add_argument("--dist-dir", help="distorted images")
    sub.add_argument("--model", default="model")
    sub.add_argument("--dataset", default="dataset")
    sub.add_argument("--recipe", default="default")
    sub.add_argument("--encoder", default="default")
    sub.add_argument("--scale", type=float, default=1.0)
    sub.add_argument("--border", type=int, default=0,
                     help="pixels cropped from every side before evaluation")
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--aggregate", choices=["none", "mean"], default="none",
                     help="mean-reduce rows sharing a full metadata key")


def _add_polarity_flags(sub):
    sub.add_argument("--lower-better", action="append", metavar="METRIC",
                     help="declare a lower-is-better polarity for a metric name")
    sub.add_argument("--higher-better", action="append", metavar="METRIC")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sreval",
        description="Full-reference super-resolution evaluation toolkit",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("degrade", help="generate a seeded LR/HR patch corpus")
    p.add_argument("--hr-dir", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--patch-size", type=int, default=48)
    p.add_argument("--repetitions", type=int, default=40)
    p.add_argument("--scale-lo", type=float, default=1.0)
    p.add_argument("--scale-hi", type=float, default=4.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_degrade)

    p = subs.add_parser("evaluate", help="score image pairs with the IQA metrics")
    _add_pair_flags(p)
    p.add_argument("--metrics", default=",".join(METRIC_ORDER))
    p.add_argument("--domain", choices=["rgb", "y"], default="y")
    _add_output_flags(p, plot=False)
    p.set_defaults(func=cmd_evaluate)

    p = subs.add_parser("rank", help="Borda-aggregate score files into model ranks")
    p.add_argument("--scores", nargs="+", required=True)
    p.add_argument("--group-dims", default="dataset,scale,metric")
    _add_polarity_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_rank)

    p = subs.add_parser("best-table", help="best model (or recipe) per evaluation cell")
    p.add_argument("--scores", nargs="+", required=True)
    p.add_argument("--by", choices=["model", "recipe"], default="model")
    p.add_argument("--dims", default="dataset,scale,metric")
    p.add_argument("--encoder")
    p.add_argument("--dataset")
    p.add_argument("--model")
    p.add_argument("--recipe")
    p.add_argument("--no-average", action="store_true",
                   help="treat duplicate (cell, candidate) records as an error")
    _add_polarity_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_best_table)

    p = subs.add_parser("gain", help="per-scale PSNR gap between the top two models")
    p.add_argument("--scores", nargs="+", required=True)
    p.add_argument("--encoder")
    p.add_argument("--dataset")
    _add_output_flags(p)
    p.set_defaults(func=cmd_gain)

    p = subs.add_parser("delta", help="value_b - value_a between two score files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--join", default="model,encoder,dataset,scale,metric")
    _add_output_flags(p)
    p.set_defaults(func=cmd_delta)

    p = subs.add_parser("texture", help="GLCM statistics and edge/corner counts")
    p.add_argument("--images", nargs="+", required=True,
                   help="image files or directories")
    p.add_argument("--levels", type=int, default=256)
    p.add_argument("--distance", type=int, default=1)
    p.add_argument("--angle", type=int, choices=[0, 45, 90, 135], default=0)
    p.add_argument("--symmetric", action="store_true")
    p.add_argument("--edge-low", type=float, default=0.05)
    p.add_argument("--edge-high", type=float, default=0.15)
    p.add_argument("--corner-k", type=float, default=0.04)
    p.add_argument("--corner-thresh", type=float, default=0.01)
    _add_output_flags(p)
    p.set_defaults(func=cmd_texture)

    p = subs.add_parser("loss", help="hybrid pixel-gradient loss between image pairs")
    p.add_argument("--truth", required=True, help="file or directory")
    p.add_argument("--pred", required=True, help="file or directory")
    p.add_argument("--lambda-l1", type=float, default=1.0)
    p.add_argument("--lambda-grad", type=float, default=0.05)
    p.add_argument("--reduction", choices=["mean", "sum"], default="mean")
    p.add_argument("--luma", action="store_true",
                   help="compute on the Y channel instead of per color plane")
    _add_output_flags(p, plot=False)
    p.set_defaults(func=cmd_loss)

    p = subs.add_parser("ycompare", help="RGB-domain vs Y-domain metric deltas")
    _add_pair_flags(p)
    p.add_argument("--metrics", default="PSNR,SSIM")
    _add_output_flags(p)
    p.set_defaults(func=cmd_ycompare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"sreval {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
