"""Optional figure rendering for the report subcommands.

Charts are a convenience layer over the delimited reports; the CSV stays the
canonical output. matplotlib is imported lazily with the Agg backend so a
headless run never touches a display.
"""

from __future__ import annotations


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def plot_rank(rows, path) -> None:
    """Horizontal Borda-sum bars, best model on top. rows: (model, borda, rank, tied)."""
    plt = _pyplot()
    rows = sorted(rows, key=lambda r: r[2])
    models = [r[0] for r in rows][::-1]
    borda = [r[1] for r in rows][::-1]
    fig, ax = plt.subplots(figsize=(6, 0.5 * len(rows) + 1.5))
    ax.barh(models, borda, color="#4878cf")
    for i, (b, row) in enumerate(zip(borda, rows[::-1])):
        label = f"rank {row[2]}" + (" (tied)" if row[3] else "")
        ax.text(b, i, " " + label, va="center", fontsize=8)
    ax.set_xlabel("Borda sum")
    ax.set_title("Aggregated ranking")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_gain(rows, path) -> None:
    """PSNR gain per scale. rows: (scale, best, second, gain, tied)."""
    plt = _pyplot()
    scales = [f"{r[0]:g}" for r in rows]
    gains = [r[3] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    bars = ax.bar(scales, gains, color="#6acc64")
    for bar, row in zip(bars, rows):
        ax.text(bar.get_x() + bar.get_width() / 2, bar.get_height(),
                row[1], ha="center", va="bottom", fontsize=7, rotation=45)
    ax.set_xlabel("scale")
    ax.set_ylabel("best-to-second PSNR gain (dB)")
    ax.set_title("Best-model PSNR margin per scale")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_delta(join_dims, rows, path) -> None:
    """Per-key deltas as a bar strip. rows: (key, value_a, value_b, delta)."""
    plt = _pyplot()
    labels = ["/".join(str(k) for k in key) for key, *_ in rows]
    deltas = [r[3] for r in rows]
    fig, ax = plt.subplots(figsize=(max(6, 0.35 * len(rows)), 4))
    colors = ["#6acc64" if d >= 0 else "#d65f5f" for d in deltas]
    ax.bar(range(len(deltas)), deltas, color=colors)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=90, fontsize=6)
    ax.axhline(0, color="black", linewidth=0.8)
    ax.set_ylabel("value_b - value_a")
    ax.set_title(f"Delta over ({', '.join(join_dims)})")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_best_table(header, rows, path) -> None:
    """Render the best-per-cell table as a figure table."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(1.4 * len(header), 0.3 * len(rows) + 1.2))
    ax.axis("off")
    table = ax.table(cellText=rows, colLabels=header, loc="center")
    table.auto_set_font_size(False)
    table.set_fontsize(8)
    ax.set_title("Best per cell", pad=12)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_texture(header, rows, path) -> None:
    """Contrast vs energy scatter with corner counts as marker size."""
    plt = _pyplot()
    contrast_i = header.index("contrast")
    energy_i = header.index("energy")
    corners_i = header.index("corners")
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = [float(r[contrast_i]) for r in rows]
    ys = [float(r[energy_i]) for r in rows]
    sizes = [20 + 2 * float(r[corners_i]) for r in rows]
    ax.scatter(xs, ys, s=sizes, alpha=0.7, color="#4878cf")
    for r, x, y in zip(rows, xs, ys):
        ax.annotate(r[0], (x, y), fontsize=6, xytext=(3, 3),
                    textcoords="offset points")
    ax.set_xlabel("GLCM contrast")
    ax.set_ylabel("GLCM energy")
    ax.set_title("Texture statistics (marker size = corner count)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_ycompare(header, rows, path) -> None:
    """Y-minus-RGB deltas per row, grouped by metric."""
    plt = _pyplot()
    metric_i = header.index("metric")
    delta_i = header.index("delta_y_minus_rgb")
    fig, ax = plt.subplots(figsize=(max(6, 0.3 * len(rows)), 4))
    deltas = []
    for r in rows:
        try:
            deltas.append(float(r[delta_i]))
        except ValueError:  # 'inf'
            deltas.append(float("nan"))
    labels = [f"{r[metric_i]}" for r in rows]
    ax.bar(range(len(deltas)), deltas, color="#956cb4")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=90, fontsize=6)
    ax.axhline(0, color="black", linewidth=0.8)
    ax.set_ylabel("Y-domain minus RGB-domain")
    ax.set_title("Evaluation-domain bias per record")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
