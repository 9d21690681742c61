"""Serialization of distributions, Bloch fields and tables; SVG plots."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Sequence

import numpy as np

from .state import PositionDistribution
from .tomography import BlochField

__all__ = [
    "distribution_csv",
    "emit_distribution_csv",
    "read_distribution_csv",
    "emit_bloch_json",
    "emit_table_csv",
    "emit_json",
    "emit_svg_plot",
]


def _num(x: float) -> str:
    # repr round-trips doubles exactly
    return repr(float(x))


def distribution_csv(dist: PositionDistribution) -> str:
    """CSV text ``site,probability,sigma_stat``; sigma_stat is empty for exact data."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["site", "probability", "sigma_stat"])
    sig = dist.sigma_stat
    for i, (s, p) in enumerate(zip(dist.sites, dist.probabilities)):
        w.writerow([int(s), _num(p), "" if sig is None else _num(sig[i])])
    return buf.getvalue()


def _write(path: Path, text: str) -> Path:
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise OSError(f"cannot write {path}: {e.strerror}") from e
    return path


def emit_distribution_csv(dist: PositionDistribution, path) -> Path:
    return _write(path, distribution_csv(dist))


def read_distribution_csv(path, shots: int | None = None) -> PositionDistribution:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    sites = np.array([int(r["site"]) for r in rows], dtype=np.int64)
    probs = np.array([float(r["probability"]) for r in rows])
    sig = None
    if rows and all(r["sigma_stat"] for r in rows):
        sig = np.array([float(r["sigma_stat"]) for r in rows])
    return PositionDistribution(sites, probs, shots=shots, sigma_stat=sig)


def emit_json(obj, path) -> Path:
    return _write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def emit_bloch_json(field: BlochField, path) -> Path:
    return emit_json(field.records(), path)


def emit_table_csv(header: Sequence[str], rows, path) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, (int, np.integer)) else _num(v) for v in row])
    return _write(path, buf.getvalue())


def emit_svg_plot(kind: str, series: dict, path, xlabel: str = "site", ylabel: str = "probability", title: str = "") -> Path:
    """Render a self-contained SVG.

    ``kind`` is ``"bar"`` (histogram; ``series`` maps label -> (x, y[, yerr]))
    or ``"line"`` (one line per label).
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "qwalk", "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        width = 0.8 / max(len(series), 1)
        for n, (label, data) in enumerate(series.items()):
            x, y = np.asarray(data[0], float), np.asarray(data[1], float)
            yerr = data[2] if len(data) > 2 else None
            if kind == "bar":
                off = (n - (len(series) - 1) / 2) * width
                ax.bar(x + off, y, width=width, yerr=yerr, label=label, capsize=2)
            elif kind == "line":
                ax.plot(x, y, marker="o", label=label)
            else:
                raise ValueError(f"unknown plot kind {kind!r}")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if len(series) > 1:
            ax.legend()
        fig.tight_layout()
        try:
            fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
        finally:
            plt.close(fig)
    return Path(path)
