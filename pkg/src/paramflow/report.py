"""Report rendering: delimited residue data plus figures on disk.

Every report lands in a caller-chosen directory as a small set of CSV
files and PNG figures rendered with the Agg backend, so reports work in
headless environments.
"""
from __future__ import annotations

import csv
import os
from fractions import Fraction
from typing import List, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .boundary import FactoredBoundary
from .residue import fiber_residue_profile, sample_grid
from .series import MultiSeries

__all__ = ["collect_residue_rows", "write_residue_report",
           "write_classify_report"]


def collect_residue_rows(numerator: Optional[MultiSeries],
                         boundary: FactoredBoundary, *, nsamples: int = 12,
                         seed: int = 0, scale=Fraction(1)) -> List[dict]:
    """Residue profile of numerator/product over sampled fibers, one row
    per divisor point; skipped (degenerate) samples produce no rows."""
    den = boundary.product()
    rows = []
    grid = sample_grid(boundary.nvars - 1, nsamples, seed, scale=scale)
    for idx, sample in enumerate(grid):
        prof = fiber_residue_profile(den, boundary, sample,
                                     numerator=numerator)
        if prof is None:
            continue
        for pt in prof:
            rows.append({
                "sample_index": idx,
                "sample": ";".join(str(c) for c in sample),
                "root_re": pt.root.real,
                "root_im": pt.root.imag,
                "contact": pt.contact,
                "residue_re": pt.residue.real,
                "residue_im": pt.residue.imag,
                "residue_abs": abs(pt.residue),
            })
    return rows


def _write_csv(path: str, rows: List[dict], fieldnames: List[str]):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)


def _figure_residue_map(path: str, rows: List[dict]):
    fig, ax = plt.subplots(figsize=(5, 4))
    if rows:
        xs = [r["root_re"] for r in rows]
        ys = [r["root_im"] for r in rows]
        cs = [r["residue_abs"] for r in rows]
        sc = ax.scatter(xs, ys, c=cs, cmap="viridis", s=30)
        fig.colorbar(sc, ax=ax, label="|residue|")
    ax.set_xlabel("Re root")
    ax.set_ylabel("Im root")
    ax.set_title("divisor points and residue magnitudes")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _figure_residue_by_sample(path: str, rows: List[dict], tol: float):
    fig, ax = plt.subplots(figsize=(5, 4))
    if rows:
        per_sample: dict = {}
        for r in rows:
            k = r["sample_index"]
            per_sample[k] = max(per_sample.get(k, 0.0), r["residue_abs"])
        ks = sorted(per_sample)
        ax.bar(ks, [max(per_sample[k], 1e-17) for k in ks])
    ax.axhline(tol, color="red", linestyle="--", label=f"tol = {tol:g}")
    ax.set_yscale("log")
    ax.set_xlabel("sample index")
    ax.set_ylabel("max |residue|")
    ax.set_title("residue magnitude per sampled fiber")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


_RESIDUE_FIELDS = ["sample_index", "sample", "root_re", "root_im", "contact",
                   "residue_re", "residue_im", "residue_abs"]


def write_residue_report(outdir: str, numerator: Optional[MultiSeries],
                         boundary: FactoredBoundary, *, nsamples: int = 12,
                         seed: int = 0, scale=Fraction(1),
                         tol: float = 1e-8) -> List[str]:
    """Render residues.csv plus two PNG figures; returns written paths."""
    os.makedirs(outdir, exist_ok=True)
    rows = collect_residue_rows(numerator, boundary, nsamples=nsamples,
                                seed=seed, scale=scale)
    paths = [os.path.join(outdir, "residues.csv"),
             os.path.join(outdir, "residue_map.png"),
             os.path.join(outdir, "residue_by_sample.png")]
    _write_csv(paths[0], rows, _RESIDUE_FIELDS)
    _figure_residue_map(paths[1], rows)
    _figure_residue_by_sample(paths[2], rows, tol)
    return paths


def write_classify_report(outdir: str, verdict, numerator: Optional[MultiSeries],
                          boundary: FactoredBoundary, *, nsamples: int = 12,
                          seed: int = 0, scale=Fraction(1),
                          tol: float = 1e-8) -> List[str]:
    """Verdict summary CSV plus the residue screen report."""
    os.makedirs(outdir, exist_ok=True)
    rows = [{"key": "kind", "value": verdict.kind},
            {"key": "order", "value": verdict.order},
            {"key": "lambda", "value": verdict.lam}]
    for key, val in sorted(verdict.details.items()):
        if key == "beta":
            continue
        rows.append({"key": key, "value": val})
    if verdict.certificate is not None:
        rows.append({"key": "certificate_legs",
                     "value": verdict.certificate.legs})
        rows.append({"key": "certificate_order",
                     "value": verdict.certificate.order})
    path = os.path.join(outdir, "verdict.csv")
    _write_csv(path, rows, ["key", "value"])
    written = [path]
    if numerator is not None:
        written += write_residue_report(outdir, numerator, boundary,
                                        nsamples=nsamples, seed=seed,
                                        scale=scale, tol=tol)
    return written
