"""Serialization of evaluation results.

Reports go out twice: a flat CSV with one row per (dependent x group)
cell, and a JSON document with per-fold detail and the seeds that
produced it.  A separate contour CSV carries per-token observed values
and held-out posterior-mean predictions for plotting.  All writers are
deterministic: same reports in, same bytes out.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict

from .inference import EvalReport

REPORT_CSV_COLUMNS = ("dependent", "group", "delta_mse", "p_value", "n_tokens", "folds")


def write_report_csv(path, reports: list[EvalReport]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_CSV_COLUMNS)
        for r in reports:
            writer.writerow([r.dependent, r.group, repr(r.delta_mse),
                             repr(r.p_value), r.n_tokens, r.folds])


def write_report_json(path, reports: list[EvalReport], meta: dict | None = None) -> None:
    payload = {
        "meta": meta or {},
        "cells": [],
    }
    for r in reports:
        d = asdict(r)
        d.pop("details", None)
        payload["cells"].append(d)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_report_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_contours_csv(path, reports: list[EvalReport], doc_ids, token_index) -> None:
    """Per-token observed vs. held-out predicted values for each cell."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["dependent", "group", "doc_id", "token_index",
                         "observed", "predicted"])
        for r in reports:
            if r.details is None:
                continue
            obs = r.details.observed
            pred = r.details.predictions_target
            for doc, ti, o, p in zip(doc_ids, token_index, obs, pred):
                writer.writerow([r.dependent, r.group, doc, ti, repr(float(o)),
                                 repr(float(p))])


def format_report_table(cells: list[dict]) -> str:
    """Plain-text table for the terminal (cells from CSV/JSON or reports)."""
    header = ["dependent", "group", "delta_mse", "p_value", "n_tokens"]
    rows = [[str(c["dependent"]), str(c["group"]), f"{float(c['delta_mse']):+.6f}",
             f"{float(c['p_value']):.6g}", str(c["n_tokens"])] for c in cells]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)))
    return "\n".join(lines)
