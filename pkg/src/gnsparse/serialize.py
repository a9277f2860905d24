"""Deterministic report serialization.

Two formats: CSV with a pinned column order for table consumers, and a
structured-text format that additionally carries the sparse families
themselves (escape intervals as z/y/k/sign records, slab masks as
run-length-encoded boolean grids).  All floats are written with repr,
the shortest round-trip form, so identical runs serialize to identical
bytes.
"""

from __future__ import annotations

import csv
import io
import os
from collections import namedtuple

import numpy as np

CSV_COLUMNS = (
    "case-id",
    "mode",
    "j",
    "k",
    "X",
    "Y",
    "Z",
    "lhs",
    "rhs-x",
    "rhs-y",
    "ratio",
    "overlap-max",
    "pointwise-max",
    "verdicts",
    "n",
    "tolerances",
)

IntervalRecord = namedtuple("IntervalRecord", "z y k sign")


def format_float(value) -> str:
    return repr(float(value))


def tolerance_note(limits) -> str:
    """One provenance string describing every threshold the verdicts used."""
    return (
        f"overlap<={limits.max_overlap_1d}|{limits.max_overlap_2d}"
        f" pointwise<=128*(1+{limits.pointwise_slack!r})"
        " modular<=1+1e-06 gn-drift<=0.01"
    )


def interval_record(iv) -> IntervalRecord:
    return IntervalRecord(z=float(iv.z), y=float(iv.y), k=int(iv.k), sign=int(iv.sign))


def parse_intervals(text: str):
    """Recover interval records from a structured-text report (or fragment)."""
    records = []
    for line in text.splitlines():
        parts = line.split()
        if parts[:1] == ["interval"]:
            fields = dict(zip(parts[1::2], parts[2::2]))
            records.append(
                IntervalRecord(
                    z=float(fields["z"]),
                    y=float(fields["y"]),
                    k=int(fields["k"]),
                    sign=int(fields["sign"]),
                )
            )
    return records


def rle_encode(mask) -> str:
    """Row-major run lengths, 'RxC:a,b,c,...', first run counting False cells."""
    mask = np.asarray(mask, dtype=bool)
    rows, cols = mask.shape
    flat = mask.ravel()
    if flat.size == 0:
        return f"{rows}x{cols}:"
    breaks = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    starts = np.concatenate(([0], breaks))
    ends = np.concatenate((breaks, [flat.size]))
    runs = (ends - starts).tolist()
    if flat[0]:
        runs.insert(0, 0)
    return f"{rows}x{cols}:" + ",".join(str(r) for r in runs)


def rle_decode(text: str) -> np.ndarray:
    shape_part, _, runs_part = text.partition(":")
    rows_text, _, cols_text = shape_part.partition("x")
    rows, cols = int(rows_text), int(cols_text)
    out = np.zeros(rows * cols, dtype=bool)
    pos = 0
    bit = False
    for token in runs_part.split(","):
        if token == "":
            continue
        length = int(token)
        if bit:
            out[pos : pos + length] = True
        pos += length
        bit = not bit
    if pos != out.size:
        raise ValueError(f"run lengths cover {pos} cells of {out.size}")
    return out.reshape(rows, cols)


def _verdict_text(result) -> str:
    return ";".join(f"{name}={verdict}" for name, verdict in result.verdicts)


def _csv_row(result, note: str):
    case = result.case
    rep = result.report
    return [
        case.case_id(),
        case.mode,
        str(case.j),
        str(case.k),
        case.x_space.format(),
        case.y_space.format(),
        result.z_text,
        format_float(rep.lhs) if rep else "",
        format_float(rep.rhs_x) if rep else "",
        format_float(rep.rhs_y) if rep else "",
        format_float(rep.ratio) if rep else "",
        "" if result.overlap_max is None else str(result.overlap_max),
        "" if result.pointwise_max is None else format_float(result.pointwise_max),
        _verdict_text(result),
        str(case.n),
        note,
    ]


def csv_report(results, limits) -> str:
    note = tolerance_note(limits)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for result in results:
        writer.writerow(_csv_row(result, note))
    return buffer.getvalue()


def text_report(results, limits) -> str:
    lines = ["gnsparse-report 1", f"tolerances {tolerance_note(limits)}", f"cases {len(results)}"]
    for result in results:
        case = result.case
        lines.append(f"case {case.case_id()}")
        lines.append(f"  mode {case.mode} j {case.j} k {case.k} axis {case.axis} n {case.n}")
        lines.append(
            f"  spaces X {case.x_space.format()} Y {case.y_space.format()} Z {result.z_text}"
        )
        rep = result.report
        if rep is not None:
            lines.append(
                "  norms lhs {} rhs-x {} rhs-y {} ratio {} refined {} drift {}".format(
                    format_float(rep.lhs),
                    format_float(rep.rhs_x),
                    format_float(rep.rhs_y),
                    format_float(rep.ratio),
                    format_float(rep.refined_ratio),
                    format_float(rep.drift),
                )
            )
        if result.overlap_max is not None or result.pointwise_max is not None:
            overlap = "-" if result.overlap_max is None else str(result.overlap_max)
            pointwise = (
                "-" if result.pointwise_max is None else format_float(result.pointwise_max)
            )
            lines.append(f"  family overlap-max {overlap} pointwise-max {pointwise}")
        for name, verdict in result.verdicts:
            lines.append(f"  verdict {name} {verdict}")
        if result.intervals:
            lines.append(f"  intervals {len(result.intervals)}")
            for iv in result.intervals:
                lines.append(
                    f"  interval z {format_float(iv.z)} y {format_float(iv.y)}"
                    f" k {int(iv.k)} sign {int(iv.sign)}"
                )
        if result.slabs:
            lines.append(f"  slabs {len(result.slabs)}")
            for slab in result.slabs:
                lines.append(
                    f"  slab k {slab.k} sign {slab.sign} delta {format_float(slab.delta)}"
                    f" steps {slab.delta_steps} rle {rle_encode(slab.mask)}"
                )
        if result.error:
            lines.append(f"  error {result.error}")
        lines.append("end")
    return "\n".join(lines) + "\n"


def atomic_write_text(path, text: str) -> None:
    """Write-then-rename so readers never observe a partial file."""
    path = os.fspath(path)
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    os.replace(tmp, path)
