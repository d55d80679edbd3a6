"""
CSV and JSON writers for experiment outputs, and the delimited-text reader
for input files.

Every CSV is written with a fixed float format and "\n" line endings and
carries no timestamps, so reruns with the same configuration produce
identical bytes.
"""
import json
import logging
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd

from skewbench.config.settings import settings
from skewbench.exceptions import ConfigError, ParseError
from skewbench.models.experiment import ExperimentConfig, RunSummary
from skewbench.services.metrics import PRCurve, RankedReport

logger = logging.getLogger(__name__)

CURVE_COLUMNS = ["threshold", "precision", "recall", "tp", "fp", "fn"]
SUMMARY_FILE = "summary.json"
CONFIG_FILE = "config.json"


def resolve_output_dir(config: ExperimentConfig, out: Optional[Union[str, Path]] = None) -> Path:
    """<base>/<experiment>/<first 12 hex digits of the config hash>"""
    base = Path(out or config.output_dir or settings.OUTPUT_DIR)
    path = base / config.experiment.value / config.config_hash()[:12]
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"cannot create output directory {path}: {e}") from e
    return path


def read_rows(
    path: Union[str, Path], sep: str, width: int
) -> List[Tuple[Optional[int], List[str]]]:
    """
    Rows of a delimited text file as (line number, stripped fields).

    Blank lines and lines starting with '#' are skipped and quoting follows
    the dialect pandas writes. Trailing empty fields are dropped, so a row
    with more than ``width`` fields shows up as a longer list; wider rows
    still raise ParseError.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    content_lines = [
        number
        for number, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not content_lines:
        return []
    try:
        frame = pd.read_csv(
            path,
            sep=sep,
            header=None,
            names=list(range(width + 1)),
            dtype=str,
            comment="#",
            skip_blank_lines=True,
            keep_default_na=False,
            encoding="utf-8",
        )
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        line = int(match.group(1)) if match else None
        raise ParseError(f"expected at most {width} columns", str(path), line) from e

    # quoted fields spanning lines break the row-to-line map
    lines: List[Optional[int]] = list(content_lines)
    if len(lines) != len(frame):
        lines = [None] * len(frame)
    rows = []
    for line, values in zip(lines, frame.fillna("").itertuples(index=False, name=None)):
        fields = [str(v).strip() for v in values]
        while fields and not fields[-1]:
            fields.pop()
        rows.append((line, fields))
    return rows


def write_table(
    rows: Sequence[Dict[str, Any]], path: Union[str, Path], columns: Optional[List[str]] = None
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(list(rows), columns=columns)
    frame.to_csv(
        path, index=False, float_format=settings.CSV_FLOAT_FORMAT, lineterminator="\n"
    )
    return path


def write_curve(curve: PRCurve, path: Union[str, Path]) -> Path:
    return write_table(curve.rows(), path, CURVE_COLUMNS)


def write_ranked_report(report: RankedReport, path: Union[str, Path]) -> Path:
    rows = [
        {
            "rank": row.rank,
            "candidate": row.candidate,
            "score": row.score,
            "is_known": "yes" if row.is_known else "no",
        }
        for row in report.rows
    ]
    return write_table(rows, path, ["rank", "candidate", "score", "is_known"])


def write_hub_matrix(
    reports: Sequence[RankedReport],
    pooled: Optional[float],
    k_max: int,
    path: Union[str, Path],
) -> Path:
    """One row per anchor with a known/unknown flag for each of the top k_max ranks."""
    rank_columns = [f"r{k}" for k in range(1, k_max + 1)]
    rows = []
    for report in reports:
        row: Dict[str, Any] = {
            "anchor": report.anchor,
            "candidates": len(report.rows),
            "suggested_threshold": report.suggested_threshold,
            "above_pooled_threshold": report.count_at_or_above(pooled),
        }
        for k, column in enumerate(rank_columns):
            row[column] = int(report.rows[k].is_known) if k < len(report.rows) else None
        rows.append(row)
    columns = ["anchor", "candidates", "suggested_threshold", "above_pooled_threshold"]
    return write_table(rows, path, columns + rank_columns)


def write_precision_at_k(reports: Sequence[RankedReport], path: Union[str, Path]) -> Path:
    rows = [
        {"anchor": report.anchor, "k": k, "precision": value}
        for report in reports
        for k, value in sorted(report.precision_at_k.items())
    ]
    return write_table(rows, path, ["anchor", "k", "precision"])


def write_config(config: ExperimentConfig, out_dir: Path) -> Path:
    path = out_dir / CONFIG_FILE
    path.write_text(
        json.dumps(config.model_dump(mode="json"), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return path


def write_summary(summary: RunSummary, out_dir: Path) -> Path:
    payload = summary.model_dump(mode="json")
    payload["all_passed"] = summary.all_passed
    for check, dumped in zip(summary.checks, payload["checks"]):
        dumped["passed"] = check.passed
    path = out_dir / SUMMARY_FILE
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info(
        "Wrote run summary",
        extra={"path": str(path), "records": len(summary.records), "checks": len(summary.checks)},
    )
    return path
