# walkpool/services/report_service.py
"""
CSV reporting.

Per-seed rows use the columns dataset,method,seed,auc,ap,prec_at_half,
wall_time_s. A sweep report prints those rows, one blank line, then the
aggregate table (mean and sample stddev per dataset/method, stddev blank
below two seeds). Floats use ``settings.CSV_FLOAT_FORMAT``.
"""
import logging
import sys
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, TextIO, Union

import pandas as pd

from ..core.config import settings
from ..schemas import (
    AGGREGATE_COLUMNS,
    CSV_COLUMNS,
    TRAIN_LOG_COLUMNS,
    AggregateRow,
    ExperimentReport,
    ExperimentRow,
    TrainLogRow,
)

logger = logging.getLogger(__name__)

METRICS = ("auc", "ap", "prec_at_half")


def _float_format() -> str:
    return "%" + settings.CSV_FLOAT_FORMAT


def to_csv(frame: pd.DataFrame, columns: Sequence[str], header: bool = True) -> str:
    return frame.to_csv(
        columns=list(columns),
        header=header,
        index=False,
        float_format=_float_format(),
        na_rep="",
        lineterminator="\n",
    )


def rows_frame(rows: Iterable[ExperimentRow]) -> pd.DataFrame:
    return pd.DataFrame([r.model_dump() for r in rows], columns=list(CSV_COLUMNS))


def aggregate(rows: Sequence[ExperimentRow]) -> List[AggregateRow]:
    """Mean and ddof=1 stddev per (dataset, method), groups in first-seen order"""
    frame = rows_frame(rows)
    if frame.empty:
        return []
    grouped = frame.groupby(["dataset", "method"], sort=False)
    stats = grouped[list(METRICS)].agg(["mean", "std"])
    counts = grouped.size()
    out = []
    for (dataset, method), row in stats.iterrows():
        n = int(counts[(dataset, method)])
        values = {"dataset": dataset, "method": method, "n_seeds": n}
        for metric in METRICS:
            values[f"{metric}_mean"] = float(row[(metric, "mean")])
            values[f"{metric}_std"] = float(row[(metric, "std")]) if n >= 2 else None
        out.append(AggregateRow(**values))
    return out


def build_report(rows: Sequence[ExperimentRow]) -> ExperimentReport:
    rows = sorted(rows, key=lambda r: (r.dataset, r.seed))
    return ExperimentReport(rows=list(rows), aggregates=aggregate(rows))


def format_rows(rows: Iterable[ExperimentRow], header: bool = True) -> str:
    return to_csv(rows_frame(rows), CSV_COLUMNS, header)


def format_report(report: ExperimentReport) -> str:
    aggregates = pd.DataFrame(
        [a.model_dump() for a in report.aggregates], columns=list(AGGREGATE_COLUMNS)
    )
    return format_rows(report.rows) + "\n" + to_csv(aggregates, AGGREGATE_COLUMNS)


def emit(text: str, out: Optional[Union[str, Path, TextIO]] = None, append: bool = False) -> None:
    """Write to a stream, or to a path (header lines dropped when appending to a non-empty file)"""
    if out is None or hasattr(out, "write"):
        (out or sys.stdout).write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    if append and path.is_file() and path.stat().st_size > 0:
        text = text.split("\n", 1)[1] if "\n" in text else ""
        with path.open("a", encoding="utf-8") as fh:
            fh.write(text)
    else:
        path.write_text(text, encoding="utf-8")
    logger.info("wrote %s", path)


def format_train_log(history: Iterable[TrainLogRow]) -> str:
    frame = pd.DataFrame([h.model_dump() for h in history], columns=list(TRAIN_LOG_COLUMNS))
    return to_csv(frame, TRAIN_LOG_COLUMNS)


def write_train_log(history: Iterable[TrainLogRow], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_train_log(history), encoding="utf-8")
    return path
