# tests/test_report.py
import io

import pytest

from walkpool.schemas import ExperimentRow, TrainLogRow
from walkpool.services import report_service


def row(dataset="usair", method="aa", seed=0, auc=0.9, ap=0.8, prec=0.7):
    return ExperimentRow(
        dataset=dataset, method=method, seed=seed, auc=auc, ap=ap, prec_at_half=prec, wall_time_s=0.5
    )


def test_aggregate_mean_and_sample_std():
    rows = [row(seed=0, auc=0.9), row(seed=1, auc=0.7), row(method="wp-ones", auc=0.95)]
    aggregates = report_service.aggregate(rows)
    assert [(a.method, a.n_seeds) for a in aggregates] == [("aa", 2), ("wp-ones", 1)]
    assert aggregates[0].auc_mean == pytest.approx(0.8)
    assert aggregates[0].auc_std == pytest.approx(0.1414213562, abs=1e-9)
    assert aggregates[1].auc_std is None


def test_report_layout_and_row_order():
    report = report_service.build_report([
        row(seed=1, method="katz"), row(seed=0, method="katz"), row(seed=0, method="aa"),
    ])
    assert [(r.seed, r.method) for r in report.rows] == [(0, "katz"), (0, "aa"), (1, "katz")]
    text = report_service.format_report(report)
    per_seed, aggregate = text.split("\n\n")
    assert per_seed.splitlines()[0] == "dataset,method,seed,auc,ap,prec_at_half,wall_time_s"
    assert per_seed.splitlines()[1] == "usair,katz,0,0.900000,0.800000,0.700000,0.500000"
    assert aggregate.splitlines()[0].startswith("dataset,method,n_seeds,auc_mean,auc_std")
    assert aggregate.splitlines()[2] == "usair,aa,1,0.900000,,0.800000,,0.700000,"


def test_emit_appends_without_repeating_the_header(tmp_path):
    path = tmp_path / "results.csv"
    report_service.emit(report_service.format_rows([row(seed=0)]), path, append=True)
    report_service.emit(report_service.format_rows([row(seed=1)]), path, append=True)
    lines = path.read_text().splitlines()
    assert len(lines) == 3
    assert lines[0].startswith("dataset,")


def test_emit_to_stream():
    buf = io.StringIO()
    report_service.emit("a,b\n1,2\n", buf)
    assert buf.getvalue() == "a,b\n1,2\n"


def test_train_log(tmp_path):
    history = [TrainLogRow(epoch=1, train_loss=0.25, val_auc=0.5), TrainLogRow(epoch=2, train_loss=0.2, val_auc=0.75)]
    path = report_service.write_train_log(history, tmp_path / "logs" / "m.ckpt.log.csv")
    assert path.read_text() == "epoch,train_loss,val_auc\n1,0.250000,0.500000\n2,0.200000,0.750000\n"
