import json

import numpy as np
import pytest

from tanlift import base as B
from tanlift.errors import UsageError
from tanlift.verify import (
    CHECK_IDS, CONFIG_KEYS, REGISTRY, SuiteConfig, config_from_mapping, load_config,
    run_suite, sample_points,
)

ANCHORS_REQUIRED = [
    "Lemma 1", "Thm 2", "Thm 3", "Eq. 3.4", "Eq. 3.5", "Eq. 3.10", "Lemma 4 (1)", "Lemma 4 (8)",
    "Thm 5", "Prop. 6", "Thm 7", "Eq. 4.3", "Thm 11", "Thm 12", "Thm 13", "Lemma 15", "Thm 16",
    "Thm 17", "Thm 18", "Lemma 19 (1)", "Lemma 19 (8)", "Thm 20", "h_Qtilde", "Thm 21", "Thm 22",
    "Thm 23", "Lemma 24 (1)", "Lemma 24 (8)", "Thm 25",
]


@pytest.fixture(scope="module")
def cc1_report():
    return run_suite(SuiteConfig(metric="constant_curvature", c=1.0, dims=[2, 3], points=5))


def test_sampling_respects_box_and_norm():
    spec = B.MetricSpec.constant_curvature(3, -1.0)
    pts = sample_points(spec, 200, 0)
    box = spec.sample_box()
    for u in pts:
        assert np.all(np.abs(u.x) <= box)
        assert np.all(np.abs(u.y) <= 2.0)
        g, _ = B.metric_at(spec, u.x)
        assert np.sqrt(u.y @ g @ u.y) >= 0.1
    again = sample_points(spec, 200, 0)
    assert all(np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y) for a, b in zip(pts, again))


def test_every_check_appears_once_per_dimension(cc1_report):
    for n in (2, 3):
        ids = [r.id for r in cc1_report.records if r.n == n]
        assert ids == CHECK_IDS


def test_traceability_covers_all_anchors(cc1_report):
    anchors = " | ".join(cc1_report.traceability())
    for a in ANCHORS_REQUIRED:
        assert a in anchors, a
    for anchor, ids in cc1_report.traceability().items():
        assert ids


def test_verdicts_on_unit_curvature(cc1_report):
    by = {(r.id, r.n): r for r in cc1_report.records}
    assert by["thm7", 3].verdict == "pass" and not by["thm7", 3].informational
    assert by["thm7", 2].informational
    assert by["thm12", 3].verdict == "expected-nonzero-confirmed"
    assert by["thm17", 3].verdict == "expected-nonzero-confirmed"
    assert by["thm17_kappa", 3].verdict == "finding"
    assert by["thm17_kappa", 3].detail["kappa"] == pytest.approx(-1.0, abs=1e-10)
    assert by["lemma4", 3].verdict == "pass"
    assert by["lemma4_2", 3].verdict == "finding"
    for r in cc1_report.records:
        if r.verdict == "fail":
            assert r.id in ("thm20", "thm25")


def test_flat_base_counterexample():
    rep = run_suite(SuiteConfig(metric="euclidean", dims=[2], checks=["thm7"], points=3))
    (r,) = rep.records
    assert r.verdict == "expected-nonzero-confirmed"
    assert r.max_defect >= 0.1


def test_findings_do_not_fail_the_run():
    rep = run_suite(SuiteConfig(metric="constant_curvature", dims=[3], points=3,
                                checks=["lemma4", "lemma4_2", "lemma4_7", "thm7"]))
    assert len(rep.findings) == 2 and rep.exit_code == 0
    rep = run_suite(SuiteConfig(metric="euclidean", dims=[2], points=3, checks=["thm20"]))
    assert rep.exit_code == 1


def test_witness_names_worst_index():
    rep = run_suite(SuiteConfig(metric="euclidean", dims=[2], points=4, checks=["thm20"]))
    (r,) = rep.records
    w = r.witness
    assert len(w["x"]) == 2 and len(w["y"]) == 2
    assert len(w["index"]) == len(w["labels"]) == 3


def test_machine_report_schema_and_text():
    rep = run_suite(SuiteConfig(metric="custom", components=[["1 + x1*x1", "0"], ["0", "1"]],
                                points=2, checks=["lemma1", "thm3"]), timer=iter([0.0, 1.5]).__next__)
    doc = json.loads(rep.to_machine())
    assert doc["schema"] == "tanlift-report/1"
    assert list(doc) == ["schema", "artifact_version", "config", "summary", "records",
                         "findings", "traceability"]
    assert doc["config"]["dims"] == [2]
    assert [r["id"] for r in doc["records"]] == ["lemma1", "thm3"]
    text = rep.to_text()
    assert "Traceability" in text and "Wall time: 1.50 s" in text


@pytest.mark.parametrize("bad", [
    dict(checks=["nonexistent"]),
    dict(points=0),
    dict(dims=[1]),
    dict(tol={"bogus": 1e-3}),
    dict(tol={"algebraic": -1.0}),
    dict(metric="sphere"),
    dict(metric="custom"),
    dict(metric="custom", components=[["1", "0"], ["0", "1"]], dims=[3]),
    dict(metric="constant_curvature", c=float("nan")),
    dict(seed=-1),
    dict(points=2.5),
])
def test_invalid_configs(bad):
    with pytest.raises(UsageError):
        SuiteConfig(**bad).validate()


def test_config_file(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"metric": "constant_curvature", "c": -1, "dims": [3], "points": 4,
                             "tol": {"derivative": 1e-9}}))
    cfg = load_config(str(p)).validate()
    assert cfg.c == -1.0 and cfg.tol["derivative"] == 1e-9 and cfg.tol["algebraic"] == 1e-12
    with pytest.raises(UsageError):
        config_from_mapping({"metric": "euclidean", "colour": "red"})
    p.write_text("{not json")
    with pytest.raises(UsageError):
        load_config(str(p))
    assert CONFIG_KEYS == set(SuiteConfig().as_dict())


def test_registry_ids_unique():
    assert len(CHECK_IDS) == len(set(CHECK_IDS)) == len(REGISTRY)
