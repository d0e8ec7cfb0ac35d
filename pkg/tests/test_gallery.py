import numpy as np
import pytest

import apkit as ap
from apkit.gallery import CLASS_CHAIN, ClassificationReport, ClassVerdict


def test_gallery_names():
    assert ap.gallery_names() == ["half-step", "levitan", "periodized-inverse-sqrt"]
    with pytest.raises(ValueError):
        ap.gallery_function("nonesuch")


def test_gallery_default_domains():
    lev = ap.gallery_function("levitan")
    assert lev.domain.axes[0].h == 0.01
    assert lev.domain.axes[0].n == 20000
    hs = ap.gallery_function("half-step")
    assert hs.domain.axes[0].h == 0.05
    inv = ap.gallery_function("periodized-inverse-sqrt")
    assert inv.domain.axes[0].kind == "torus"
    assert inv.domain.axes[0].h == pytest.approx(1e-4)


def test_gallery_h_and_span_overrides():
    f = ap.gallery_function("levitan", h=0.02, span=50.0)
    ax = f.domain.axes[0]
    assert ax.h == 0.02
    assert ax.n == 5000


def test_periodized_inverse_sqrt_periodic_and_rejects_pole():
    h = 1e-3
    dom = ap.torus_grid(int(round(1 / h)), h)
    f = ap.periodized_inverse_sqrt(dom)
    assert f.is_real
    assert np.min(f.values.real) > 0
    # sampling lattice that hits the pole exactly is rejected
    bad = ap.torus_grid(10, 0.1, origin=-0.05)   # cell center at 0
    with pytest.raises(ValueError):
        ap.periodized_inverse_sqrt(bad)


def test_levitan_bounded_and_real():
    f = ap.gallery_function("levitan", h=0.05, span=20.0)
    assert f.is_real
    assert np.max(np.abs(f.values)) <= 1.0 + 1e-12


def test_half_step_profile():
    dom = ap.real_grid(400, 0.05, origin=-10.0)
    f = ap.half_step(dom)
    xs = dom.axes[0].coordinates()
    np.testing.assert_allclose(f.values.real, np.clip(xs, 0.0, 1.0), atol=1e-12)


def test_class_chain_order():
    assert CLASS_CHAIN == ("sap", "stepanov", "weyl", "mean")


def test_classify_config_defaults():
    cfg = ap.ClassifyConfig()
    assert cfg.epsilon == 0.25
    assert cfg.p == 1.0
    assert cfg.seq_rule == "centered"
    assert cfg.n_max == 16


def test_classify_trig_polynomial_all_pass():
    dom = ap.cyclic(2048)
    poly = ap.trig_polynomial([(ap.character(4), 1.0), (ap.character(8), 0.5),
                               (ap.character(12), 0.25j)])
    f = ap.eval_trig_poly(poly, dom)
    cfg = ap.ClassifyConfig(epsilon=0.25, p=1.0, window=ap.window(0.0, 16.0),
                            seq_rule="centered", base_side=64.0, n_max=16,
                            scan_range=(0.0, 1536.0), stride=16.0, gap_bound=520.0)
    rep = ap.classify(f, cfg)
    assert [c.verdict for c in rep.classes] == ["pass"] * 4
    ap.validate_chain(rep)


def test_classify_half_step_signature():
    # translate defects are invisible to growing averages but fatal to any
    # fixed window that straddles the ramp
    dom = ap.real_grid(int(round(212 / 0.05)), 0.05, origin=-106.0)
    f = ap.gallery_function("half-step", domain=dom)
    cfg = ap.ClassifyConfig(epsilon=0.25, p=1.0, window=ap.window(0.0, 1.0),
                            seq_rule="centered", base_side=4.0, n_max=16,
                            scan_range=(0.0, 8.0), stride=0.5)
    rep = ap.classify(f, cfg)
    verdicts = {c.name: c.verdict for c in rep.classes}
    assert verdicts == {"sap": "fail", "stepanov": "fail",
                        "weyl": "pass", "mean": "pass"}
    ap.validate_chain(rep)


def test_classify_inverse_sqrt_signature():
    n = 20000
    dom = ap.torus_grid(n, 4.0 / n)
    f = ap.gallery_function("periodized-inverse-sqrt", domain=dom)
    cfg = ap.ClassifyConfig(epsilon=0.25, p=1.0, window=ap.window(0.0, 1.0),
                            seq_rule="centered", base_side=1.0, n_max=4,
                            scan_range=(0.0, 4.0), stride=0.1, gap_bound=1.25)
    rep = ap.classify(f, cfg)
    verdicts = {c.name: c.verdict for c in rep.classes}
    assert verdicts["sap"] == "fail"            # unbounded spikes defeat sup control
    assert verdicts["stepanov"] == "pass"
    assert verdicts["weyl"] == "pass"
    assert verdicts["mean"] == "pass"
    ap.validate_chain(rep)


def test_classify_levitan_finite_resolution():
    # at this window scale no class resolves the recurrences, and the chain
    # must still be consistent
    dom = ap.real_grid(21600, 0.01, origin=-106.0)
    f = ap.gallery_function("levitan", domain=dom)
    cfg = ap.ClassifyConfig(epsilon=0.25, p=1.0, window=ap.window(0.0, 1.0),
                            seq_rule="centered", base_side=4.0, n_max=16,
                            scan_range=(0.0, 72.0), stride=0.5)
    rep = ap.classify(f, cfg)
    assert all(c.verdict == "fail" for c in rep.classes)
    ap.validate_chain(rep)


def test_classify_rows_are_monotone():
    dom = ap.real_grid(int(round(212 / 0.05)), 0.05, origin=-106.0)
    f = ap.gallery_function("half-step", domain=dom)
    cfg = ap.ClassifyConfig(epsilon=0.25, p=1.0, window=ap.window(0.0, 1.0),
                            seq_rule="centered", base_side=4.0, n_max=16,
                            scan_range=(0.0, 8.0), stride=0.5)
    rep = ap.classify(f, cfg)
    for row in rep.per_t:
        t, d_sup, d_step, d_weyl, d_mean = row
        assert d_sup >= d_step >= d_weyl >= d_mean


def test_classify_uc_gate_blocks_discontinuous_sap():
    # exact grid-aligned period keeps every sup distance at zero, so only the
    # uniform continuity gate can and must reject the square wave from SAP
    dom = ap.real_grid(3200, 0.05, origin=-80.0)
    sq = ap.from_callable(dom, lambda x: np.sign(np.sin(np.pi * x / 2) + 0.5))
    cfg = ap.ClassifyConfig(epsilon=0.25, p=1.0, window=ap.window(0.0, 1.0),
                            seq_rule="centered", base_side=4.0, n_max=8,
                            scan_range=(0.0, 16.0), stride=0.5, gap_bound=5.0)
    rep = ap.classify(sq, cfg)
    verdicts = {c.name: c.verdict for c in rep.classes}
    assert verdicts["sap"] == "fail"
    assert verdicts["stepanov"] == "pass"
    assert rep.uc_gap > 0.25 * np.max(np.abs(sq.trusted_values()))
    ap.validate_chain(rep)


def test_classify_inconclusive_when_span_cannot_witness():
    dom = ap.cyclic(2048)
    f = ap.eval_trig_poly(ap.trig_polynomial([(ap.character(4), 1.0)]), dom)
    cfg = ap.ClassifyConfig(epsilon=0.25, p=1.0, window=ap.window(0.0, 16.0),
                            seq_rule="centered", base_side=64.0, n_max=16,
                            scan_range=(0.0, 64.0), stride=16.0, gap_bound=520.0)
    rep = ap.classify(f, cfg)
    assert all(c.verdict == "inconclusive" for c in rep.classes)


def test_classify_report_access_and_json():
    dom = ap.cyclic(2048)
    f = ap.eval_trig_poly(ap.trig_polynomial([(ap.character(4), 1.0)]), dom)
    cfg = ap.ClassifyConfig(epsilon=0.25, p=1.0, window=ap.window(0.0, 16.0),
                            seq_rule="centered", base_side=64.0, n_max=16,
                            scan_range=(0.0, 1536.0), stride=64.0, gap_bound=520.0)
    rep = ap.classify(f, cfg)
    assert rep.verdict("sap") in ("pass", "fail", "inconclusive")
    blob = rep.to_json()
    assert "classes" in blob and "per_t" in blob
    assert blob["per_t_columns"] == ["t", "d_sup", "d_stepanov", "d_weyl", "d_mean"]


def test_validate_chain_rejects_rank_violation():
    ok = ClassVerdict(name="sap", verdict="pass", epsilon=0.25, period_count=3,
                      max_gap=1.0, gap_bound=2.0, evidence={})
    bad = ClassVerdict(name="stepanov", verdict="fail", epsilon=0.25, period_count=0,
                       max_gap=10.0, gap_bound=2.0, evidence={})
    rest = [ClassVerdict(name=n, verdict="fail", epsilon=0.25, period_count=0,
                         max_gap=10.0, gap_bound=2.0, evidence={})
            for n in ("weyl", "mean")]
    fake = ClassificationReport(classes=(ok, bad, *rest), per_t=(),
                                uc_gap=0.0, config=ap.ClassifyConfig())
    with pytest.raises(ValueError):
        ap.validate_chain(fake)
