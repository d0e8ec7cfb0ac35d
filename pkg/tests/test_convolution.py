import numpy as np
import pytest

import apkit as ap


# -- direct summation oracles -------------------------------------------------------------

def conv_oracle_real(fv, gv, h):
    n1, n2 = len(fv), len(gv)
    out = np.zeros(n1 + n2 - 1, dtype=complex)
    for i in range(n1):
        for j in range(n2):
            out[i + j] += fv[i] * gv[j] * h
    return out


def conv_oracle_cyclic(fv, gv):
    n = len(fv)
    out = np.zeros(n, dtype=complex)
    for i in range(n):
        for j in range(n):
            out[(i + j) % n] += fv[i] * gv[j]
    return out


def autocorr_oracle_cyclic(fv):
    n = len(fv)
    out = np.zeros(n, dtype=complex)
    for x in range(n):
        out[x] = np.mean(fv[(x + np.arange(n)) % n] * np.conj(fv))
    return out


def test_convolve_matches_oracle_real_grid():
    rng = np.random.default_rng(59)
    h = 0.25
    d1 = ap.real_grid(12, h, origin=0.0)
    d2 = ap.real_grid(12, h, origin=-1.0)
    fv = rng.standard_normal(12) + 1j * rng.standard_normal(12)
    gv = rng.standard_normal(12) + 1j * rng.standard_normal(12)
    out = ap.convolve(ap.grid_function(d1, fv), ap.grid_function(d2, gv))
    np.testing.assert_allclose(out.values, conv_oracle_real(fv, gv, h), atol=1e-12)
    ax = out.domain.axes[0]
    assert ax.n == 23
    assert ax.origin == pytest.approx(0.0 + -1.0 + h / 2)
    # operands must agree in kind, size, and step (only origins may differ)
    with pytest.raises(ValueError):
        ap.convolve(ap.grid_function(d1, fv),
                    ap.grid_function(ap.real_grid(9, h), np.ones(9)))


def test_convolve_matches_oracle_cyclic():
    rng = np.random.default_rng(61)
    dom = ap.cyclic(17)
    fv = rng.standard_normal(17) + 1j * rng.standard_normal(17)
    gv = rng.standard_normal(17) + 1j * rng.standard_normal(17)
    out = ap.convolve(ap.grid_function(dom, fv), ap.grid_function(dom, gv))
    np.testing.assert_allclose(out.values, conv_oracle_cyclic(fv, gv), atol=1e-12)


def test_convolve_commutes():
    rng = np.random.default_rng(67)
    dom = ap.cyclic(23)
    f = ap.grid_function(dom, rng.standard_normal(23))
    g = ap.grid_function(dom, rng.standard_normal(23))
    np.testing.assert_allclose(ap.convolve(f, g).values, ap.convolve(g, f).values,
                               atol=1e-13)


def test_convolve_wrap_origin_mismatch_raises():
    f = ap.constant(ap.torus_grid(16, 0.25, origin=0.0), 1.0)
    g = ap.constant(ap.torus_grid(16, 0.25, origin=1.0), 1.0)
    with pytest.raises(ValueError):
        ap.convolve(f, g)


def test_convolve_single_cell_unit_mass_is_identity():
    rng = np.random.default_rng(71)
    h = 0.1
    n, j = 30, 4
    dom = ap.real_grid(n, h, origin=0.0)
    f = ap.grid_function(dom, rng.standard_normal(n))
    dvals = np.zeros(n)
    dvals[j] = 1.0 / h                     # unit mass concentrated in cell j
    d = ap.grid_function(ap.real_grid(n, h, origin=0.0), dvals)
    out = ap.convolve(f, d)
    # zero-extension: f reappears shifted by j cells, zeros elsewhere
    expected = np.zeros(2 * n - 1, dtype=complex)
    expected[j:j + n] = f.values
    np.testing.assert_allclose(out.values, expected, atol=1e-12)
    # the cell carrying f's first sample is centered at x_f0 + x_mass
    xs = out.domain.coordinates()[0]
    x_f0 = dom.coordinates()[0][0]
    x_mass = dom.coordinates()[0][j]
    assert xs[j] == pytest.approx(x_f0 + x_mass)


def test_convolve_indicator_hat():
    # indicator * indicator is the unit triangle with peak 1 at x=1
    h = 0.01
    dom = ap.real_grid(400, h, origin=-1.0)
    ind = ap.from_callable(dom, lambda x: ((x >= 0) & (x < 1)).astype(float))
    hat = ap.convolve(ind, ind)
    xs = hat.domain.axes[0].coordinates()
    tri = np.clip(1 - np.abs(xs - 1.0), 0, None)
    assert np.max(np.abs(hat.values.real - tri)) < 2 * h
    peak = xs[np.argmax(hat.values.real)]
    assert peak == pytest.approx(1.0, abs=2 * h)


def test_convolve_measure_point_mass_identity():
    rng = np.random.default_rng(73)
    dom = ap.cyclic(24)
    f = ap.grid_function(dom, rng.standard_normal(24))
    out = ap.convolve_measure(f, ap.atomic_measure([(0.0, 1.0)]))
    np.testing.assert_array_equal(out.values, f.values)


def test_convolve_measure_periodic_average():
    dom = ap.real_grid(1600, 0.05, origin=-40.0)
    f = ap.character(0.25).sample(dom)      # period 4
    mu = ap.atomic_measure([(0.0, 0.5), (4.0, 0.5)])
    out = ap.convolve_measure(f, mu)
    sl = out.trusted_slices()
    np.testing.assert_allclose(out.values[sl], f.values[sl], atol=1e-12)


def test_convolve_measure_translate_superposition():
    rng = np.random.default_rng(79)
    dom = ap.cyclic(32)
    f = ap.grid_function(dom, rng.standard_normal(32) + 1j * rng.standard_normal(32))
    mu = ap.atomic_measure([(3.0, 2.0), (10.0, -1j)])
    want = ap.add(ap.scale(ap.translate(f, 3), 2.0),
                  ap.scale(ap.translate(f, 10), -1j))
    out = ap.convolve_measure(f, mu)
    np.testing.assert_allclose(out.values, want.values, atol=1e-13)


def test_convolve_measure_translation_bound():
    # smearing by a measure cannot amplify translation defects beyond the
    # total variation factor
    rng = np.random.default_rng(83)
    dom = ap.cyclic(48)
    K = ap.window(0.0, 6.0)
    for _ in range(50):
        f = ap.grid_function(dom, rng.standard_normal(48) + 1j * rng.standard_normal(48))
        atoms = [(float(rng.integers(0, 48)), complex(rng.standard_normal(), rng.standard_normal()))
                 for _ in range(3)]
        mu = ap.atomic_measure(atoms)
        tv = sum(abs(c) for _, c in atoms)
        t = int(rng.integers(1, 48))
        smeared = ap.convolve_measure(f, mu)
        lhs = float(ap.stepanov_norm(ap.sub(smeared, ap.translate(smeared, t)), K, 1.0))
        rhs = tv * float(ap.stepanov_norm(ap.sub(f, ap.translate(f, t)), K, 1.0))
        assert lhs <= rhs + 1e-9


def test_eberlein_projects_onto_characters():
    # chi (*) chi recovers chi and distinct frequencies annihilate
    dom = ap.cyclic(64)
    seq = ap.VanHoveSequence(dom, "full", base_side=1.0, n_max=1)
    chi5 = ap.character(5).sample(dom)
    same = ap.eberlein(chi5, chi5, seq)
    np.testing.assert_allclose(same.function.values, chi5.values, atol=1e-12)
    chi9 = ap.character(9).sample(dom)
    cross = ap.eberlein(chi5, chi9, seq)
    assert np.max(np.abs(cross.function.values)) < 1e-12


def test_eberlein_matches_autocorr_oracle_on_cyclic():
    rng = np.random.default_rng(89)
    dom = ap.cyclic(32)
    f = ap.grid_function(dom, rng.standard_normal(32) + 1j * rng.standard_normal(32))
    seq = ap.VanHoveSequence(dom, "full", base_side=1.0, n_max=1)
    got = ap.eberlein(f, ap.involution(f), seq)
    np.testing.assert_allclose(got.function.values, autocorr_oracle_cyclic(f.values),
                               atol=1e-12)


def test_eberlein_autocorr_peak_is_mean_square():
    dom = ap.cyclic(256)
    poly = ap.trig_polynomial([(ap.character(5), 3.0), (ap.character(17), 4j)])
    f = ap.eval_trig_poly(poly, dom)
    seq = ap.VanHoveSequence(dom, "full", base_side=1.0, n_max=1)
    res = ap.eberlein(f, ap.involution(f), seq)
    at_zero = res.function.values[0]
    assert at_zero == pytest.approx(25.0, abs=1e-9)
    assert abs(at_zero - np.mean(np.abs(f.values) ** 2)) < 1e-9


def test_eberlein_character_orthogonality_on_line():
    # oscillatory average over [-n,n] is bounded by C/(n |k-l|)
    h = 0.125
    half = 1002.0
    dom = ap.real_grid(int(round(2 * half / h)), h, origin=-half)
    seq = ap.VanHoveSequence(dom, "centered", base_side=2.0, n_max=1000)
    ew = ap.window(-h / 2, h)
    rng = np.random.default_rng(97)
    for _ in range(3):
        k = float(rng.uniform(-1.0, 1.0))
        l = k + float(rng.choice([-1, 1])) * float(rng.uniform(0.1, 0.8))
        fk = ap.character(k).sample(dom)
        fl = ap.character(l).sample(dom)
        res = ap.eberlein(fk, fl, seq, eval_window=ew, n_max=1000)
        assert abs(res.function.values.ravel()[0]) < 1e-2
    fk = ap.character(0.37).sample(dom)
    res = ap.eberlein(fk, ap.involution(fk), seq, eval_window=ew, n_max=1000)
    assert abs(res.function.values.ravel()[0] - 1.0) < 1e-6


def test_eberlein_needs_eval_window_off_wrap():
    dom = ap.real_grid(400, 0.1, origin=-20.0)
    f = ap.constant(dom, 1.0)
    seq = ap.VanHoveSequence(dom, "centered", base_side=2.0, n_max=8)
    with pytest.raises(ValueError):
        ap.eberlein(f, f, seq)


def test_eberlein_probes_and_status():
    dom = ap.cyclic(64)
    f = ap.character(3).sample(dom)
    seq = ap.VanHoveSequence(dom, "full", base_side=1.0, n_max=1)
    res = ap.eberlein(f, ap.involution(f), seq, probe_xs=[(0.0,), (5.0,)])
    assert [x for x, _ in res.probes] == [0.0, 5.0]
    assert res.estimate.value == res.probes[0][1].value
    assert all(est.status == "converged" for _, est in res.probes)
    assert res.status in ("converged", "not-converged", "support-exhausted")
    blob = res.to_json()
    assert "probes" in blob and "status" in blob
