import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quantgrad.fixedpoint import FixedPointFormat, GradientScale
from quantgrad.gradest import (
    estimate_gradient,
    expected_distribution,
    expected_probabilities,
    split_codes,
    top_index,
)
from quantgrad.oracle import ObjectiveFunction, OracleConfig, get_objective, linear_objective


def brute_force(f, point, cfg):
    """Closed-form output distribution, independent of the circuit.

    After the shift/oracle/unshift sandwich register i carries offset
    delta_i with phase C f(point + c * delta).  The inverse QFT per
    register is an n-dimensional DFT with the e^{-2 pi i} kernel.
    """
    N, d = cfg.fmt.N, cfg.d
    delta = np.where(np.arange(N) < N // 2, np.arange(N), np.arange(N) - N)
    c = cfg.coefficients()
    axes = [point[i] + c[i] * delta for i in range(d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    turns = cfg.phase_constant() * np.broadcast_to(f.evaluate(mesh), (N,) * d)
    a = np.exp(2j * np.pi * turns) / math.sqrt(N**d)
    b = np.fft.fftn(a) / math.sqrt(N**d)
    return np.abs(b.reshape(-1)) ** 2


def total_variation(p, q):
    return 0.5 * np.abs(p - q).sum()


def _cases():
    rng = np.random.default_rng(2024)
    out = []
    for i in range(20):
        d = 1 if i < 12 else 2
        n = int(rng.integers(3, 6)) if d == 1 else 3
        frac = int(rng.integers(0, n - 1))
        fmt = FixedPointFormat(n, frac)
        m = tuple(float(v) for v in rng.choice([-4.0, 2.0, 4.0, 8.0], d))
        l = float(rng.choice([0.05, 0.5, 1.0]))
        codes = rng.integers(0, fmt.N, d)
        point = [float((c - fmt.N if c >= fmt.N // 2 else c) * fmt.step) for c in codes]
        kind = i % 3
        out.append((d, fmt, m, l, point, kind))
    return out


def _objective(kind, d):
    if kind == 0:
        return linear_objective([0.7, -1.1][:d])
    if kind == 1:
        return ObjectiveFunction("quad", d, lambda *x: sum(0.3 * xi**2 + 0.2 * xi for xi in x))
    return ObjectiveFunction("trig", d, lambda *x: sum(np.sin(xi) for xi in x))


@pytest.mark.parametrize("case", _cases(), ids=lambda c: f"d{c[0]}-n{c[1].n_bits}-f{c[1].frac_bits}-k{c[5]}")
def test_matches_brute_force(case):
    d, fmt, m, l, point, kind = case
    cfg = OracleConfig.build(d, fmt, GradientScale(m if d > 1 else m[0], l, fmt.n_bits))
    f = _objective(kind, d)
    got = expected_probabilities(f, point, cfg)
    assert total_variation(got, brute_force(f, point, cfg)) < 1e-9


@pytest.mark.parametrize("g", [-1.5, -0.5, 0.0, 0.25, 1.0, 1.75])
def test_linear_exact(g):
    fmt = FixedPointFormat(4, 2)
    cfg = OracleConfig.build(1, fmt, GradientScale(4.0, 1.0, 4))
    est = estimate_gradient(linear_objective([g]), [0.5], cfg, exact=True)
    assert est.top_probability == pytest.approx(1, abs=1e-10)
    assert est.decoded[0] == pytest.approx(g)


def test_linear_two_vars_exact():
    fmt = FixedPointFormat(3, 1)
    cfg = OracleConfig.build(2, fmt, GradientScale(4.0, 1.0, 3))
    est = estimate_gradient(linear_objective([1.0, -0.5]), [0.5, -1.0], cfg, exact=True)
    assert est.decoded == pytest.approx([1.0, -0.5])
    assert est.top_outcome == "010" + "111"


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 15))
def test_linear_shift_invariance(code):
    fmt = FixedPointFormat(4, 2)
    cfg = OracleConfig.build(1, fmt, GradientScale(4.0, 1.0, 4))
    point = (code - 16 if code >= 8 else code) * fmt.step
    ref = expected_probabilities(linear_objective([0.75]), [0.0], cfg)
    assert np.allclose(expected_probabilities(linear_objective([0.75]), [point], cfg), ref, atol=1e-10)


@pytest.mark.parametrize("g", [0.3, 0.61, 1.13, -0.87])
def test_resolution_bound(g):
    fmt = FixedPointFormat(5, 2)
    cfg = OracleConfig.build(1, fmt, GradientScale(8.0, 1.0, 5))
    est = estimate_gradient(linear_objective([g]), [0.0], cfg, exact=True)
    res = cfg.scale.resolution(1)
    assert abs(est.decoded[0] - g) <= res / 2 + 1e-12


def test_negative_gradient_twos_complement():
    fmt = FixedPointFormat(4, 2)
    cfg = OracleConfig.build(1, fmt, GradientScale(4.0, 1.0, 4))
    est = estimate_gradient(get_objective("neg-linear"), [0.0], cfg, exact=True)
    assert est.codes == [0b1100]
    assert est.decoded == [-1.0]


def test_constant_function_reads_zero():
    cfg = OracleConfig.build(1, FixedPointFormat(4, 2))
    const = ObjectiveFunction("const", 1, lambda x: np.full_like(np.asarray(x, float), 3.0))
    est = estimate_gradient(const, [0.25], cfg, exact=True)
    assert est.codes == [0] and est.top_probability == pytest.approx(1)


def test_single_peak_frequency_expected():
    # g*N/m = 3.2 sits between codes: classic Fejer profile
    fmt = FixedPointFormat(4, 2)
    cfg = OracleConfig.build(1, fmt, GradientScale(4.0, 1.0, 4))
    probs = expected_probabilities(linear_objective([0.8]), [0.0], cfg)
    frac = 0.2
    want = math.sin(math.pi * frac) ** 2 / (16 * math.sin(math.pi * frac / 16) ** 2) / 16
    assert probs[3] == pytest.approx(want, rel=1e-9)
    assert top_index(probs) == 3


def test_frozen_single_variable_peak_probability():
    # frozen value: g = 1.3 on 4 bits (2 fractional), m = l = 4; g*N/m = 5.2
    want = math.sin(0.2 * math.pi) ** 2 / (16**2 * math.sin(0.2 * math.pi / 16) ** 2)
    assert want == pytest.approx(0.875590, abs=1e-6)
    fmt = FixedPointFormat(4, 2)
    cfg = OracleConfig.build(1, fmt, GradientScale.default(fmt))
    probs = expected_probabilities(get_objective("linear-1.3"), [0.0], cfg)
    assert probs[5] == pytest.approx(want, rel=1e-9)
    assert top_index(probs) == 5


def test_chi_square_sampling():
    fmt = FixedPointFormat(4, 2)
    cfg = OracleConfig.build(1, fmt, GradientScale(4.0, 1.0, 4))
    f = linear_objective([0.8])
    shots = 10**5
    est = estimate_gradient(f, [0.0], cfg, shots=shots, seed=7)
    p = est.probabilities
    keep = p * shots > 5
    obs = np.array([est.histogram.counts.get(format(i, "04b"), 0) for i in range(16)])
    exp_ = shots * p
    chi2 = np.sum((obs[keep] - exp_[keep]) ** 2 / exp_[keep])
    dof = int(keep.sum()) - 1
    # generous bound: mean + 5 sd of chi-square
    assert chi2 < dof + 5 * math.sqrt(2 * dof)


def test_seed_determinism():
    cfg = OracleConfig.build(1, FixedPointFormat(4, 2))
    f = get_objective("square")
    a = estimate_gradient(f, [0.5], cfg, seed=11)
    b = estimate_gradient(f, [0.5], cfg, seed=11)
    assert a.histogram.counts == b.histogram.counts


def test_expected_distribution_keys():
    cfg = OracleConfig.build(2, FixedPointFormat(3, 1))
    dist = expected_distribution(linear_objective([0.5, 1.0]), [0.0, 0.0], cfg)
    assert all(len(k) == 6 for k in dist)
    assert sum(dist.values()) == pytest.approx(1)


def test_split_codes():
    cfg = OracleConfig.build(2, FixedPointFormat(3, 1))
    assert split_codes("101011", cfg) == [5, 3]


def test_top_index_tie():
    assert top_index(np.array([0.1, 0.45, 0.45])) == 1


def test_record_fields():
    cfg = OracleConfig.build(1, FixedPointFormat(4, 2))
    rec = estimate_gradient(get_objective("linear-1.3"), [0.0], cfg, shots=50, seed=1).to_record()
    for key in ["function", "point", "n_bits", "frac_bits", "m", "l", "shots", "seed", "histogram",
                "top_outcome", "decoded", "oracle_calls"]:
        assert key in rec
    assert sum(rec["histogram"].values()) == 50


def test_bad_shots():
    cfg = OracleConfig.build(1, FixedPointFormat(4, 2))
    with pytest.raises(ValueError):
        estimate_gradient(get_objective("square"), [0.0], cfg, shots=0)


def test_ancillas_clean_with_check():
    cfg = OracleConfig.build(2, FixedPointFormat(3, 1))
    estimate_gradient(get_objective("valley-2d"), [-0.5, 1.0], cfg, exact=True, check=True)
