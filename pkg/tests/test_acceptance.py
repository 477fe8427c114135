"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the verdict lines are printed
straight to the terminal regardless of capture settings.
"""

import contextlib
import math
import time
import warnings

import numpy as np
import pytest

from decotrace import (
    BoundState,
    DoubleGaussian,
    MatrixElementParams,
    MomentumGrid,
    Scenario,
    apply_kernel,
    closed_form_comparison,
    critical_length,
    displace_signal,
    kernel_gaussian,
    kernel_quadrature,
    mix_branches,
    negativity,
    parse_scenario_file,
    pure_state_negativity,
    schmidt_decompose,
    sweep,
    tabulate,
    threshold_check,
)
from decotrace.decoherence import QUADRATURE_TOL, _normalized_quadrature
from decotrace.report import to_csv
from decotrace.scenario import TORR

from conftest import gaussian_state

CM2 = 1e-4


@pytest.fixture
def criterion(capsys):
    @contextlib.contextmanager
    def run(number, title):
        detail = {}
        try:
            yield detail
        except BaseException as exc:
            with capsys.disabled():
                print(f"\nFAIL  criterion {number:>2}: {title} -- {exc!s:.200}")
            raise
        extra = ", ".join(f"{k}={v}" for k, v in detail.items())
        with capsys.disabled():
            print(f"\nPASS  criterion {number:>2}: {title}" + (f" ({extra})" if extra else ""))
    return run


def argon(pressure_torr=5.0):
    return Scenario(pressure=pressure_torr * TORR, temperature=300.0,
                    cross_section=1e-18 * CM2, path_length=0.10,
                    photoelectron_energy=1.0 * 1.602176634e-19,
                    sigma_p=1e8, sigma_c=1e7, label="argon")


def mixed_state(f, sigma_q, N):
    g = f.grid_i
    coherent = apply_kernel(f, kernel_gaussian(sigma_q, 0.0, g))
    decohered = apply_kernel(f, kernel_gaussian(sigma_q, N, g))
    return mix_branches(coherent, decohered, N)


def test_c01_argon_ionization(criterion):
    with criterion(1, "argon ionization reproduction") as d:
        t0 = time.perf_counter()
        v = threshold_check(argon())
        bundled = threshold_check(parse_scenario_file("@argon_ionization"))
        elapsed = time.perf_counter() - t0
        assert v.N == pytest.approx(1.6, rel=0.05)
        assert v.sigma_q2 == pytest.approx(1.3e19, rel=0.05)
        assert v.lhs == pytest.approx(2.1e19, rel=0.10)
        assert v.survives is False
        assert bundled.lhs == pytest.approx(v.lhs, rel=1e-12)
        assert bundled.survives is False
        assert elapsed < 1.0
        d.update(N=f"{v.N:.4g}", sigma_q2=f"{v.sigma_q2:.4g}", lhs=f"{v.lhs:.4g}",
                 seconds=f"{elapsed:.3g}")


def test_c02_rayleigh(criterion):
    with criterion(2, "Rayleigh reproduction") as d:
        t0 = time.perf_counter()
        s = argon().replace(photoelectron_energy=None, recoil_sigma_q2=1e8,
                            interaction_number=1e-5, cross_section=1e-30)
        v = threshold_check(s)
        bundled = threshold_check(parse_scenario_file("@rayleigh_scattering"))
        elapsed = time.perf_counter() - t0
        assert v.lhs == pytest.approx(1e3, rel=1e-12)
        assert v.survives is True
        assert bundled.lhs == pytest.approx(1e3, rel=1e-12) and bundled.survives
        assert elapsed < 1.0
        d.update(lhs=f"{v.lhs:.4g}", seconds=f"{elapsed:.3g}")


def test_c03_low_pressure_sweep(criterion):
    with criterion(3, "low-pressure ionization sweep") as d:
        t0 = time.perf_counter()
        res = sweep(argon(), "pressure", [p * TORR for p in (0.01, 0.1, 1.0, 5.0)])
        elapsed = time.perf_counter() - t0
        assert len(res) == 4
        assert not any(v.survives for v in res)
        assert elapsed < 1.0
        d.update(min_lhs=f"{min(v.lhs for v in res):.3g}", seconds=f"{elapsed:.3g}")


def test_c04_semigroup(criterion):
    with criterion(4, "Gaussian kernel semigroup") as d:
        rng = np.random.default_rng(20260401)
        worst = 0.0
        for _ in range(100):
            sigma_q = float(rng.uniform(0.1, 5.0))
            n1, n2 = (float(x) for x in rng.uniform(0.0, 10.0, size=2))
            grid = MomentumGrid.symmetric(float(rng.uniform(1.0, 10.0)),
                                          int(rng.integers(16, 65)))
            lhs = (kernel_gaussian(sigma_q, n1, grid).values.real
                   * kernel_gaussian(sigma_q, n2, grid).values.real)
            rhs = kernel_gaussian(sigma_q, n1 + n2, grid).values.real
            # relative error only where the reference is a normal float
            mask = rhs > 1e-300
            rel = np.abs(lhs[mask] - rhs[mask]) / rhs[mask]
            worst = max(worst, float(rel.max()))
            assert rel.max() <= 1e-12
            assert not np.any(kernel_gaussian(sigma_q, n1, grid).values.imag)
        d.update(cases=100, worst_rel=f"{worst:.2e}")


def test_c05_validity(criterion):
    with criterion(5, "density-matrix validity") as d:
        rng = np.random.default_rng(5)
        t0 = time.perf_counter()
        worst_eig = math.inf
        for _ in range(20):
            ratio = float(rng.uniform(1.5, 10.0))
            N = float(rng.uniform(0.0, 8.0))
            f = gaussian_state(ratio, n_points=32)
            sigma_q = float(rng.uniform(0.3, 3.0))
            rho = mixed_state(f, sigma_q, N)
            v = rho.values
            assert np.max(np.abs(v - v.conj().T)) <= 1e-10
            assert abs(np.trace(v) - 1.0) <= 1e-10
            eig = rho.check_validity()
            worst_eig = min(worst_eig, float(eig.min()))
            assert eig.min() >= -1e-8
        elapsed = time.perf_counter() - t0
        assert elapsed < 30.0
        d.update(cases=20, min_eig=f"{worst_eig:.2e}", seconds=f"{elapsed:.3g}")


N_LADDER = (0.0, 0.5, 1.0, 2.0, 4.0, 8.0)


def test_c06_monotonicity(criterion):
    with criterion(6, "negativity non-increasing in N") as d:
        for ratio in (2, 4, 8):
            f = gaussian_state(ratio, n_points=32)
            neg = [negativity(mixed_state(f, 1.0, N)) for N in N_LADDER]
            for a, b in zip(neg, neg[1:]):
                assert b <= a + 1e-8, f"ratio {ratio}: {neg}"
            d[f"ratio{ratio}"] = f"{neg[0]:.3g}->{neg[-1]:.3g}"


def test_c07_pure_state_cross_check(criterion):
    with criterion(7, "pure-state negativity vs Schmidt spectrum") as d:
        worst = 0.0
        for ratio in (2, 4, 8):
            f = gaussian_state(ratio, n_points=32)
            direct = negativity(apply_kernel(f, kernel_gaussian(1.0, 0.0, f.grid_i)))
            spectral = pure_state_negativity(schmidt_decompose(f))
            worst = max(worst, abs(direct - spectral))
            assert direct == pytest.approx(spectral, abs=1e-4)
        d.update(worst_abs=f"{worst:.2e}")


def test_c08_separability_floor(criterion):
    with criterion(8, "product states stay separable") as d:
        rng = np.random.default_rng(8)
        f = tabulate(DoubleGaussian(1.0, 1.0), MomentumGrid.symmetric(5.0, 32),
                     MomentumGrid.symmetric(5.0, 32))
        values = [0.0] + [float(x) for x in rng.uniform(0.0, 8.0, size=5)]
        worst = 0.0
        for N in values:
            rho = mixed_state(f, 1.0, N)
            worst = max(worst, negativity(rho))
            assert negativity(rho) <= 1e-8
            assert negativity(apply_kernel(f, kernel_gaussian(1.0, N, f.grid_i))) <= 1e-8
        d.update(max_negativity=f"{worst:.2e}")


def test_c09_quadrature_contract(criterion, tmp_path):
    with criterion(9, "quadrature kernel contract") as d:
        p = MatrixElementParams(BoundState(1.0))
        grid = MomentumGrid.symmetric(3.0, 21)
        k = kernel_quadrature(p, grid)
        v = k.values
        assert np.max(np.abs(v - v.conj().T)) <= 1e-12
        assert np.all(np.diag(v) == 1.0)
        assert np.max(np.abs(v)) <= 1 + 1e-10
        coarse = _normalized_quadrature(p, grid, 1024)
        fine = _normalized_quadrature(p, grid, 2048)
        change = float(np.max(np.abs(fine - coarse)))
        assert change <= QUADRATURE_TOL
        rows = closed_form_comparison(p, grid)
        header = tuple(rows[0])
        report = tmp_path / "closed_form_comparison.csv"
        report.write_text(to_csv(header, [tuple(r.values()) for r in rows]), encoding="utf-8")
        assert report.read_text().count("\n") == len(rows) + 1
        discrepancy = max(abs(r["diag_discrepancy"]) for r in rows)
        d.update(doubling_change=f"{change:.1e}", diag_discrepancy=f"{discrepancy:.1e}",
                 report=report.name)


def _signal(grid, var):
    psi = np.exp(-grid.points ** 2 / (4 * var))
    rho = np.outer(psi, psi)
    return rho / np.trace(rho)


def _variance(rho, grid):
    p = np.diag(rho).real
    p = p / p.sum()
    m = np.sum(p * grid.points)
    return float(np.sum(p * (grid.points - m) ** 2))


def test_c10_displacement(criterion):
    with criterion(10, "displacement convolution") as d:
        g = MomentumGrid.symmetric(6.0, 64)
        rho = _signal(g, 1.0)
        ident = float(np.max(np.abs(displace_signal(rho, BoundState(g.spacing / 100), g) - rho)))
        assert ident <= 1e-6
        g2 = MomentumGrid.symmetric(10.0, 128)
        rho2 = _signal(g2, 1.0)
        with warnings.catch_warnings():
            warnings.simplefilter("error", RuntimeWarning)
            out = displace_signal(rho2, BoundState(1.0), g2)
        v0, v1 = _variance(rho2, g2), _variance(out, g2)
        rel = abs((v1 - v0) - 1.0) / (v0 + 1.0)
        assert v1 == pytest.approx(v0 + 1.0, rel=0.02)
        tr = abs(np.trace(out).real - 1.0)
        assert tr <= 1e-10
        d.update(identity=f"{ident:.1e}", variance_rel=f"{rel:.1e}", trace=f"{tr:.1e}")


def test_c11_critical_length(criterion):
    with criterion(11, "critical-length bracketing") as d:
        cases = [
            argon(),
            argon(0.01).replace(label="argon_0.01torr"),
            Scenario(pressure=666.61, cross_section=1e-24, path_length=1.0,
                     recoil_sigma_q2=1e12, sigma_p=1e8, sigma_c=2e7, label="direct"),
        ]
        for s in cases:
            L = critical_length(s)
            below = threshold_check(s.replace(path_length=L * (1 - 1e-3)))
            above = threshold_check(s.replace(path_length=L * (1 + 1e-3)))
            assert below.survives and not above.survives, s.label
            d[s.label or "case"] = f"{L:.3g} m"
