"""Tests for the truncated-matrix module.

Two independent oracles keep the implementation honest: a brute-force
series summation for column norms, and numpy.linalg.svd for singular
spectra (the module's own SVD is a one-sided Jacobi that never calls it).
"""

import math

import numpy as np
import pytest

from dirichletops.bounds import norm_bounds, schur_radius
from dirichletops.errors import DomainError, MatrixSizeError
from dirichletops.operator_matrix import (
    MAX_ENTRIES_ENV,
    build_matrix,
    operator_norm_estimate,
    read_matrix,
    schur_certificate,
    singular_values,
    tail_bounds,
    write_matrix,
)
from dirichletops.special_functions import zeta
from dirichletops.symbol import DirichletSymbol


def column_norm_sq_oracle(sym, j):
    """Brute-force sum of |a[i][j]|^2 over all i, by term recursion."""
    if j == 1:
        return 1.0
    x_sq = (sym.c2_abs * math.log(j)) ** 2
    total, term, i = 0.0, 1.0, 0
    while term > 1e-30 * max(total, 1.0):
        total += term
        i += 1
        term *= x_sq / (i * i)
    return j ** (-2.0 * sym.sigma1) * total


class TestBuildMatrix:
    def test_reference_entries(self):
        m = build_matrix(DirichletSymbol(2.0, 0.5), 4, 4)
        assert m.entries[0, 0] == 1.0
        assert np.all(m.entries[1:, 0] == 0.0)
        assert m.entries[0, 1] == pytest.approx(0.25, abs=1e-15)
        assert m.entries[1, 1] == pytest.approx(-0.5 * math.log(2) * 0.25, abs=1e-15)
        assert m.entries[2, 2] == pytest.approx(
            (0.5 * math.log(3)) ** 2 / 2.0 * 3.0**-2.0, rel=1e-14
        )

    def test_row_and_column_counts(self):
        m = build_matrix(DirichletSymbol(1.5, 0.25), 7, 12)
        assert m.row_count == 8 and m.col_count == 12
        assert m.i_max == 7 and m.j_max == 12
        assert m.entries.shape == (8, 12)
        assert not m.entries.flags.writeable

    def test_constant_symbol_single_row(self):
        m = build_matrix(DirichletSymbol(0.75, 0.0), 3, 10)
        j = np.arange(1, 11)
        assert np.allclose(m.entries[0].real, j**-0.75, rtol=1e-15)
        assert np.all(m.entries[1:] == 0.0)

    def test_column_norm_oracle(self):
        # contract: every column matches the series oracle to 1e-10 relative
        for c1, c2 in [(2.0, 0.5), (1.0, 0.5), (2 + 3j, 0.5 * np.exp(1.3j))]:
            sym = DirichletSymbol(c1, complex(c2))
            m = build_matrix(sym, 60, 40)
            norms_sq = np.sum(np.abs(m.entries) ** 2, axis=0)
            for j in (1, 2, 3, 7, 25, 40):
                assert norms_sq[j - 1] == pytest.approx(
                    column_norm_sq_oracle(sym, j), rel=1e-10
                )

    def test_q_invariance_bit_for_bit(self):
        m2 = build_matrix(DirichletSymbol(2.0, 0.5, q=2), 10, 50)
        m3 = build_matrix(DirichletSymbol(2.0, 0.5, q=3), 10, 50)
        assert np.array_equal(m2.entries, m3.entries)

    def test_modulus_depends_only_on_sigma1_and_c2_abs(self):
        m_ref = build_matrix(DirichletSymbol(2.0, 0.5), 8, 30)
        m_rot = build_matrix(DirichletSymbol(2 + 5j, 0.5 * np.exp(2j)), 8, 30)
        assert np.allclose(np.abs(m_ref.entries), np.abs(m_rot.entries), rtol=1e-13)

    def test_truncation_validation(self):
        sym = DirichletSymbol(2.0, 0.5)
        with pytest.raises(DomainError):
            build_matrix(sym, -1, 5)
        with pytest.raises(DomainError):
            build_matrix(sym, 3, 0)
        with pytest.raises(DomainError):
            build_matrix(sym, 2.5, 5)

    def test_memory_cap(self, monkeypatch):
        sym = DirichletSymbol(2.0, 0.5)
        monkeypatch.setenv(MAX_ENTRIES_ENV, "100")
        with pytest.raises(MatrixSizeError):
            build_matrix(sym, 10, 100)
        build_matrix(sym, 4, 20)  # 100 entries: exactly at the cap
        monkeypatch.setenv(MAX_ENTRIES_ENV, "not-a-number")
        with pytest.raises(MatrixSizeError):
            build_matrix(sym, 1, 1)


class TestTailBounds:
    def test_row_tail_geometric_reference(self):
        # for (2, 0.5) the row part is sum_{k>I} (1/9)^k * 4/3 in closed form
        sym = DirichletSymbol(2.0, 0.5)
        for i_max in (0, 3, 10):
            row_part = math.sqrt((4.0 / 3.0) * (1.0 / 9.0) ** (i_max + 1) / (1 - 1.0 / 9.0))
            t = tail_bounds(sym, i_max, 10**6)
            # column part at J = 1e6 adds only a few 1e-9 in absolute terms
            assert 0.0 <= t - row_part <= 1e-8

    def test_decreasing_in_both_directions(self):
        sym = DirichletSymbol(1.2, 0.3)
        assert tail_bounds(sym, 10, 100) < tail_bounds(sym, 2, 100)
        assert tail_bounds(sym, 10, 400) < tail_bounds(sym, 10, 100)
        assert tail_bounds(sym, 10, 10**4) < tail_bounds(sym, 10, 400)
        # column decay is only polynomial in J, so "small" is relative
        assert tail_bounds(sym, 60, 10**6) < 2e-3

    def test_constant_symbol_closed_form(self):
        sym = DirichletSymbol(0.75, 0.0)
        t = tail_bounds(sym, 0, 1000)
        integral = math.sqrt(1000.0**-0.5 / 0.5)
        # sharp Euler-Maclaurin tail sits just under the plain integral bound
        assert 0.9 * integral < t <= integral

    def test_boundary_symbol_infinite(self):
        assert tail_bounds(DirichletSymbol(1.0, 0.5), 10, 100) == math.inf

    def test_certifies_actual_discarded_mass(self):
        # the bound must dominate the Hilbert-Schmidt norm of everything a
        # much larger reference truncation holds outside the small one
        sym = DirichletSymbol(2.0, 0.5)
        ref = build_matrix(sym, 25, 3000)
        i_max, j_max = 6, 50
        mass = np.sum(np.abs(ref.entries) ** 2)
        kept = np.sum(np.abs(ref.entries[: i_max + 1, :j_max]) ** 2)
        discarded = math.sqrt(mass - kept)
        assert discarded <= tail_bounds(sym, i_max, j_max)


class TestOperatorNormEstimate:
    def test_one_by_one(self):
        est = operator_norm_estimate(build_matrix(DirichletSymbol(2.0, 0.5), 0, 1))
        assert est.lower == pytest.approx(1.0, abs=1e-15)
        assert est.converged

    def test_result_unpacks_as_tuple(self):
        lower, upper, iterations, converged = operator_norm_estimate(
            build_matrix(DirichletSymbol(2.0, 0.5), 5, 50)
        )
        assert lower <= upper and iterations >= 1 and converged

    def test_constant_symbol_partial_zeta(self):
        j_max = 4000
        m = build_matrix(DirichletSymbol(0.75, 0.0), 0, j_max)
        est = operator_norm_estimate(m)
        partial = float(np.sum(np.arange(1.0, j_max + 1.0) ** -1.5))
        assert est.lower**2 == pytest.approx(partial, rel=1e-12)
        assert est.converged

    def test_bracket_containment(self):
        # truncated norm^2 must land inside the certified zeta bracket
        sym = DirichletSymbol(2.0, 0.5)
        m = build_matrix(sym, 60, 5000)
        est = operator_norm_estimate(m, tol=1e-12, max_iter=1000)
        rep = norm_bounds(sym)
        assert m.tail_bound < 0.01
        assert rep.lower_sq - 5e-3 <= est.lower**2 <= rep.upper_sq + 5e-3
        assert est.upper == est.lower + m.tail_bound
        assert est.converged

    def test_monotone_in_truncation(self):
        sym = DirichletSymbol(1.5, 0.4)
        lo_small = operator_norm_estimate(build_matrix(sym, 4, 40)).lower
        lo_rows = operator_norm_estimate(build_matrix(sym, 9, 40)).lower
        lo_cols = operator_norm_estimate(build_matrix(sym, 4, 160)).lower
        assert lo_small <= lo_rows + 1e-14
        assert lo_small <= lo_cols + 1e-14

    def test_non_convergence_is_flagged(self):
        m = build_matrix(DirichletSymbol(1.0, 0.5), 20, 200)
        est = operator_norm_estimate(m, tol=1e-15, max_iter=1)
        assert not est.converged
        assert est.iterations == 1
        assert est.lower > 0.0  # still a valid lower bound

    def test_parameter_validation(self):
        m = build_matrix(DirichletSymbol(2.0, 0.5), 2, 5)
        with pytest.raises(DomainError):
            operator_norm_estimate(m, tol=0.0)
        with pytest.raises(DomainError):
            operator_norm_estimate(m, max_iter=0)


class TestSingularValues:
    def test_against_dense_svd_oracle(self):
        # contract: 1e-8 relative agreement on sizes <= 200
        m = build_matrix(DirichletSymbol(2 + 1j, 0.5 * np.exp(0.7j)), 30, 2000)
        spec = singular_values(m, 16)
        oracle = np.linalg.svd(m.entries, compute_uv=False)[:16]
        top = oracle[0]
        for mine, ref in zip(spec.values, oracle):
            assert abs(mine - ref) <= 1e-8 * ref + 1e-14 * top
        assert bool(spec.converged.all())
        assert spec.truncation == (30, 2000)

    def test_random_dense_oracle(self):
        rng = np.random.default_rng(42)
        a = rng.standard_normal((80, 80)) + 1j * rng.standard_normal((80, 80))
        m = build_matrix(DirichletSymbol(2.0, 0.5), 79, 80)
        object.__setattr__(m, "entries", a)
        spec = singular_values(m, 80)
        oracle = np.linalg.svd(a, compute_uv=False)
        assert np.max(np.abs(spec.values - oracle) / oracle) < 1e-10

    def test_sorted_and_nonnegative(self):
        spec = singular_values(build_matrix(DirichletSymbol(1.0, 0.5), 20, 300), 15)
        assert np.all(np.diff(spec.values) <= 0)
        assert np.all(spec.values >= 0)

    def test_constant_symbol_rank_one(self):
        j_max = 500
        m = build_matrix(DirichletSymbol(0.75, 0.0), 5, j_max)
        spec = singular_values(m, 3)
        expected = math.sqrt(float(np.sum(np.arange(1.0, j_max + 1.0) ** -1.5)))
        assert spec.values[0] == pytest.approx(expected, rel=1e-13)
        assert spec.values[1] == pytest.approx(0.0, abs=1e-14)
        assert spec.values[2] == pytest.approx(0.0, abs=1e-14)

    def test_phase_invariance(self):
        specs = [
            singular_values(build_matrix(DirichletSymbol(c1, complex(c2)), 25, 800), 10)
            for c1, c2 in [(2.0, 0.5), (2 + 5j, 0.5), (2.0, 0.5 * np.exp(2j))]
        ]
        for other in specs[1:]:
            assert np.max(np.abs(specs[0].values - other.values)) < 1e-10

    def test_approx_number_dominance(self):
        # sigma_(N+1) of any truncation is below the geometric bound
        spec = singular_values(build_matrix(DirichletSymbol(2.0, 0.5), 30, 2000), 16)
        for n in range(1, 16):
            assert spec.values[n] <= math.sqrt(1.5) * (1.0 / 3.0) ** n + 1e-9

    def test_count_validation(self):
        m = build_matrix(DirichletSymbol(2.0, 0.5), 4, 100)
        with pytest.raises(DomainError):
            singular_values(m, 0)
        with pytest.raises(DomainError):
            singular_values(m, 6)  # min(I+1, J) = 5

    def test_non_convergence_flags(self, monkeypatch):
        import dirichletops.operator_matrix as om

        monkeypatch.setattr(om, "_JACOBI_MAX_SWEEPS", 0)
        m = build_matrix(DirichletSymbol(1.0, 0.5), 10, 200)
        spec = singular_values(m, 5)
        assert not bool(spec.converged.all())


class TestSchurCertificate:
    def test_verdict_true_at_schur_radius(self):
        sym = DirichletSymbol(2.0, 0.5)
        r = schur_radius(2.0, 0.5)
        cert = schur_certificate(sym, r, 60, 5000)
        assert cert.verdict
        assert cert.alpha == 1.0
        assert cert.beta == pytest.approx(zeta(4.0 - r * 0.5).value, rel=1e-14)
        assert abs(cert.max_column_residual) < 1e-12
        assert abs(cert.max_row_residual) < 1e-12
        assert cert.implied_norm_bound == pytest.approx(math.sqrt(cert.beta), rel=1e-12)

    def test_implied_bound_dominates_computed_norm(self):
        sym = DirichletSymbol(2.0, 0.5)
        cert = schur_certificate(sym, schur_radius(2.0, 0.5), 40, 2000)
        est = operator_norm_estimate(build_matrix(sym, 40, 2000))
        assert est.lower <= cert.implied_norm_bound + 1e-12

    def test_verdict_false_below_root_interval(self):
        # P(0.1) > 0 for (2, 0.5): deep rows must violate their inequality
        cert = schur_certificate(DirichletSymbol(2.0, 0.5), 0.1, 60, 5000)
        assert not cert.verdict
        assert cert.max_row_residual > 1.0
        assert cert.implied_norm_bound is None
        # the column identities hold for every r regardless of the verdict
        assert abs(cert.max_column_residual) < 1e-12

    def test_boundary_symbol_at_r_one(self):
        cert = schur_certificate(DirichletSymbol(1.0, 0.5), 1.0, 60, 5000)
        assert cert.verdict
        assert cert.beta == pytest.approx(zeta(1.5).value, rel=1e-13)
        assert abs(cert.max_row_residual) < 1e-10

    def test_random_compact_symbols_accept_their_radius(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            margin = float(rng.uniform(0.1, 2.5))
            sigma1 = 0.5 + margin
            c = float(rng.uniform(0.05, 0.95)) * margin
            sym = DirichletSymbol(sigma1, c)
            r = schur_radius(sigma1, c)
            # r*|c2|*log(400) can exceed 10, so the exponential-series
            # columns need a deep truncation to resolve below the slack
            cert = schur_certificate(sym, r, 64, 400)
            assert cert.verdict, (sigma1, c, cert)

    def test_tails_are_recorded(self):
        cert = schur_certificate(DirichletSymbol(2.0, 0.5), 0.5, 20, 200)
        assert cert.column_tail >= 0.0
        assert cert.row_tail > 0.0

    def test_parameter_validation(self):
        sym = DirichletSymbol(2.0, 0.5)
        for bad_r in (0.0, -0.5, 1.5, math.inf, math.nan):
            with pytest.raises(DomainError):
                schur_certificate(sym, bad_r, 10, 50)
        with pytest.raises(DomainError):
            schur_certificate(DirichletSymbol(0.75, 0.0), 0.5, 10, 50)


class TestMatrixDump:
    def test_round_trip_bit_exact(self, tmp_path):
        m = build_matrix(DirichletSymbol(2 + 1j, 0.5 * np.exp(1j)), 4, 7)
        path = tmp_path / "matrix.txt"
        write_matrix(m, path)
        header = path.read_text().splitlines()[0]
        assert header == "4 7"
        assert np.array_equal(read_matrix(path), m.entries)

    def test_malformed_header_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("only-one-token\n")
        with pytest.raises(DomainError):
            read_matrix(path)
