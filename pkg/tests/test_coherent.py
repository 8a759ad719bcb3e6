import math

import numpy as np
import pytest

from symdisc.coherent import (
    CoherentFamily,
    analytic_gram,
    bound_vs_alpha,
    central_difference,
    coefficient_moduli,
    coherent_overlap,
    derivative_residual,
    find_crossings,
    fock_vectors,
    phase_unitary,
    symmetric_set,
)
from symdisc.errors import BadGrid, CutoffTooLarge, OutOfRange
from symdisc.states import coefficient_moduli_from_gram, gram, verify_symmetry


def poisson_folded(n, x, terms=400):
    """Independent oracle: photon-number distribution folded mod N, in exact rationals where possible."""
    out = [0.0] * n
    if x == 0:
        out[0] = 1.0
        return out
    term = math.exp(-x)
    for m in range(terms):
        out[m % n] += term
        term *= x / (m + 1)
    return out


def fam(n, x):
    return CoherentFamily.from_alpha_sq(n, x)


def test_family_amplitudes():
    f = CoherentFamily(1.5 - 0.5j, 6)
    np.testing.assert_allclose(np.abs(f.amplitudes), abs(f.alpha), atol=1e-15)
    assert f.amplitudes[0] == pytest.approx(f.alpha)
    assert f.alpha_sq == pytest.approx(2.5)


def test_overlap_values():
    f = fam(2, 1.0)
    assert coherent_overlap(f, 3, 3) == 1
    assert coherent_overlap(f, 1, 0) == pytest.approx(math.exp(-2), abs=1e-16)
    g = fam(7, 3.3)
    for j in range(7):
        for k in range(7):
            assert abs(coherent_overlap(g, j, k)) <= 1.0


def test_moduli_at_zero():
    for n in range(2, 13):
        np.testing.assert_allclose(coefficient_moduli(fam(n, 0.0)), np.eye(n)[0], atol=1e-15)


def test_two_state_closed_form():
    for x in np.linspace(0, 5, 37):
        m = coefficient_moduli(fam(2, x))
        assert m[0] == pytest.approx((1 + math.exp(-2 * x)) / 2, abs=1e-14)
        assert m[1] == pytest.approx((1 - math.exp(-2 * x)) / 2, abs=1e-14)


def test_large_amplitude_limit():
    m = coefficient_moduli(fam(10, 20.0))
    np.testing.assert_allclose(m, poisson_folded(10, 20.0), atol=1e-13)
    assert np.all(np.abs(m - 0.1) <= 0.05)


@pytest.mark.parametrize("method", ["fourier", "series"])
def test_moduli_match_oracle(method):
    for n in (2, 3, 5, 10, 16):
        for x in (0.1, 1.0, 4.0, 12.5, 25.0):
            m = coefficient_moduli(fam(n, x), method)
            assert abs(m.sum() - 1) <= 1e-10
            assert m.min() >= -1e-12
            np.testing.assert_allclose(m, poisson_folded(n, x), atol=1e-13)


def test_series_is_relatively_accurate():
    m = coefficient_moduli(fam(10, 0.01), "series")
    exact9 = math.exp(-0.01) * 0.01**9 / math.factorial(9)
    assert m[9] == pytest.approx(exact9, rel=1e-12)


def test_fourier_matches_generic_pipeline():
    for n in range(2, 17):
        for x in (0.0, 0.3, 2.0, 9.0, 25.0):
            f = fam(n, x)
            generic = coefficient_moduli_from_gram(analytic_gram(f))
            assert np.max(np.abs(generic - coefficient_moduli(f))) <= 1e-12


def test_approach_to_uniform():
    for n in range(2, 11):
        far = np.max(np.abs(coefficient_moduli(fam(n, 25.0)) - 1 / n))
        near = np.max(np.abs(coefficient_moduli(fam(n, 16.0)) - 1 / n))
        assert far <= near


def test_sweep_two_states():
    grid = np.linspace(0, 5, 101)
    table = bound_vs_alpha(2, grid)
    np.testing.assert_allclose(table.bound, 1 - np.exp(-2 * grid), atol=1e-12)
    assert table.nondecreasing
    np.testing.assert_allclose(table.moduli.sum(axis=1), 1, atol=1e-10)


def test_sweep_at_zero():
    for n in (2, 5, 10):
        assert bound_vs_alpha(n, [0.0]).bound[0] == 0.0


def test_sweep_bad_grid():
    for bad in ([], [1.0, 1.0], [2.0, 1.0], [-1.0, 0.0]):
        with pytest.raises(BadGrid):
            bound_vs_alpha(3, bad)


def test_sweep_ten_states_monotone():
    table = bound_vs_alpha(10, np.linspace(0, 10, 1000))
    assert table.nondecreasing or table.max_decrease <= 1e-12
    np.testing.assert_allclose(table.bound, 10 * table.moduli.min(axis=1), atol=0)


def test_derivative_two_state():
    # d/dx (1 - e^{-2x})/2 = e^{-2x} = |c_0|^2 - |c_1|^2
    assert central_difference(2, 1.0, 1) == pytest.approx(math.exp(-2), abs=1e-8)
    assert derivative_residual(fam(2, 1.0), 1, 1e-4) <= 1e-8


def test_derivative_identity_grid():
    for n in range(2, 11):
        for x in (0.1, 1.0, 5.0):
            for r in range(n):
                assert derivative_residual(fam(n, x), r, 1e-4) <= 1e-8


def test_derivative_step_range():
    with pytest.raises(OutOfRange):
        derivative_residual(fam(3, 1.0), 0, 1e-2)


def test_no_crossings_for_two_states():
    assert find_crossings(2, 10.0) == []


def test_crossings_ten_states():
    found = find_crossings(10, 10.0)
    assert found
    for c in found:
        # the index that takes over is the one whose derivative vanishes there
        m = coefficient_moduli(fam(10, c.alpha_sq), "series")
        assert abs(m[c.incoming] - m[c.outgoing]) <= 1e-8
        assert abs(central_difference(10, c.alpha_sq, c.incoming)) <= 1e-6
        assert derivative_residual(fam(10, c.alpha_sq), c.incoming, 1e-4) <= 1e-6
    # observed order: the weakest index steps up by one (mod N) at every crossing
    assert [c.outgoing for c in found] == [9, 0, 1, 2, 3]
    assert all(c.incoming == (c.outgoing + 1) % 10 for c in found)


@pytest.mark.parametrize("n,top", [(3, 15.0), (4, 20.0), (6, 30.0), (8, 30.0), (12, 30.0), (16, 30.0)])
def test_crossings_step_by_one(n, top):
    found = find_crossings(n, top)
    assert found[0].outgoing == n - 1
    assert all(c.incoming == (c.outgoing + 1) % n for c in found)
    assert all(a.alpha_sq < b.alpha_sq for a, b in zip(found, found[1:]))


def test_crossings_stop_when_unresolvable():
    with pytest.warns(RuntimeWarning, match="not resolvable"):
        found = find_crossings(3, 30.0)
    assert all(c.incoming == (c.outgoing + 1) % 3 for c in found)
    assert found[-1].alpha_sq < 20.0


def test_fock_vacuum():
    fv = fock_vectors(CoherentFamily(0.0, 4))
    assert fv.cutoff == 0
    np.testing.assert_allclose(fv.vectors, np.ones((1, 4)))


def test_fock_overlap():
    fv = fock_vectors(fam(2, 1.0), 1e-12)
    overlap = np.vdot(fv.vectors[:, 1], fv.vectors[:, 0])
    assert abs(overlap - math.exp(-2)) <= 1e-11


def test_fock_pipeline():
    for n, alpha in [(3, 1.2 + 0.4j), (5, 2.0), (10, 2.0j)]:
        f = CoherentFamily(alpha, n)
        fv = fock_vectors(f, 1e-12)
        g = gram(fv.vectors)
        assert np.max(np.abs(g - analytic_gram(f))) <= 1e-11
        assert np.max(np.abs(coefficient_moduli_from_gram(g) - coefficient_moduli(f))) <= 1e-9
        assert verify_symmetry(fv.vectors, phase_unitary(n, fv.cutoff), tol=1e-6)


def test_fock_errors():
    with pytest.raises(OutOfRange):
        fock_vectors(fam(3, 1.0), 1e-3)
    with pytest.raises(CutoffTooLarge):
        fock_vectors(fam(3, 4000.0))


def test_symmetric_set_of_family():
    f = fam(6, 2.5)
    s = symmetric_set(f)
    assert np.max(np.abs(gram(s) - analytic_gram(f))) <= 1e-12
