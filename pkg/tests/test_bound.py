import numpy as np
import pytest
from scipy import constants as csts
from scipy import optimize

from fibertrap.analysis import analyze, find_minimum
from fibertrap.bound import (centrifugal, count_nodes, effective_potential, harmonic_check,
                             solve_bound_states, solve_radial)
from fibertrap.errors import InvalidInputError, NoTrapError

UK = csts.k * 1e-6


@pytest.fixture(scope="module")
def states(trap):
    return solve_bound_states(trap, m=0, n_levels=6)


def test_orthonormal(states):
    dr = states.r[1] - states.r[0]
    gram = states.wavefunctions @ states.wavefunctions.T * dr
    np.testing.assert_allclose(gram, np.eye(len(states.energies)), atol=1e-8)


def test_node_count(states):
    assert [count_nodes(p) for p in states.wavefunctions] == list(range(6))


def test_levels_inside_well(states, trap):
    u_m = find_minimum(trap).energy
    assert np.all(states.energies > u_m)
    assert np.all(np.diff(states.energies) > 0)
    assert states.complete


def test_grid_refinement(trap, states):
    fine = solve_bound_states(trap, m=0, n_levels=6, points=8000,
                              domain=(states.r[0] - (states.r[1] - states.r[0]),
                                      states.r[-1] + (states.r[1] - states.r[0])))
    assert np.max(np.abs(fine.energies - states.energies)) < 0.5 * UK


def _numerov_mismatch(energy, r, pot, mass):
    h = r[1] - r[0]
    k2 = 2 * mass * (energy - pot) / csts.hbar**2
    f = 1 + h**2 * k2 / 12
    psi = np.zeros_like(r)
    psi[1] = 1e-30
    for i in range(1, r.size - 1):
        psi[i + 1] = ((12 - 10 * f[i]) * psi[i] - f[i - 1] * psi[i - 1]) / f[i + 1]
        if abs(psi[i + 1]) > 1e200:
            psi[: i + 2] /= 1e200
    return psi[-1] / np.max(np.abs(psi))


def test_numerov_shooting_oracle(trap, states):
    # same Dirichlet walls, independent O(h^4) integrator on a finer grid
    dr = states.r[1] - states.r[0]
    r = np.linspace(states.r[0] - dr, states.r[-1] + dr, 20001)
    pot = effective_potential(trap, 0, r)
    for n in (0, 1, 2):
        e = states.energies[n]
        lo, hi = e - 0.3 * UK, e + 0.3 * UK
        en = optimize.brentq(_numerov_mismatch, lo, hi, args=(r, pot, trap.atom.mass), xtol=1e-36)
        assert abs(en - e) < 0.05 * UK


def test_variational_bound(states, trap):
    assert states.energies[0] >= states.potential.min()
    # any normalized trial state has <H> >= E0 for the same discrete operator
    r, dr = states.r, states.r[1] - states.r[0]
    m = trap.atom.mass
    kin = csts.hbar**2 / (2 * m * dr**2)
    r0 = r[np.argmin(states.potential)]
    for width in (4e-9, 8.8e-9, 15e-9):
        g = np.exp(-((r - r0) ** 2) / (4 * width**2))
        g /= np.sqrt(np.sum(g**2) * dr)
        hg = (states.potential + 2 * kin) * g
        hg[1:] -= kin * g[:-1]
        hg[:-1] -= kin * g[1:]
        assert np.sum(g * hg) * dr >= states.energies[0]


def test_harmonic_well_exact():
    mass, omega = 2.2e-25, 2 * np.pi * 5e5
    r = np.linspace(-150e-9, 150e-9, 6001)[1:-1]
    e, psi, n_bound = solve_radial(r, 0.5 * mass * omega**2 * r**2, mass, 5)
    expected = (np.arange(5) + 0.5) * csts.hbar * omega
    np.testing.assert_allclose(e, expected, rtol=1e-4)
    assert n_bound == 5
    dr = r[1] - r[0]
    width = np.sqrt(np.sum(psi[0] ** 2 * r**2) * dr)
    assert width == pytest.approx(np.sqrt(csts.hbar / (2 * mass * omega)), rel=1e-4)


def test_anharmonic_softening(states, trap):
    rep = analyze(trap)
    ratios = harmonic_check(states, 2 * np.pi * rep.nu_r)
    assert ratios[0] == pytest.approx(1.0, abs=0.1)
    assert np.all(np.diff(ratios) < 0)


def test_centrifugal_identity(trap):
    r = np.linspace(0.3e-6, 0.5e-6, 20)
    for m in (1, 3, 10):
        diff = effective_potential(trap, m, r) - effective_potential(trap, 0, r)
        np.testing.assert_allclose(diff, csts.hbar**2 * m**2 / (2 * trap.atom.mass * r**2), rtol=1e-9)
    assert np.all(centrifugal(0, trap.atom.mass, r) < 0)


def test_rotation_raises_levels(trap, states):
    rot = solve_bound_states(trap, m=20, n_levels=2)
    assert rot.energies[0] > states.energies[0]


def test_large_m_has_no_well(trap):
    with pytest.raises(NoTrapError):
        solve_bound_states(trap, m=2000, n_levels=1)


def test_outputs(trap):
    one = solve_bound_states(trap, n_levels=1)
    d = one.to_dict()
    assert "spacings_uK" not in d and d["n_bound"] == 1
    text = one.wavefunctions_csv().splitlines()
    assert text[0] == "r_m_,psi_0"
    assert len(text) == one.r.size + 1


def test_bad_arguments(trap, trap_linear):
    with pytest.raises(InvalidInputError):
        solve_bound_states(trap, n_levels=0)
    with pytest.raises(InvalidInputError):
        solve_bound_states(trap_linear)
