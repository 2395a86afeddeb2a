import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linear_sum_assignment

from braidkit.braid import Axis, winding_ref
from braidkit.errors import DomainError, EPOnGridError, ReferenceOnSpectrumError
from braidkit.model import ModelSpec, bloch_eigenvalues, mirrored
from braidkit.spectra import (
    beta_outside_map,
    beta_solutions,
    bloch_multiset,
    gbz_residual,
    left_fraction,
    left_fraction_grid,
    localization,
    localization_check,
    n_inside,
    nhse_count,
    nhse_direction,
    nhse_state_count,
    obc_states,
    pbc_strands,
    real_space_matrix,
    states_to_csv,
    strands_to_csv,
)

HOPF = ModelSpec.h1(1.0, 1.4, 1.6, 3, 1)
BIPOLAR = ModelSpec.h1(1.0, 0.8, 1.1, 3, 1)

# smallest |E| of the 40-node open chain, frozen from the package's own
# eigensolver and cross-checked against numpy.linalg.eigvals
SKIN_TZM_ABS = 2.97e-3


def _multiset_distance(a, b):
    cost = np.abs(np.asarray(a)[:, None] - np.asarray(b)[None, :])
    r, c = linear_sum_assignment(cost)
    return cost[r, c].max()


def test_delta_localization():
    psi = np.zeros(40)
    psi[0] = 1
    stats = localization(psi)
    assert stats.center_of_mass == 1 and stats.side == "left" and stats.ipr == 1


def test_uniform_localization():
    stats = localization(np.ones(40))
    assert stats.center_of_mass == pytest.approx(20.5)
    assert stats.ipr == pytest.approx(1 / 40)


def test_chain_too_short():
    with pytest.raises(DomainError):
        real_space_matrix(HOPF, 4, "OBC")


def test_open_chain_drops_wrapping_bonds():
    n = 5  # m + n + 1
    pbc = real_space_matrix(HOPF, n, "PBC").matrix
    obc = real_space_matrix(HOPF, n, "OBC").matrix
    diff = np.flatnonzero(np.abs(pbc - obc).sum(axis=1))
    # A rows of the first three cells lose c_ab_neg_m, the last B row loses c_ba_n
    assert sorted(diff.tolist()) == [0, 2, 4, 9]


@pytest.mark.parametrize("n_cells", [8, 20])
def test_periodic_chain_matches_bloch(n_cells):
    ev = np.linalg.eigvals(real_space_matrix(HOPF, n_cells, "PBC").matrix)
    assert _multiset_distance(ev, bloch_multiset(HOPF, n_cells)) < 1e-10


def test_open_chain_zero_modes_on_left():
    states = obc_states(HOPF, 20)
    assert len(states) == 40
    assert abs(states[0].energy) == pytest.approx(SKIN_TZM_ABS, rel=0.01)
    assert abs(states[1].energy) == pytest.approx(SKIN_TZM_ABS, rel=0.01)
    assert [s.stats.side for s in states[:2]] == ["left", "left"]
    assert all(s.stats.side == "right" for s in states[2:])
    numpy_min = np.abs(np.linalg.eigvals(real_space_matrix(HOPF, 20).matrix)).min()
    assert numpy_min == pytest.approx(abs(states[0].energy), rel=1e-6)


def test_left_fraction_and_mirror():
    f = left_fraction(HOPF, 40)
    assert f == pytest.approx(0.05)
    assert abs(left_fraction(mirrored(HOPF), 40) - (1 - f)) <= 1 / 40
    assert left_fraction(ModelSpec.h1(1.0, 2.5, 0.5, 3, 1), 40) == 0.0


def test_left_fraction_grid_shape():
    grid = left_fraction_grid(HOPF, Axis("c_ab_neg_m", 1.4, 2.5, 2), Axis("c_ba_n", 0.5, 1.6, 2), 40)
    assert grid.shape == (2, 2)
    assert grid[0, 1] == pytest.approx(0.05) and grid[1, 0] == 0.0


def test_reference_winding_root_counts():
    # n_outside = n - xi_r with n = 1
    np.testing.assert_array_equal(beta_outside_map(HOPF, [1j, 0.0, 1e3]), [3, 3, 1])
    assert n_inside(HOPF, 1j) == 3 + winding_ref(HOPF, 1j)


def test_beta_on_unit_circle_for_bloch_energy():
    k0 = 0.9
    e = bloch_eigenvalues(HOPF, k0)[1]
    rs = beta_solutions(HOPF, e)
    assert np.min(np.abs(rs.roots - np.exp(1j * k0))) < 1e-8


def test_nhse_counting():
    assert nhse_count(-1, 3, 1, "right") == 1
    assert nhse_count(-2, 3, 1, "right") == 3
    assert nhse_count(0, 3, 1, "right") == nhse_count(0, 3, 1, "left") == 0
    assert nhse_count(1, 3, 1, "left") == 1
    assert nhse_count(2, 3, 1, "left") == 5
    assert nhse_state_count(HOPF, 1j, "right") == 3
    assert nhse_direction(HOPF, 1j) == "right"
    assert nhse_direction(HOPF, 1e3) is None


def test_gbz_residual_shrinks_with_chain_length():
    medians = []
    for n_cells in (20, 40, 60):
        bulk = [s.energy for s in obc_states(HOPF, n_cells) if abs(s.energy) > 1e-2]
        medians.append(np.median([gbz_residual(HOPF, e) for e in bulk]))
    assert medians[0] > medians[1] > medians[2]
    assert medians[2] < 0.01


def test_gbz_residual_far_and_hermitian():
    assert gbz_residual(HOPF, 5.0) > 1
    hermitian = ModelSpec.h3([0.5], [1], [], [1, 0.5])
    for k in (0.3, 1.0, 2.0):
        assert gbz_residual(hermitian, bloch_eigenvalues(hermitian, k)[1]) < 1e-12


def test_localization_check_bipolar():
    check = localization_check(BIPOLAR, 40)
    assert not check.mismatched
    assert check.matched == 36
    assert len(check.unpredicted) == 4
    sides = {s.stats.side for s in obc_states(BIPOLAR, 20)}
    assert sides == {"left", "right"}


def test_localization_check_skin_model():
    check = localization_check(HOPF, 40)
    assert check.matched == 38 and not check.zero_modes
    # the two near-zero edge states are not bulk skin modes
    assert len(check.mismatched) == 2
    assert all(abs(s.energy) < 1e-2 for s in check.mismatched)


def test_strands():
    flat = pbc_strands(ModelSpec.h1(1.0, 0.0, 0.0, 3, 1), 64)
    np.testing.assert_allclose(flat.e1, 1)
    np.testing.assert_allclose(flat.e2, -1)
    hopf = pbc_strands(HOPF, 256)
    assert len(strands_to_csv(hopf).splitlines()) == 513


def test_strands_touching_on_grid():
    with pytest.raises(EPOnGridError) as info:
        pbc_strands(ModelSpec.h1(1.0, 1.0, 0.5, 2, 1), 64)
    assert info.value.k is not None


def test_states_csv():
    lines = states_to_csv(obc_states(HOPF, 5)).splitlines()
    assert lines[0] == "index,re_E,im_E,center_of_mass,ipr,side"
    assert len(lines) == 11


def test_reference_on_spectrum_propagates():
    with pytest.raises(ReferenceOnSpectrumError):
        nhse_direction(HOPF, bloch_eigenvalues(HOPF, 0.0)[1])


@settings(max_examples=20, deadline=None)
@given(st.floats(-2.5, 2.5), st.floats(-2.5, 2.5), st.integers(1, 3), st.integers(1, 2), st.integers(6, 12))
def test_periodic_chain_property(a, b, m, n, n_cells):
    model = ModelSpec.h1(1.0, a, b, m, n)
    ev = np.linalg.eigvals(real_space_matrix(model, n_cells, "PBC").matrix)
    assert _multiset_distance(ev, bloch_multiset(model, n_cells)) < 1e-8 * (1 + model.scale)


def test_single_winding_lobe():
    # a red-only lobe point located by scanning the complex-E plane
    e = complex(-2.4, -0.2)
    assert winding_ref(HOPF, e) == -1
    assert n_inside(HOPF, e) == 3 - 1
    assert nhse_direction(HOPF, e) == "right"
