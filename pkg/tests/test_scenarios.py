import math

import numpy as np
import pytest

from conftest import SIGMA_X, SIGMA_Y, SIGMA_Z
from qbounds.bounds import hcrb_qubit, ncrb_general, ncrb_qubit
from qbounds.errors import ValidationError
from qbounds.luwang import LwurSpec, lwb
from qbounds.model import qfi_data, sld_qfi
from qbounds.scenarios import RotationsConfig, equal_bounds_problem, probe_state, rotations_problem, rotations_reference

S2 = math.sqrt(2.0)


def bloch(rho):
    return [np.trace(rho @ s).real for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)]


def test_probe_bloch_vector():
    rho = probe_state(RotationsConfig(1.0, math.pi / 4, math.pi / 4))
    np.testing.assert_allclose(bloch(rho), [0.5, 0.5, S2 / 2], atol=1e-15)


@pytest.mark.parametrize("r", [0.3, 1.0])
def test_derivative_along_z(r):
    p = rotations_problem(RotationsConfig(r, 0.0, 0.7))
    np.testing.assert_allclose(p.drho[0], -(r / 2) * SIGMA_Y, atol=1e-15)
    np.testing.assert_allclose(p.drho[1], (r / 2) * SIGMA_X, atol=1e-15)


def test_reference_values_half_radius():
    ref = rotations_reference(RotationsConfig(0.5, math.pi / 4, math.pi / 4))
    assert ref.ncrb == pytest.approx(4 * (1 + S2) ** 2, rel=1e-14)
    assert ref.hcrb == pytest.approx(4 * (3 + S2), rel=1e-14)
    assert ref.lwb == pytest.approx(16.0, rel=1e-14)
    assert ref.c_tilde == pytest.approx(2 * S2 / 3, rel=1e-14)


def test_reference_values_equator():
    ref = rotations_reference(RotationsConfig(1.0, math.pi / 2, math.pi / 3))
    assert math.isinf(ref.ncrb) and math.isinf(ref.hcrb)
    assert ref.lwb == pytest.approx(16 / 3, rel=1e-14)
    assert ref.c_tilde == 0.0


@pytest.mark.parametrize("r", [0.2, 1.0])
def test_reference_values_pole(r):
    ref = rotations_reference(RotationsConfig(r, 0.0, 1.1))
    assert ref.c_tilde == pytest.approx(1.0, rel=1e-14)
    assert ref.ncrb == pytest.approx(4 / r**2, rel=1e-14)


@pytest.mark.parametrize("r,theta,phi", [(0.5, 0.3, 0.2), (0.9, 1.0, 2.5), (0.7, 2.2, -0.4), (1.0, 0.6, 0.6)])
def test_reference_matches_computed(r, theta, phi):
    cfg = RotationsConfig(r, theta, phi)
    p = rotations_problem(cfg)
    ref = rotations_reference(cfg)
    data = qfi_data(p)
    np.testing.assert_allclose(data.qfi, ref.qfi, atol=1e-13)
    assert data.c_tilde == pytest.approx(ref.c_tilde, rel=1e-10)
    assert ncrb_qubit(data.qfi) == pytest.approx(ref.ncrb, rel=1e-10)
    if r < 1:
        assert hcrb_qubit(p) == pytest.approx(ref.hcrb, rel=1e-10)


def test_separable_bound_does_not_depend_on_azimuth():
    vals = [ncrb_qubit(sld_qfi(rotations_problem(RotationsConfig(0.8, 0.9, phi)))) for phi in np.linspace(0, 3, 7)]
    np.testing.assert_allclose(vals, vals[0], rtol=1e-12)


@pytest.mark.parametrize("r", [0.0, -0.1, 1.5])
def test_radius_is_validated(r):
    with pytest.raises(ValidationError):
        RotationsConfig(r, 0.1, 0.1)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_equal_bounds_problem(d):
    p, expected = equal_bounds_problem(d)
    assert expected == 12 * (2 * d - 1)
    assert np.trace(p.rho).real == pytest.approx(1.0, abs=1e-15)
    c_lw = lwb(LwurSpec.from_qfi(qfi_data(p))).value
    assert c_lw == pytest.approx(expected, rel=1e-8)
    c_n = ncrb_qubit(sld_qfi(p)) if d == 2 else ncrb_general(p).value
    assert c_n == pytest.approx(expected, rel=1e-6)
