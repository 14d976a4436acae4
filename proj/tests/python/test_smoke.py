import math

import numpy as np
import pytest

import twowell as tw

A = math.sqrt(2.0)


@pytest.fixture(scope="module")
def wells():
    return tw.make_wells(A)


def test_well_system(wells):
    assert wells.a * wells.b == pytest.approx(1.0)
    assert wells.cbar == pytest.approx(1.0)
    np.testing.assert_allclose(wells.Q, [[0.8, -0.6], [0.6, 0.8]], atol=1e-12)
    # rank-one connection annihilates the interface direction
    N = wells.U0 - wells.Q @ wells.U1
    assert np.linalg.norm(N @ [1.0, -1.0]) < 1e-12


def test_zero_energy_at_the_wells(wells):
    dom = tw.build_domain(4.0, 1.0, 1, 8)
    def_u0 = tw.make_affine(dom, wells.U0)
    assert tw.hamiltonian_total(def_u0, wells, tw.Density.truncated) < 1e-12
    rep = tw.hamiltonian(def_u0, wells, tw.Density.tilde)
    assert rep.total < 1e-12
    assert len(rep.site_density) == dom.num_nodes


def test_laminate_spin_structure(wells):
    dom = tw.build_domain(4.0, 1.0, 1, 16)
    V1, V2 = tw.rank_one_pair(wells, 1)
    lam = tw.init_profile(dom, wells, V1, V2, 1, 0.5)
    assert tw.is_admissible(lam)
    rec = tw.comparison_check(lam, wells)
    assert rec.edge_mechanism_ok
    assert rec.mismatch_count > 0
    summary = tw.interface_extract(lam, wells, 0.15)
    assert summary.classifiable
    assert any(s.angle_to_plus < 1.0 for s in summary.segments)


def test_minimize_descends(wells):
    dom = tw.build_domain(4.0, 1.0, 1, 8)
    base = tw.init_affine(dom, wells, wells.f_lambda(0.5), 0.5)
    start = tw.init_perturbed(base, 0.1, 3)
    opts = tw.MinimizeOptions()
    opts.max_iters = 80
    res = tw.minimize(start, wells, tw.Density.truncated, opts)
    assert res.admissible
    assert res.energy_trace[-1] <= res.energy_trace[0]
    trace = np.asarray(res.energy_trace)
    assert (np.diff(trace) <= 1e-12).all()


def test_recursion_limits():
    assert tw.recursion_limit(0.25) == pytest.approx(0.5)
    assert tw.recursion_limit(0.26) is None
    tr = tw.recursion_sequence(0.1)
    assert tr.converged
    assert tr.limit == pytest.approx(0.112702, abs=1e-5)
    chain = tw.simulate_chain_selection(0.1, 20, 1, 1000, tw.PlacementMode.worst_case)
    assert chain.bound_ok and not chain.falsified


def test_deformation_roundtrip(tmp_path, wells):
    dom = tw.build_domain(1.0, 1.0, -1, 8)
    d = tw.make_affine(dom, wells.f_lambda_minus(0.4))
    path = str(tmp_path / "state.def")
    d.save(path)
    back = tw.load_deformation(path)
    np.testing.assert_array_equal(back.positions, d.positions)
