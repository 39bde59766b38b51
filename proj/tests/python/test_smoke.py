import math

import numpy as np
import pytest

import pymre


def test_grid_basics():
    g = pymre.Grid.square(8)
    assert g.dim == 2
    assert g.num_nodes == 81
    assert g.cells == [8, 8]
    with pytest.raises(pymre.MreError):
        pymre.Grid(4, [2, 2, 2, 2], [1, 1, 1, 1])


def test_phantom_peak():
    g = pymre.Grid.square(32)
    mu = pymre.make_phantom(g, 1.0, [[0.5, 0.5, 0.0, 0.3, 0.2, 0.1]])
    assert mu.shape == (g.num_nodes,)
    assert mu.max() == pytest.approx(1.2, abs=1e-12)
    assert mu.min() == pytest.approx(1.0, abs=1e-12)


def test_solve_stokes_smoke():
    g = pymre.Grid.square(16)
    mu = pymre.make_phantom(g)
    bc = pymre.make_excitation(g, kind="shear")
    sol = pymre.solve_stokes(g, mu, 1.0, bc)
    assert sol["u"].shape == (2 * g.num_nodes,)
    assert sol["linear_residual"] < 1e-10
    assert sol["divergence_norm"] < 0.1


def test_h_s_norm_closed_form():
    n = 32
    g = pymre.Grid.square(n)
    x = np.linspace(0.0, 1.0, n + 1)
    xx, yy = np.meshgrid(x, x, indexing="xy")
    f = (np.sin(math.pi * xx) * np.sin(math.pi * yy)).ravel()
    for s in (0.0, 0.5, 1.0):
        exact = math.sqrt((1.0 + 2.0 * math.pi**2) ** s / 4.0)
        assert pymre.h_s_norm(g, f, s) == pytest.approx(exact, rel=1e-10)


def test_cert_2d():
    g = pymre.Grid.square(12)
    x = np.linspace(0.0, 1.0, 13)
    xx, yy = np.meshgrid(x, x, indexing="xy")
    u = np.concatenate([xx.ravel(), -yy.ravel()])
    rep = pymre.cert_2d(g, u, threshold=1.0)
    assert rep["pass"]
    assert rep["inf"] == pytest.approx(math.sqrt(2.0), rel=1e-12)


def test_sl_checks():
    rep = pymre.sl_check_2d(1.0)
    assert rep["pass"]
    roots = sorted(rep["roots"], key=lambda z: z.imag)
    assert roots[0] == pytest.approx(-1j, abs=1e-10)
    assert roots[1] == pytest.approx(1j, abs=1e-10)
    with pytest.raises(pymre.MreError):
        pymre.sl_check_2d(0.0)

    s1 = np.diag([1.0, -1.0, 0.0])
    c = math.cos(math.pi / 4)
    r = np.array([[c, -c, 0.0], [c, c, 0.0], [0.0, 0.0, 1.0]])
    s2 = r @ s1 @ r.T
    rep3 = pymre.sl_check_3d(s1, s2, 1.0, 0.0)
    assert rep3["upper_count"] == 2
    assert rep3["lower_count"] == 2
    assert rep3["pass"]


def test_landweber_short_run():
    g = pymre.Grid.square(16)
    mu_true = pymre.make_phantom(g, 1.0, [[0.5, 0.5, 0.0, 0.3, 0.2, 0.12]])
    bc = pymre.make_excitation(g, kind="random", modes=2, seed=11)
    data = pymre.solve_stokes(g, mu_true, 1.0, bc)["u"]
    mu0 = np.ones(g.num_nodes)
    out = pymre.landweber_run(g, 1.0, [bc], [data], mu0, sigma=1e3, n_max=5,
                              mu_true=mu_true)
    records = np.asarray(out["records"])
    assert records.shape[0] >= 2
    js = records[:, 1]
    assert np.all(np.diff(js) <= 1e-12)
    assert out["mu"].shape == (g.num_nodes,)


def test_vtk_roundtrip(tmp_path):
    g = pymre.Grid.square(6)
    mu = pymre.make_phantom(g, 2.0)
    path = str(tmp_path / "mu.vtk")
    pymre.write_vtk_scalar(path, "mu", g, mu)
    back = pymre.read_vtk_scalar(path)
    assert back["cells"] == [6, 6]
    np.testing.assert_allclose(back["values"], mu, rtol=0, atol=0)
