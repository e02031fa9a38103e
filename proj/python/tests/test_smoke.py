import os
import pathlib

import numpy as np
import pytest

import urnflow

DATA = pathlib.Path(os.environ.get("URNFLOW_DATA_DIR", pathlib.Path(__file__).resolve().parents[2] / "data" / "graphs"))


def graph(name):
    return urnflow.load_graph(str(DATA / f"{name}.txt"))


def test_graph_construction_and_classification():
    g = urnflow.Graph(4, [(1, 2), (2, 3), (3, 4), (4, 1)], "square")
    assert (g.m, g.N) == (4, 4)
    assert g.edges[0] == (1, 2)
    info = urnflow.classify(g)
    assert info["bipartite"] and info["regular"] and info["r"] == 2
    assert not urnflow.classify(graph("K3"))["bipartite"]


def test_invalid_graph_raises_with_code():
    with pytest.raises(urnflow.UrnflowError) as exc:
        urnflow.parse_graph("1 1\n1 2\n")
    assert exc.value.code in ("ValidationError", "ParseError")


def test_field_is_tangent_and_matches_gradient():
    g = graph("C5")
    rng = np.random.default_rng(0)
    x = rng.dirichlet(np.ones(5))
    f = urnflow.vector_field(g, x)
    assert abs(f.sum()) < 1e-14
    np.testing.assert_allclose(f, x * urnflow.lyapunov_grad(g, x), atol=1e-14)
    assert urnflow.jacobian(g, x).shape == (5, 5)


def test_triangle_limit_and_spectrum():
    g = graph("K3")
    lim = urnflow.limit_object(g)
    assert lim["kind"] == "UniquePoint"
    eig = urnflow.spectrum(g, np.full(3, 1 / 3))
    np.testing.assert_allclose(eig, [-1.0, -0.25, -0.25], atol=1e-9)
    eqs = urnflow.find_equilibria(g)
    assert sum(e["classification"] == "non-unstable" for e in eqs) == 1


def test_uniqueness_violation_exposes_candidates():
    with pytest.raises(urnflow.UrnflowError) as exc:
        urnflow.limit_object(graph("K3"), tol={"class_eps": 10.0})
    assert exc.value.code == "UniquenessViolation"
    assert len(exc.value.candidates) == 4


def test_run_is_reproducible_and_on_simplex():
    g = graph("K1_3")
    a = urnflow.run(g, 2000, seed=7, stride=100)
    b = urnflow.run(g, 2000, seed=7, stride=100)
    np.testing.assert_array_equal(a["points"], b["points"])
    np.testing.assert_allclose(a["points"].sum(axis=1), 1.0, atol=1e-12)
    assert a["steps"][-1] == 2000
    assert sum(a["final_counts"]) == 4 + 3 * 2000


def test_monte_carlo_thread_independent():
    g = graph("C4")
    one = urnflow.monte_carlo(g, 500, 4, seed=3, threads=1)
    many = urnflow.monte_carlo(g, 500, 4, seed=3, threads=2)
    assert one == many
    assert one["limit"]["kind"] == "OmegaSegment"


def test_flow_increases_lyapunov():
    g = graph("P4")
    r = urnflow.flow(g, [0.4, 0.3, 0.2, 0.1], t=5.0)
    assert r["L_end"] >= r["L_start"]


def test_projection_onto_segment():
    g = graph("K33")
    proj = urnflow.project_to_omega(g, np.full(6, 1 / 6))
    assert proj["distance"] < 1e-12


def test_verify_quick():
    assert urnflow.verify(graph("P3"))["overall"] == "pass"
