"""Python smoke tests for the _presym extension module."""

import json

import pytest

presym = pytest.importorskip("_presym")


def test_poly_algebra_and_printing():
    ch = presym.Chart(["x", "y"])
    p = ch.poly("(x+y)^3")
    q = ch.poly("x^3 + 3*x^2*y + 3*x*y^2 + y^3")
    assert p == q
    assert str(p) == "x^3 + 3*x^2*y + 3*x*y^2 + y^3"
    assert p.evaluate({"x": "1", "y": "1/2"}) == "27/8"
    assert str(ch.poly("x^2*y").derivative("x")) == "2*x*y"


def test_exterior_calculus_round_trip():
    ch = presym.Chart(["q", "p"])
    alpha = ch.form("(2*q)*dq + (2*p)*dp")
    f = presym.integrate_closed_one_form(alpha)
    assert str(f) == "q^2 + p^2"
    assert presym.d(f) == alpha
    w = presym.wedge(ch.form("dq"), ch.form("dp"))
    assert str(w) == "1 dq^dp"
    X = ch.field("@q")
    assert str(presym.interior(X, w)) == "1 dp"
    assert presym.lie_derivative(X, w).is_zero()


def test_capri_kernel_and_stabilization():
    m = presym.Model.builtin("capri")
    assert m.kernel() == ["d/dx1", "d/dy1", "d/du1", "d/dv1"]
    rep = json.loads(m.stabilize())
    assert rep["final_constraints"] == ["x1", "y1"]
    assert rep["final_dim"] == 10
    assert rep["free_parameters"] == ["c_u1", "c_v1"]
    rep_sode = json.loads(m.stabilize(sode=True))
    assert rep_sode["final_constraints"] == ["x1", "y1", "u1", "v1"]
    assert rep_sode["final_dim"] == 8
    assert rep_sode["free_parameters"] == []


def test_momentum_map_matches_the_printed_functions():
    m = presym.Model.builtin("capri-s")
    moms = m.momentum()
    assert moms["rot2"] == "2*x2*v2*m2 - 2*y2*u2*m2 - x2^2 - y2^2"
    assert moms["rot3"] == "2*x3*v3*m3 - 2*y3*u3*m3 - x3^2 - y3^2"


def test_reduction_dimensions():
    m = presym.Model.builtin("capri-s")
    rep = json.loads(m.reduce(mu=["-1", "-1"]))
    assert rep["level_dim"] == 6
    assert rep["quotient_dim"] == 4
    assert rep["symplectic"] is True

    routes = json.loads(presym.Model.builtin("capri").reduce(mu=["-1", "-1", "0", "0"], route="all"))
    assert routes["consistent"] is True
    assert all(p["quotient_dim"] == 4 for p in routes["pipelines"])


def test_autonomous_reduction():
    m = presym.Model.builtin("autonomous-r2")
    rep = json.loads(m.reduce(mu=["1"], point={"q1": "1", "p1": "1", "q2": "0", "p2": "0", "t": "0"}))
    assert rep["level_dim"] == 4
    assert rep["ker_level_dim"] == 2
    assert rep["reduced_rank"] == 2
    assert rep["symplectic"] is False


def test_verify_battery_and_negative_control():
    for name in presym.builtin_models():
        rep = json.loads(presym.Model.builtin(name).verify())
        assert rep["all_pass"] is True, name
    bad = "model bad\nchart q p t\nomega = q*dp^dt\nhamiltonian = 0\n"
    rep = json.loads(presym.verify_text(bad))
    assert rep["all_pass"] is False
    assert rep["rows"][0]["check"] == "closedness"


def test_model_round_trip():
    m = presym.Model.builtin("conformal")
    again = presym.Model.from_text(m.to_text())
    assert again.chart_vars == m.chart_vars
    assert str(again.omega) == str(m.omega)
    assert str(again.hamiltonian) == str(m.hamiltonian)
