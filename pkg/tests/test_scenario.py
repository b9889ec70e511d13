import json
from pathlib import Path

import pytest

from quatode.errors import ScenarioError
from quatode.qexpr import Exp
from quatode.quaternion import I, J, K, ONE, Quaternion
from quatode.scenario import load_scenario, parse_expr, scenario_from_dict

from conftest import assert_q

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"

BASE = {"kind": "homogeneous-const", "a": [0, 0, -1, 0], "b": [-1, 0, 0, 1], "q": [0, -1, 0, 0]}


def with_(**changes):
    data = dict(BASE)
    for key, value in changes.items():
        if value is None:
            data.pop(key, None)
        else:
            data[key] = value
    return data


@pytest.mark.parametrize("path", sorted(SCENARIOS.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_scenarios_load(path):
    sc = load_scenario(path)
    assert sc.kind


def test_defaults():
    sc = scenario_from_dict(BASE)
    assert sc.a == -J and sc.b == K - ONE and sc.q == -I
    assert (sc.x0, sc.x_end, sc.h) == (0.0, 2.0, 1e-3)
    assert sc.rho == () and sc.f is None and not sc.has_basis
    assert scenario_from_dict(with_(x0=1.5)).x_end == 3.5


def test_basis_and_rho():
    sc = load_scenario(SCENARIOS / "example4.json")
    assert sc.has_basis
    assert_q(sc.phi(0.7), Exp(-I)(0.7))
    assert sc.rho == ((1, I),)
    assert_q(sc.rho_expr()(2.0), 2 * I)
    assert sc.samples == (0.0, 1.0)


def test_expression_syntax():
    e = parse_expr({"sum": [{"prod": [{"pow": 1}, {"exp": [0, 1, 0, 0]}]},
                            {"lscale": [[0, 0, 1, 0], {"const": [1, 0, 0, 0]}]},
                            {"rscale": [[1, 2, 3, 4], [0, 0, 0, 1]]}]})
    x = 0.3
    expected = x * Exp(I)(x) + J + Quaternion(1, 2, 3, 4) * K
    assert_q(e(x), expected, 1e-15)


@pytest.mark.parametrize("data, field", [
    (with_(kind="nope"), "kind"),
    (with_(a=None), "a"),
    (with_(b=[1, 2, 3]), "b"),
    (with_(a=[0, "x", 0, 0]), "a"),
    (with_(q=None), "q"),
    (with_(kind="nonhomogeneous-const"), "rho"),
    (with_(kind="nonhomogeneous-const", rho=[]), "rho"),
    (with_(rho=[[-1, [0, 1, 0, 0]]]), "rho[0]"),
    (with_(rho=[[1.5, [0, 1, 0, 0]]]), "rho[0]"),
    (with_(f=[1, 0, 0, 0]), "g"),
    (with_(h=0), "h"),
    (with_(x0=True), "x0"),
    (with_(extra=1), "extra"),
    (with_(basis={"phi": [1, 0, 0, 0]}), "basis"),
    (with_(q=None, basis={"phi": {"exp": [0, 1, 0, 0]}, "xi": {"log": 1}}), "basis.xi"),
    (with_(q=None, basis={"phi": {"pow": -1}, "xi": [1, 0, 0, 0]}), "basis.phi.pow"),
    (with_(samples="0,1"), "samples"),
    (with_(name=3), "name"),
    ({"kind": "ivp-numeric", "a": [0, 0, 0, 0], "b": [0, 0, 0, 0], "f": [1, 0, 0, 0]}, "g"),
    ({"kind": "ivp-numeric", "a": [0, 0, 0, 0], "b": [0, 0, 0, 0], "f": [1, 0, 0, 0],
      "g": [0, 0, 0, 0]}, "x_end"),
    ({"kind": "ivp-numeric", "a": [0, 0, 0, 0], "b": [0, 0, 0, 0], "f": [1, 0, 0, 0],
      "g": [0, 0, 0, 0], "x_end": 0.0}, "x_end"),
    ({"kind": "wronskian-check", "a": [0, 0, 0, 0]}, "b"),
])
def test_validation_names_field(data, field):
    with pytest.raises(ScenarioError) as info:
        scenario_from_dict(data)
    assert info.value.field == field
    assert str(info.value).startswith(field)


def test_non_finite_rejected():
    with pytest.raises(ScenarioError):
        scenario_from_dict(json.loads('{"kind": "homogeneous-const", "a": [NaN, 0, 0, 0], '
                                      '"b": [0, 0, 0, 0], "q": [0, 0, 0, 0]}'))


def test_empty_and_broken_files(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text("  \n")
    with pytest.raises(ScenarioError, match="empty"):
        load_scenario(empty)
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    with pytest.raises(ScenarioError, match="invalid JSON"):
        load_scenario(broken)
    top = tmp_path / "list.json"
    top.write_text("[]")
    with pytest.raises(ScenarioError):
        load_scenario(top)
