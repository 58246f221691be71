import json
from fractions import Fraction

import pytest

import witchbayes as wb


def test_posterior_after_four_black():
    assert wb.posterior("NNNN") == {"V7": Fraction(16, 17), "V14": Fraction(1, 17)}


def test_predictive_values():
    assert wb.predictive("VVVVVVVVVV", "V") == Fraction(2049, 3075)
    assert wb.to_decimal("2049/3075") == "0.666341"
    assert wb.second_layer_predictive("NNNN", "Salty") == Fraction(83, 119)


def test_other_scenarios():
    assert wb.posterior("dispari", scenario="tombola")["37"] == Fraction(1, 45)
    assert wb.posterior("m", scenario="prenatal")["M"] == Fraction(19, 23)
    doc = wb.builtin_scenario("tombola")
    assert wb.posterior("dispari", scenario=doc)["37"] == Fraction(1, 45)


def test_decisions():
    assert wb.anger_probability("deterministic", "V") == Fraction(1, 7)
    assert wb.anger_probability("medallion", "V") == Fraction(12, 49)
    assert wb.anger_probability({"V": {"Salty": "1/1"}}, "V") == Fraction(6, 7)
    assert wb.optimal_strategy() == {"N": {"Salty": "1/1"}, "V": {"Sweet": "1/1"}}
    assert wb.chessboard_oracle() == (37, 12)
    assert wb.laplace_succession(10, 10) == Fraction(11, 12)


def test_simulation_is_seeded():
    a = wb.simulate(seed=7, days=1000, strategy="medallion")
    assert a == wb.simulate(seed=7, days=1000, strategy="medallion")
    assert a["per_hat"]["V"]["exact_anger"] == "12/49"
    assert a["per_hat"]["V"]["days"] + a["per_hat"]["N"]["days"] == 1000


def test_network_export():
    assert "digraph" in wb.export_net("NNNN")
    diagram = json.loads(wb.export_net("NNNN", format="json"))
    assert diagram["kind"] == "net_diagram"
    assert len(diagram["edges"]) == 8


def test_errors_raise():
    with pytest.raises(wb.WitchBayesError, match="UnknownOutcome"):
        wb.posterior("NQ")
    with pytest.raises(ValueError):
        wb.laplace_succession(3, 2)


def test_session_service():
    svc = wb.SessionService()
    created = svc.handle({"op": "create_session"})
    sid = created["result"]["session"]
    for _ in range(4):
        state = svc.handle({"op": "observe", "session": sid, "outcome": "N"})
    post = {e["label"]: e["p"] for e in state["result"]["beliefs"]["posterior"]}
    assert post == {"V7": "16/17", "V14": "1/17"}
    assert json.loads(svc.handle_line('{"op":"state","session":"nope"}'))["status"] == 404
