"""Quick check that the compiled module imports and agrees with known values."""

import math

import wbgame


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    names = wbgame.Scenario.shipped_names()
    assert len(names) == 5, names

    base = wbgame.Scenario.shipped("baseline")
    result = wbgame.solve(base)
    alice, tom = result.root_value
    assert close(alice, 0.732) and close(tom, 0.378), result.root_value
    assert result.alice_leaks
    classes = dict(result.classes)
    assert close(classes["uncensored-impunity"], 0.336), classes
    assert close(sum(p for _, p in result.outcome_distribution), 1.0)

    check = wbgame.cross_check(base)
    assert check["agrees"], check

    assert wbgame.count(base) == (9, 9, 21)

    no_leak = wbgame.Scenario.shipped("baseline_no_leak.scn")
    assert not wbgame.solve(no_leak).alice_leaks
    flip = wbgame.find_threshold(no_leak, "y", 0.0, 0.8)
    assert flip["monotone"] and abs(flip["critical"] - 0.5) < 1e-5, flip

    rows = wbgame.sweep(base, "z", wbgame.linspace(0.0, 1.0, 11))
    assert len(rows) == 11

    levers = wbgame.lever_report(no_leak)
    assert [r["outcome"]["result"] for r in levers] == ["no-flip", "flip", "flip"], levers

    sim = wbgame.simulate(base, 20_000, 7)
    assert sim == wbgame.simulate(base, 20_000, 7)
    assert abs(sim["alice"]["mean"] - alice) < 5 * sim["alice"]["std_error"] + 1e-9

    dot = wbgame.export_dot(base, with_solution=True)
    assert dot.startswith("digraph")

    edited = base.with_param("B", -math.inf)
    assert edited.get("B") == -math.inf
    assert wbgame.Scenario.parse(edited.render()) == edited

    try:
        wbgame.Scenario.parse("w = 2\n")
    except wbgame.ScenarioError as e:
        assert "line" in str(e)
    else:
        raise AssertionError("expected ScenarioError")

    print(result.render("text"))
    print("smoke test ok")


if __name__ == "__main__":
    main()
