from __future__ import annotations

import itertools

import pytest

from jacobsthal.ilp import (
    MAX_WINDOW,
    IlpOutcome,
    assignment_from_remainders,
    build_model,
    check_assignment,
    classify_solution,
    parse_solution,
    read_lp_header,
    solve_bruteforce,
    system_feasible,
    validate_small,
    write_lp,
)
from oracles import brute_omega


def test_model_shape():
    model = build_model(4, 3, 6)
    assert len(model.x_vars) == 2 + 4 + 6
    assert model.y_vars == [3, 4, 5, 6]
    assert model.weight(6) == 1 and model.weight(3) == 8
    # positions divisible by p are never hit by its non-zero classes
    assert (2, 0) not in model.terms(3)
    assert model.terms(3) == [(3, 3), (4, 3)]
    names = [r[0] for r in model.rows()]
    assert names[:3] == ["choice_2", "choice_3", "choice_4"]
    assert "cover_2" in names and "link_6" in names


def test_lp_text():
    text = write_lp(build_model(3, 2, 4))
    lines = text.splitlines()
    assert lines[0] == "\\ jacobsthal-ilp n=3 m1=2 m2=4"
    assert lines[1] == "Maximize"
    assert lines[2] == " obj: 4 y_2 + 2 y_3 + y_4"
    assert " choice_2: x_2_1 + x_2_2 = 1" in lines
    assert " link_3: x_3_3 - y_3 >= 0" in lines
    assert lines[-1] == "End"
    assert read_lp_header(text) == build_model(3, 2, 4)


def test_empty_row_uses_dummy():
    # position 15 = 3 * 5 lies in no admissible class for n = 3
    text = write_lp(build_model(3, 16, 16))
    assert " cover_15: 0 y_dummy >= 1" in text
    assert " fix_dummy: y_dummy = 0" in text
    assert " link_15: - y_15 >= 0" in write_lp(build_model(3, 15, 15))


def test_window_guard():
    with pytest.raises(ValueError, match="exceeds 64"):
        build_model(5, 1, MAX_WINDOW + 2)
    with pytest.raises(ValueError):
        build_model(1, 1, 2)
    with pytest.raises(ValueError):
        build_model(4, 5, 3)
    with pytest.raises(ValueError):
        read_lp_header("Maximize\n")


def test_parse_solution():
    vals = parse_solution("# header\nx_2_1 1\nx_2_2 0.0000001\ny_3 1.0\n\n")
    assert vals == {"x_2_1": 1, "x_2_2": 0, "y_3": 1}
    assert parse_solution("status: INFEASIBLE\n") is None
    with pytest.raises(ValueError, match="binary"):
        parse_solution("x_2_1 0.5\n")
    with pytest.raises(ValueError, match="parse"):
        parse_solution("x_2_1\n")


def test_known_optimum_n3():
    model = build_model(3, 1, 4)
    best = solve_bruteforce(model)
    assert [best[f"y_{k}"] for k in model.y_vars] == [1, 1, 0, 1]
    assert classify_solution(model, best) == IlpOutcome("omega_found", 2)
    assert str(classify_solution(model, best)) == "omega_found(2)"


@pytest.mark.parametrize(
    "n,m1,m2,expected",
    [
        (4, 3, 6, "omega_found(4)"),
        (5, 7, 9, "too_large_m1"),
        (5, 1, 5, "too_small_m2"),
        (2, 1, 3, "omega_found(1)"),
    ],
)
def test_trichotomy(n, m1, m2, expected):
    model = build_model(n, m1, m2)
    assert str(classify_solution(model, solve_bruteforce(model))) == expected


def test_infeasible_reports_too_large():
    model = build_model(3, 4, 5)
    assert solve_bruteforce(model) is None
    assert classify_solution(model, None).kind == "too_large_m1"


def test_invalid_assignment_rejected():
    model = build_model(3, 1, 3)
    vals = assignment_from_remainders(model, (1, 1))
    check_assignment(model, vals)
    vals["y_3"] = 1  # 3 is not in class 1 mod 3 nor 1 mod 5
    with pytest.raises(ValueError, match="link_3"):
        classify_solution(model, vals)


@pytest.mark.parametrize("n", range(2, 6))
def test_validate_small_over_windows(n):
    omega = brute_omega(n)[0]
    for m1, m2 in itertools.combinations(range(1, omega + 3), 2):
        assert validate_small(build_model(n, m1, m2), omega)
    assert validate_small(build_model(n, 1, omega + 1))


def test_bruteforce_size_guard():
    with pytest.raises(ValueError):
        solve_bruteforce(build_model(7, 1, 3))


def test_feasibility_system():
    assert system_feasible(4, 4)
    assert not system_feasible(4, 5)
