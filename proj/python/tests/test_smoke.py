import math

import pytest

import hnoma


def reference():
    return hnoma.SystemInstance([[4.0], [1.0, 1.0]], math.log(2.0))


def test_instance_round_trip():
    inst = reference()
    assert inst.num_users == 2
    assert inst.gamma == [[4.0], [1.0, 1.0]]
    again = hnoma.SystemInstance.from_text(inst.to_text())
    assert again.gamma == inst.gamma
    assert inst.eps == pytest.approx(1.0)


def test_oma_and_rates():
    inst = reference()
    oma = hnoma.oma_profile(inst)
    assert hnoma.oma_total_power(inst) == pytest.approx(1.25)
    assert hnoma.is_feasible(inst, oma)
    assert hnoma.total_rate(inst, oma, 1) == pytest.approx(math.log(2.0))


def test_closed_form_reference():
    report, kind, label = hnoma.solve_two_user(1.0, 4.0, 1.0, math.log(2.0))
    assert kind == hnoma.CandidateKind.HNomaII
    assert label == "H-NOMA II"
    assert report.objective == pytest.approx(2 * math.sqrt(2) - 2)


def test_sca_and_bb_agree():
    inst = reference()
    sca = hnoma.sca_solve(inst)
    bb = hnoma.bb_solve(inst, xi=1e-3)
    assert sca.status == hnoma.SolveStatus.Converged
    assert abs(sca.objective - 0.828427) < 1e-3
    assert abs(bb.upper_bound - 0.828427) <= 1e-3 + 1e-6
    assert bb.lower_bound <= bb.upper_bound
    assert hnoma.is_feasible(inst, bb.profile)
    eta = bb.profile.reflection
    assert 0.0 <= eta[1][0] <= 1.0


def test_sampling_is_deterministic():
    a = hnoma.sample_instance("num_users = 3\n", seed=7)
    b = hnoma.sample_instance("num_users = 3\n", seed=7)
    assert a.gamma == b.gamma
    diag = [a.gamma[m][m] for m in range(3)]
    assert diag == sorted(diag, reverse=True)


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        hnoma.SystemInstance([[1.0], [1.0]], 1.0)
    with pytest.raises(ValueError):
        hnoma.sample_instance("bogus = 1\n")
    with pytest.raises(ValueError):
        hnoma.run_figure("fig9")


def test_figure_csv():
    csv = hnoma.run_figure("fig3", trials=20)
    assert "# content_hash = fnv1a64:" in csv
    assert "H-NOMA III" in csv
