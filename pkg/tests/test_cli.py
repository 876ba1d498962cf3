import io
import json
from contextlib import redirect_stdout

from eisq.cli import EXIT_CAP, EXIT_OK, EXIT_VALIDATION, canonical_json, main


def run_cli(*argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


def test_classnum_table():
    code, out = run_cli("classnum", "--p", "23")
    assert code == EXIT_OK
    assert "h = 3" in out and "(2,1,3)" in out


def test_classnum_json_example():
    code, out = run_cli("classnum", "--p", "7", "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out) == {"p": 7, "h": 1, "forms": [[1, 1, 2]]}


def test_classnum_validation_exit():
    code, _ = run_cli("classnum", "--p", "4")
    assert code == EXIT_VALIDATION
    code, _ = run_cli("classnum")
    assert code == EXIT_VALIDATION


def test_selmer_single_with_oracle():
    code, out = run_cli("selmer", "--p", "7", "--d", "-11", "--oracle")
    assert code == EXIT_OK
    assert "rank = 3" in out and "agrees" in out


def test_selmer_minimal_case():
    code, out = run_cli("selmer", "--p", "7", "--d", "5")
    assert code == EXIT_OK
    assert "rank = 1" in out


def test_selmer_sweep_tsv():
    code, out = run_cli("selmer", "--p", "7", "--d-range", "-40..40", "--format", "tsv")
    assert code == EXIT_OK
    rows = [line.split("\t") for line in out.strip().splitlines()]
    assert len(rows) >= 10
    ds = [int(r[0]) for r in rows]
    assert -11 in ds and 5 in ds


def test_selmer_needs_d():
    code, _ = run_cli("selmer", "--p", "7")
    assert code == EXIT_VALIDATION


def test_selmer_cap_exit():
    import os

    os.environ["EISQ_ORACLE_CAP"] = "4"
    try:
        code, _ = run_cli("selmer", "--p", "7", "--d", "-3", "--oracle")
        assert code == EXIT_CAP
    finally:
        del os.environ["EISQ_ORACLE_CAP"]


def test_eta_special():
    code, out = run_cli("eta", "--N", "49", "--special")
    assert code == EXIT_OK
    assert "ok=True" in out and "class order 2" in out


def test_eta_explicit_exponents():
    code, out = run_cli("eta", "--N", "11", "--r", "12,-12")
    assert code == EXIT_OK
    assert "5*[1]" in out and "class order 5" in out


def test_eta_failing_condition():
    code, out = run_cli("eta", "--N", "49", "--r", "1,-1,0")
    assert code == EXIT_OK
    assert "weighted_mod24=False" in out and "ok=False" in out


def test_eta_wrong_exponent_count():
    code, _ = run_cli("eta", "--N", "49", "--r", "1,-1")
    assert code == EXIT_VALIDATION


def test_heegner_prime_level():
    code, out = run_cli("heegner", "--p", "11", "--K", "-7", "--q", "5")
    assert code == EXIT_OK
    assert "NONTORSION" in out


def test_heegner_p2():
    code, out = run_cli("heegner", "--p2", "13", "--K", "-3", "--q", "7", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["conclusion"] == "nontorsion" and doc["criterion"] == "p2_level"


def test_heegner_q2_routes_to_two_eisenstein():
    code, out = run_cli("heegner", "--p", "73", "--K", "-19", "--q", "2")
    assert code == EXIT_OK
    assert "prime_level_2" in out and "NONTORSION" in out


def test_heegner_ns():
    code, out = run_cli("heegner", "--ns", "73", "--K", "-19")
    assert code == EXIT_OK
    assert "u = 3" in out and "NONTORSION" in out


def test_heegner_inconclusive_annotation():
    code, out = run_cli("heegner", "--p", "11", "--K", "-79", "--q", "5")
    assert code == EXIT_OK
    assert "INCONCLUSIVE" in out and "one-way" in out


def test_eigencheck():
    code, out = run_cli("eigencheck", "--p", "5", "--prec", "200")
    assert code == EXIT_OK
    assert "all pass" in out
    code, out = run_cli("eigencheck", "--p", "7", "--prec", "40")
    assert code == EXIT_OK
    assert "warning: insufficient precision" in out


def test_json_round_trip_byte_identical():
    for argv in (
        ("classnum", "--p", "23", "--format", "json"),
        ("selmer", "--p", "7", "--d", "-11", "--oracle", "--format", "json"),
        ("eta", "--N", "49", "--special", "--format", "json"),
        ("heegner", "--p", "11", "--K", "-7", "--q", "5", "--format", "json"),
        ("eigencheck", "--p", "5", "--prec", "120", "--format", "json"),
    ):
        _, out = run_cli(*argv)
        parsed = json.loads(out)
        assert canonical_json(parsed) + "\n" == out


def test_determinism_two_runs():
    for argv in (
        ("selmer", "--p", "7", "--d-range", "-60..60", "--format", "json"),
        ("eta", "--N", "121", "--special", "--format", "json"),
    ):
        _, first = run_cli(*argv)
        _, second = run_cli(*argv)
        assert first == second


def test_internal_consistency_exit(monkeypatch):
    import eisq.cli as cli_mod
    from eisq.selmer import BruteForceResult

    def broken_oracle(td, cap=None):
        return BruteForceResult(dim_f2=99, basis=(), alpha_survivors=(), beta_survivors=())

    monkeypatch.setattr(cli_mod.selmer, "selmer_group_bruteforce", broken_oracle)
    code, _ = run_cli("selmer", "--p", "7", "--d", "5", "--oracle")
    assert code == 3


def test_no_floats_anywhere():
    for argv in (
        ("eta", "--N", "49", "--r", "1,-1,0", "--format", "json"),
        ("selmer", "--p", "7", "--d", "-11", "--format", "json"),
    ):
        _, out = run_cli(*argv)

        def walk(x):
            assert not isinstance(x, float)
            if isinstance(x, dict):
                for v in x.values():
                    walk(v)
            elif isinstance(x, list):
                for v in x:
                    walk(v)

        walk(json.loads(out))
