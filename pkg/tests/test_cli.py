import json

import pytest

from inclogic import cli
from inclogic.syntax import parse_formula


@pytest.fixture
def models(tmp_path):
    assert cli.main(["examples", "--write-models", str(tmp_path)]) == 0
    return tmp_path


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_true_and_false(models, capsys):
    cycle = "exists x. exists y. ((y) <= (x) & E(x,y))"
    assert run(capsys, "eval", models / "two_cycle.model", cycle)[:2] == (0, "true\n")
    assert run(capsys, "eval", models / "path.model", cycle)[:2] == (1, "false\n")


def test_eval_with_team_and_both_engines(models, capsys):
    code, out, _ = run(capsys, "eval", models / "two_cycle.model", "(x,y) <= (y,x)",
                       "--team", models / "swap.team", "--engine", "both")
    assert code == 0
    assert out.splitlines() == ["naive: true", "gfp: true", "agree: true"]


def test_eval_json(models, capsys):
    code, out, _ = run(capsys, "eval", models / "path.model", "exists x. E(x,x)", "--json",
                       "--engine", "both")
    payload = json.loads(out)
    assert code == 1 and payload["value"] is False and payload["agree"] is True


def test_eval_fixpoint_engine(models, capsys):
    f = "exists z. gfp R(x). (exists y. (E(x,y) & R(y))) @ (z)"
    assert run(capsys, "eval", models / "two_cycle.model", f, "--engine", "gfp")[0] == 0
    assert run(capsys, "eval", models / "path.model", f, "--engine", "gfp")[0] == 1
    assert run(capsys, "eval", models / "path.model", f)[0] == 2


def test_eval_disagreement_exit_code(models, capsys, monkeypatch):
    monkeypatch.setattr(cli, "_fixpoint_verdict", lambda *a: False)
    code, out, _ = run(capsys, "eval", models / "two_cycle.model", "x = x",
                       "--team", models / "swap.team", "--engine", "both")
    assert code == 3 and "agree: false" in out


@pytest.mark.parametrize("argv", [
    ["eval", "missing.model", "x = x"],
    ["eval", "{model}", "exists x. (x) <="],
    ["eval", "{model}", "E(x,y)"],
    ["gfp2", "x"],
])
def test_eval_errors(models, capsys, argv):
    argv = [a.replace("{model}", str(models / "two_cycle.model")) for a in argv]
    if argv[0] == "gfp2":
        with pytest.raises(SystemExit) as exc:
            cli.main(argv)
        assert exc.value.code == 2
        return
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_translate_inc2gfp_output_parses(capsys):
    code, out, _ = run(capsys, "translate", "inc2gfp", "(y) <= (x)", "--vars", "x,y")
    assert code == 0
    parse_formula(out.strip())
    code, out, _ = run(capsys, "translate", "inc2gfp", "exists x. exists y. ((y) <= (x) & E(x,y))")
    assert code == 0 and "gfp" in out


def test_translate_gfp2inc(capsys):
    code, out, _ = run(capsys, "translate", "gfp2inc",
                       "exists z. gfp R(x). (exists y. (E(x,y) & R(y))) @ (z)", "--json")
    payload = json.loads(out)
    assert code == 0 and "<=" in payload["output"]
    parse_formula(payload["output"])


def test_translate_gfp2inc_rejects_non_normal_form(capsys):
    code, _, err = run(capsys, "translate", "gfp2inc", "gfp R(x). R(x) @ (z)")
    assert code == 2 and "existential prefix" in err


def test_translate_myopic(capsys):
    code, out, _ = run(capsys, "translate", "myopic2inc",
                       "forall x. (R(x) -> exists y. (R(y) & E(x,y)))")
    assert code == 0 and "<=" in out
    assert run(capsys, "translate", "myopic2inc", "forall x. (R(x) -> !R(x))")[0] == 2


def test_gfp_verb(models, capsys):
    code, out, _ = run(capsys, "gfp", models / "path.model", "exists y. (E(x,y) & R(y))",
                       "--vars", "x")
    assert code == 0 and out.strip() == "{  }"
    code, out, _ = run(capsys, "gfp", models / "path.model", "E(x,y) | exists z. (E(x,z) & R(z,y))",
                       "--vars", "x,y", "--kind", "lfp")
    assert out.strip() == "{ (0,1) (0,2) (1,2) }"


def test_efgame_presets(capsys):
    code, out, _ = run(capsys, "efgame", "solve", "--preset", "efex", "--n", "1")
    assert code == 0 and out.startswith("winner: Duplicator")
    code, out, _ = run(capsys, "efgame", "solve", "--preset", "patom", "--json")
    payload = json.loads(out)
    assert payload["winner"] == "Spoiler" and payload["move"].startswith("dup")
    assert run(capsys, "efgame", "solve", "--preset", "nope")[0] == 2


def test_efgame_guard_and_replay(tmp_path, capsys):
    assert run(capsys, "efgame", "solve", "--preset", "efex", "--n", "4")[0] == 2
    moves = tmp_path / "moves.txt"
    moves.write_text("dup x\n")
    saved = tmp_path / "saved.txt"
    code, out, _ = run(capsys, "efgame", "replay", "--preset", "efex", "--replay", moves,
                       "--transcript", saved)
    assert code == 0 and "winner: Duplicator" in out
    assert saved.read_text() == "dup x\n"
    moves.write_text("")
    assert run(capsys, "efgame", "replay", "--preset", "efex", "--replay", moves)[0] == 2


def test_suite_unknown_and_subset(capsys):
    assert run(capsys, "suite", "nonsense")[0] == 2
    code, out, err = run(capsys, "suite", "acceptance", "--only", "3")
    payload = json.loads(out)
    assert code == 0 and payload["passed"]
    assert [c["number"] for c in payload["criteria"]] == [3]
    assert err.split()[:2] == ["[PASS]", "3"]


def test_examples_lists_worked_examples(capsys):
    code, out, _ = run(capsys, "examples", "--json")
    names = [item["name"] for item in json.loads(out)["examples"]]
    assert code == 0 and "cycle sentence" in names and "predicate game" in names
