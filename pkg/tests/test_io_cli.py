import io as stdio
import json
import random
from pathlib import Path

import pytest

from dynobs import io
from dynobs.cli import main
from dynobs.errors import InputError
from dynobs.generate import random_game, random_observer, random_plant
from dynobs.synthesis import most_permissive_observer

MODELS = Path(__file__).resolve().parent.parent / "models"


def run_cli(*argv):
    buf = stdio.StringIO()
    code = main([str(a) for a in argv], out=buf)
    text = buf.getvalue()
    return code, (json.loads(text) if text.startswith("{") else text)


@pytest.mark.parametrize("name", ["B.plant", "fig2.obs", "B_k2.mpo", "B_k2_cost.game"])
def test_shipped_models_round_trip(name):
    text = (MODELS / name).read_text()
    assert io.serialize(io.parse_model(text)) == text


def test_random_models_round_trip():
    rng = random.Random(5)
    for _ in range(40):
        plant = random_plant(rng)
        models = [plant, random_observer(rng, plant.alphabet), random_game(rng)]
        mpo = most_permissive_observer(plant, rng.randint(0, 2))
        if mpo is not None:
            models.append(mpo)
        for m in models:
            text = io.serialize(m)
            again = io.parse_model(text)
            assert io.serialize(again) == text
            assert again == m


BAD = """format 1
plant P
alphabet a
states s0
initial s0
trans s0 _fault s1
"""


def test_parse_error_has_line_number():
    with pytest.raises(InputError, match="line 6"):
        io.parse_model(BAD)


@pytest.mark.parametrize("text, needle", [
    ("format 2\nplant P\n", "format"),
    ("format 1\nplant P\nalphabet a _u\nstates s\ninitial s\n", "line 3"),
    ("format 1\nplant P\nalphabet a\nalphabet a\nstates s\ninitial s\n", "line 4"),
    ("format 1\nobserver O\nalphabet a\nstates 0\ninitial 0\ntrans 0 _eps 0\nwatch 0\n", "line 6"),
    ("format 1\ngame G\nvertex x 3\n", "line 3"),
])
def test_parse_errors(text, needle):
    with pytest.raises(InputError, match=needle):
        io.parse_model(text)


def test_diagnose_cli():
    code, doc = run_cli("diagnose", "--plant", MODELS / "B.plant", "--obs", MODELS / "fig2.obs")
    assert code == 0 and doc["verdict"]["min_k"] == 2 and doc["schema"] == "dynobs-result/1"
    code, doc = run_cli("diagnose", "--plant", MODELS / "B.plant", "--obs", MODELS / "fig2.obs", "--k", 1)
    assert code == 1 and "counterexample" in doc["verdict"]


def test_diagnose_static_cli():
    code, doc = run_cli("diagnose-static", "--plant", MODELS / "B.plant", "--observe", "a")
    assert code == 1 and doc["verdict"]["counterexample"]["faulty"]["cycle"]
    code, doc = run_cli("diagnose-static", "--plant", MODELS / "B.plant", "--observe", "a,b", "--k", 1)
    assert code == 0


def test_synthesize_matches_shipped_mpo(tmp_path):
    out = tmp_path / "m.mpo"
    code, doc = run_cli("synthesize", "--plant", MODELS / "B.plant", "--k", 2, "--out", out)
    assert code == 0 and doc["initial_allowed"] == [["a"], ["a", "b"]]
    assert out.read_text() == (MODELS / "B_k2.mpo").read_text()
    assert run_cli("synthesize", "--plant", MODELS / "B.plant", "--k", 0)[0] == 1


def test_membership_and_extract(tmp_path):
    code, doc = run_cli("membership", "--plant", MODELS / "B.plant", "--k", 2, "--obs", MODELS / "fig2.obs")
    assert code == 0 and doc["member"]
    out = tmp_path / "x.obs"
    code, _ = run_cli("extract", "--plant", MODELS / "B.plant", "--k", 2, "--selector", "smallest", "--out", out)
    assert code == 0
    code, doc = run_cli("membership", "--plant", MODELS / "B.plant", "--k", 2, "--obs", out)
    assert code == 0
    assert run_cli("extract", "--plant", MODELS / "B.plant", "--k", 2, "--selector", "bogus")[0] == 2


def test_cost_cli():
    code, doc = run_cli("cost", "--plant", MODELS / "B.plant", "--obs", MODELS / "fig2.obs")
    assert code == 0 and doc["cost"] == {"num": 1, "den": 1}


def test_optimal_cli_rejects_decimal_budget():
    assert run_cli("optimal", "--plant", MODELS / "B.plant", "--k", 2, "--budget", "0.5")[0] == 2
    assert run_cli("optimal", "--plant", MODELS / "B.plant", "--k", 2, "--budget", "-1/2")[0] == 2


def test_error_exit_codes(tmp_path):
    assert run_cli("diagnose", "--plant", tmp_path / "missing", "--obs", MODELS / "fig2.obs")[0] == 2
    code, doc = run_cli("synthesize", "--plant", MODELS / "B.plant", "--k", 2, "--cap", 1)
    assert code == 3 and doc["cap"] == 1
    assert run_cli("bogus-command")[0] == 2
    # a plant given where an observer is expected
    assert run_cli("cost", "--plant", MODELS / "B.plant", "--obs", MODELS / "B.plant")[0] == 2


def test_validate_cli():
    assert run_cli("validate", "--in", MODELS / "fig2.obs")[1]["valid"]
    assert run_cli("validate", "--in", MODELS / "B_k2_cost.game")[0] == 0


def test_output_is_deterministic():
    argv = ("optimal", "--plant", MODELS / "B.plant", "--k", 2)
    first, second = stdio.StringIO(), stdio.StringIO()
    main([str(a) for a in argv], out=first)
    main([str(a) for a in argv], out=second)
    assert first.getvalue() == second.getvalue()


@pytest.mark.parametrize("name", ["B.plant", "fig2.obs", "B_k2.mpo", "B_k2_cost.game"])
def test_export_dot(name):
    code, text = run_cli("export-dot", "--in", MODELS / name)
    assert code == 0 and text.startswith("digraph") and text.rstrip().endswith("}")


def test_dot_labels():
    dot = io.export_dot(io.parse_model((MODELS / "B.plant").read_text()))
    assert "ε" in dot and "f" in dot
    dot = io.export_dot(io.parse_model((MODELS / "fig2.obs").read_text()))
    assert "{}" in dot and "{a}" in dot


def test_selfcheck_cli():
    code, doc = run_cli("selfcheck", "--count", 10, "--seed", 2)
    assert code == 0 and doc["failures"] == []
