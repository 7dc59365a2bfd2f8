import json
import subprocess
import sys

import pytest

from stmod.cli import InputError, JobSpec, main, parse_map_file, parse_module_file, run


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def call(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


J2_C4 = {"p": 2, "group": "C4", "dim": 2, "action": [[[1, 0], [1, 1]]]}
K_C4 = {"p": 2, "group": "C4", "dim": 1, "action": [[[1]]]}


def test_parse_trivial_module(tmp_path):
    m = parse_module_file(write(tmp_path, "k.json", K_C4))
    assert m.dim == 1 and m.group.order == 4


def test_structured_group_spec(tmp_path):
    obj = dict(K_C4, group={"kind": "abelian", "p": 2, "factors": [4]})
    assert parse_module_file(write(tmp_path, "k.json", obj)).dim == 1


def test_noninvertible_rejected(tmp_path):
    obj = dict(J2_C4, action=[[[1, 0], [0, 0]]])
    with pytest.raises(InputError, match="invertible"):
        parse_module_file(write(tmp_path, "bad.json", obj))


def test_quaternion_relation_named(tmp_path, capsys):
    obj = {"p": 2, "group": "Q8", "dim": 3,
           "action": [[[1, 0, 0], [0, 1, 0], [0, 0, 1]], [[1, 0, 0], [1, 1, 0], [0, 1, 1]]]}
    path = write(tmp_path, "q8bad.json", obj)
    with pytest.raises(InputError, match="y\\^2=x\\^2"):
        parse_module_file(path)
    code, out, err = call(capsys, "ghost-length", "--module", path)
    assert code == 2 and out is None and "y^2=x^2" in err


@pytest.mark.parametrize("obj,msg", [
    ({"p": 2, "group": "C4", "dim": 1}, "missing field 'action'"),
    ({"p": 3, "group": "C4", "dim": 1, "action": [[[1]]]}, "does not match"),
    ({"p": 2, "group": "C4", "dim": 2, "action": [[[1]]]}, "2x2 integer matrix"),
    ({"p": 2, "group": "S3", "dim": 1, "action": [[[1]]]}, "bad group spec"),
    ({"p": 2, "group": "V4", "dim": 1, "action": [[[1]]]}, "must list 2 matrices"),
])
def test_schema_violations(tmp_path, obj, msg):
    with pytest.raises(InputError, match=msg):
        parse_module_file(write(tmp_path, "bad.json", obj))


def test_missing_and_invalid_files(tmp_path):
    with pytest.raises(InputError, match="no such file"):
        parse_module_file(tmp_path / "nope.json")
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(InputError, match="invalid JSON"):
        parse_module_file(p)


def test_map_file_must_intertwine(tmp_path):
    obj = {"group": "C4", "source": J2_C4, "target": J2_C4, "matrix": [[1, 0], [0, 0]]}
    with pytest.raises(InputError, match="intertwine"):
        parse_map_file(write(tmp_path, "m.json", obj))


def test_jennings_q8(capsys):
    code, rep, _ = call(capsys, "jennings", "--group", "Q8")
    assert code == 0
    assert rep["results"]["nilpotency_index"] == 5
    assert rep["results"]["chain"]["exponents"] == [2, 1]


def test_ghost_number_cyclic_command(capsys):
    code, rep, _ = call(capsys, "ghost-number-cyclic", "p=2", "r=3")
    assert code == 0 and rep["results"]["ghost_number"] == 4
    code, rep, _ = call(capsys, "ghost-number-cyclic", "3", "2")
    assert code == 0 and rep["results"]["ghost_number"] == 4


def test_ghost_number_cyclic_errors(capsys):
    assert call(capsys, "ghost-number-cyclic", "p=2", "r=5")[0] == 3
    assert call(capsys, "ghost-number-cyclic", "p=4", "r=1")[0] == 2
    assert call(capsys, "ghost-number-cyclic", "p=two")[0] == 2


def test_cap_order_flag(capsys):
    code, _, err = call(capsys, "jennings", "--group", "C2xC2xC2", "--cap-order", "4")
    assert code == 3 and "cap" in err


def test_heller_and_tate(capsys, tmp_path):
    code, rep, _ = call(capsys, "heller", "--group", "C4", "--shift", "1")
    assert code == 0 and rep["results"]["output"]["dim"] == 3
    assert rep["results"]["matches_shift_of_k"] in (1, -1)
    code, rep, _ = call(capsys, "tate", "--group", "V4", "--degrees", "-2", "2")
    assert rep["results"]["dims"] == {"-2": 2, "-1": 1, "0": 1, "1": 2, "2": 3}


def test_ghost_and_stable_triviality_commands(tmp_path, capsys):
    x = {"group": "C4", "source": J2_C4, "target": J2_C4, "matrix": [[0, 0], [1, 0]]}
    path = write(tmp_path, "x.json", x)
    code, rep, _ = call(capsys, "is-ghost", "--map", path)
    assert code == 0 and rep["results"]["verdict"]["status"] == "ghost-exact"
    code, rep, _ = call(capsys, "stably-trivial", "--map", path)
    assert rep["results"]["certificate"]["stably_trivial"] is False
    ident = dict(x, matrix=[[1, 0], [0, 1]])
    code, rep, _ = call(capsys, "is-ghost", "--map", write(tmp_path, "id.json", ident), "--window", "0", "1")
    verdict = rep["results"]["verdict"]
    assert verdict["status"] == "not-ghost" and verdict["window"] == [0, 1]


def test_empty_window_rejected(tmp_path, capsys):
    x = {"group": "C4", "source": J2_C4, "target": J2_C4, "matrix": [[0, 0], [1, 0]]}
    code, _, err = call(capsys, "is-ghost", "--map", write(tmp_path, "x.json", x), "--window", "2", "1")
    assert code == 2 and "window" in err


def test_ghost_length_and_bounds(tmp_path, capsys):
    code, rep, _ = call(capsys, "ghost-length", "--module", write(tmp_path, "j2.json", J2_C4))
    assert rep["results"]["report"]["ghost_length"] == 2
    code, rep, _ = call(capsys, "abelian-bounds", "--group", "C3xC3")
    assert code == 0 and [rep["results"]["lower"], rep["results"]["upper"]] == [3, 4]
    code, _, err = call(capsys, "abelian-bounds", "--group", "Q8")
    assert code == 2


def test_q8_example_command(capsys):
    code, rep, _ = call(capsys, "q8-example")
    assert code == 0 and rep["results"]["ghost_length"] == 2


def test_verify_single_and_unknown(capsys, tmp_path):
    out = tmp_path / "rep.json"
    code, rep, err = call(capsys, "verify", "heller-dims", "--json", str(out))
    assert code == 0 and rep["results"]["passed"] == 1
    assert "PASS" in err
    assert json.loads(out.read_text()) == rep
    assert call(capsys, "verify", "thm-9.9")[0] == 2


def test_reports_reproducible():
    job = JobSpec("verify", check="gh-cyclic", seed=7)
    a, _ = run(job)
    b, _ = run(job)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert "timing_s" not in a


def test_timing_opt_in():
    rep, _ = run(JobSpec("jennings", group="C4", timing=True))
    assert "timing_s" in rep


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "stmod", "jennings", "--group", "D16"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["results"]["nilpotency_index"] == 9
