import io
import json

import jsonschema
import pytest

from stringtop import cli, service

SCHEMA = json.loads(service.SCHEMA_PATH.read_text())


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run("--format", "json", *argv)
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    return code, doc


def test_shipped_schema_matches_models():
    assert SCHEMA == service.output_schema()


@pytest.mark.parametrize("argv,expected", [
    (["bracket", "--surface", "torus", "a^2 b", "b"], "2·a^2 b^2"),
    (["homology", "--space", "S3", "--degree", "5"], "Z/2 ⟨(α⊗y^2)x⟩"),
    (["bracket", "a", "b", "a^-1", "--op", "jacobi"], "0"),
    (["bracket", "--space", "S1", "--op", "delta", "a⊗x^3"], "3·1⊗x^3"),
    (["bracket", "--space", "S3", "--op", "product", "α⊗y", "α⊗y^2"], "0"),
    (["derived", "3", "a^3 b^6"], "true"),
    (["derived", "2", "a^3", "--reachable"], "false"),
    (["string-bracket", "e(a⊗x^2)", "e(a⊗x^3)", "--space", "S1"], "4·e(1⊗x^5)"),
    (["string-bracket", "α⊗y^2", "α⊗y^3", "--space", "S3"], "2·(α⊗y^4)x"),
    (["string-bracket", "e(b*v)", "e(b*v^2)", "--space", "S4"], "6·e(v^3)"),
    (["string-bracket", "e(x[1,1])", "e(x[1,-1])", "--space", "T"], "e(z[2,0])"),
    (["string-bracket", "--op", "marking", "e(a⊗x^3)", "--space", "S1"], "3·1⊗x^3"),
    (["string-bracket", "--op", "erasing", "α⊗y", "--space", "S3"], "α⊗y"),
    (["center", "e(x[2,0])"], "true"),
    (["center", "e(1[1,0])"], "false"),
    (["homology", "--surface", "g2", "--degree", "1", "--classes", "g1:3"],
     "Z ⟨e(a1)⟩ ⊕ Z ⟨e(b1)⟩ ⊕ Z ⟨e(a2)⟩ ⊕ Z ⟨e(b2)⟩ ⊕ Z/3 ⟨e(β[g1])⟩"),
])
def test_text_outputs(argv, expected):
    code, out, err = run(*argv)
    assert (code, out.strip()) == (0, expected), err


def test_verify_gysin_s3():
    code, out, _ = run("verify", "--gysin", "S3", "--max-degree", "20")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[-1] == "exact" and any("pass" in l for l in lines)


def test_witness_text():
    code, out, _ = run("witness", "a^2 b^-1")
    assert code == 0 and out.strip().endswith("=  a^2 b^-1")


def test_lcs_text():
    code, out, _ = run("lcs", "2", "a^2 b^2", "--depth", "3")
    assert code == 0 and out.strip().endswith("2·a^2 b^2")


def test_parse_error_exit_1_with_position():
    code, out, err = run("bracket", "a^x", "b")
    assert code == 1 and not out
    assert "position 2" in err and "^" in err


def test_domain_error_exit_1_one_line():
    code, _, err = run("witness", "1")
    assert code == 1 and len(err.strip().splitlines()) == 1


def test_bad_flags_exit_1():
    assert run("homology", "--space", "S3")[0] == 1
    assert run("frobnicate")[0] == 1


def test_verification_failure_exit_2(tmp_path):
    bad = [
        {"domain": {"generators": [{"order": 0}]}, "codomain": {"generators": [{"order": 0}]},
         "matrix": [[2]]},
        {"domain": {"generators": [{"order": 0}]}, "codomain": {"generators": [{"order": 0}]},
         "matrix": [[0]]},
        {"domain": {"generators": [{"order": 0}]}, "codomain": {"generators": []},
         "matrix": []},
    ]
    path = tmp_path / "seq.json"
    path.write_text(json.dumps(bad))
    code, out, err = run("verify", "--exact", str(path))
    assert code == 2
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    assert doc["data"]["exact"] is False
    assert [n["status"] for n in doc["data"]["nodes"]].count("fail") >= 1
    assert "NOT exact" in err


def test_exact_file_passes(tmp_path):
    ok = [{"domain": {"generators": [{"order": 0}]}, "codomain": {"generators": [{"order": 0}]},
           "matrix": [[3]]},
          {"domain": {"generators": [{"order": 0}]}, "codomain": {"generators": [{"order": 3}]},
           "matrix": [[1]]}]
    path = tmp_path / "seq.json"
    path.write_text(json.dumps({"maps": ok}))
    assert run("verify", "--exact", str(path))[0] == 0


def test_missing_file_exit_1():
    assert run("verify", "--exact", "/nonexistent/seq.json")[0] == 1


def test_max_degree_env_cap(monkeypatch):
    monkeypatch.setenv("STRINGTOP_MAX_DEGREE", "8")
    code, _, err = run("verify", "--gysin", "S3", "--max-degree", "20")
    assert code == 1 and "STRINGTOP_MAX_DEGREE" in err


JSON_CASES = [
    ["bracket", "--surface", "torus", "a^2 b", "b"],
    ["bracket", "--space", "S4", "--op", "delta", "b*v"],
    ["witness", "a^3 b"],
    ["derived", "4", "a^2 b^2"],
    ["lcs", "3", "a^3", "--depth", "2"],
    ["homology", "--space", "S3", "--degree", "7"],
    ["homology", "--surface", "T", "--degree", "1", "--window=-1:1,0:2", "--blocks"],
    ["homology", "--space", "S5", "--degree", "13"],
    ["string-bracket", "e(1[1,0])", "e(1[0,1])", "--space", "T"],
    ["verify", "--gysin", "S1", "--max-degree", "6"],
    ["verify", "--torus", "--window=-1:1,-1:1", "--max-degree", "5"],
    ["verify", "--surface", "g2", "--classes", "g1:3,e", "--max-degree", "5"],
    ["audit", "--space", "S5", "--max-k", "4"],
    ["center", "e(y[0,3])"],
    ["bracket", "a^", "b"],
]


@pytest.mark.parametrize("argv", JSON_CASES, ids=lambda a: " ".join(a))
def test_json_outputs_validate(argv):
    code, doc = run_json(*argv)
    assert doc["exit_code"] == code
    assert doc["ok"] == (code == 0)


def test_json_homology_fields():
    _, doc = run_json("homology", "--space", "S3", "--degree", "7")
    g = doc["data"]["group"]
    assert g["free_rank"] == 0 and sorted(g["torsion"]) == [2, 3]


def test_json_unresolved_block():
    _, doc = run_json("homology", "--space", "S5", "--degree", "13")
    assert doc["data"]["group"]["unresolved_order"] == 6


def test_json_parse_error_position():
    code, doc = run_json("bracket", "a^", "b")
    assert code == 1 and doc["error"]["position"] == 2


def test_format_flag_after_subcommand():
    code, out, _ = run("derived", "1", "a", "--format", "json")
    assert code == 0 and json.loads(out)["text"] == "true"


def test_audit_text():
    code, out, _ = run("audit", "--space", "S5", "--max-k", "5")
    assert code == 0 and out.strip().endswith("consistent")
