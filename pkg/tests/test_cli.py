import io
import subprocess
import sys
from pathlib import Path

import pytest

from relcomm.cli import load_config, main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


@pytest.mark.parametrize("m,count", [(2, 2), (3, 5), (4, 14)])
def test_bracketings(m, count):
    code, text = run("bracketings", "--m", str(m))
    assert code == 0
    assert text.splitlines()[-1] == f"{count} trees (Catalan number {count})"
    assert len(text.splitlines()) == count + 1


def test_unknown_subcommand_exit_2():
    assert run("frobnicate")[0] == 2


def test_unknown_suite_exit_2():
    assert run("verify", "nosuch", "--config", str(CONFIGS / "z8.cfg"))[0] == 2


def test_missing_config_exit_2(tmp_path):
    assert run("verify", "habdank", "--config", str(tmp_path / "absent.cfg"))[0] == 2


def test_verify_inclusions_z8(tmp_path):
    path = tmp_path / "out.jsonl"
    code, text = run("verify", "habdank", "--config", str(CONFIGS / "z8.cfg"), "--emit", str(path))
    assert code == 0
    lines = path.read_text().splitlines()
    assert len(lines) == 5 and all('"status":"pass"' in line for line in lines)
    assert text.splitlines()[-1] == "5 checks: 5 pass"


def test_n2_config_refused_unless_unsafe(tmp_path):
    cfg = tmp_path / "n2.cfg"
    cfg.write_text("[instance]\nring = zmod:4\nn = 2\nideals = (2) | (2)\n")
    assert run("verify", "habdank", "--config", str(cfg))[0] == 2
    code, text = run("verify", "habdank", "--config", str(cfg), "--unsafe-n2")
    assert code == 0 and "skipped-hypotheses" in text


def test_config_parsing(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("[instance]\nring = zmod:36\nn = 3\nideals = (2)\n  (9)\n[run]\nmode = randomized\nseed = 4\n")
    conf = load_config(str(cfg))
    assert conf["ideals"] == ["(2)", "(9)"]
    assert conf["mode"] == "randomized" and conf["seed"] == 4


def test_ring_show():
    code, text = run("ring", "show", "zmod:12")
    assert code == 0
    assert "size        12" in text and "ideals      6" in text


def test_factor_triangular():
    code, text = run("factor", "triangular", "--ring", "zmod:4", "--n", "3", "--ideal", "(2)",
                     "--matrix", "[1 2 2; 0 1 2; 0 0 1]")
    assert code == 0 and "3 letters, evaluation matches" in text


def test_factor_whitehead():
    code, text = run("factor", "whitehead", "--ring", "zmod:8", "--n", "2", "--ideal", "(2)",
                     "--x", "[1 2; 0 1]", "--y", "[1 0; 2 1]")
    assert code == 0 and "evaluation matches" in text


def test_factor_certificate_rejects_non_elementary():
    code, text = run("factor", "certificate", "--ring", "zmod:8", "--n", "3", "--ideal", "(2)",
                     "--matrix", "[3 0 0; 0 1 0; 0 0 1]")
    assert code == 1 and "not in E(n, A, I)" in text


def test_rewrite_command():
    code, text = run("rewrite", "--ring", "zmod:4", "--n", "3", "--ideal", "(2)",
                     "--conj", "E 1 3 1", "--conj", "E 2 1 3", "--i", "1", "--j", "2", "--alpha", "2")
    assert code == 0 and "evaluation matches" in text


def test_rewrite_alpha_outside_ideal():
    assert run("rewrite", "--ring", "zmod:4", "--n", "3", "--ideal", "(2)", "--i", "1", "--j", "2",
               "--alpha", "1")[0] == 2


def test_search_nonassoc(tmp_path):
    code, text = run("search", "nonassoc", "--rings", "zmod:4", "--emit", str(tmp_path / "s.jsonl"))
    assert code == 0 and "3 checks: 3 pass" in text


def test_console_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "relcomm", "bracketings", "--m", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "5 trees" in proc.stdout
