import json

import pytest

from distmon.cli import EXIT_USAGE, main


@pytest.fixture
def trace_file(tmp_path):
    path = tmp_path / "trace.jsonl"
    rows = [{"A": ["a"], "B": ["b"]}, {"A": ["a"], "B": ["b"], "C": ["c"]}, {}, {}]
    path.write_text("".join(json.dumps({"t": t, "components": c}) + "\n" for t, c in enumerate(rows)))
    return str(path)


class TestMonitor:
    def test_decentral(self, trace_file, capsys):
        assert main(["monitor", "-f", "F (a & b & c)", "--trace", trace_file]) == 0
        assert capsys.readouterr().out.strip() == "verdict=TOP t=3 monitor=B msgs=7"

    def test_central(self, trace_file, capsys):
        assert main(["monitor", "--mode", "central", "-f", "F (a & b & c)", "--trace", trace_file]) == 0
        assert capsys.readouterr().out.strip() == "verdict=TOP t=1 msgs=6"

    def test_exit_codes(self, trace_file, capsys):
        assert main(["monitor", "-f", "G a", "--trace", trace_file]) == 1
        assert main(["monitor", "-f", "G F a", "--trace", trace_file]) == 2

    def test_verbose_log(self, trace_file, capsys):
        main(["monitor", "-v", "-f", "F (a & b & c)", "--trace", trace_file])
        out = capsys.readouterr().out
        assert "t=0 A: " in out and "-> B" in out

    def test_generated_trace(self, capsys):
        assert main(["monitor", "-f", "F a", "--length", "20", "--seed", "1"]) == 0

    def test_formula_file(self, tmp_path, trace_file, capsys):
        f = tmp_path / "phi.ltl"
        f.write_text("F (a & b & c)\n")
        assert main(["monitor", "--formula-file", str(f), "--trace", trace_file]) == 0

    def test_arch_file(self, tmp_path, capsys):
        arch = tmp_path / "arch.json"
        arch.write_text(json.dumps({"components": [{"name": "L", "props": ["x"]}, {"name": "R", "props": ["y"]}]}))
        assert main(["monitor", "--arch", str(arch), "-f", "F (x & y)", "--length", "30"]) == 0
        assert "monitor=" in capsys.readouterr().out


class TestErrors:
    def test_malformed_formula(self, trace_file, capsys):
        assert main(["monitor", "-f", "F (a & & c)", "--trace", trace_file]) == EXIT_USAGE
        assert "position 7" in capsys.readouterr().err

    def test_unknown_atom(self, trace_file, capsys):
        assert main(["monitor", "-f", "F z", "--trace", trace_file]) == EXIT_USAGE

    @pytest.mark.parametrize("argv", [
        ["monitor", "--length", "3"],
        ["monitor", "-f", "a", "--formula-file", "x", "--length", "3"],
        ["monitor", "-f", "a"],
        ["monitor", "-f", "a", "--trace", "/nonexistent"],
        ["bench-pattern", "--pattern", "liveness"],
        ["bench-random", "--runs", "0"],
    ])
    def test_usage(self, argv, capsys):
        assert main(argv) == EXIT_USAGE
        assert capsys.readouterr().err.startswith("distmon: ")

    def test_argparse_errors(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["bogus"])
        assert exc.value.code == EXIT_USAGE
        with pytest.raises(SystemExit):
            main(["bench-random", "--sizes", "x..y"])


class TestCompare:
    def test_example(self, trace_file, capsys):
        assert main(["compare", "-f", "F (a & b & c)", "--trace", trace_file]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out == ["central   verdict=TOP t=1 msgs=6", "decentral verdict=TOP t=3 monitor=B msgs=7"]


class TestBench:
    def test_random_rows(self, capsys):
        assert main(["bench-random", "--sizes", "1..3", "--runs", "3", "--cap", "100"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("label,c_trace") and [l.split(",")[0] for l in lines[1:]] == ["1", "2", "3"]

    def test_pattern_rows(self, tmp_path, capsys):
        out = tmp_path / "p.csv"
        argv = ["bench-pattern", "--pattern", "absence,response", "--runs", "3", "--cap", "200", "--out", str(out)]
        assert main(argv) == 0
        assert len(out.read_text().splitlines()) == 3

    def test_arch_rows(self, capsys):
        assert main(["bench-arch", "--counts", "1,2", "--runs", "3", "--cap", "200"]) == 0
        assert capsys.readouterr().out.splitlines()[1].split(",")[4] == "0.0000"

    def test_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"runs": 2, "cap": 50, "labels": [2]}))
        assert main(["bench-random", "--config", str(cfg)]) == 0
        assert len(capsys.readouterr().out.splitlines()) == 2

    def test_deterministic(self, capsys):
        argv = ["bench-random", "--sizes", "2", "--runs", "1", "--seed", "5", "--cap", "100"]
        main(argv)
        first = capsys.readouterr().out
        main(argv)
        assert capsys.readouterr().out == first
