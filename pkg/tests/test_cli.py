import io
import os
import subprocess
from pathlib import Path

from beliefprop.cli import run

FIXTURES = Path(__file__).parent / "fixtures"
CHAIN = str(FIXTURES / "chain.bn")
FIG1 = str(FIXTURES / "fig1.bn")
DETERMINISTIC = str(FIXTURES / "deterministic.bn")


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


class TestValidate:
    def test_ok(self):
        code, out, _ = cli("validate", CHAIN)
        assert (code, out) == (0, "ok\n")

    def test_parse_error_exit_2(self, tmp_path):
        bad = tmp_path / "bad.bn"
        bad.write_text("var A : f t\ncpt A :\n  0.5 0.6\n")
        code, _, err = cli("validate", str(bad))
        assert code == 2
        assert "3:3" in err and "row sum" in err

    def test_validation_error_exit_3(self, tmp_path):
        cyclic = tmp_path / "cyclic.bn"
        cyclic.write_text(
            "var A : f t\nvar B : f t\n"
            "cpt A | B :\n  f : 0.5 0.5\n  t : 0.5 0.5\n"
            "cpt B | A :\n  f : 0.5 0.5\n  t : 0.5 0.5\n"
        )
        code, out, _ = cli("validate", str(cyclic))
        assert code == 3
        assert "cycle" in out

    def test_missing_file_is_usage(self):
        code, _, err = cli("validate", "no-such-file.bn")
        assert code == 1

    def test_infer_on_invalid_net_exit_3(self, tmp_path):
        partial = tmp_path / "partial.bn"
        partial.write_text("var A : f t\nvar B : f t\ncpt A :\n  0.5 0.5\n")
        code, _, err = cli("infer", str(partial))
        assert code == 3
        assert "no cpt" in err


class TestInfer:
    def test_chain_posterior_line(self):
        code, out, _ = cli("infer", CHAIN, "-e", "B=f")
        assert code == 0
        assert out == "BEL(A) f=0.658537 t=0.341463\n"

    def test_default_queries_in_declaration_order(self):
        code, out, _ = cli("infer", FIG1, "-e", "x6=1")
        lines = out.splitlines()
        assert [ln.split()[0] for ln in lines] == [
            "BEL(x1)", "BEL(x2)", "BEL(x3)", "BEL(x4)", "BEL(x5)",
        ]

    def test_likelihood_line(self):
        code, out, _ = cli("infer", CHAIN, "-e", "B=f", "--likelihood")
        assert code == 0
        assert out.splitlines()[-1] == "P(e) = 0.41"

    def test_methods_agree_byte_for_byte(self):
        outs = set()
        for method in ("auto", "conditioning", "exact"):
            code, out, _ = cli("infer", FIG1, "-e", "x6=1", "--method", method)
            assert code == 0
            outs.add(out)
        assert len(outs) == 1

    def test_polytree_method_on_chain(self):
        code, out, _ = cli("infer", CHAIN, "-e", "B=f", "--method", "polytree")
        assert code == 0
        assert out == "BEL(A) f=0.658537 t=0.341463\n"

    def test_polytree_method_on_loopy_net_is_usage_error(self):
        code, _, err = cli("infer", FIG1, "--method", "polytree")
        assert code == 1
        assert "singly connected" in err

    def test_runs_are_deterministic(self):
        first = cli("infer", FIG1, "-e", "x6=1", "--likelihood")
        second = cli("infer", FIG1, "-e", "x6=1", "--likelihood")
        assert first == second

    def test_bad_evidence_is_usage(self):
        assert cli("infer", CHAIN, "-e", "B=zebra")[0] == 1
        assert cli("infer", CHAIN, "-e", "nope=f")[0] == 1
        assert cli("infer", CHAIN, "-e", "Bf")[0] == 1

    def test_unknown_query_is_usage(self):
        assert cli("infer", CHAIN, "-q", "Z")[0] == 1

    def test_impossible_evidence_exit_4(self):
        code, _, err = cli("infer", DETERMINISTIC, "-e", "A=f", "-e", "B=t")
        assert code == 4
        assert "impossible" in err

    def test_non_convergence_exit_5(self, monkeypatch):
        from beliefprop import cli as cli_mod
        from beliefprop.errors import ConvergenceError

        def explode(*args, **kwargs):
            raise ConvergenceError("forced for the exit-code contract")

        monkeypatch.setattr(cli_mod.conditioning, "auto_infer", explode)
        code, _, err = cli("infer", CHAIN, "-e", "B=f")
        assert code == 5
        assert "internal error" in err

    def test_likelihood_agrees_across_methods(self):
        values = []
        for method in ("auto", "conditioning", "exact"):
            _, out, _ = cli("infer", FIG1, "-e", "x6=1", "--likelihood",
                            "--method", method)
            values.append(float(out.splitlines()[-1].split("=")[1]))
        assert max(values) - min(values) <= 1e-9

    def test_explicit_query_subset(self):
        code, out, _ = cli("infer", FIG1, "-e", "x6=1", "-q", "x2")
        assert code == 0
        assert out.startswith("BEL(x2) ") and len(out.splitlines()) == 1

    def test_trace_file(self, tmp_path):
        trace = tmp_path / "trace.log"
        code, _, _ = cli("infer", CHAIN, "-e", "B=f", "--trace", str(trace))
        assert code == 0
        lines = trace.read_text().splitlines()
        assert lines
        assert all("arc=" in ln and "dir=" in ln for ln in lines)

    def test_trace_with_conditioning_tags_runs(self, tmp_path):
        trace = tmp_path / "trace.log"
        cli("infer", FIG1, "-e", "x6=1", "--trace", str(trace))
        lines = trace.read_text().splitlines()
        assert lines and all(ln.startswith("run x1=") for ln in lines)


class TestDsep:
    def test_separated(self):
        code, out, _ = cli("dsep", FIG1, "--x", "x2", "--y", "x3", "--given", "x1")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "d-separated"
        assert any(ln.startswith("path x2-x1-x3:") and "blocked" in ln for ln in lines)

    def test_connected(self):
        code, out, _ = cli("dsep", FIG1, "--x", "x2", "--y", "x3", "--given", "x1,x6")
        assert out.splitlines()[0] == "connected"
        assert any("path x2-x5-x3: open" in ln for ln in out.splitlines())

    def test_no_given(self):
        code, out, _ = cli("dsep", CHAIN, "--x", "A", "--y", "B")
        assert code == 0
        assert out.splitlines()[0] == "connected"

    def test_unknown_name_is_usage(self):
        assert cli("dsep", FIG1, "--x", "zzz", "--y", "x3")[0] == 1

    def test_endpoint_in_given_is_usage(self):
        assert cli("dsep", FIG1, "--x", "x2", "--y", "x3", "--given", "x2")[0] == 1


class TestCutset:
    def test_fig1(self):
        code, out, _ = cli("cutset", FIG1)
        assert code == 0
        assert out == "members: x1\nassignments: 2\n"

    def test_exhaustive(self):
        code, out, _ = cli("cutset", FIG1, "--exhaustive")
        assert out == "members: x1\nassignments: 2\n"

    def test_polytree_has_empty_cutset(self):
        code, out, _ = cli("cutset", CHAIN)
        assert out == "members: (none)\nassignments: 1\n"


class TestUsage:
    def test_no_command(self):
        assert cli()[0] == 1

    def test_unknown_command(self):
        assert cli("frobnicate")[0] == 1

    def test_unknown_method(self):
        assert cli("infer", CHAIN, "--method", "quantum")[0] == 1


def test_console_script_entry_point():
    proc = subprocess.run(
        ["beliefprop", "infer", CHAIN, "-e", "B=f"],
        capture_output=True,
        text=True,
        env=dict(os.environ),
    )
    assert proc.returncode == 0
    assert proc.stdout == "BEL(A) f=0.658537 t=0.341463\n"
