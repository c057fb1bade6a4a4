"""End-to-end command-line tests driven through run()."""

import json

import pytest

from doublespend.cli import run

BCH_CONF = """\
name = bch
beta_per_block = 0.44
block_time_seconds = 600
gamma_override = 0.422
"""


@pytest.fixture
def bch_config(tmp_path):
    path = tmp_path / "bch.conf"
    path.write_text(BCH_CONF, encoding="utf-8")
    return str(path)


def _json_out(capsys):
    payload = json.loads(capsys.readouterr().out)
    return payload["params"], payload["result"]


class TestSmoke:
    def test_prob(self, capsys):
        assert run(["prob", "--pa", "0.35", "--nbc", "5",
                    "--cut-mult", "4", "--format", "json"]) == 0
        _, result = _json_out(capsys)
        assert result["p_as"] == pytest.approx(0.218, abs=0.001)

    def test_prob_unbounded_cut(self, capsys):
        assert run(["prob", "--pa", "0.35", "--nbc", "5",
                    "--cut-time", "inf"]) == 0
        assert "0.2287" in capsys.readouterr().out

    def test_pdf_row_count(self, capsys):
        assert run(["pdf", "--pa", "0.35", "--nbc", "2", "--cut-mult", "4",
                    "--points", "10", "--format", "csv"]) == 0
        lines = [l for l in capsys.readouterr().out.splitlines()
                 if not l.startswith("#")]
        assert lines[0] == "t_seconds,density,success_prob"
        assert len(lines) == 11

    def test_expect_time(self, capsys):
        assert run(["expect-time", "--pa", "0.35", "--nbc", "5",
                    "--cut-mult", "4", "--format", "json"]) == 0
        _, result = _json_out(capsys)
        assert result["e_tas_seconds"] == pytest.approx(5200.0, rel=1e-2)

    def test_profit(self, capsys):
        assert run(["profit", "--pa", "0.35", "--nbc", "5", "--cut-mult", "4",
                    "--gamma", "0.422", "--beta", "0.44",
                    "--value", "16.213960143975513",
                    "--format", "json"]) == 0
        params, result = _json_out(capsys)
        assert params["mu"] == pytest.approx(0.44 / 0.422, rel=1e-12)
        assert result["e_p"] == pytest.approx(0.0, abs=1e-9)

    def test_creq(self, capsys):
        assert run(["creq", "--pa", "0.35", "--nbc", "5", "--cut-mult", "4",
                    "--gamma", "0.422", "--beta", "0.44",
                    "--format", "json"]) == 0
        _, result = _json_out(capsys)
        assert result["c_req"] == pytest.approx(16.22, rel=1e-2)
        assert result["assessment"] == "profitable above required value"

    def test_table_csv_rows(self, capsys):
        assert run(["table", "--nbc", "1,3,5,7,9", "--pa", "0.35,0.4",
                    "--cut-mult", "4", "--format", "csv"]) == 0
        lines = [l for l in capsys.readouterr().out.splitlines()
                 if not l.startswith("#")]
        assert len(lines) == 11  # header plus ten cells

    def test_case_study(self, bch_config, capsys):
        assert run(["case-study", "--config", bch_config, "--pa", "0.35",
                    "--nbc", "5", "--cut-mult", "4", "--format", "json"]) == 0
        _, result = _json_out(capsys)
        assert result["network"] == "bch"
        assert result["c_req"] == pytest.approx(16.22, rel=1e-2)

    def test_case_study_cut_time_converts(self, bch_config, capsys):
        assert run(["case-study", "--config", bch_config, "--pa", "0.35",
                    "--nbc", "5", "--cut-time", "12000",
                    "--format", "json"]) == 0
        _, result = _json_out(capsys)
        assert result["c"] == pytest.approx(4.0, rel=1e-12)

    def test_compare_premine(self, capsys):
        assert run(["compare-premine", "--pa", "0.35", "--nbc", "5",
                    "--format", "json"]) == 0
        _, result = _json_out(capsys)
        assert result["p_dsa"] == pytest.approx(0.2287, abs=5e-4)
        assert result["ratio"] > 1.0

    def test_simulate(self, capsys):
        assert run(["simulate", "--pa", "0.35", "--nbc", "2",
                    "--cut-mult", "4", "--trials", "300", "--seed", "9",
                    "--format", "json"]) == 0
        _, result = _json_out(capsys)
        assert result["trials"] == 300
        assert 0.0 < result["p_as_hat"] < 1.0

    def test_simulate_with_profit(self, capsys):
        assert run(["simulate", "--pa", "0.35", "--nbc", "2",
                    "--cut-mult", "4", "--trials", "200", "--seed", "9",
                    "--gamma", "0.422", "--beta", "0.44", "--value", "5",
                    "--format", "json"]) == 0
        _, result = _json_out(capsys)
        assert "mean_profit" in result

    def test_market_gamma(self, tmp_path, capsys):
        conf = tmp_path / "m.conf"
        conf.write_text(
            "name = bch\nbeta_per_block = 0.44\nblock_time_seconds = 600\n"
            f"rental_price_per_hash = {0.422 / 600 / 2.35e18!r}\n"
            "network_hashrate = 2.35e18\n", encoding="utf-8")
        assert run(["market-gamma", "--config", str(conf),
                    "--format", "json"]) == 0
        _, result = _json_out(capsys)
        assert result["gamma"] == pytest.approx(0.422, rel=1e-12)


class TestExitCodes:
    def test_missing_cut_flag(self, capsys):
        assert run(["prob", "--pa", "0.35", "--nbc", "5"]) == 2

    def test_conflicting_cut_flags(self, capsys):
        assert run(["prob", "--pa", "0.35", "--nbc", "5",
                    "--cut-time", "100", "--cut-mult", "4"]) == 2

    def test_conflicting_rate_flags(self, capsys):
        assert run(["prob", "--pa", "0.35", "--nbc", "5", "--cut-mult", "4",
                    "--lambda-h", "0.001", "--block-time", "600"]) == 2

    def test_out_of_domain_share(self, capsys):
        assert run(["prob", "--pa", "1.5", "--nbc", "5",
                    "--cut-mult", "4"]) == 2
        assert capsys.readouterr().err.startswith("error:")

    def test_missing_config_file(self, tmp_path, capsys):
        assert run(["case-study", "--config", str(tmp_path / "nope.conf"),
                    "--pa", "0.35", "--nbc", "5", "--cut-mult", "4"]) == 2

    def test_gamma_without_beta(self, capsys):
        assert run(["simulate", "--pa", "0.35", "--nbc", "2",
                    "--cut-mult", "4", "--trials", "10",
                    "--gamma", "0.422"]) == 2
        assert "together" in capsys.readouterr().err

    def test_unknown_subcommand(self, capsys):
        assert run(["frobnicate"]) == 2

    def test_simulate_unbounded_without_cap(self, capsys):
        assert run(["simulate", "--pa", "0.35", "--nbc", "1",
                    "--cut-time", "inf", "--trials", "10"]) == 2
        assert "event_cap" in capsys.readouterr().err


def test_repeat_invocations_byte_identical(capsys):
    argv = ["simulate", "--pa", "0.35", "--nbc", "2", "--cut-mult", "4",
            "--trials", "500", "--seed", "31", "--format", "csv"]
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv) == 0
    assert capsys.readouterr().out == first


def test_out_flag_writes_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    assert run(["prob", "--pa", "0.35", "--nbc", "5", "--cut-mult", "4",
                "--format", "json", "--out", str(target)]) == 0
    assert capsys.readouterr().out == ""
    payload = json.loads(target.read_text(encoding="utf-8"))
    assert payload["result"]["p_as"] == pytest.approx(0.218, abs=0.001)


def test_simulate_trace_file(tmp_path, capsys):
    trace = tmp_path / "trials.csv"
    assert run(["simulate", "--pa", "0.35", "--nbc", "2", "--cut-mult", "4",
                "--trials", "25", "--seed", "3", "--trace", str(trace)]) == 0
    lines = trace.read_text(encoding="utf-8").strip().splitlines()
    assert lines[0] == "trial,success,t_dsa,blocks_a,blocks_h"
    assert len(lines) == 26
