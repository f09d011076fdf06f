"""CLI harness: config round-trips, artifact formats, determinism, exit codes."""
import json

import numpy as np
import pytest

from adamlab.cli import (
    EXIT_CHECK_FAILURE,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    QuadConfig,
    SignalConfig,
    SweepConfig,
    fmt_float,
    main,
    parse_config,
    serialize_config,
)

FAST_QUAD = [
    "quad",
    "--layout", "het",
    "--optim", "adameq",
    "--optim", "signum",
    "--steps", "50",
    "--seeds", "2",
    "--lr", "0.0078125",
]


class TestConfigRoundTrip:
    @pytest.mark.parametrize(
        "config",
        [
            QuadConfig(),
            QuadConfig(layouts=("hom",), seeds=(3, 5, 8), fixed_lr=2.0**-9, steps=123),
            SignalConfig(),
            SignalConfig(filters=("sign",), beta=0.8, length=77, decay=0.0),
            SweepConfig(),
            SweepConfig(equal_betas=True, kappas=(0.5, 2.0), lr_grid=(0.25, 0.125)),
        ],
    )
    def test_parse_serialize_identity(self, config):
        assert parse_config(serialize_config(config), config.command) == config

    def test_rejects_wrong_schema_version(self):
        text = serialize_config(QuadConfig()).replace('"schema_version": 1', '"schema_version": 9')
        with pytest.raises(ValueError):
            parse_config(text, "quad")

    def test_rejects_wrong_command(self):
        with pytest.raises(ValueError):
            parse_config(serialize_config(QuadConfig()), "sweep")

    def test_rejects_unknown_field(self):
        text = json.dumps({"schema_version": 1, "command": "quad", "bogus": 3})
        with pytest.raises(ValueError):
            parse_config(text, "quad")


def test_float_format_round_trips():
    for x in (0.1, 2.0**-13, 0.95, 1.0 / 3.0, 12345.678901234567):
        assert float(fmt_float(x)) == x
    assert fmt_float(None) == ""


class TestVerifyCommand:
    def test_prop1_suite_passes(self, capsys, tmp_path):
        rc = main(["verify", "--suite", "prop1", "--out", str(tmp_path)])
        assert rc == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["passed"] is True
        assert all(c["max_abs_residual"] <= 1e-9 for c in report["suites"]["prop1"]["checks"])
        on_disk = json.loads((tmp_path / "verify.json").read_text())
        assert on_disk == report

    def test_trust_suite_passes(self, capsys):
        assert main(["verify", "--suite", "trust"]) == EXIT_OK
        capsys.readouterr()

    def test_equalbeta_suite_passes(self, capsys):
        assert main(["verify", "--suite", "equalbeta"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        names = [c["name"] for c in report["suites"]["equalbeta"]["checks"]]
        assert any("completion_margin" in n for n in names)


class TestQuadCommand:
    def test_artifacts_and_determinism(self, tmp_path, capsys):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(FAST_QUAD + ["--out", str(out1)]) == EXIT_OK
        assert main(FAST_QUAD + ["--out", str(out2)]) == EXIT_OK
        capsys.readouterr()
        for name in ("runs.csv", "summary.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

        lines = (out1 / "runs.csv").read_text().splitlines()
        assert lines[0] == "config_id,seed,step,loss,delta_b1,delta_b2,delta_b3"
        # 2 optimizers x 2 seeds x 50 steps
        assert len(lines) == 1 + 2 * 2 * 50
        first = lines[1].split(",")
        assert first[0].startswith("het:adameq:lr=")
        float(first[3])  # loss parses
        # signum rows carry empty delta columns
        signum_row = next(l for l in lines[1:] if ":signum:" in l).split(",")
        assert signum_row[4:] == ["", "", ""]

        summary = (out1 / "summary.csv").read_text().splitlines()
        assert summary[0] == "optimizer,layout,best_lr,median_final,q25,q75,status"
        assert len(summary) == 3
        assert all(row.endswith(",ok") for row in summary[1:])

    def test_config_file_with_flag_override(self, tmp_path, capsys):
        config = QuadConfig(
            layouts=("hom",),
            optimizers=("sgd",),
            fixed_lr=2.0**-12,
            seeds=(0,),
            steps=30,
        )
        path = tmp_path / "quad.json"
        path.write_text(serialize_config(config))
        rc = main(["quad", "--config", str(path), "--steps", "10", "--out", str(tmp_path / "o")])
        capsys.readouterr()
        assert rc == EXIT_OK
        lines = (tmp_path / "o" / "runs.csv").read_text().splitlines()
        assert len(lines) == 1 + 10  # flag overrode steps
        assert lines[1].startswith("hom:sgd:")

    def test_zero_lr_writes_constant_loss_trace(self, tmp_path, capsys):
        rc = main(
            [
                "quad", "--layout", "hom", "--optim", "sgd", "--lr", "0",
                "--steps", "20", "--seeds", "1", "--out", str(tmp_path),
            ]
        )
        capsys.readouterr()
        assert rc == EXIT_OK
        rows = (tmp_path / "runs.csv").read_text().splitlines()[1:]
        losses = {row.split(",")[3] for row in rows}
        assert len(rows) == 20
        assert len(losses) == 1  # every step reports the starting loss

    def test_missing_config_file_is_usage_error(self, capsys):
        assert main(["quad", "--config", "/nonexistent.json"]) == EXIT_USAGE
        capsys.readouterr()

    def test_unknown_optimizer_is_usage_error(self, capsys, tmp_path):
        rc = main(["quad", "--optim", "nope", "--out", str(tmp_path)])
        capsys.readouterr()
        assert rc == EXIT_USAGE

    def test_unwritable_out_is_io_error(self, tmp_path, capsys):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        rc = main(FAST_QUAD + ["--out", str(blocker)])
        capsys.readouterr()
        assert rc == EXIT_IO


class TestSignalCommand:
    def test_default_artifacts(self, tmp_path, capsys):
        rc = main(["signal", "--out", str(tmp_path), "--length", "200"])
        capsys.readouterr()
        assert rc == EXIT_OK
        lines = (tmp_path / "responses.csv").read_text().splitlines()
        assert lines[0] == "filter,beta,k,input,response"
        assert len(lines) == 1 + 4 * 200
        payload = json.loads((tmp_path / "signal_properties.json").read_text())
        assert payload["decay_blindness"]["passed"] is True
        assert set(payload["properties"]) == {"sign", "adameq", "signum", "emasign"}
        assert all(p["passed"] for p in payload["properties"].values())

    def test_sign_filter_square_wave(self, tmp_path, capsys):
        rc = main(
            ["signal", "--out", str(tmp_path), "--filter", "sign", "--length", "300"]
        )
        capsys.readouterr()
        assert rc == EXIT_OK
        rows = (tmp_path / "responses.csv").read_text().splitlines()[1:]
        values = {row.split(",")[4] for row in rows}
        assert values <= {"-1", "0", "1"}

    def test_zero_decay_response_is_periodic(self, tmp_path, capsys):
        rc = main(
            [
                "signal", "--out", str(tmp_path), "--filter", "adameq",
                "--decay", "0", "--frequency", str(2 * np.pi / 50), "--length", "400",
            ]
        )
        capsys.readouterr()
        assert rc == EXIT_OK
        rows = (tmp_path / "responses.csv").read_text().splitlines()[1:]
        resp = np.array([float(r.split(",")[4]) for r in rows])
        # after the zero-init transient the output repeats with the input period
        assert np.max(np.abs(resp[250:300] - resp[300:350])) <= 1e-3


class TestSweepCommand:
    def test_kappa_grid_expands_to_betas(self, tmp_path, capsys):
        rc = main(
            [
                "sweep", "--out", str(tmp_path), "--optim", "adameq",
                "--kappas", "0.03125", "0.0625", "0.125", "0.25", "0.5", "1", "2", "4",
                "--steps", "20", "--seeds", "1",
            ]
        )
        capsys.readouterr()
        assert rc == EXIT_OK
        lines = (tmp_path / "sweep.csv").read_text().splitlines()
        betas = {row.split(",")[3] for row in lines[1:]}
        for expected in (0.95, 0.975, 0.9875, 0.8):
            assert fmt_float(expected) in betas
        assert len(betas) == 8

    def test_equal_betas_restricts_adam_grid(self, tmp_path, capsys):
        base = [
            "sweep", "--optim", "adam", "--kappas", "0.5", "1",
            "--steps", "10", "--seeds", "1",
        ]
        rc = main(base + ["--out", str(tmp_path / "full")])
        assert rc == EXIT_OK
        rc = main(base + ["--equal-betas", "--out", str(tmp_path / "diag")])
        assert rc == EXIT_OK
        capsys.readouterr()
        full = (tmp_path / "full" / "sweep.csv").read_text().splitlines()
        diag = (tmp_path / "diag" / "sweep.csv").read_text().splitlines()
        n_lrs = len(SweepConfig().lr_grid)
        assert len(full) == 1 + 4 * n_lrs  # 2x2 beta pairs
        assert len(diag) == 1 + 2 * n_lrs  # diagonal only
        for row in diag[1:]:
            cols = row.split(",")
            assert cols[3] == cols[4]

    def test_empty_lr_grid_is_usage_error(self, tmp_path, capsys):
        config = SweepConfig(lr_grid=())
        path = tmp_path / "sweep.json"
        path.write_text(serialize_config(config))
        rc = main(["sweep", "--config", str(path), "--out", str(tmp_path / "o")])
        capsys.readouterr()
        assert rc == EXIT_USAGE

    def test_parallel_jobs_produce_identical_bytes(self, tmp_path, capsys):
        base = [
            "sweep", "--optim", "signum", "--kappas", "1", "2",
            "--steps", "20", "--seeds", "2",
        ]
        assert main(base + ["--out", str(tmp_path / "serial"), "--jobs", "1"]) == EXIT_OK
        assert main(base + ["--out", str(tmp_path / "par"), "--jobs", "2"]) == EXIT_OK
        capsys.readouterr()
        assert (tmp_path / "serial" / "sweep.csv").read_bytes() == (
            tmp_path / "par" / "sweep.csv"
        ).read_bytes()

    def test_jobs_env_var_sets_default(self, monkeypatch):
        from adamlab.cli import build_parser

        monkeypatch.setenv("ADAMLAB_JOBS", "3")
        args = build_parser().parse_args(["sweep"])
        assert args.jobs == 3
        monkeypatch.setenv("ADAMLAB_JOBS", "junk")
        args = build_parser().parse_args(["sweep"])
        assert args.jobs == 1


def test_usage_error_exit_code_from_argparse():
    with pytest.raises(SystemExit) as err:
        main(["quad", "--layout", "bogus"])
    assert err.value.code == EXIT_USAGE


def test_verify_failure_exit_code(monkeypatch, capsys):
    # force one suite to report a failure
    import adamlab.cli as cli

    def failing_suite(seed):
        return [{"name": "forced", "max_abs_residual": 1.0, "tolerance": 0.0, "passed": False}]

    monkeypatch.setitem(cli._SUITES, "prop1", failing_suite)
    rc = main(["verify", "--suite", "prop1"])
    capsys.readouterr()
    assert rc == EXIT_CHECK_FAILURE
