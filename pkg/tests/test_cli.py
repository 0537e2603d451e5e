import xml.etree.ElementTree as ET

import pytest

from sscpolar import code_from_frozen, load_code, make_channel, save_code
from sscpolar.channel import ChannelKind
from sscpolar.cli import main

from conftest import EXAMPLE8_FROZEN


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def kv(stdout):
    pairs = {}
    for line in stdout.strip().splitlines():
        key, _, value = line.partition("=")
        pairs[key] = value
    return pairs


@pytest.fixture
def example8_file(tmp_path, bec_half):
    path = tmp_path / "example8.code"
    save_code(code_from_frozen(bec_half, EXAMPLE8_FROZEN, pe=1e-3), path)
    return str(path)


class TestConstruct:
    def test_writes_file_and_reports(self, capsys, tmp_path):
        out = tmp_path / "c.code"
        rc, stdout, _ = run(capsys, "construct", "--channel", "bec",
                            "--capacity", "0.5", "--pe", "1e-3", "--n", "10",
                            "--out", str(out))
        assert rc == 0
        fields = kv(stdout)
        assert fields["N"] == "1024"
        assert 0.0 < float(fields["rate"]) < 1.0
        code = load_code(out)
        assert code.n == 10
        assert code.k == int(fields["k"])

    def test_param_instead_of_capacity(self, capsys, tmp_path):
        out = tmp_path / "c.code"
        rc, stdout, _ = run(capsys, "construct", "--channel", "bsc",
                            "--param", "0.11", "--pe", "1e-2", "--n", "6",
                            "--out", str(out))
        assert rc == 0
        assert load_code(out).channel.param == 0.11

    @pytest.mark.parametrize("flags", [
        ("--channel", "bec", "--capacity", "1.5", "--pe", "1e-3", "--n", "4"),
        ("--channel", "bec", "--capacity", "0.0", "--pe", "1e-3", "--n", "4"),
        ("--channel", "bec", "--capacity", "0.5", "--pe", "2.0", "--n", "4"),
        ("--channel", "bec", "--capacity", "0.5", "--pe", "1e-3", "--n", "0"),
        ("--channel", "bec", "--capacity", "0.5", "--param", "0.5",
         "--pe", "1e-3", "--n", "4"),
        ("--channel", "bec", "--pe", "1e-3", "--n", "4"),
    ])
    def test_validation_failures_exit_2(self, capsys, tmp_path, flags):
        rc, _, err = run(capsys, "construct", *flags, "--out", str(tmp_path / "x"))
        assert rc == 2
        assert err

    def test_unwritable_out_exits_3(self, capsys, tmp_path):
        rc, _, err = run(capsys, "construct", "--channel", "bec", "--capacity",
                         "0.5", "--pe", "1e-3", "--n", "4",
                         "--out", str(tmp_path / "no" / "dir" / "x"))
        assert rc == 3


class TestLatency:
    def test_example8_fully_parallel(self, capsys, example8_file):
        rc, stdout, _ = run(capsys, "latency", "--code", example8_file, "--p", "4")
        assert rc == 0
        fields = kv(stdout)
        assert fields["ssc"] == "10"
        assert fields["sc_tree"] == "14"
        assert fields["sc_closed"] == "14"

    def test_example8_serial(self, capsys, example8_file):
        rc, stdout, _ = run(capsys, "latency", "--code", example8_file, "--p", "1")
        fields = kv(stdout)
        assert (rc, fields["ssc"], fields["sc_tree"]) == (0, "20", "24")

    def test_odd_p_has_no_closed_form(self, capsys, example8_file):
        rc, stdout, _ = run(capsys, "latency", "--code", example8_file, "--p", "3")
        assert kv(stdout)["sc_closed"] == "na"

    def test_inline_with_policy(self, capsys):
        rc, stdout, _ = run(capsys, "latency", "--channel", "bec", "--capacity",
                            "0.5", "--pe", "1e-3", "--n", "10", "--policy", "half")
        fields = kv(stdout)
        assert rc == 0
        assert fields["P"] == "512"
        assert fields["ssc"] == "408"

    def test_p_zero_exits_2(self, capsys, example8_file):
        rc, _, err = run(capsys, "latency", "--code", example8_file, "--p", "0")
        assert rc == 2

    def test_p_and_policy_conflict(self, capsys, example8_file):
        rc, _, _ = run(capsys, "latency", "--code", example8_file,
                       "--p", "2", "--policy", "half")
        assert rc == 2


class TestSimulate:
    def test_agreement_and_determinism(self, capsys):
        args = ("simulate", "--channel", "bec", "--capacity", "0.5", "--pe",
                "1e-2", "--n", "6", "--trials", "200", "--seed", "5")
        rc1, out1, _ = run(capsys, *args)
        rc2, out2, _ = run(capsys, *args)
        assert rc1 == rc2 == 0
        assert out1 == out2
        fields = kv(out1)
        assert fields["agree"] == "200/200"
        assert fields["seed"] == "5"

    def test_noiseless_fer_zero(self, capsys, tmp_path, bec_half):
        path = tmp_path / "c.code"
        save_code(code_from_frozen(make_channel(ChannelKind.BEC, 0.0),
                                   EXAMPLE8_FROZEN, pe=1e-3), path)
        rc, stdout, _ = run(capsys, "simulate", "--code", str(path),
                            "--trials", "100", "--seed", "1")
        assert rc == 0
        assert kv(stdout)["fer"] == "0"

    def test_bad_trials(self, capsys):
        rc, _, _ = run(capsys, "simulate", "--channel", "bec", "--capacity",
                       "0.5", "--pe", "1e-2", "--n", "4", "--trials", "0")
        assert rc == 2


class TestSweep:
    def test_policy_preset_row_count(self, capsys, tmp_path):
        out = tmp_path / "f7.csv"
        rc, stdout, _ = run(capsys, "sweep", "--figure", "7", "--nmax", "20",
                            "--out", str(out))
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == ("channel,capacity,pe,n,log2N,p_policy,P,"
                            "latency,latency_norm,log2_latency")
        assert len(lines) == 1 + 5 * 17

    def test_parallelism_preset_single_curve(self, capsys, tmp_path):
        out = tmp_path / "f8.csv"
        rc, _, _ = run(capsys, "sweep", "--figure", "8", "--factor", "1.01",
                       "--nmax", "12", "--out", str(out))
        assert rc == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 1 + 9
        assert all(",fixed," in line for line in lines[1:])

    def test_serial_preset_with_svg_and_gnuplot(self, capsys, tmp_path):
        out = tmp_path / "f6.csv"
        svg = tmp_path / "f6.svg"
        gp = tmp_path / "f6.gp"
        rc, stdout, _ = run(capsys, "sweep", "--figure", "6", "--channel", "bec",
                            "--nmax", "8", "--out", str(out), "--svg", str(svg),
                            "--gnuplot", str(gp))
        assert rc == 0
        ET.fromstring(svg.read_text())
        assert svg.stat().st_size < 1 << 20
        assert "plot $data0" in gp.read_text()

    def test_figure_9_rejected(self, capsys, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["sweep", "--figure", "9", "--out", str(tmp_path / "x.csv")])
        assert exc.value.code == 2

    def test_missing_out_exits_2(self, capsys):
        rc, _, _ = run(capsys, "sweep", "--figure", "7", "--nmax", "6")
        assert rc == 2

    def test_unwritable_out_exits_3(self, capsys, tmp_path):
        rc, _, _ = run(capsys, "sweep", "--figure", "7", "--nmax", "6",
                       "--out", str(tmp_path / "no" / "x.csv"))
        assert rc == 3

    def test_deterministic_bytes(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, "sweep", "--figure", "7", "--nmax", "10", "--out", str(a))
        run(capsys, "sweep", "--figure", "7", "--nmax", "10", "--out", str(b),
            "--threads", "4")
        assert a.read_bytes() == b.read_bytes()


class TestBound:
    def test_curve_output(self, capsys):
        rc, stdout, _ = run(capsys, "bound", "--nmax", "8", "--policy", "one",
                            "--mu", "3.63", "--c", "1.0", "--eps", "0.5")
        assert rc == 0
        lines = stdout.strip().splitlines()
        assert len(lines) == 5  # n = 4..8
        assert lines[0].startswith("n=4 N=16 P=1 bound=")

    def test_requires_n(self, capsys):
        rc, _, _ = run(capsys, "bound", "--policy", "one")
        assert rc == 2

    def test_invalid_ratio_rejected(self, capsys):
        rc, _, _ = run(capsys, "bound", "--n", "1", "--p", "2")
        assert rc == 2
