import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from armagraph.chebyshev import ArmaChebFilter, freq_response
from armagraph.cli import EXIT_ERROR, EXIT_NOT_CONVERGED, EXIT_OK, RunConfig, main

EXAMPLE = dict(lambda_p=0.5, lambda_s=0.7, order_p=11, order_q=11, grid_l=500, epsilon=1e-5,
               gamma=0.25, delta_t=2e-8, k_max=25, passband_weight=1.0, stopband_weight=1.0,
               solver_tol=1e-9)


def write_config(tmp_path, name="config.json", **overrides):
    cfg = dict(EXAMPLE, output_dir="out")
    cfg.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.fixture(scope="module")
def example_run(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("design")
    code = main(["design", str(write_config(tmp))])
    return code, tmp / "out"


class TestDesign:
    def test_report_thresholds(self, example_run):
        code, out = example_run
        report = json.loads((out / "report.json").read_text())
        assert report["delta_p_db"] <= 0.01
        assert report["delta_s_db"] >= 70.0
        assert report["sse_db"] <= -60.0
        assert report["stable"] and report["stability_margin"] >= 1e-5 * (1 - 1e-6)
        assert code == (EXIT_OK if report["converged"] else EXIT_NOT_CONVERGED)

    def test_output_files(self, example_run):
        _, out = example_run
        coeffs = json.loads((out / "coefficients.json").read_text())
        assert len(coeffs["beta"]) == 12 and len(coeffs["alpha"]) == 11
        assert coeffs["monomial"] is None  # orders above 8 are exported in Chebyshev form only
        trace = read_csv(out / "trace.csv")
        assert trace[0] == ["k", "J", "step_inf_norm", "eta", "status"]
        assert [int(r[0]) for r in trace[1:]] == list(range(1, len(trace)))
        response = read_csv(out / "response.csv")
        assert response[0] == ["lambda", "h", "mag_db"] and len(response) == 2002

    def test_response_matches_freq_response(self, example_run):
        _, out = example_run
        coeffs = json.loads((out / "coefficients.json").read_text())
        filt = ArmaChebFilter(coeffs["beta"], coeffs["alpha"], coeffs["epsilon"])
        rows = np.array(read_csv(out / "response.csv")[1:], dtype=float)
        np.testing.assert_array_equal(rows[:, 1], freq_response(filt, rows[:, 0]))

    def test_csv_format(self, example_run):
        _, out = example_run
        raw = (out / "trace.csv").read_bytes()
        assert b"\r\n" not in raw and raw.endswith(b"\n")
        first = read_csv(out / "response.csv")[2]
        assert float(first[0]) == 0.001 and "," not in first[1]

    def test_byte_identical_reruns(self, tmp_path):
        spec = dict(order_p=3, order_q=2, grid_l=100, k_max=8)
        outputs = []
        for name in ("a", "b"):
            cfg = write_config(tmp_path, f"{name}.json", output_dir=name, **spec)
            main(["design", str(cfg)])
            outputs.append({f: (tmp_path / name / f).read_bytes()
                            for f in ("coefficients.json", "response.csv", "trace.csv", "report.json")})
        assert outputs[0] == outputs[1]

    def test_small_orders_export_monomial(self, tmp_path):
        cfg = write_config(tmp_path, order_p=3, order_q=2, grid_l=100, k_max=5)
        main(["design", str(cfg)])
        coeffs = json.loads((tmp_path / "out" / "coefficients.json").read_text())
        assert len(coeffs["monomial"]["b"]) == 4 and len(coeffs["monomial"]["a"]) == 2

    def test_zero_gamma_never_moves(self, tmp_path):
        cfg = write_config(tmp_path, gamma=0.0, k_max=5, order_p=3, order_q=3, grid_l=100)
        code = main(["design", str(cfg)])
        trace = read_csv(tmp_path / "out" / "trace.csv")[1:]
        assert code == EXIT_NOT_CONVERGED and len(trace) == 5
        assert len({row[1] for row in trace}) == 1
        assert all(float(row[2]) == 0.0 for row in trace)

    def test_missing_config(self, tmp_path):
        assert main(["design", str(tmp_path / "nope.json")]) == EXIT_ERROR
        assert list(tmp_path.iterdir()) == []

    @pytest.mark.parametrize("text", ["{", "[]", '{"order_p": 3, "colour": 1}', '{"gamma": 2.0}'])
    def test_malformed_config(self, tmp_path, text):
        path = tmp_path / "bad.json"
        path.write_text(text)
        assert main(["design", str(path)]) == EXIT_ERROR
        assert not (tmp_path / "out").exists()


class TestCompare:
    def test_example(self, tmp_path):
        assert main(["compare", str(write_config(tmp_path))]) == EXIT_OK
        rows = read_csv(tmp_path / "out" / "comparison.csv")
        assert rows[0] == ["method", "delta_p_db", "delta_s_db", "sse_db", "J"]
        assert len(rows) == 3
        assert [r[0] for r in rows[1:]] == ["proposed", "modified_error"]
        assert float(rows[1][4]) <= float(rows[2][4])

    def test_representable_target_rows_match(self, tmp_path):
        cfg = write_config(tmp_path, order_p=0, order_q=0, grid_l=50, stopband_weight=0.0)
        assert main(["compare", str(cfg)]) == EXIT_OK
        rows = read_csv(tmp_path / "out" / "comparison.csv")
        assert len(rows) == 3 and rows[1][1:] == rows[2][1:]


class TestApply:
    def _coeffs(self, tmp_path, beta, alpha):
        path = tmp_path / "coeffs.json"
        path.write_text(json.dumps({"beta": beta, "alpha": alpha, "epsilon": 1e-5}))
        return path

    def _run(self, tmp_path, beta, alpha, edges, signal):
        cfg = write_config(tmp_path, coefficients=self._coeffs(tmp_path, beta, alpha).name)
        (tmp_path / "g.txt").write_text("".join(f"{i} {j} {w}\n" for i, j, w in edges))
        (tmp_path / "x.txt").write_text("\n".join(str(v) for v in signal))
        out = tmp_path / "y.txt"
        code = main(["apply", str(cfg), str(tmp_path / "g.txt"), str(tmp_path / "x.txt"), "-o", str(out)])
        return code, (np.loadtxt(out, ndmin=1) if out.exists() else None)

    def test_allpass(self, tmp_path):
        x = [0.5, -1.25, 3.0, 2.0]
        code, y = self._run(tmp_path, [1.0, 0.0], [0.0], [(0, 1, 1), (1, 2, 1), (2, 3, 2)], x)
        assert code == EXIT_OK
        np.testing.assert_allclose(y, x, atol=1e-12)

    def test_zero_numerator(self, tmp_path):
        code, y = self._run(tmp_path, [0.0, 0.0], [0.3], [(0, 1, 1), (1, 2, 1)], [1.0, 2.0, 3.0])
        assert code == EXIT_OK and np.all(y == 0.0)

    def test_single_edge_highest_frequency(self, tmp_path):
        beta, alpha = [0.2, -0.4, 0.1], [0.3, 0.1]
        code, y = self._run(tmp_path, beta, alpha, [(0, 1, 1)], [1.0, -1.0])
        h2 = freq_response(ArmaChebFilter(beta, alpha), 2.0)
        assert code == EXIT_OK
        np.testing.assert_allclose(y, [h2, -h2], atol=1e-12)

    def test_dimension_mismatch(self, tmp_path):
        code, y = self._run(tmp_path, [1.0], [], [(0, 1, 1)], [1.0, 2.0, 3.0])
        assert code == EXIT_ERROR and y is None

    def test_default_coefficients_from_output_dir(self, tmp_path):
        cfg = write_config(tmp_path, order_p=2, order_q=1, grid_l=100, k_max=3)
        main(["design", str(cfg)])
        (tmp_path / "g.txt").write_text("0 1 1\n")
        (tmp_path / "x.txt").write_text("1\n-1\n")
        assert main(["apply", str(cfg), str(tmp_path / "g.txt"), str(tmp_path / "x.txt")]) == EXIT_OK
        assert (tmp_path / "out" / "filtered_signal.txt").exists()


def test_config_paths_relative_to_config(tmp_path):
    sub = tmp_path / "cfgdir"
    sub.mkdir()
    cfg = RunConfig.load(write_config(sub, output_dir="results"))
    assert cfg.output_dir == sub.resolve() / "results"
    assert cfg.spec.order_p == 11 and cfg.solver_tol == 1e-9


def test_module_entry_point(tmp_path):
    cfg = write_config(tmp_path, order_p=2, order_q=1, grid_l=100, k_max=2)
    proc = subprocess.run([sys.executable, "-m", "armagraph", "design", str(cfg)],
                          capture_output=True, text=True)
    assert proc.returncode in (EXIT_OK, EXIT_NOT_CONVERGED)
    assert "delta_p=" in proc.stdout
