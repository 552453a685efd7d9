"""
Tests for the command-line front end.
"""
import json

import numpy as np
import pytest

from app.cli import main
from app.core.errors import EXIT_FLAG, EXIT_PARSE, EXIT_SHAPE
from app.models.circuits import hoeffding_shots


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def ones_files(write_tensor):
    return write_tensor("x.json", np.ones((1, 3, 3, 1))), write_tensor("k.json", np.ones((2, 2, 1, 1)))


@pytest.mark.cli
class TestConvolveCommand:
    def test_fours(self, capsys, ones_files):
        x, k = ones_files
        code, out, _ = _run(capsys, "convolve", "--input", x, "--kernel", k)
        assert code == 0
        payload = json.loads(out)
        assert payload["shape"] == [1, 2, 2, 1]
        assert payload["data"] == [4.0, 4.0, 4.0, 4.0]
        assert payload["manifest"]["command"] == "convolve"
        assert payload["manifest"]["input_digests"]["input"].startswith("sha256:")

    def test_flags_echoed_in_manifest(self, capsys, ones_files):
        x, k = ones_files
        code, out, _ = _run(capsys, "convolve", "--input", x, "--kernel", k, "--stride", "2", "--pad", "1")
        assert code == 0
        assert json.loads(out)["manifest"]["config"] == {"stride": 2, "pad": 1}

    def test_missing_file(self, capsys, ones_files, tmp_path):
        _, k = ones_files
        code, _, err = _run(capsys, "convolve", "--input", str(tmp_path / "nope.json"), "--kernel", k)
        assert code == EXIT_PARSE
        assert err.count("\n") == 1

    def test_shape_error(self, capsys, write_tensor, ones_files):
        x, _ = ones_files
        k = write_tensor("k2.json", np.ones((2, 2, 3, 1)))
        code, _, _ = _run(capsys, "convolve", "--input", x, "--kernel", k)
        assert code == EXIT_SHAPE

    def test_csv_input(self, capsys, tmp_path, ones_files):
        _, k = ones_files
        path = tmp_path / "x.csv"
        path.write_text("shape,3,3,1\n" + ",".join(["1"] * 9) + "\n")
        code, out, _ = _run(capsys, "convolve", "--input", str(path), "--kernel", k)
        assert code == 0
        assert json.loads(out)["data"] == [4.0, 4.0, 4.0, 4.0]

    def test_malformed_json(self, capsys, tmp_path, ones_files):
        _, k = ones_files
        path = tmp_path / "bad.json"
        path.write_text('{"shape": [2], "data": [1]}')
        code, _, _ = _run(capsys, "convolve", "--input", str(path), "--kernel", k)
        assert code == EXIT_PARSE


@pytest.mark.cli
class TestQConvolveCommand:
    def test_exact(self, capsys, ones_files):
        x, k = ones_files
        code, out, _ = _run(capsys, "qconvolve", "--input", x, "--kernel", k, "--mode", "exact")
        assert code == 0
        payload = json.loads(out)
        assert payload["max_abs_error"] <= 1e-10
        assert payload["resources"]["qubits"]["total"] == 7
        assert payload["seed"] is None

    def test_same_seed_byte_identical(self, capsys, ones_files, tmp_path):
        x, k = ones_files
        outs = [tmp_path / "a.json", tmp_path / "b.json"]
        for path in outs:
            code, _, _ = _run(capsys, "qconvolve", "--input", x, "--kernel", k, "--mode", "sampled",
                              "--shots", "200", "--seed", "17", "--out", str(path))
            assert code == 0
        assert outs[0].read_bytes() == outs[1].read_bytes()

    def test_sampled_needs_seed(self, capsys, ones_files):
        x, k = ones_files
        code, _, err = _run(capsys, "qconvolve", "--input", x, "--kernel", k, "--mode", "sampled")
        assert code == EXIT_FLAG
        assert "--seed" in err

    def test_swap_sign_loss(self, capsys, write_tensor, ones_files):
        x, _ = ones_files
        k = write_tensor("neg.json", -np.ones((2, 2, 1, 1)))
        code, out, _ = _run(capsys, "qconvolve", "--input", x, "--kernel", k, "--circuit", "swap")
        assert code == 0
        assert json.loads(out)["sign_loss"] is True

    def test_batched_ranking(self, capsys, ones_files):
        x, k = ones_files
        code, out, _ = _run(capsys, "qconvolve", "--input", x, "--kernel", k, "--batched",
                            "--mode", "sampled", "--shots", "1000", "--seed", "3", "--top-k", "2")
        assert code == 0
        ranking = json.loads(out)["ranking"]
        assert ranking["top_k"] == 2
        assert len(ranking["sampled"]) == 2

    def test_unknown_choice(self, capsys, ones_files):
        x, k = ones_files
        code, _, _ = _run(capsys, "qconvolve", "--input", x, "--kernel", k, "--circuit", "hadamard")
        assert code == EXIT_FLAG

    @pytest.mark.parametrize("top_k", ["0", "-3"])
    def test_top_k_must_be_positive(self, capsys, ones_files, top_k):
        x, k = ones_files
        code, out, err = _run(capsys, "qconvolve", "--input", x, "--kernel", k, "--batched",
                              "--mode", "sampled", "--shots", "100", "--seed", "3", "--top-k", top_k)
        assert code == EXIT_FLAG
        assert "--top-k" in err
        assert out == ""

    def test_shot_budget_skips_zero_filters(self, capsys, write_tensor, ones_files):
        x, _ = ones_files
        bank = np.zeros((2, 2, 1, 2))
        bank[..., 0] = 1.0
        k = write_tensor("half.json", bank)
        code, out, _ = _run(capsys, "qconvolve", "--input", x, "--kernel", k, "--mode", "sampled", "--seed", "5")
        assert code == 0
        payload = json.loads(out)
        # 4 of the 8 output entries belong to the all-zero filter and are never estimated
        per_entry = hoeffding_shots(0.05, 0.05 / 4)
        assert per_entry < hoeffding_shots(0.05, 0.05 / 8)
        assert payload["resources"]["shots_per_entry"] == per_entry
        assert payload["shots_used"] == 4 * per_entry
        assert payload["excluded_rows"] == [4, 5, 6, 7]


@pytest.mark.cli
class TestReshapeCommand:
    def test_small(self, capsys, ones_files):
        _, k = ones_files
        code, out, _ = _run(capsys, "reshape", "--kernel", k, "--height", "3", "--width", "3")
        assert code == 0
        payload = json.loads(out)
        assert (payload["matrix"]["rows"], payload["matrix"]["cols"]) == (4, 9)
        assert len(payload["matrix"]["entries"]) == 16
        assert payload["stats"]["nnz"] == 16

    def test_unit_kernel_identity(self, capsys, write_tensor):
        k = write_tensor("u.json", np.ones((1, 1, 1, 1)))
        code, out, _ = _run(capsys, "reshape", "--kernel", k, "--height", "2", "--width", "2")
        assert code == 0
        assert json.loads(out)["matrix"]["entries"] == [[0, 0, 1.0], [1, 1, 1.0], [2, 2, 1.0], [3, 3, 1.0]]

    def test_toeplitz_baseline(self, capsys, ones_files):
        x, k = ones_files
        code, out, _ = _run(capsys, "reshape", "--kernel", k, "--input", x, "--baseline", "toeplitz")
        assert code == 0
        payload = json.loads(out)
        assert payload["baseline"] == "toeplitz"
        assert (payload["matrix"]["rows"], payload["matrix"]["cols"]) == (4, 4)

    def test_needs_extent(self, capsys, ones_files):
        _, k = ones_files
        code, _, _ = _run(capsys, "reshape", "--kernel", k)
        assert code == EXIT_FLAG


@pytest.mark.cli
class TestResourcesCommand:
    def test_small_json(self, capsys):
        code, out, _ = _run(capsys, "resources", "--height", "3", "--width", "3",
                            "--kernel-height", "2", "--kernel-width", "2")
        assert code == 0
        payload = json.loads(out)
        assert payload["qubits"] == {"index_p": 2, "index_q": 0, "data": 4, "ancilla": 1, "total": 7}
        assert len(payload["strategies"]) == 4
        assert "manifest" in payload

    def test_batch_doubling(self, capsys):
        counts = []
        for n in ("1", "2", "4"):
            _, out, _ = _run(capsys, "resources", "--batch", n, "--height", "3", "--width", "3",
                             "--kernel-height", "2", "--kernel-width", "2")
            counts.append(json.loads(out)["qubits"]["index_q"])
        assert counts == [0, 1, 2]

    def test_text_table(self, capsys):
        code, out, _ = _run(capsys, "resources", "--height", "3", "--width", "3",
                            "--kernel-height", "2", "--kernel-width", "2", "--format", "text")
        assert code == 0
        assert "parallel-aqram" in out
        assert "Toeplitz + QMM" in out

    def test_kernel_too_large(self, capsys):
        code, _, _ = _run(capsys, "resources", "--height", "2", "--width", "2",
                          "--kernel-height", "3", "--kernel-width", "3")
        assert code == EXIT_SHAPE


@pytest.mark.cli
class TestCompareCommand:
    def _result(self, capsys, x, k, path, *extra):
        code, _, _ = _run(capsys, "qconvolve", "--input", x, "--kernel", k, "--out", str(path), *extra)
        assert code == 0
        return str(path)

    def test_identical_runs(self, capsys, ones_files, tmp_path):
        x, k = ones_files
        a = self._result(capsys, x, k, tmp_path / "a.json")
        b = self._result(capsys, x, k, tmp_path / "b.json")
        code, out, _ = _run(capsys, "compare", a, b, "--format", "csv")
        assert code == 0
        header, row_a, row_b = out.strip().splitlines()
        assert header.startswith("run,mode")
        assert row_a.split(",")[1:] == row_b.split(",")[1:]

    def test_mixed_shapes_refused(self, capsys, ones_files, write_tensor, tmp_path):
        x, k = ones_files
        a = self._result(capsys, x, k, tmp_path / "a.json")
        big = write_tensor("big.json", np.ones((1, 4, 4, 1)))
        b = self._result(capsys, big, k, tmp_path / "b.json")
        code, _, err = _run(capsys, "compare", a, b)
        assert code == EXIT_SHAPE
        assert "shapes" in err

    def test_not_a_result_file(self, capsys, ones_files):
        x, _ = ones_files
        code, _, _ = _run(capsys, "compare", x)
        assert code == EXIT_PARSE


@pytest.mark.cli
class TestParser:
    def test_help(self, capsys):
        assert main(["--help"]) == 0

    def test_no_command(self, capsys):
        assert main([]) == EXIT_FLAG
