import json

import numpy as np
import pytest

from draftlab.cli import main
from draftlab.data import SyntheticSpec, generate_synthetic, save_matches
from draftlab.model import Roster, win_probability
from draftlab.model_io import load_gae


@pytest.fixture()
def match_file(tmp_path):
    ds, _ = generate_synthetic(SyntheticSpec(n_avatars=14, latent_dim=3,
                                             n_matches=600, seed=21))
    path = tmp_path / "matches.jsonl"
    save_matches(ds, path, "jsonl")
    return path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestTrain:
    def test_trains_and_reproduces_byte_identical_model(self, tmp_path, match_file, capsys):
        out1, out2 = tmp_path / "m1.json", tmp_path / "m2.json"
        code, stdout, _ = run(capsys, "train", "--data", str(match_file), "--dim", "3",
                              "--lr", "0.1", "--epochs", "3", "--batch", "128",
                              "--seed", "5", "--out", str(out1))
        assert code == 0
        assert "epoch   0" in stdout and "loss" in stdout
        code, _, _ = run(capsys, "train", "--data", str(match_file), "--dim", "3",
                         "--lr", "0.1", "--epochs", "3", "--batch", "128",
                         "--seed", "5", "--out", str(out2))
        assert code == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_validation_file_enables_val_auc(self, tmp_path, match_file, capsys):
        out = tmp_path / "m.json"
        code, stdout, _ = run(capsys, "train", "--data", str(match_file),
                              "--valid", str(match_file), "--dim", "2",
                              "--epochs", "2", "--out", str(out))
        assert code == 0
        assert "val_auc" in stdout

    def test_missing_data_file_is_exit_2(self, tmp_path, capsys):
        code, _, err = run(capsys, "train", "--data", str(tmp_path / "nope.jsonl"),
                           "--out", str(tmp_path / "m.json"))
        assert code == 2
        assert "data error" in err

    def test_divergence_is_exit_3(self, tmp_path, match_file, capsys):
        code, _, err = run(capsys, "train", "--data", str(match_file),
                           "--lr", "1e150", "--epochs", "1", "--dim", "2",
                           "--out", str(tmp_path / "m.json"))
        assert code == 3
        assert "numerical failure" in err


class TestQueriesViaCli:
    @pytest.fixture()
    def model_file(self, tmp_path, match_file, capsys):
        out = tmp_path / "model.json"
        code = main(["train", "--data", str(match_file), "--dim", "3",
                     "--epochs", "2", "--out", str(out)])
        capsys.readouterr()
        assert code == 0
        return out

    def test_predict_full_precision_matches_in_process(self, model_file, capsys):
        params = load_gae(model_file)
        red = [params.registry.name_of(i) for i in (0, 1, 2, 3, 4)]
        blue = [params.registry.name_of(i) for i in (5, 6, 7, 8, 9)]
        code, stdout, _ = run(capsys, "predict", "--model", str(model_file),
                              "--red", ",".join(red), "--blue", ",".join(blue),
                              "--format", "csv")
        assert code == 0
        printed = float(stdout.strip().split("\n")[1])
        expected = win_probability(params, Roster((0, 1, 2, 3, 4)), Roster((5, 6, 7, 8, 9)))
        assert printed == expected

    def test_pair_is_symmetric_in_arguments(self, model_file, capsys):
        params = load_gae(model_file)
        a, b = params.registry.name_of(2), params.registry.name_of(9)
        code, out_ab, _ = run(capsys, "pair", "--model", str(model_file),
                              "--a", a, "--b", b)
        assert code == 0
        code, out_ba, _ = run(capsys, "pair", "--model", str(model_file),
                              "--a", b, "--b", a)
        assert code == 0
        assert out_ab == out_ba

    def test_similar_lists_requested_count(self, model_file, capsys):
        params = load_gae(model_file)
        code, stdout, _ = run(capsys, "similar", "--model", str(model_file),
                              "--avatar", params.registry.name_of(0), "--top-k", "4")
        assert code == 0
        assert len(stdout.strip().split("\n")) == 5  # header + 4 rows

    def test_recommend_with_familiar_set(self, model_file, capsys):
        params = load_gae(model_file)
        name = params.registry.name_of
        code, stdout, _ = run(capsys, "recommend", "--model", str(model_file),
                              "--ally", f"{name(0)},{name(1)}",
                              "--enemy", f"{name(2)}",
                              "--familiar", f"{name(5)},{name(6)}",
                              "--top-k", "3")
        assert code == 0
        assert "best familiar pick" in stdout

    def test_unknown_avatar_is_exit_2(self, model_file, capsys):
        code, _, err = run(capsys, "similar", "--model", str(model_file),
                           "--avatar", "nonexistent")
        assert code == 2
        assert "unknown avatar" in err


class TestSynth:
    def test_same_seed_identical_files(self, tmp_path, capsys):
        a_data, a_truth = tmp_path / "a.jsonl", tmp_path / "a_truth.json"
        b_data, b_truth = tmp_path / "b.jsonl", tmp_path / "b_truth.json"
        for data, truth in ((a_data, a_truth), (b_data, b_truth)):
            code, _, _ = run(capsys, "synth", "--out", str(data), "--truth-out",
                             str(truth), "--matches", "200", "--n-avatars", "12",
                             "--dim", "3", "--seed", "7")
            assert code == 0
        assert a_data.read_bytes() == b_data.read_bytes()
        assert a_truth.read_bytes() == b_truth.read_bytes()


class TestGradcheck:
    def test_default_model_passes_tolerance(self, capsys):
        code, stdout, _ = run(capsys, "gradcheck")
        assert code == 0
        assert "max relative error" in stdout
        value = float(stdout.strip().split()[-1])
        assert value < 1e-5


class TestEval:
    def test_report_rows_and_t_tests(self, tmp_path, match_file, capsys):
        report = tmp_path / "report.csv"
        grid = tmp_path / "grid.json"
        grid.write_text(json.dumps({
            "gae": [{"latent_dim": 2, "epochs": 2}],
            "lr": [{"epochs": 2}],
        }))
        code, stdout, _ = run(capsys, "eval", "--data", str(match_file),
                              "--model-kind", "gae,lr", "--grid", str(grid),
                              "--folds", "5", "--seed", "3",
                              "--report", str(report))
        assert code == 0
        lines = report.read_text().strip().split("\n")
        assert lines[0] == "model,fold,auc,hyperparameters"
        assert len(lines) == 11  # header + 5 folds x 2 kinds
        assert "gae vs lr" in stdout

    def test_report_is_byte_deterministic(self, tmp_path, match_file, capsys):
        r1, r2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
        for report in (r1, r2):
            code, _, _ = run(capsys, "eval", "--data", str(match_file),
                             "--model-kind", "lr", "--folds", "4", "--seed", "3",
                             "--report", str(report))
            assert code == 0
        assert r1.read_bytes() == r2.read_bytes()

    def test_too_many_folds_is_exit_2(self, tmp_path, match_file, capsys):
        code, _, err = run(capsys, "eval", "--data", str(match_file),
                           "--folds", "100000", "--report", str(tmp_path / "r.csv"))
        assert code == 2

    def test_unknown_kind_is_exit_2(self, tmp_path, match_file, capsys):
        code, _, _ = run(capsys, "eval", "--data", str(match_file),
                         "--model-kind", "gbdt", "--report", str(tmp_path / "r.csv"))
        assert code == 2


class TestUsageErrors:
    def test_missing_required_flag_is_exit_1(self, capsys):
        code, _, err = run(capsys, "predict", "--red", "a,b")
        assert code == 1
        assert "usage error" in err

    def test_unknown_subcommand_is_exit_1(self, capsys):
        code, _, _ = run(capsys, "frobnicate")
        assert code == 1

    def test_unknown_flag_is_exit_1(self, capsys):
        code, _, _ = run(capsys, "gradcheck", "--bogus")
        assert code == 1

    def test_help_exits_zero(self, capsys):
        code, stdout, _ = run(capsys, "--help")
        assert code == 0
        assert "train" in stdout and "serve" in stdout

    def test_subcommand_help_documents_flags(self, capsys):
        code, stdout, _ = run(capsys, "train", "--help")
        assert code == 0
        for flag in ("--data", "--dim", "--lr", "--epochs", "--batch",
                     "--l2", "--seed", "--out", "--valid"):
            assert flag in stdout
