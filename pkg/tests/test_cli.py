import csv
import json
import math
import time

import pytest

from infocontours.cli import main
from infocontours.reporting import REPORT_CSV_COLUMNS


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus")
    rc = main(["synth", "--out", str(out), "--documents", "8", "--seed", "11",
               "--effect", "rst_relpos_edu=1.0"])
    assert rc == 0
    return out


def run_args(corpus_dir, out, extra=()):
    return ["run", "--tokens", str(corpus_dir / "tokens.jsonl"),
            "--rst-trees", str(corpus_dir / "rst_trees.txt"),
            "--prose-trees", str(corpus_dir / "prose_trees.txt"),
            "--out", str(out), "--permutations", "2000", *extra]


class TestSynthAndValidate:
    def test_synth_writes_corpus_files(self, corpus_dir):
        for name in ("tokens.jsonl", "rst_trees.txt", "prose_trees.txt",
                     "synth_manifest.json"):
            assert (corpus_dir / name).exists()
        manifest = json.loads((corpus_dir / "synth_manifest.json").read_text())
        assert manifest["documents"] == 8
        assert manifest["effects"] == {"rst_relpos_edu": 1.0}

    def test_validate_ok(self, corpus_dir, capsys):
        rc = main(["validate", "--tokens", str(corpus_dir / "tokens.jsonl"),
                   "--rst-trees", str(corpus_dir / "rst_trees.txt"),
                   "--prose-trees", str(corpus_dir / "prose_trees.txt")])
        assert rc == 0
        assert "ok:" in capsys.readouterr().out

    def test_validate_rejects_gapped_tree(self, corpus_dir, tmp_path, capsys):
        bad = tmp_path / "bad_trees.txt"
        lines = (corpus_dir / "rst_trees.txt").read_text().splitlines()
        lines[0] = "(S (leaf 0) (leaf 2))"
        bad.write_text("\n".join(lines) + "\n")
        rc = main(["validate", "--tokens", str(corpus_dir / "tokens.jsonl"),
                   "--rst-trees", str(bad)])
        assert rc == 1
        assert "error" in capsys.readouterr().err

    def test_validate_rejects_nan_surprisal(self, corpus_dir, tmp_path, capsys):
        lines = (corpus_dir / "tokens.jsonl").read_text().splitlines()
        rec = json.loads(lines[3])
        rec["s_global"] = float("nan")
        lines[3] = json.dumps(rec)
        bad = tmp_path / "bad_tokens.jsonl"
        bad.write_text("\n".join(lines) + "\n")
        rc = main(["validate", "--tokens", str(bad),
                   "--rst-trees", str(corpus_dir / "rst_trees.txt")])
        assert rc == 1
        err = capsys.readouterr().err
        assert "s_global" in err and "doc" in err

    def test_missing_file_is_validation_failure(self, tmp_path):
        rc = main(["validate", "--tokens", str(tmp_path / "nope.jsonl"),
                   "--rst-trees", str(tmp_path / "nope.txt")])
        assert rc == 1

    def test_bad_synth_effect_flag(self, tmp_path):
        rc = main(["synth", "--out", str(tmp_path / "x"), "--effect", "oops"])
        assert rc == 1


class TestRun:
    def test_run_writes_reports(self, corpus_dir, tmp_path, capsys):
        out = tmp_path / "run"
        rc = main(run_args(corpus_dir, out,
                           ("--groups", "baseline,rst_relpos",
                            "--dependents", "doc_surprisal,pmi_unigram")))
        assert rc == 0
        with open(out / "report.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert tuple(rows[0]) == REPORT_CSV_COLUMNS
        assert len(rows) == 4
        by_cell = {(r["dependent"], r["group"]): r for r in rows}
        assert float(by_cell[("doc_surprisal", "baseline")]["delta_mse"]) == 0.0
        assert float(by_cell[("doc_surprisal", "rst_relpos")]["delta_mse"]) < 0
        payload = json.loads((out / "report.json").read_text())
        assert payload["meta"]["seed"] == 0
        assert len(payload["cells"]) == 4
        for cell in payload["cells"]:
            assert len(cell["per_fold_expected_mse_target"]) == 5
            assert 0 < cell["p_value"] <= 1
        with open(out / "contours.csv") as fh:
            contour_rows = list(csv.DictReader(fh))
        n_tokens = int(rows[0]["n_tokens"])
        assert len(contour_rows) == 4 * n_tokens
        assert math.isfinite(float(contour_rows[0]["predicted"]))

    def test_identical_seeds_are_byte_identical(self, corpus_dir, tmp_path):
        outs = []
        for tag in ("a", "b"):
            out = tmp_path / tag
            rc = main(run_args(corpus_dir, out,
                               ("--groups", "baseline,ps_relpos",
                                "--dependents", "rolling_avg_3", "--seed", "5")))
            assert rc == 0
            outs.append(out)
        for name in ("report.csv", "report.json", "contours.csv"):
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()

    def test_unknown_group_rejected(self, corpus_dir, tmp_path):
        rc = main(run_args(corpus_dir, tmp_path / "x", ("--groups", "syntax")))
        assert rc == 1

    def test_full_matrix_on_twenty_documents_is_fast(self, tmp_path):
        corpus = tmp_path / "c"
        assert main(["synth", "--out", str(corpus), "--documents", "20",
                     "--seed", "2"]) == 0
        start = time.perf_counter()
        rc = main(["run", "--tokens", str(corpus / "tokens.jsonl"),
                   "--rst-trees", str(corpus / "rst_trees.txt"),
                   "--out", str(tmp_path / "r"), "--seed", "2"])
        elapsed = time.perf_counter() - start
        assert rc == 0
        with open(tmp_path / "r" / "report.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 7 * 11  # every dependent x every group
        assert elapsed < 600

    def test_parallel_workers_match_serial(self, corpus_dir, tmp_path, monkeypatch):
        extra = ("--groups", "baseline,rst_hier", "--dependents",
                 "doc_surprisal", "--seed", "3")
        serial = tmp_path / "serial"
        assert main(run_args(corpus_dir, serial, extra)) == 0
        monkeypatch.setenv("INFOCONTOURS_WORKERS", "2")
        parallel = tmp_path / "parallel"
        assert main(run_args(corpus_dir, parallel, extra)) == 0
        for name in ("report.csv", "report.json", "contours.csv"):
            assert (serial / name).read_bytes() == (parallel / name).read_bytes()

    def test_config_file_supplies_options(self, corpus_dir, tmp_path, capsys):
        cfg = {"tokens": str(corpus_dir / "tokens.jsonl"),
               "rst_trees": str(corpus_dir / "rst_trees.txt"),
               "out": str(tmp_path / "cfgrun"), "groups": "baseline",
               "dependents": "doc_surprisal", "permutations": 2000}
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps(cfg))
        rc = main(["run", "--config", str(cfg_path)])
        assert rc == 0
        assert (tmp_path / "cfgrun" / "report.csv").exists()
        # explicit flag beats the config value
        rc = main(["run", "--config", str(cfg_path), "--out",
                   str(tmp_path / "cfgrun2")])
        assert rc == 0
        assert (tmp_path / "cfgrun2" / "report.csv").exists()

    def test_unknown_config_key_rejected(self, corpus_dir, tmp_path):
        cfg_path = tmp_path / "bad.json"
        cfg_path.write_text(json.dumps({"tokens": "x", "mystery": 1}))
        rc = main(["run", "--config", str(cfg_path)])
        assert rc == 1


class TestFeaturesAndReport:
    def test_features_dump(self, corpus_dir, tmp_path, capsys):
        out = tmp_path / "feat"
        rc = main(["features", "--tokens", str(corpus_dir / "tokens.jsonl"),
                   "--rst-trees", str(corpus_dir / "rst_trees.txt"),
                   "--out", str(out)])
        assert rc == 0
        manifest = json.loads((out / "features_manifest.json").read_text())
        assert set(manifest["groups"]) >= {"rst_relpos", "ps_all", "baseline"}
        assert manifest["baseline_columns"] == ["char_len", "prev_surprisal"]
        assert len(manifest["folds"]) == 8
        assert set(manifest["folds"].values()) == {0, 1, 2, 3, 4}
        with open(out / "features.csv") as fh:
            header = fh.readline().strip().split(",")
        assert {"doc_id", "token_index", "fold_id", "doc_surprisal",
                "char_len", "rst_trans_top_down_push_prev"} <= set(header)

    def test_report_pretty_print(self, corpus_dir, tmp_path, capsys):
        out = tmp_path / "run"
        assert main(run_args(corpus_dir, out, ("--groups", "baseline",
                                               "--dependents", "doc_surprisal"))) == 0
        capsys.readouterr()
        rc = main(["report", "--json", str(out / "report.json")])
        assert rc == 0
        text = capsys.readouterr().out
        assert "doc_surprisal" in text and "baseline" in text
