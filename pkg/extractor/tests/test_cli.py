import json

from helpers import sample_docs
from surprisal_extractor.cli import main


def write_input(tmp_path):
    path = tmp_path / "docs.jsonl"
    with open(path, "w") as fh:
        for d in sample_docs():
            fh.write(json.dumps({
                "doc_id": d.doc_id, "text": d.text,
                "paragraph_breaks": d.paragraph_breaks,
                "sentence_breaks": d.sentence_breaks,
                "edu_breaks": d.edu_breaks}) + "\n")
    return path


def test_extract_writes_tokens_and_manifest(tmp_path, capsys):
    docs = write_input(tmp_path)
    out = tmp_path / "out"
    assert main(["--input", str(docs), "--out", str(out), "--order", "2",
                 "--max-context", "64"]) == 0
    lines = (out / "tokens.jsonl").read_text().splitlines()
    assert all(json.loads(l)["s_global"] >= 0 for l in lines)
    manifest = json.loads((out / "extraction_manifest.json").read_text())
    assert manifest["model"] == "ngram:order=2,alpha=0.5"
    assert manifest["tokens"] == len(lines)
    assert "sliding-window(max_context=64" in manifest["truncation"]
    assert not (out / "rst_trees_flat.txt").exists()


def test_flat_trees_flag(tmp_path):
    docs = write_input(tmp_path)
    out = tmp_path / "out"
    assert main(["--input", str(docs), "--out", str(out),
                 "--emit-flat-trees"]) == 0
    trees = (out / "rst_trees_flat.txt").read_text().splitlines()
    assert len(trees) == 3
    assert all(t.startswith("(") for t in trees)


def test_missing_input_fails_cleanly(tmp_path, capsys):
    assert main(["--input", str(tmp_path / "nope.jsonl"),
                 "--out", str(tmp_path / "o")]) == 1
    assert "error" in capsys.readouterr().err


def test_determinism(tmp_path):
    docs = write_input(tmp_path)
    outs = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        assert main(["--input", str(docs), "--out", str(out)]) == 0
        outs.append((out / "tokens.jsonl").read_bytes())
    assert outs[0] == outs[1]
