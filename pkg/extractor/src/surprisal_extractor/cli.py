"""Command line: annotated documents in, token file + manifest out.

    surprisal-extract --input docs.jsonl --out outdir [--order 3]
        [--alpha 0.5] [--max-context N] [--hf-model PATH]
        [--emit-flat-trees]

The default backend is the corpus-fitted n-gram; --hf-model switches to
a local HuggingFace causal LM.  --emit-flat-trees additionally writes
structureless one-level tree files so the output can be checked with
the downstream `validate` command without separate annotations.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .annotations import AlignmentError, load_documents
from .lm import NgramBackend
from .scoring import ExtractionJob, flat_tree_lines, run_job, write_token_file


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="surprisal-extract")
    parser.add_argument("--input", required=True,
                        help="annotated documents, JSON Lines")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--order", type=int, default=3, help="n-gram order")
    parser.add_argument("--alpha", type=float, default=0.5,
                        help="additive smoothing mass")
    parser.add_argument("--max-context", dest="max_context", type=int, default=None,
                        help="truncate document context to this many tokens")
    parser.add_argument("--hf-model", dest="hf_model", default=None,
                        help="local HuggingFace model path (optional)")
    parser.add_argument("--emit-flat-trees", action="store_true",
                        help="write flat tree files for downstream validation")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        docs = load_documents(args.input)
        if args.hf_model:
            from .lm import HFBackend

            backend = HFBackend(model_path=args.hf_model)
        else:
            backend = NgramBackend(order=args.order, alpha=args.alpha)
        job = ExtractionJob(documents=docs, backend=backend,
                            max_context=args.max_context,
                            unigram_alpha=args.alpha)
        rows, manifest = run_job(job)

        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_token_file(out / "tokens.jsonl", rows)
        with open(out / "extraction_manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        if args.emit_flat_trees:
            # EDU-level only: downstream derives prose trees from the
            # containment ids itself
            (out / "rst_trees_flat.txt").write_text(
                "\n".join(flat_tree_lines(rows, "edu_index")) + "\n",
                encoding="utf-8")
        print(f"wrote {manifest['tokens']} tokens from "
              f"{manifest['documents']} documents to {out}")
        return 0
    except (AlignmentError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
