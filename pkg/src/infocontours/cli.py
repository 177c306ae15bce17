"""Command-line entry point.

Subcommands: ``validate`` (check a corpus), ``features`` (dump the
feature table), ``run`` (full cross-validated comparison), ``synth``
(generate a synthetic corpus), ``report`` (pretty-print a finished
run).  A JSON config file can supply any option; explicit flags win.
Exit codes: 0 ok, 1 validation failure, 2 runtime error.

Cells of a run are independent; set INFOCONTOURS_WORKERS=<n> to fit
them in parallel processes (results are merged in a fixed order, so
output bytes do not depend on the worker count).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .backend import BACKEND_NAME
from .contours import DEPENDENT_KINDS
from .features import GROUPS, build_feature_table, standardization_stats
from .inference import EvalReport, FitConfig, cross_validate
from .reporting import (
    format_report_table,
    read_report_json,
    write_contours_csv,
    write_report_csv,
    write_report_json,
)
from .synth import SynthSpec, generate_corpus
from .treebank import (
    PROSE,
    RST,
    ValidationError,
    build_prose_tree,
    leaf_spans,
    load_token_file,
    parse_tree_file,
    write_token_file,
    write_tree_file,
)

CONFIG_KEYS = ("tokens", "rst_trees", "prose_trees", "out", "groups", "dependents",
               "seed", "folds", "steps", "learning_rate", "prior_scale",
               "permutations", "strict")


def _load_corpus(args):
    """Read and align the three corpus files; trees pair with documents
    in order of first appearance in the token file."""
    corpus = load_token_file(args.tokens, strict=getattr(args, "strict", False))
    if not corpus:
        raise ValidationError(f"{args.tokens}: no documents")
    rst_list = parse_tree_file(args.rst_trees, kind=RST)
    if len(rst_list) != len(corpus):
        raise ValidationError(
            f"{len(rst_list)} RST trees for {len(corpus)} documents")
    doc_ids = list(corpus)
    rst_trees = dict(zip(doc_ids, rst_list))
    if args.prose_trees:
        prose_list = parse_tree_file(args.prose_trees, kind=PROSE)
        if len(prose_list) != len(corpus):
            raise ValidationError(
                f"{len(prose_list)} prose trees for {len(corpus)} documents")
        prose_trees = dict(zip(doc_ids, prose_list))
    else:
        prose_trees = {d: build_prose_tree(corpus[d]) for d in doc_ids}
    return corpus, rst_trees, prose_trees


def _check_alignment(corpus, rst_trees, prose_trees):
    """Token/tree span consistency for every document (raises on failure)."""
    for doc_id, tokens in corpus.items():
        try:
            leaf_spans(rst_trees[doc_id], tokens)
            leaf_spans(prose_trees[doc_id], tokens)
        except ValidationError as exc:
            raise ValidationError(f"doc {doc_id!r}: {exc}") from exc


def cmd_validate(args) -> int:
    corpus, rst_trees, prose_trees = _load_corpus(args)
    _check_alignment(corpus, rst_trees, prose_trees)
    n_tokens = sum(len(t) for t in corpus.values())
    print(f"ok: {len(corpus)} documents, {n_tokens} tokens, "
          f"{sum(t.leaf_count for t in rst_trees.values())} EDUs")
    return 0


def _parse_list(value: str | None, allowed, what: str) -> list[str]:
    if value is None or value == "all":
        return list(allowed)
    items = [v.strip() for v in value.split(",") if v.strip()]
    bad = [v for v in items if v not in allowed]
    if bad:
        raise ValidationError(f"unknown {what}: {bad} (choose from {list(allowed)})")
    if not items:
        raise ValidationError(f"empty {what} list")
    return items


def _fit_config(args) -> FitConfig:
    return FitConfig(
        learning_rate=args.learning_rate, steps=args.steps,
        prior_scale=args.prior_scale, seed=args.seed, folds=args.folds,
        permutations=args.permutations,
    )


def _run_cell(payload) -> EvalReport:
    table, group, dependent, config = payload
    return cross_validate(table, group, dependent, config)


def cmd_run(args) -> int:
    corpus, rst_trees, prose_trees = _load_corpus(args)
    _check_alignment(corpus, rst_trees, prose_trees)
    groups = _parse_list(args.groups, GROUPS, "groups")
    dependents = _parse_list(args.dependents, DEPENDENT_KINDS, "dependents")
    config = _fit_config(args)
    table = build_feature_table(corpus, rst_trees, prose_trees,
                                folds=config.folds, seed=config.seed)

    cells = [(table, g, dep, config) for dep in dependents for g in groups]
    workers = int(os.environ.get("INFOCONTOURS_WORKERS", "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_run_cell, cells))
    else:
        reports = [_run_cell(c) for c in cells]

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = {
        "seed": config.seed, "folds": config.folds, "steps": config.steps,
        "learning_rate": config.learning_rate, "prior_scale": config.prior_scale,
        "permutations": config.permutations, "backend": BACKEND_NAME,
        "version": __version__, "groups": groups, "dependents": dependents,
        "n_documents": len(corpus),
    }
    write_report_csv(out / "report.csv", reports)
    write_report_json(out / "report.json", reports, meta)
    write_contours_csv(out / "contours.csv", reports,
                       table.frame["doc_id"], table.frame["token_index"])
    print(format_report_table([{
        "dependent": r.dependent, "group": r.group, "delta_mse": r.delta_mse,
        "p_value": r.p_value, "n_tokens": r.n_tokens} for r in reports]))
    print(f"\nwrote {out / 'report.csv'}, report.json, contours.csv")
    return 0


def cmd_features(args) -> int:
    corpus, rst_trees, prose_trees = _load_corpus(args)
    _check_alignment(corpus, rst_trees, prose_trees)
    table = build_feature_table(corpus, rst_trees, prose_trees,
                                folds=args.folds, seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table.frame.to_csv(out / "features.csv", index=False)
    manifest = {
        "groups": table.group_columns,
        "baseline_columns": table.baseline_columns,
        "dependent_columns": table.dependent_columns,
        "folds": {d: int(table.frame.loc[table.frame.doc_id == d, "fold_id"].iloc[0])
                  for d in table.doc_ids},
        "standardization": standardization_stats(table),
        "seed": args.seed,
    }
    with open(out / "features_manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {out / 'features.csv'} ({len(table.frame)} rows)")
    return 0


def cmd_synth(args) -> int:
    spec_kwargs = {}
    if args.spec:
        with open(args.spec, encoding="utf-8") as fh:
            spec_kwargs.update(json.load(fh))
        for key in ("paragraph_range", "sentence_range", "token_range", "edu_range"):
            if key in spec_kwargs:
                spec_kwargs[key] = tuple(spec_kwargs[key])
    if args.documents is not None:
        spec_kwargs["documents"] = args.documents
    if args.noise_sd is not None:
        spec_kwargs["noise_sd"] = args.noise_sd
    if args.seed is not None:
        spec_kwargs["seed"] = args.seed
    effects = dict(spec_kwargs.get("effects", {}))
    for item in args.effect or []:
        name, _, coef = item.partition("=")
        if not _:
            raise ValidationError(f"--effect expects name=coefficient, got {item!r}")
        effects[name] = float(coef)
    spec_kwargs["effects"] = effects

    try:
        spec = SynthSpec(**spec_kwargs)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad synthesis spec: {exc}") from exc
    corpus, rst_trees, prose_trees = generate_corpus(spec)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_token_file(out / "tokens.jsonl", corpus)
    write_tree_file(out / "rst_trees.txt", [rst_trees[d] for d in corpus])
    write_tree_file(out / "prose_trees.txt", [prose_trees[d] for d in corpus])
    manifest = dict(spec.__dict__)
    for key in ("paragraph_range", "sentence_range", "token_range", "edu_range"):
        manifest[key] = list(manifest[key])
    with open(out / "synth_manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    n_tokens = sum(len(t) for t in corpus.values())
    print(f"wrote {spec.documents} documents / {n_tokens} tokens to {out}")
    return 0


def cmd_report(args) -> int:
    payload = read_report_json(args.json)
    print(format_report_table(payload["cells"]))
    meta = payload.get("meta", {})
    if meta:
        print(f"\nseed={meta.get('seed')} folds={meta.get('folds')} "
              f"backend={meta.get('backend')}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="infocontours",
        description="Discourse-structure predictors for information contours.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def corpus_flags(p):
        p.add_argument("--tokens", required=False, help="token JSONL file")
        p.add_argument("--rst-trees", dest="rst_trees", help="RST tree file")
        p.add_argument("--prose-trees", dest="prose_trees", default=None,
                       help="prose tree file (default: derive from token ids)")
        p.add_argument("--config", default=None, help="JSON config file")

    p = sub.add_parser("validate", help="check corpus invariants")
    corpus_flags(p)
    p.add_argument("--strict", action="store_true",
                   help="reject unknown token fields")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("features", help="extract the feature table")
    corpus_flags(p)
    p.add_argument("--out", help="output directory")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("run", help="cross-validated model comparison")
    corpus_flags(p)
    p.add_argument("--out", help="output directory")
    p.add_argument("--groups", default=None,
                   help=f"comma list or 'all' (default all): {','.join(GROUPS)}")
    p.add_argument("--dependents", default=None,
                   help="comma list or 'all' (default all)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--learning-rate", dest="learning_rate", type=float, default=0.03)
    p.add_argument("--prior-scale", dest="prior_scale", type=float, default=1.0)
    p.add_argument("--permutations", type=int, default=10_000)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--spec", default=None, help="JSON SynthSpec file")
    p.add_argument("--documents", type=int, default=None)
    p.add_argument("--noise-sd", dest="noise_sd", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--effect", action="append", default=None,
                   metavar="COLUMN=COEF", help="plant a linear effect (repeatable)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="pretty-print a finished run")
    p.add_argument("--json", required=True, help="report.json from a run")
    p.set_defaults(func=cmd_report)
    return parser


def _apply_config(args) -> None:
    """Fill unset options from the JSON config file, if one was given."""
    path = getattr(args, "config", None)
    if not path:
        return
    with open(path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    unknown = set(cfg) - set(CONFIG_KEYS)
    if unknown:
        raise ValidationError(f"{path}: unknown config keys {sorted(unknown)}")
    parser_defaults = {"seed": 0, "folds": 5, "steps": 2000, "learning_rate": 0.03,
                       "prior_scale": 1.0, "permutations": 10_000, "strict": False}
    for key, value in cfg.items():
        if not hasattr(args, key):
            continue
        current = getattr(args, key)
        if current is None or current == parser_defaults.get(key):
            setattr(args, key, value)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        for required in ("tokens", "rst_trees", "out"):
            if hasattr(args, required) and getattr(args, required) is None:
                if args.command == "validate" and required == "out":
                    continue
                raise ValidationError(f"missing --{required.replace('_', '-')} "
                                      "(flag or config file)")
        return args.func(args)
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
