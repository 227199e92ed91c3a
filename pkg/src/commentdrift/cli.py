"""Command-line pipeline: mine, train, detect, report.

Every command is deterministic for a fixed config and seed; stages talk
through files (JSONL records, TSV matrices, binary model bundles) so any
stage can be rerun from its input alone.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

import numpy as np

from .config import ConfigError, RunConfig, build_config, load_config_file
from .corpus import (
    DatasetRecord,
    RepositoryError,
    ScanStats,
    extract_pair_changes,
    load_dataset,
    mine_repository,
    persist_dataset,
    scan_history,
)
from .embed import EmbeddingModel, build_documents, load_model, save_model, train_skipgram
from .features import (
    FEATURE_NAMES,
    PairChange,
    Standardizer,
    extract_features,
    filter_correlated,
    load_matrix,
)
from .forest import (
    Forest,
    calibration,
    evaluate,
    feature_importance,
    grid_search,
    load_forest,
    predict_batch,
    rule_baseline,
    save_forest,
    train_forest,
)
from .parsing import ParseError
from .synth import rule_labels

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

_MANIFEST_VERSION = 1
_SPLIT_STREAM = 7001
_DOC_STREAM = 7002


class DataError(Exception):
    """Input data cannot support the requested command."""


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1; argparse's default would be 2
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--seed", type=int, help="seed for every stochastic step")
    sub.add_argument("--out", dest="out_dir", help="output directory")


def build_parser() -> _Parser:
    parser = _Parser(prog="commentdrift", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    mine = commands.add_parser("mine", help="collect labeled pairs from repositories")
    _add_common(mine)
    mine.add_argument("--repo", action="append", default=None, help="repository path (repeatable)")
    mine.add_argument("--ext", action="append", default=None, help="source extension filter (repeatable)")
    mine.add_argument(
        "--include-comment-only",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="keep pairs whose comment changed without code changes",
    )

    train = commands.add_parser("train", help="train the model bundle from a dataset")
    _add_common(train)
    train.add_argument("--data", dest="data_path", help="dataset file (.jsonl records or .tsv matrix)")
    train.add_argument("--split", type=float, help="training share of the data (default 0.7)")
    train.add_argument("--threshold", dest="correlation_threshold", type=float, help="|r| cutoff for feature filtering")
    train.add_argument("--grid-search", dest="grid_search", action="store_true", default=None, help="pick hyperparameters by cross-validated grid search")

    detect = commands.add_parser("detect", help="flag likely-outdated comments in commits")
    _add_common(detect)
    detect.add_argument("--model", dest="model_dir", help="trained bundle directory")
    detect.add_argument("--repo", action="append", default=None, help="repository to scan")
    detect.add_argument("--ext", action="append", default=None)
    detect.add_argument("--range", dest="rev_range", help="commit range (git rev-list syntax)")

    report = commands.add_parser("report", help="importance, retrain comparison, calibration")
    _add_common(report)
    report.add_argument("--model", dest="model_dir", help="trained bundle directory")
    report.add_argument("--data", dest="data_path", help="dataset used for training")

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    file_values = load_config_file(args.config) if args.config else {}
    overrides = {}
    for key in (
        "seed",
        "out_dir",
        "data_path",
        "model_dir",
        "rev_range",
        "split",
        "correlation_threshold",
        "include_comment_only",
        "grid_search",
    ):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "repo", None):
        overrides["repos"] = tuple(args.repo)
    if getattr(args, "ext", None):
        overrides["extensions"] = tuple(args.ext)
    return build_config(file_values, overrides)


def _doc_seed(base_seed: int, record_index: int, side: int) -> int:
    ss = np.random.SeedSequence(base_seed, spawn_key=(_DOC_STREAM, record_index, side))
    return int(ss.generate_state(1)[0])


def _build_corpus(records: Sequence[DatasetRecord], seed: int) -> list:
    corpus = []
    for i, record in enumerate(records):
        pc = record.pair_change
        comment = pc.old_pair.comment_text
        for side, code in ((0, pc.old_pair.code_text()), (1, pc.new_pair.code_text())):
            docs = build_documents(comment, code, _doc_seed(seed, i, side))
            for doc in (docs.comment_doc, docs.code_doc):
                if doc:
                    corpus.append(doc)
    return corpus


def _split_rows(n: int, split: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_SPLIT_STREAM,)))
    perm = rng.permutation(n)
    n_train = int(n * split)
    if n_train < 1 or n_train >= n:
        raise DataError("dataset too small for the requested split")
    return perm[:n_train], perm[n_train:]


def _featurize(records: Sequence[DatasetRecord], embedding: EmbeddingModel) -> tuple[np.ndarray, np.ndarray]:
    X = np.stack([extract_features(r.pair_change, embedding) for r in records])
    y = np.asarray([r.label for r in records], dtype=np.int64)
    return X, y


def _sniff_is_records(path: str) -> bool:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                return line.lstrip().startswith("{")
    return path.endswith(".jsonl")


def _echo(config: RunConfig) -> dict:
    return {
        "seed": config.seed,
        "split": config.split,
        "correlation_threshold": config.correlation_threshold,
        "rule_threshold": config.rule_threshold,
        "calibration_bins": config.calibration_bins,
        "return_feature": config.return_feature,
        "grammar": config.grammar,
    }


def _print_metrics(prefix: str, m) -> None:
    print(
        f"{prefix}: precision {m.precision:.4f}  recall {m.recall:.4f}  "
        f"f1 {m.f1:.4f}  (tp {m.tp} fp {m.fp} tn {m.tn} fn {m.fn})"
    )


def cmd_mine(config: RunConfig) -> int:
    if not config.repos:
        print("mine: no repository given (use --repo)", file=sys.stderr)
        return EXIT_USAGE
    os.makedirs(config.out_dir, exist_ok=True)
    stats = ScanStats()
    records: list[DatasetRecord] = []
    per_project: dict[str, dict] = {}
    for repo in config.repos:
        before_commits = stats.commits
        mined = mine_repository(
            repo,
            config.extensions,
            include_comment_only=config.include_comment_only,
            grammar=config.grammar,
            return_feature=config.return_feature,
            stats=stats,
        )
        records.extend(mined)
        name = os.path.basename(os.path.abspath(repo))
        per_project[name] = {
            "commits": stats.commits - before_commits,
            "records": mined,
        }
    if not records:
        print("mine: no code-comment pairs found", file=sys.stderr)
        return EXIT_DATA

    out_path = os.path.join(config.out_dir, "dataset.jsonl")
    persist_dataset(records, out_path)

    print(f"{'project':<20}{'commits':>9}{'pairs':>8}{'changes':>9}{'changed':>10}{'unchanged':>11}")
    for name, info in per_project.items():
        recs = info["records"]
        total = len(recs)
        changed = sum(r.label for r in recs)
        ops = sum(len(r.pair_change.ops) for r in recs)
        pct = (changed / total * 100) if total else 0.0
        print(
            f"{name:<20}{info['commits']:>9}{total:>8}{ops:>9}"
            f"{pct:>9.2f}%{100 - pct:>10.2f}%"
        )
    for kind in ("method", "block"):
        of_kind = [r for r in records if r.pair_change.old_pair.kind == kind]
        pos = sum(r.label for r in of_kind)
        print(f"{kind} pairs: {len(of_kind)} ({pos} positive, {len(of_kind) - pos} negative)")
    if stats.parse_failures or stats.unparsable_commits:
        print(
            f"skipped: {stats.parse_failures} unparsable files, "
            f"{stats.unparsable_commits} unreadable commits",
            file=sys.stderr,
        )
    print(f"wrote {len(records)} records to {out_path}")
    return EXIT_OK


def _bundle_paths(out_dir: str) -> dict[str, str]:
    return {
        "forest": os.path.join(out_dir, "forest.bin"),
        "embedding": os.path.join(out_dir, "embedding.bin"),
        "standardizer": os.path.join(out_dir, "standardizer.json"),
        "manifest": os.path.join(out_dir, "manifest.json"),
    }


def cmd_train(config: RunConfig) -> int:
    if not config.data_path:
        print("train: no dataset given (use --data)", file=sys.stderr)
        return EXIT_USAGE
    os.makedirs(config.out_dir, exist_ok=True)
    paths = _bundle_paths(config.out_dir)

    is_records = _sniff_is_records(config.data_path)
    embedding: EmbeddingModel | None = None
    records: list[DatasetRecord] = []
    if is_records:
        records = load_dataset(config.data_path)
        n = len(records)
        train_rows, test_rows = _split_rows(n, config.split, config.seed)
        train_records = [records[i] for i in train_rows]
        corpus = _build_corpus(train_records, config.seed)
        if not corpus:
            raise DataError("training records produce no embedding documents")
        embedding = train_skipgram(corpus, config.skipgram_config())
        X, y = _featurize(records, embedding)
    else:
        names, X, y = load_matrix(config.data_path)
        if y is None:
            raise DataError("feature matrix has no label column")
        if tuple(names) != FEATURE_NAMES:
            raise DataError("feature matrix layout does not match this extractor")
        n = X.shape[0]
        train_rows, test_rows = _split_rows(n, config.split, config.seed)

    if len(np.unique(y)) < 2:
        raise DataError("dataset contains a single class")
    if len(np.unique(y[train_rows])) < 2:
        raise DataError("training split contains a single class; change seed or split")

    standardizer = Standardizer().fit(X[train_rows])
    Xs = standardizer.transform(X)
    kept = filter_correlated(Xs[train_rows], config.correlation_threshold)
    mask = np.zeros(X.shape[1], dtype=bool)
    mask[kept] = True

    hp = config.hyperparams()
    if config.grid_search:
        hp, scored = grid_search(
            Xs[train_rows], y[train_rows], folds=10, seed=config.seed, kept_mask=mask
        )
        print(f"grid search: {len(scored)} combinations, winner {hp}")
    forest = train_forest(
        Xs[train_rows], y[train_rows], hp, feature_names=FEATURE_NAMES, kept_mask=mask
    )

    probs, labels = predict_batch(forest, Xs[test_rows])
    metrics = evaluate(labels, y[test_rows])
    if is_records:
        base_labels = [
            rule_baseline(records[i].pair_change, embedding, config.rule_threshold)
            for i in test_rows
        ]
    else:
        base_labels = rule_labels(X, config.rule_threshold)[test_rows]
    baseline = evaluate(base_labels, y[test_rows])
    points = calibration(probs, y[test_rows], config.calibration_bins)

    save_forest(forest, paths["forest"])
    standardizer.save(paths["standardizer"])
    if embedding is not None:
        save_model(embedding, paths["embedding"])
    manifest = {
        "manifest_version": _MANIFEST_VERSION,
        "feature_names": list(FEATURE_NAMES),
        "kept_indices": [int(i) for i in kept],
        "has_embedding": embedding is not None,
        "config": _echo(config),
        "rows": {"total": int(n), "train": len(train_rows), "test": len(test_rows)},
        "metrics": metrics.to_dict(),
        "baseline_metrics": baseline.to_dict(),
        "calibration": [[p, f, c] for p, f, c in points],
    }
    with open(paths["manifest"], "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    print(f"trained on {len(train_rows)} rows, held out {len(test_rows)} ({len(kept)} features kept)")
    _print_metrics("forest", metrics)
    _print_metrics("rule baseline", baseline)
    print(f"wrote model bundle to {config.out_dir}")
    return EXIT_OK


def _load_bundle(model_dir: str) -> tuple[Forest, Standardizer, dict, EmbeddingModel | None]:
    paths = _bundle_paths(model_dir)
    for key in ("forest", "standardizer", "manifest"):
        if not os.path.exists(paths[key]):
            raise DataError(f"model bundle is missing {os.path.basename(paths[key])}")
    forest = load_forest(paths["forest"])
    standardizer = Standardizer.load(paths["standardizer"])
    with open(paths["manifest"], encoding="utf-8") as fh:
        manifest = json.load(fh)
    if tuple(manifest.get("feature_names", ())) != FEATURE_NAMES:
        raise DataError("model bundle feature layout does not match this extractor")
    embedding = None
    if manifest.get("has_embedding") and os.path.exists(paths["embedding"]):
        embedding = load_model(paths["embedding"])
    return forest, standardizer, manifest, embedding


def cmd_detect(config: RunConfig) -> int:
    if not config.model_dir:
        print("detect: no model bundle given (use --model)", file=sys.stderr)
        return EXIT_USAGE
    if not config.repos:
        print("detect: no repository given (use --repo)", file=sys.stderr)
        return EXIT_USAGE
    forest, standardizer, manifest, embedding = _load_bundle(config.model_dir)
    if embedding is None:
        raise DataError("model bundle has no embedding; detect needs one trained from records")
    os.makedirs(config.out_dir, exist_ok=True)
    importance = feature_importance(forest)
    threshold = manifest.get("config", {}).get("rule_threshold", config.rule_threshold)

    candidates: list[tuple[PairChange, str, str, str]] = []
    stats = ScanStats()
    for repo in config.repos:
        project = os.path.basename(os.path.abspath(repo))
        for commit in scan_history(
            repo, config.extensions, stats, rev_range=config.rev_range or None
        ):
            for path, old_src, new_src in commit.changed_files:
                if old_src is None or new_src is None:
                    continue
                try:
                    changes = extract_pair_changes(
                        old_src,
                        new_src,
                        grammar=config.grammar,
                        return_feature=config.return_feature,
                    )
                except ParseError:
                    stats.parse_failures += 1
                    continue
                for pc in changes:
                    if pc.ops:
                        candidates.append((pc, project, commit.commit_id, path))

    entries = []
    if candidates:
        X = np.stack([extract_features(pc, embedding) for pc, *_ in candidates])
        Xs = standardizer.transform(X)
        probs, labels = predict_batch(forest, Xs)
        for i, (pc, project, commit_id, path) in enumerate(candidates):
            contributions = importance * np.abs(Xs[i])
            top = np.argsort(-contributions)[:5]
            excerpt = " ".join(pc.old_pair.comment_text.split())
            if len(excerpt) > 80:
                excerpt = excerpt[:77] + "..."
            entries.append(
                {
                    "project": project,
                    "commit": commit_id,
                    "path": path,
                    "kind": pc.old_pair.kind,
                    "comment": excerpt,
                    "comment_span": list(pc.old_pair.comment_span),
                    "probability": float(probs[i]),
                    "label": int(labels[i]),
                    "rule_label": rule_baseline(pc, embedding, threshold),
                    "top_features": [
                        {
                            "name": FEATURE_NAMES[j],
                            "contribution": float(contributions[j]),
                            "value": float(Xs[i, j]),
                        }
                        for j in top
                    ],
                }
            )
        entries.sort(key=lambda e: (-e["probability"], e["commit"], e["path"]))

    report = {
        "entries": entries,
        "summary": {
            "pairs_scanned": len(candidates),
            "flagged": sum(e["label"] for e in entries),
            "baseline_flagged": sum(e["rule_label"] for e in entries),
        },
    }
    out_path = os.path.join(config.out_dir, "report.json")
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")

    for entry in entries:
        if entry["label"]:
            print(
                f"{entry['probability']:.3f}  {entry['path']}:{entry['comment_span'][0]}  "
                f"{entry['comment']}"
            )
    print(f"scanned {len(candidates)} changed pairs, flagged {report['summary']['flagged']}")
    print(f"wrote {out_path}")
    return EXIT_OK


def cmd_report(config: RunConfig) -> int:
    if not config.model_dir:
        print("report: no model bundle given (use --model)", file=sys.stderr)
        return EXIT_USAGE
    if not config.data_path:
        print("report: no dataset given (use --data)", file=sys.stderr)
        return EXIT_USAGE
    forest, standardizer, manifest, embedding = _load_bundle(config.model_dir)
    os.makedirs(config.out_dir, exist_ok=True)
    seed = manifest["config"]["seed"]
    split = manifest["config"]["split"]
    bins = manifest["config"]["calibration_bins"]

    if _sniff_is_records(config.data_path):
        if embedding is None:
            raise DataError("bundle has no embedding but the dataset is records")
        records = load_dataset(config.data_path)
        X, y = _featurize(records, embedding)
    else:
        names, X, y = load_matrix(config.data_path)
        if y is None:
            raise DataError("feature matrix has no label column")
        if tuple(names) != FEATURE_NAMES:
            raise DataError("feature matrix layout does not match this extractor")
    train_rows, test_rows = _split_rows(X.shape[0], split, seed)
    Xs = standardizer.transform(X)

    importance = feature_importance(forest)
    order = np.argsort(-importance)
    imp_path = os.path.join(config.out_dir, "importance.tsv")
    with open(imp_path, "w", encoding="utf-8") as fh:
        fh.write("rank\tfeature\timportance\n")
        for rank, j in enumerate(order, start=1):
            fh.write(f"{rank}\t{FEATURE_NAMES[j]}\t{float(importance[j])!r}\n")

    probs, labels = predict_batch(forest, Xs[test_rows])
    full_metrics = evaluate(labels, y[test_rows])

    top15 = order[:15]
    mask15 = np.zeros(len(FEATURE_NAMES), dtype=bool)
    mask15[top15] = True
    retrained = train_forest(
        Xs[train_rows],
        y[train_rows],
        forest.hyperparams,
        feature_names=FEATURE_NAMES,
        kept_mask=mask15,
    )
    _, labels15 = predict_batch(retrained, Xs[test_rows])
    top_metrics = evaluate(labels15, y[test_rows])

    points = calibration(probs, y[test_rows], bins)
    cal_path = os.path.join(config.out_dir, "calibration.tsv")
    with open(cal_path, "w", encoding="utf-8") as fh:
        fh.write("mean_probability\tpositive_fraction\tcount\n")
        for p, f, c in points:
            fh.write(f"{float(p)!r}\t{float(f)!r}\t{int(c)}\n")

    comparison = {
        "full": full_metrics.to_dict(),
        "top15": top_metrics.to_dict(),
        "top15_features": [FEATURE_NAMES[j] for j in top15],
    }
    cmp_path = os.path.join(config.out_dir, "retrain_comparison.json")
    with open(cmp_path, "w", encoding="utf-8") as fh:
        json.dump(comparison, fh, indent=2, sort_keys=True)
        fh.write("\n")

    print("top features by importance:")
    for j in order[:15]:
        print(f"  {FEATURE_NAMES[j]:<32}{importance[j]:.4f}")
    _print_metrics("full model", full_metrics)
    _print_metrics("top-15 retrain", top_metrics)
    print(f"wrote {imp_path}, {cal_path}, {cmp_path}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
    except ConfigError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    handler = {
        "mine": cmd_mine,
        "train": cmd_train,
        "detect": cmd_detect,
        "report": cmd_report,
    }[args.command]
    try:
        return handler(config)
    except (DataError, RepositoryError, ValueError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
