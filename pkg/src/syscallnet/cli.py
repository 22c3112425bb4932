"""Command-line front end: ``syscallnet <command> [options]``.

Commands
--------
graph      trace -> exported call graph (edge-list, dot, gexf)
metrics    traces, graphs or a manifest -> metric reports (json, csv)
featurize  manifest -> labeled feature table (csv, arff, json)
evaluate   manifest or feature table -> cross-validated classifier reports
rank       manifest or feature table -> information-gain feature ranking
powerlaw   traces, graphs or a manifest -> power-law fit of the degree sample
synth      family profiles -> synthetic traces and a manifest

Exit status is 0 on success, 1 on I/O or parse failures and 2 on domain
errors such as an empty graph or a class too small for the requested folds.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .callgraph import FORMATS as GRAPH_FORMATS
from .callgraph import build_graph, export_graph, import_graph
from .dictionary import BUILTIN_CLASSES, builtin_dictionary, load_dictionary
from .errors import DomainError, EmptyDictionary, ParseError, SyscallNetError, UnknownClass
from .features import FEATURE_LABELS, LabeledDataset, build_dataset, read_manifest
from .learn import cross_validate, format_table, normalize_spec, rank_features
from .metrics import compute_metrics, reports_to_csv
from .powerlaw import degree_sample, power_law_test
from .synth import default_profiles, dump_profiles, generate_corpus, load_profiles, write_corpus
from .trace import read_trace

log = logging.getLogger("syscallnet")

DEFAULT_CLASSIFIERS = ("naive_bayes", "knn", "c45", "adaboost_c45")
_GRAPH_SUFFIXES = {".gexf": "gexf", ".edges": "edge-list", ".edgelist": "edge-list"}


class _Usage(Exception):
    """Bad flag combination discovered after parsing."""


# ------------------------------------------------------------------ helpers


def _dictionary(args, required=True):
    if args.dict and args.dict_file:
        raise _Usage("--dict and --dict-file are mutually exclusive")
    if args.dict_file:
        return load_dictionary(args.dict_file)
    if args.dict:
        return builtin_dictionary(args.dict)
    if required:
        raise _Usage("a dictionary is required: pass --dict CLASS or --dict-file PATH")
    return None


def _dict_config(args) -> dict:
    if args.dict_file:
        return {"dictionary_file": str(args.dict_file)}
    return {"dictionary": args.dict}


def _emit(args, text: str, filename: str) -> None:
    """Write to ``--out/filename`` when ``--out`` is given, else to stdout."""
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / filename).write_text(text, encoding="utf-8")
        log.info("wrote %s", out / filename)
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _load_graphs(inputs, dictionary, strict=False):
    """``(sample_id, graph)`` per input; a ``.csv`` input is a manifest of traces."""
    items = []
    for raw in inputs:
        path = Path(raw)
        if path.suffix == ".csv":
            items += [(sid, p) for sid, p, _ in read_manifest(path)]
        else:
            items.append((path.stem, path))
    out = []
    for sid, path in items:
        fmt = _GRAPH_SUFFIXES.get(path.suffix)
        if fmt is not None:
            out.append((sid, import_graph(path.read_bytes(), fmt, dictionary)))
        else:
            out.append((sid, build_graph(read_trace(path, sid, strict), dictionary)))
    return out


def _dataset(args, dictionary) -> tuple[LabeledDataset, dict]:
    source = Path(args.input)
    if getattr(args, "features", False):
        ds = LabeledDataset.from_csv(source.read_text(encoding="utf-8"))
        return ds, {"features": str(source)}
    corpus = read_manifest(source)
    ds = build_dataset(corpus, dictionary, jobs=args.jobs)
    for sid, reason in ds.dropped:
        log.warning("dropped %s: %s", sid, reason)
    return ds, {"manifest": str(source), **_dict_config(args),
                "dropped": [{"sample_id": s, "reason": r} for s, r in ds.dropped]}


# ------------------------------------------------------------------ commands


def cmd_graph(args) -> int:
    fmt = args.format or "edge-list"
    if fmt not in GRAPH_FORMATS:
        raise _Usage(f"graph --format must be one of {GRAPH_FORMATS}")
    dictionary = _dictionary(args)
    path = Path(args.trace)
    seq = read_trace(path, path.stem, args.strict)
    data = export_graph(build_graph(seq, dictionary), fmt)
    suffix = {"edge-list": "edges", "dot": "dot", "gexf": "gexf"}[fmt]
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{path.stem}.{suffix}").write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return 0


def cmd_metrics(args) -> int:
    fmt = args.format or "json"
    if fmt not in ("json", "csv"):
        raise _Usage("metrics --format must be json or csv")
    dictionary = _dictionary(args)
    reports = [compute_metrics(g, sid) for sid, g in _load_graphs(args.inputs, dictionary, args.strict)]
    if fmt == "csv":
        _emit(args, reports_to_csv(reports), "metrics.csv")
    else:
        doc = {"config": {"command": "metrics", **_dict_config(args)},
               "reports": [r.to_dict() for r in reports]}
        _emit(args, _dump(doc), "metrics.json")
    return 0


def cmd_featurize(args) -> int:
    fmt = args.format or "csv"
    if fmt not in ("csv", "arff", "json"):
        raise _Usage("featurize --format must be csv, arff or json")
    ds, config = _dataset(args, _dictionary(args))
    if fmt == "csv":
        _emit(args, ds.to_csv(), "features.csv")
    elif fmt == "arff":
        _emit(args, ds.to_arff(), "features.arff")
    else:
        doc = {"config": {"command": "featurize", **config}, "label_set": list(ds.label_set),
               "rows": [{"sample_id": s, "features": x.tolist(), "label": ds.label_set[y]}
                        for s, x, y in zip(ds.sample_ids, ds.X, ds.y)]}
        _emit(args, _dump(doc), "features.json")
    return 0


def cmd_evaluate(args) -> int:
    fmt = args.format or "json"
    if fmt not in ("json", "csv"):
        raise _Usage("evaluate --format must be json or csv")
    ds, config = _dataset(args, None if args.features else _dictionary(args))
    specs = [normalize_spec(s) for s in (args.classifier or DEFAULT_CLASSIFIERS)]
    if args.c45_seed is not None:
        specs = [_with_tree_seed(s, args.c45_seed) for s in specs]
    name = args.name or Path(args.input).stem
    reports = [cross_validate(ds, s, args.folds, args.repeats, args.seed, args.jobs, name)
               for s in specs]
    table = format_table(reports)
    config.update(command="evaluate", folds=args.folds, repeats=args.repeats, seed=args.seed,
                  classifiers=specs)
    if fmt == "csv":
        lines = ["classifier,dataset,accuracy,auc"]
        lines += [f"{r.name},{r.dataset},{r.accuracy!r},{r.auc!r}" for r in reports]
        body = "\n".join(lines) + "\n"
        _emit(args, body, "evaluation.csv")
    else:
        _emit(args, _dump({"config": config, "reports": [r.to_dict() for r in reports]}),
              "evaluation.json")
    if args.out:
        _emit(args, table, "table.txt")
    else:
        sys.stderr.write(table)
    return 0


def _with_tree_seed(spec, seed):
    if spec["kind"] == "c45":
        return {**spec, "seed": seed}
    if spec["kind"] == "adaboost":
        return {**spec, "base": _with_tree_seed(spec["base"], seed)}
    return spec


def cmd_rank(args) -> int:
    fmt = args.format or "json"
    if fmt not in ("json", "csv"):
        raise _Usage("rank --format must be json or csv")
    ds, config = _dataset(args, None if args.features else _dictionary(args))
    names = [f"f{j + 1}" for j in range(ds.X.shape[1])]
    labels = dict(zip(names, FEATURE_LABELS))
    ranking = rank_features(ds, args.bins, names)
    if fmt == "csv":
        lines = ["feature,description,information_gain"]
        lines += [f"{f},{labels.get(f, f)},{ig!r}" for f, ig in ranking]
        _emit(args, "\n".join(lines) + "\n", "ranking.csv")
    else:
        config.update(command="rank", bins=args.bins)
        doc = {"config": config,
               "ranking": [{"feature": f, "description": labels.get(f, f), "information_gain": ig}
                           for f, ig in ranking]}
        _emit(args, _dump(doc), "ranking.json")
    return 0


def cmd_powerlaw(args) -> int:
    if args.format not in (None, "json"):
        raise _Usage("powerlaw writes json only")
    dictionary = _dictionary(args)
    graphs = [g for _, g in _load_graphs(args.inputs, dictionary, args.strict)]
    sample = degree_sample(graphs, args.direction, args.weighted)
    fit = power_law_test(sample, args.bootstrap, args.seed, args.jobs)
    doc = {"config": {"command": "powerlaw", **_dict_config(args), "inputs": list(args.inputs),
                      "direction": args.direction, "weighted": args.weighted,
                      "bootstrap": args.bootstrap, "seed": args.seed},
           "fit": {**fit.to_dict(), "plausible": fit.plausible}}
    _emit(args, _dump(doc), "powerlaw.json")
    return 0


def cmd_synth(args) -> int:
    if not args.out:
        raise _Usage("synth needs --out DIR")
    if args.profiles:
        profiles = load_profiles(Path(args.profiles).read_text(encoding="utf-8"))
        if args.count is not None:
            profiles = [(p, args.count) for p, _ in profiles]
    else:
        profiles = default_profiles(args.count or 100)
    corpus = generate_corpus(profiles, args.seed, args.jobs)
    manifest = write_corpus(corpus, args.out)
    (Path(args.out) / "profiles.json").write_text(dump_profiles(profiles), encoding="utf-8")
    (Path(args.out) / "synth.json").write_text(
        _dump({"command": "synth", "seed": args.seed, "samples": len(corpus),
               "manifest": manifest.name}), encoding="utf-8")
    return 0


# ------------------------------------------------------------------ parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--dict", choices=BUILTIN_CLASSES, default=argparse.SUPPRESS,
                   help="built-in malicious call dictionary")
    g.add_argument("--dict-file", metavar="PATH", default=argparse.SUPPRESS,
                   help="dictionary JSON file")
    g.add_argument("--out", metavar="DIR", default=argparse.SUPPRESS,
                   help="output directory (default: stdout)")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (default 0)")
    g.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                   help="worker processes (default 1)")
    g.add_argument("--format", choices=("json", "csv", "dot", "gexf", "edge-list", "arff"),
                   default=argparse.SUPPRESS, help="output format")
    g.add_argument("--strict", action="store_true", default=argparse.SUPPRESS,
                   help="fail on malformed trace lines instead of skipping them")
    g.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)
    return p


_GLOBAL_DEFAULTS = {"dict": None, "dict_file": None, "out": None, "seed": 0, "jobs": 1,
                    "format": None, "strict": False, "verbose": 0}


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="syscallnet", parents=[common],
                                     description="System call graph malware analysis pipeline.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("graph", parents=[common], help="build and export a call graph")
    p.add_argument("trace")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("metrics", parents=[common], help="network metrics per sample")
    p.add_argument("inputs", nargs="+", help="trace files, graph files (.edges/.gexf) or manifests (.csv)")
    p.set_defaults(func=cmd_metrics)

    for name, func, helptext in (("featurize", cmd_featurize, "feature table of a manifest"),
                                 ("evaluate", cmd_evaluate, "cross-validate classifiers"),
                                 ("rank", cmd_rank, "information-gain feature ranking")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("input", help="manifest CSV (sample_id,trace_path,label)")
        if name != "featurize":
            p.add_argument("--features", action="store_true",
                           help="input is a feature CSV written by 'featurize'")
        p.set_defaults(func=func)
        if name == "evaluate":
            p.add_argument("--classifier", action="append", metavar="SPEC",
                           help="classifier name or JSON spec (repeatable; default: "
                                + ", ".join(DEFAULT_CLASSIFIERS) + ")")
            p.add_argument("--folds", type=int, default=5)
            p.add_argument("--repeats", type=int, default=5)
            p.add_argument("--c45-seed", type=int, default=None,
                           help="tie-break seed of C4.5 trees (default 10)")
            p.add_argument("--name", help="dataset name in the report table")
        if name == "rank":
            p.add_argument("--bins", type=int, default=10)

    p = sub.add_parser("powerlaw", parents=[common], help="power-law fit of the degree distribution")
    p.add_argument("inputs", nargs="+", help="trace files, graph files or manifests; degrees are pooled")
    p.add_argument("--direction", choices=("in", "out"), default="in")
    p.add_argument("--weighted", action="store_true", help="use multiplicity-weighted degrees")
    p.add_argument("--bootstrap", type=int, default=1000)
    p.set_defaults(func=cmd_powerlaw)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic labeled corpus")
    p.add_argument("--profiles", metavar="JSON", help="profile file (default: built-in profiles)")
    p.add_argument("--count", type=int, default=None, help="samples per profile")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for key, value in _GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except _Usage as exc:
        parser.error(str(exc))
    except DomainError as exc:
        print(f"syscallnet: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (OSError, ParseError, UnknownClass, EmptyDictionary, SyscallNetError, ValueError) as exc:
        print(f"syscallnet: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
