"""Command-line interface.

Subcommands mirror the pipeline stages: train a target, serve it as a
remote oracle, synthesize a data view (hill or gan), fit and explain a
shadow model, evaluate fidelity, run parameter sweeps, and `replicate`
for the full bundled-dataset battery.
"""

from __future__ import annotations

import argparse
import json
import pathlib
import sys

import numpy as np

from . import datasets, evaluation, fca, gansynth, hillsynth, netcore, shadow_tree
from . import pipeline as pl
from .netcore import TrainConfig
from .oracle import InProcessOracle, RemoteOracle, serve


def _load_model(path):
    return netcore.deserialize(pathlib.Path(path).read_text())


def _resolve_data(args):
    if args.data in datasets.BUILTIN:
        path = datasets.builtin_path(args.data)
        label = args.label_column or datasets.builtin_label_column(args.data)
    else:
        path = args.data
        if args.label_column is None:
            raise pl.ConfigError("--label-column is required for external CSVs")
        label = args.label_column
    return pl.load_csv(path, pl.Schema(label))


def _add_data_args(p):
    p.add_argument("--data", required=True, help="bundled name (zoo, pima) or CSV path")
    p.add_argument("--label-column", help="label column for external CSVs")


def cmd_train_target(args):
    X, y, _names, labels = _resolve_data(args)
    if args.scale:
        X, _ = pl.scale_minmax(X)
    net = netcore.make_classifier(
        X.shape[1], len(labels), hidden=args.hidden, seed=args.seed
    )
    _, history = netcore.train(
        net, X, y,
        TrainConfig(learning_rate=args.learning_rate, epochs=args.epochs,
                    rng_seed=args.seed),
    )
    pathlib.Path(args.out).write_text(netcore.serialize(net))
    preds = np.argmax(net.forward_batch(X), axis=1)
    print(f"trained {X.shape[1]}-feature {len(labels)}-class target; "
          f"final loss {history[-1]:.4f}, train accuracy "
          f"{evaluation.accuracy(preds, y):.4f}; wrote {args.out}")


def cmd_serve_oracle(args):
    serve(_load_model(args.model), args.host, args.port)


def _oracle_from_args(args):
    if args.oracle:
        host, _, port = args.oracle.partition(":")
        if args.feature_count is None or args.class_count is None:
            raise pl.ConfigError(
                "--feature-count and --class-count are required with --oracle"
            )
        return RemoteOracle(host, int(port), args.feature_count, args.class_count)
    if args.model:
        return InProcessOracle(_load_model(args.model))
    raise pl.ConfigError("provide --model or --oracle <host:port>")


def cmd_synth(args):
    handle = _oracle_from_args(args)
    if args.method == "hill":
        if args.domains_from:
            if args.label_column is None:
                raise pl.ConfigError("--label-column is required with --domains-from")
            X, _y, _n, _l = pl.load_csv(args.domains_from, pl.Schema(args.label_column))
            domains = hillsynth.domains_from_data(X)
        else:
            domains = hillsynth.default_domains(handle.feature_count)
        cfg = hillsynth.HillConfig(conf_min=args.conf_min, rng_seed=args.seed)
        report = hillsynth.synthesize_dataset(
            handle, range(handle.class_count), args.n_per_class, cfg, domains
        )
        pathlib.Path(args.out).write_text(report.to_csv())
        print(f"synthesized {len(report.labels)} records "
              f"({len(report.failures)} failures, {report.queries} queries, "
              f"{report.seconds_per_record:.6f}s/record); wrote {args.out}")
        return
    gen_cfg = gansynth.GeneratorConfig(epochs=args.gan_epochs, rng_seed=args.seed)
    generators = gansynth.train_all_generators(handle, gen_cfg)
    conf_min = args.conf_min if args.filter_confidence else None
    records, labels, confs, filtered, spr = gansynth.sample_pooled(
        generators, handle, args.n_per_class, args.seed, conf_min=conf_min
    )
    report = hillsynth.SynthReport(
        records=records, labels=labels, confidences=confs,
        per_class_counts={int(c): int((labels == c).sum()) for c in set(labels.tolist())},
        failures=[], queries=handle.query_count, record_seconds=[],
    )
    pathlib.Path(args.out).write_text(report.to_csv())
    print(f"generated {len(labels)} records ({filtered} filtered below "
          f"conf_min, {spr:.2e}s/record); wrote {args.out}")


def cmd_fit_shadow(args):
    records, labels, _confs = hillsynth.load_synth_csv(
        pathlib.Path(args.synth).read_text()
    )
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    class_count = int(labels.max()) + 1
    if args.kind == "tree":
        tree = shadow_tree.fit(
            records, labels, shadow_tree.TreeParams(max_depth=args.max_depth),
            class_count,
        )
        (out / "shadow_tree.json").write_text(
            json.dumps(shadow_tree.tree_to_json(tree), indent=1)
        )
        (out / "shadow_tree.txt").write_text(shadow_tree.render_tree(tree))
        (out / "rules.txt").write_text(
            shadow_tree.rules_to_text(shadow_tree.extract_rules(tree))
        )
        print(f"fit tree shadow ({len(shadow_tree.extract_rules(tree))} rules); "
              f"artifacts in {out}")
        return
    spec = fca.tertile_bins(records, [f"f{j}" for j in range(records.shape[1])])
    ctx = fca.binarize(records, labels, spec, include_class_attrs=True,
                       class_count=class_count)
    (out / "context.cxt").write_text(fca.to_cxt(ctx))
    (out / "implications.txt").write_text(
        pl._class_implications_text(
            records, labels, spec, class_count,
            [str(c) for c in range(class_count)],
        )
    )
    plain = fca.binarize(records, labels, spec)
    lattices = fca.class_lattices(plain, labels)
    order, table = fca.fca_importance(lattices, spec)
    rows = [
        [name] + [f"{table[name][c]:.2f}" for c in sorted(lattices)]
        + [f"{table[name]['avg']:.2f}"]
        for name in order
    ]
    (out / "fca_importance.csv").write_text(
        evaluation.report_csv(
            rows, ["feature"] + [f"class{c}" for c in sorted(lattices)] + ["avg"]
        )
    )
    print(f"fit fca shadow ({sum(len(c) for _, c in lattices.values())} concepts); "
          f"artifacts in {out}")


def cmd_evaluate(args):
    handle = _oracle_from_args(args)
    X, y, _names, _labels = _resolve_data(args)
    if args.scale:
        X, _ = pl.scale_minmax(X)
    target_preds = np.argmax(handle.classify_batch(X), axis=1)
    tree = shadow_tree.tree_from_json(
        json.loads(pathlib.Path(args.shadow).read_text())
    )
    shadow_preds = tree.predict_batch(X)
    fid = evaluation.fidelity(shadow_preds, target_preds)
    acc = evaluation.accuracy(shadow_preds, y)
    print("fidelity measured on the supplied dataset")
    print(evaluation.report_text(
        [[f"{fid:.4f}", f"{acc:.4f}", len(y)]], ["fidelity", "accuracy", "n"]
    ), end="")


def cmd_explain(args):
    tree = shadow_tree.tree_from_json(
        json.loads(pathlib.Path(args.shadow).read_text())
    )
    print(shadow_tree.render_tree(tree), end="")
    print()
    print(shadow_tree.rules_to_text(shadow_tree.extract_rules(tree)), end="")
    imp = shadow_tree.tree_importance(tree)
    print()
    for f in np.argsort(-imp):
        if imp[f] > 0:
            print(f"importance f{f}: {imp[f]:.4f}")


def cmd_run(args):
    cfg = pl.load_config(args.config)
    result = pl.run_pipeline(cfg)
    print(evaluation.report_text(
        [[cfg.dataset, f"{result.target_accuracy:.4f}",
          f"{result.oshadow_fidelity:.4f}", f"{result.sshadow_fidelity:.4f}",
          f"{result.sshadow_accuracy:.4f}"]],
        ["dataset", "target_acc", "oshadow_fid", "sshadow_fid", "sshadow_acc"],
    ), end="")
    print(f"artifacts in {cfg.output_dir}")


def cmd_experiment(args):
    doc = json.loads(pathlib.Path(args.spec).read_text())
    spec = pl.ExperimentSpec(**doc)
    rows = pl.run_experiment(spec, output_path=args.out)
    for r in rows:
        print(f"{r['variable']}={r['value']} {r['method']}: "
              f"fidelity {r['fidelity_mean']:.4f} +/- {r['fidelity_sd']:.4f}, "
              f"{r['seconds_per_record_mean']:.2e}s/record")
    if args.out:
        print(f"wrote {args.out}")


def cmd_replicate(args):
    hashes = pl.replicate(seed=args.seed, output_dir=args.out_dir,
                          n_per_class=args.n_per_class)
    print((pathlib.Path(args.out_dir) / "summary.txt").read_text(), end="")
    print(f"{len(hashes)} artifact hashes in {args.out_dir}/hashes.json")


def build_parser():
    p = argparse.ArgumentParser(prog="dataview", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train-target", help="train a blackbox target net")
    _add_data_args(t)
    t.add_argument("--hidden", type=int, nargs="*", default=None)
    t.add_argument("--epochs", type=int, default=300)
    t.add_argument("--learning-rate", type=float, default=0.01)
    t.add_argument("--scale", action="store_true", help="minmax-scale to [-1, 1]")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_train_target)

    s = sub.add_parser("serve-oracle", help="expose a model over TCP")
    s.add_argument("--model", required=True)
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=7878)
    s.set_defaults(func=cmd_serve_oracle)

    def add_oracle_args(q):
        q.add_argument("--model", help="local model blob (in-process oracle)")
        q.add_argument("--oracle", metavar="host:port", help="remote oracle address")
        q.add_argument("--feature-count", type=int)
        q.add_argument("--class-count", type=int)

    y = sub.add_parser("synth", help="synthesize a data view")
    add_oracle_args(y)
    y.add_argument("--method", choices=("hill", "gan"), default="hill")
    y.add_argument("--n-per-class", type=int, default=1000)
    y.add_argument("--conf-min", type=float, default=0.7)
    y.add_argument("--filter-confidence", action=argparse.BooleanOptionalAction,
                   default=True)
    y.add_argument("--gan-epochs", type=int, default=1500)
    y.add_argument("--domains-from", help="reference CSV for feature domains")
    y.add_argument("--label-column")
    y.add_argument("--seed", type=int, default=0)
    y.add_argument("--out", required=True)
    y.set_defaults(func=cmd_synth)

    f = sub.add_parser("fit-shadow", help="fit a shadow on a synthesized CSV")
    f.add_argument("--kind", choices=("tree", "fca"), default="tree")
    f.add_argument("--synth", required=True)
    f.add_argument("--max-depth", type=int, default=8)
    f.add_argument("--out-dir", required=True)
    f.set_defaults(func=cmd_fit_shadow)

    e = sub.add_parser("evaluate", help="fidelity/accuracy of a tree shadow")
    add_oracle_args(e)
    _add_data_args(e)
    e.add_argument("--scale", action="store_true")
    e.add_argument("--shadow", required=True, help="shadow_tree.json path")
    e.set_defaults(func=cmd_evaluate)

    x = sub.add_parser("explain", help="print tree, rules, importances")
    x.add_argument("--shadow", required=True, help="shadow_tree.json path")
    x.set_defaults(func=cmd_explain)

    r = sub.add_parser("run", help="full pipeline from a config file")
    r.add_argument("--config", required=True)
    r.set_defaults(func=cmd_run)

    m = sub.add_parser("experiment", help="parameter sweeps")
    m.add_argument("--spec", required=True, help="JSON ExperimentSpec")
    m.add_argument("--out")
    m.set_defaults(func=cmd_experiment)

    c = sub.add_parser("replicate", help="bundled zoo+pima battery")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out-dir", default="runs/replicate")
    c.add_argument("--n-per-class", type=int, default=500)
    c.set_defaults(func=cmd_replicate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (pl.ConfigError, pl.StageError, netcore.ModelFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
