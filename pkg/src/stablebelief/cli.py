"""Command-line front end.

Every output file starts with a header line recording the package version,
the seed and a hash of the effective configuration. Exit codes: 0 success,
2 K-S gate failure, 3 estimator failure, 4 bad configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, belief, bivariate, pipeline, plausibility, presets, stable, stats
from .errors import ConfigError, GateFailure, InvalidParameterError, NumericalFailureError, StableBeliefError
from .gmm import MvGaussian
from .stable import StableParams

DEFAULT_SEED = 20110
OUT_ENV = "STABLEBELIEF_OUT"
EXIT_OK, EXIT_GATE, EXIT_ESTIMATOR, EXIT_CONFIG = 0, 2, 3, 4


# ---------------------------------------------------------------------------
# io helpers


def header(seed, config) -> str:
    return f"# stablebelief {__version__} seed={seed} config={pipeline.config_hash(config)}"


def out_dir(args) -> Path:
    d = Path(args.out or os.environ.get(OUT_ENV) or "out")
    d.mkdir(parents=True, exist_ok=True)
    return d


def write_csv(path: Path, head: str, columns, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(head + "\n")
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            w.writerow([f"{v:.10g}" if isinstance(v, (float, np.floating)) else v for v in r])
    return path


def write_json(path: Path, head: str, obj: dict):
    tool, version, *pairs = head[2:].split(" ")
    meta = {"tool": tool, "version": version, **dict(p.split("=", 1) for p in pairs)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"meta": meta, **obj}, fh, indent=2, default=_jsonable)
        fh.write("\n")
    return path


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def load_config(args) -> dict:
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        return cfg
    return presets.preset(getattr(args, "preset", None) or "gauss3")


def read_dataset(path) -> pipeline.Dataset:
    """Read a CSV written by ``gen``: feature columns, then ``label`` and ``class``."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln for ln in fh if not ln.startswith("#")]
    except OSError as exc:
        raise ConfigError(f"cannot read dataset {path}: {exc}") from exc
    rows = list(csv.reader(lines))
    if len(rows) < 2:
        raise ConfigError(f"dataset {path} is empty")
    cols = rows[0]
    try:
        li = cols.index("label")
        fi = [i for i, c in enumerate(cols) if c not in ("label", "class")]
        X = np.array([[float(r[i]) for i in fi] for r in rows[1:]])
        y = np.array([int(r[li]) for r in rows[1:]])
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"malformed dataset {path}: {exc}") from exc
    names = {}
    if "class" in cols:
        ci = cols.index("class")
        names = {int(r[li]): r[ci] for r in rows[1:]}
    classes = tuple(names.get(k, f"C{k + 1}") for k in range(int(y.max()) + 1))
    return pipeline.Dataset(X, y, tuple(cols[i] for i in fi), classes)


def dataset_for(args, cfg) -> pipeline.Dataset:
    if getattr(args, "data", None):
        return read_dataset(args.data)
    return pipeline.dataset_from_config(cfg, args.seed)


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    cfg = load_config(args)
    data = pipeline.dataset_from_config(cfg, args.seed)
    path = out_dir(args) / (args.name or f"{args.preset or 'dataset'}_seed{args.seed}.csv")
    rows = ([*x, int(c), data.classNames[c]] for x, c in zip(data.features, data.labels))
    write_csv(path, header(args.seed, cfg), [*data.featureNames, "label", "class"], rows)
    print(path)
    return EXIT_OK


def _fit(args, cfg):
    data = dataset_for(args, cfg)
    p = float(cfg.get("split", {}).get("p", 1.0 / 3.0))
    learn, test = pipeline.split(data, p, args.seed)
    window = cfg.get("generator", {}).get("window")
    if window is not None and test.features.shape[1] == 2:
        test = test.subset(np.flatnonzero(presets.in_window(test.features, window)))
    window = window or (-4.0, 4.0, -4.0, 4.0)
    models = pipeline.fit_models(learn, args.family, args.mode, args.k, args.seed, window=tuple(window))
    return data, learn, test, models


def _model_args(p):
    p.add_argument("--family", choices=["gaussian", "stable", "gmm"], default="stable")
    p.add_argument("--mode", choices=["PerFeature1D", "Joint2D"], default="PerFeature1D")
    p.add_argument("-k", type=int, default=3, help="mixture components for --family gmm")
    p.add_argument("--data", help="dataset CSV written by 'gen' (default: generate from the preset)")


def cmd_fit(args) -> int:
    cfg = load_config(args)
    _, learn, _, models = _fit(args, cfg)
    path = out_dir(args) / f"models_{args.family}_{args.mode}.json"
    write_json(path, header(args.seed, cfg), {"family": args.family, "dimensionMode": args.mode,
                                              "nLearn": len(learn), "models": [m.to_dict() for m in models]})
    print(path)
    return EXIT_OK


def cmd_ks(args) -> int:
    cfg = load_config(args)
    _, learn, _, models = _fit(args, cfg)
    reps = pipeline.ks_gate(models, learn)
    path = out_dir(args) / f"ks_{args.family}_{args.mode}.csv"
    stats.write_ks_csv(reps, path, header(args.seed, cfg))
    for r in reps:
        print(f"{r.label:12s} D={r.ksstat:.4f} p={r.pValue:.4f} {'pass' if r.passAt5pct else 'FAIL'}")
    return EXIT_OK if all(r.passAt5pct for r in reps) else EXIT_GATE


def cmd_classify(args) -> int:
    cfg = load_config(args)
    data, learn, test, models = _fit(args, cfg)
    reps = pipeline.ks_gate(models, learn)
    if not args.no_gate and not all(r.passAt5pct for r in reps):
        raise GateFailure("K-S gate failed: " + ", ".join(r.label for r in reps if not r.passAt5pct), reps)
    bo = pipeline.classify_belief(models, test.features, args.mode)
    bd, post = pipeline.classify_bayes(models, test.features, args.mode)
    n = len(data.classNames)
    rows = ([*x, int(t), int(a), int(b), *pb, *pp] for x, t, a, b, pb, pp
            in zip(test.features, test.labels, bo.decisions, bd, bo.betP, post))
    cols = [*data.featureNames, "label", "belief", "bayes",
            *[f"betP_{c}" for c in data.classNames], *[f"post_{c}" for c in data.classNames]]
    path = out_dir(args) / f"classify_{args.family}_{args.mode}.csv"
    write_csv(path, header(args.seed, cfg), cols, rows)
    for name, dec in (("belief", bo.decisions), ("bayes", bd)):
        acc, ci, _, rej = pipeline.score(dec, test.labels, n)
        print(f"{name:7s} accuracy {acc:.2f}% [{ci[0]:.2f}, {ci[1]:.2f}] rejected {rej}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = load_config(args)
    if args.gate:
        cfg.setdefault("models", {})["gate"] = args.gate
    res = pipeline.run_experiment(cfg, args.seed)
    objs = res.pop("_objects")
    head = header(args.seed, cfg)
    d = out_dir(args)
    stem = args.name or f"experiment_seed{args.seed}"
    write_json(d / f"{stem}.json", head, {"config": cfg, **res})
    write_csv(d / f"{stem}_accuracy.csv", head,
              ["classifier", "family", "dimensionMode", "accuracy", "ciLow", "ciHigh", "rejected", "nTest"],
              ([r.classifier, r.family, r.dimensionMode, r.accuracy, *r.ci95, r.rejected, r.nTest] for r in objs))
    write_csv(d / f"{stem}_confusion.csv", head, ["classifier", "family", "dimensionMode", "true", "predicted", "count"],
              ([r.classifier, r.family, r.dimensionMode, i, j, int(r.confusion[i, j])]
               for r in objs for i in range(r.confusion.shape[0]) for j in range(r.confusion.shape[1])))
    seen, ks_rows = set(), []
    for r in objs:
        if (r.family, r.dimensionMode) in seen:
            continue
        seen.add((r.family, r.dimensionMode))
        ks_rows += [[r.family, r.dimensionMode, k.label, k.ksstat, k.pValue, k.nSamples, int(k.passAt5pct)]
                    for k in r.ksReports]
    write_csv(d / f"{stem}_ks.csv", head,
              ["family", "dimensionMode", "label", "ksstat", "pValue", "nSamples", "passAt5pct"], ks_rows)
    for r in objs:
        print(f"{r.classifier:20s} {r.family:8s} {r.dimensionMode:12s} {r.accuracy:6.2f}% "
              f"[{r.ci95[0]:.2f}, {r.ci95[1]:.2f}] rejected {r.rejected}")
    return EXIT_OK


# plot data -----------------------------------------------------------------


def _plot_pdf1d(args, cfg):
    x = np.linspace(args.xmin, args.xmax, args.points)
    cols, series = ["x"], [x]
    for a in args.alphas:
        p = StableParams(a, args.beta, args.gamma, args.delta)
        cols.append(f"alpha={a:g}")
        series.append(stable.pdf(p, x))
    return cols, zip(*series)


def _plot_pdf2d(args, cfg):
    law = presets.class_law("stable2d", presets.STABLE3_CLASSES[args.cls])
    g = bivariate.pdf_grid(law, tuple(presets.WINDOW), args.resolution)
    X, Y = np.meshgrid(g.xs, g.ys, indexing="ij")
    return ["x", "y", "pdf"], zip(X.ravel(), Y.ravel(), g.values.ravel())


def _plot_plcurve(args, cfg):
    x = np.linspace(args.xmin, args.xmax, args.points)
    p = StableParams(args.alphas[0], args.beta, args.gamma, args.delta)
    g = stable.GaussianParams(args.delta, args.gamma * math.sqrt(2.0))
    return ["x", "pdf", "pl", "pl_gaussian"], zip(x, stable.pdf(p, x), plausibility.pl_1d(p, x),
                                                  plausibility.pl_1d(g, x))


def _plot_runningvar(args, cfg):
    cols, series = ["n"], []
    for a in args.alphas:
        tr = stats.running_variance(stable.sample(StableParams(a, args.beta, args.gamma, args.delta),
                                                  args.points, args.seed), args.stride)
        cols.append(f"alpha={a:g}")
        series.append(tr.variances)
    return cols, zip(tr.ns, *series)


def gmm_sweep(seed: int, ks=range(1, 6), cfg: dict | None = None):
    """Accuracy and K-S gate outcome of the joint GMM classifier for each component count."""
    cfg = cfg or presets.preset("stable3")
    out = []
    for k in ks:
        c = json.loads(json.dumps(cfg))
        c["models"] = {"family": "gmm", "dimensionMode": "Joint2D", "gmmComponents": int(k), "gate": "report"}
        res = pipeline.run_experiment(c, seed)
        by = {r.classifier: r for r in res["_objects"]}
        out.append({"k": int(k), "belief": by["belief"].accuracy, "bayes": by["bayes"].accuracy,
                    "gatePassed": by["belief"].gatePassed,
                    "minPValue": min(r.pValue for r in by["belief"].ksReports)})
    return out


def _plot_gmmsweep(args, cfg):
    rows = gmm_sweep(args.seed, range(1, args.kmax + 1), cfg if "generator" in cfg else None)
    return ["k", "belief", "bayes", "gatePassed", "minPValue"], (
        [r["k"], r["belief"], r["bayes"], int(r["gatePassed"]), r["minPValue"]] for r in rows)


PLOTS = {"pdf1d": _plot_pdf1d, "pdf2d": _plot_pdf2d, "plcurve": _plot_plcurve,
         "runningvar": _plot_runningvar, "gmmsweep": _plot_gmmsweep}


def cmd_plotdata(args) -> int:
    cfg = load_config(args) if (args.config or args.preset) else {"plot": args.what}
    cfg_key = {**cfg, "plotArgs": {k: v for k, v in vars(args).items() if k not in ("func", "out")}}
    cols, rows = PLOTS[args.what](args, cfg)
    path = write_csv(out_dir(args) / f"plot_{args.what}.csv", header(args.seed, cfg_key), cols, rows)
    print(path)
    return EXIT_OK


# aircraft demo ---------------------------------------------------------------


def aircraft_sweep(lo: float = 650.0, hi: float = 780.0, step: float = 1.0):
    """Speed sweep of the three-class aircraft fixture through both plausibility paths.

    Returns the speeds, both plausibility matrices, the GBT masses and
    pignistic probabilities of the stable path and both decision vectors.
    """
    laws = presets.AIRCRAFT
    names = tuple(laws)
    frame = belief.Frame(names)
    v = np.arange(lo, hi + step / 2, step)
    pl_st = np.stack([plausibility.pl_1d(p, v) for p in laws.values()], axis=1)
    # the same laws as Gaussians (variance 2 gamma^2) through the chi-square route
    pl_g = np.stack([plausibility.pl_gaussian_mv(MvGaussian([p.delta], [[2.0 * p.gamma ** 2]]), v[:, None])
                     for p in laws.values()], axis=1)
    out = {}
    for key, P in (("stable", pl_st), ("gaussian", pl_g)):
        m = belief.gbt_dense(P)
        bet = belief.pignistic_dense(m, frame.n)
        out[key] = (m, bet, np.argmax(bet, axis=1))
    return {"names": names, "frame": frame, "speed": v, "plStable": pl_st, "plGaussian": pl_g,
            "masses": out["stable"][0], "betP": out["stable"][1],
            "decisionStable": out["stable"][2], "decisionGaussian": out["gaussian"][2]}


def cmd_demo_aircraft(args) -> int:
    r = aircraft_sweep(args.lo, args.hi, args.step)
    names, frame = r["names"], r["frame"]
    cfg = {"demo": "aircraft", "laws": {k: p.to_dict() for k, p in presets.AIRCRAFT.items()},
           "sweep": [args.lo, args.hi, args.step]}
    cols = (["speed"] + [f"pl_{c}" for c in names] + [f"plchi2_{c}" for c in names]
            + [f"m_{frame.key(a)}" for a in range(1 << frame.n)] + [f"betP_{c}" for c in names]
            + ["decision", "decisionChi2"])
    rows = ([s, *a, *b, *m, *p, names[d1], names[d2]] for s, a, b, m, p, d1, d2 in
            zip(r["speed"], r["plStable"], r["plGaussian"], r["masses"], r["betP"],
                r["decisionStable"], r["decisionGaussian"]))
    path = write_csv(out_dir(args) / "aircraft.csv", header(args.seed, cfg), cols, rows)
    agree = bool(np.all(r["decisionStable"] == r["decisionGaussian"]))
    print(path)
    print(f"decisions agree at all {r['speed'].size} speeds: {agree}")
    if not agree:
        raise NumericalFailureError("stable and chi-square decisions differ")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stablebelief", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./out)")
    common.add_argument("--preset", choices=sorted(presets.PRESETS))
    common.add_argument("--config", help="experiment config JSON")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="write a synthetic dataset CSV")
    p.add_argument("--name", help="output file name")
    p.set_defaults(func=cmd_gen)

    for name, func, hlp in (("fit", cmd_fit, "fit per-class models"),
                            ("ks", cmd_ks, "K-S validation of fitted models"),
                            ("classify", cmd_classify, "belief and Bayes decisions on the test split")):
        p = sub.add_parser(name, parents=[common], help=hlp)
        _model_args(p)
        if name == "classify":
            p.add_argument("--no-gate", action="store_true", help="classify even if the K-S gate fails")
        p.set_defaults(func=func)

    p = sub.add_parser("experiment", parents=[common], help="run a full experiment")
    p.add_argument("--gate", choices=["enforce", "report", "skip"])
    p.add_argument("--name", help="output file stem")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("plotdata", parents=[common], help="numeric series for figures")
    p.add_argument("what", choices=sorted(PLOTS))
    p.add_argument("--alphas", type=float, nargs="+", default=[0.5, 1.0, 1.5, 2.0])
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--xmin", type=float, default=-10.0)
    p.add_argument("--xmax", type=float, default=10.0)
    p.add_argument("--points", type=int, default=401)
    p.add_argument("--stride", type=int, default=100)
    p.add_argument("--cls", type=int, default=0, choices=[0, 1, 2], help="class for pdf2d")
    p.add_argument("--resolution", type=int, default=128)
    p.add_argument("--kmax", type=int, default=5)
    p.set_defaults(func=cmd_plotdata)

    p = sub.add_parser("demo-aircraft", parents=[common], help="three-class speed example")
    p.add_argument("--lo", type=float, default=650.0)
    p.add_argument("--hi", type=float, default=780.0)
    p.add_argument("--step", type=float, default=1.0)
    p.set_defaults(func=cmd_demo_aircraft)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GateFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GATE
    except (ConfigError, InvalidParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StableBeliefError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ESTIMATOR


if __name__ == "__main__":
    sys.exit(main())
