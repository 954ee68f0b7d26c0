"""Command-line front end.

Every subcommand writes its result to a file and prints a single summary
line of ``key=value`` pairs. Exit status is 0 when no error was logged, 1
when something was skipped or failed, 2 for usage errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .jsmetrics import FeatureVector

log = logging.getLogger("cryptolab")

WEBSITES_DIR = "websites"


class _Counter(logging.Handler):
    def __init__(self):
        super().__init__(logging.WARNING)
        self.warnings = 0
        self.errors = 0

    def emit(self, record):
        if record.levelno >= logging.ERROR:
            self.errors += 1
        else:
            self.warnings += 1


class CliError(Exception):
    pass


def _summary(cmd, counter, seed, **fields):
    parts = [f"cryptolab {cmd}", "ok" if counter.errors == 0 else "failed"]
    parts += [f"{k}={v}" for k, v in fields.items()]
    parts += [f"warnings={counter.warnings}", f"errors={counter.errors}", f"seed={seed}"]
    print(" ".join(parts))


def _nan_to_none(v):
    return None if isinstance(v, float) and math.isnan(v) else v


def _out_path(args, default_stem):
    if args.out:
        return Path(args.out)
    return Path(f"{default_stem}.{args.format}")


# analyze

def _measure(path_str):
    """Worker: returns (features or None, error message or None)."""
    from .jsmetrics import extract_features

    try:
        text = Path(path_str).read_text(encoding="utf-8")
        return extract_features(text, lenient=True).as_list(), None
    except (OSError, UnicodeDecodeError, ValueError) as e:
        return None, f"{type(e).__name__}: {e}"


def _class_dirs(root: Path):
    if not root.is_dir():
        raise CliError(f"corpus root {root} is not a directory")
    return sorted(p for p in root.iterdir() if p.is_dir() and p.name != WEBSITES_DIR)


def _map(fn, items, jobs):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items, chunksize=8))
    return [fn(i) for i in items]


def _scan_scripts(root: Path):
    files = []
    for cdir in _class_dirs(root):
        found = sorted(cdir.rglob("*.js"))
        if not found:
            log.warning("class %r has no .js files", cdir.name)
        files += [(f.relative_to(root).as_posix(), cdir.name, f) for f in found]
    files.sort(key=lambda t: t[0])
    return files


def _scan_websites(root: Path):
    """``websites/<class>/<site>/**.js``: one entry per site."""
    base = root / WEBSITES_DIR
    if not base.is_dir():
        raise CliError(f"{base} does not exist")
    sites = []
    for cdir in sorted(p for p in base.iterdir() if p.is_dir()):
        for sdir in sorted(p for p in cdir.iterdir() if p.is_dir()):
            scripts = sorted(sdir.rglob("*.js"))
            if not scripts:
                log.warning("site %s has no scripts", sdir.relative_to(root).as_posix())
                continue
            sites.append((sdir.relative_to(root).as_posix(), cdir.name, scripts))
    return sites


def cmd_analyze(args, counter):
    from .classifier import aggregate_website
    from .jsmetrics import FEATURE_NAMES, write_feature_csv

    root = Path(args.corpus)
    out_rows = []
    if args.websites:
        sites = _scan_websites(root)
        flat = [str(s) for _, _, scripts in sites for s in scripts]
        results = dict(zip(flat, _map(_measure, flat, args.jobs)))
        for rel, label, scripts in sites:
            vecs = []
            for s in scripts:
                fv, err = results[str(s)]
                if err:
                    log.error("skipped %s: %s", s.relative_to(root).as_posix(), err)
                else:
                    vecs.append(fv)
            if vecs:
                out_rows.append((rel, label, [float(x) for x in aggregate_website(vecs)]))
    else:
        files = _scan_scripts(root)
        results = _map(_measure, [str(f) for _, _, f in files], args.jobs)
        for (rel, label, _), (fv, err) in zip(files, results):
            if err:
                log.error("skipped %s: %s", rel, err)
                continue
            out_rows.append((rel, label, FeatureVector.from_values(fv)))

    dest = _out_path(args, "features")
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        if args.format == "csv":
            write_feature_csv(out_rows, fh)
        else:
            doc = {
                "seed": args.seed,
                "features": list(FEATURE_NAMES),
                "rows": [
                    {"path": p, "label": l, "values": [_nan_to_none(float(x)) for x in _values(v)]}
                    for p, l, v in out_rows
                ],
            }
            json.dump(doc, fh, indent=1)
            fh.write("\n")
    _summary("analyze", counter, args.seed, rows=len(out_rows), out=dest)


def _values(v):
    return v.as_list() if isinstance(v, FeatureVector) else list(v)


# correlate

def _load_features(path):
    from .jsmetrics import read_feature_csv

    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return read_feature_csv(fh)
    except OSError as e:
        raise CliError(f"cannot read {path}: {e}") from e
    except ValueError as e:
        raise CliError(f"{path}: {e}") from e


def cmd_correlate(args, counter):
    import numpy as np

    from .featanalysis import CLASSES, FeatureMatrix, per_class_matrices, significant_features, write_matrix_csv

    paths, labels, rows = _load_features(args.features)
    # canonical row order so shuffled inputs give identical output
    order = sorted(range(len(rows)), key=lambda i: (labels[i], paths[i], rows[i]))
    fm = FeatureMatrix([labels[i] for i in order], np.array([rows[i] for i in order]).reshape(len(rows), -1))
    try:
        mats = per_class_matrices(fm, CLASSES)
    except ValueError as e:
        raise CliError(str(e)) from e
    undefined = {}
    for cls, cm in mats.items():
        n = int((~cm.defined).sum())
        undefined[cls] = n
        if n:
            log.warning("class %s: %d undefined correlation entries", cls, n)
    chosen = significant_features(mats["cryptojacking"], mats["malicious"], mats["benign"])

    dest = Path(args.out) if args.out else Path("correlation")
    dest.mkdir(parents=True, exist_ok=True)
    if args.format == "csv":
        for cls, cm in mats.items():
            with open(dest / f"matrix_{cls}.csv", "w", encoding="utf-8", newline="") as fh:
                write_matrix_csv(cm, fh)
        (dest / "selected.txt").write_text("".join(f + "\n" for f in chosen), encoding="utf-8")
    else:
        doc = {
            "seed": args.seed,
            "features": list(fm.feature_names),
            "matrices": {
                cls: [[_nan_to_none(float(v)) for v in row] for row in cm.values] for cls, cm in mats.items()
            },
            "undefined": undefined,
            "selected": chosen,
        }
        (dest / "correlation.json").write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
    _summary("correlate", counter, args.seed, rows=len(rows), selected=len(chosen), out=dest)


# classify

def cmd_classify(args, counter):
    import numpy as np

    from .classifier import MODEL_KINDS, Dataset, evaluate, synthetic_dataset
    from .featanalysis import CLASSES

    kinds = [k.strip() for k in args.models.split(",") if k.strip()]
    bad = [k for k in kinds if k not in MODEL_KINDS]
    if bad:
        raise CliError(f"unknown model(s): {', '.join(bad)}; choose from {','.join(MODEL_KINDS)}")
    if args.synthetic:
        data = synthetic_dataset(per_class=args.synthetic, seed=args.seed)
        source = f"synthetic:{args.synthetic}"
    else:
        if not args.features:
            raise CliError("give a feature CSV or --synthetic N")
        _, labels, rows = _load_features(args.features)
        keep = [i for i, r in enumerate(rows) if all(math.isfinite(v) for v in r)]
        if len(keep) < len(rows):
            log.warning("dropped %d row(s) with undefined features", len(rows) - len(keep))
        labels = [labels[i] for i in keep]
        present = set(labels)
        names = [c for c in CLASSES if c in present] + sorted(present - set(CLASSES))
        try:
            data = Dataset.from_labelled(np.array([rows[i] for i in keep]).reshape(len(keep), -1), labels, names)
        except ValueError as e:
            raise CliError(str(e)) from e
        source = args.features
    hp = {"knn_metric": args.knn_metric, "k": args.k}
    if args.max_depth is not None:
        hp["max_depth"] = args.max_depth
    try:
        report = evaluate(data, kinds, split=args.split, repetitions=args.reps, seed=args.seed,
                          hyperparameters=hp, jobs=args.jobs)
    except ValueError as e:
        raise CliError(str(e)) from e

    dest = _out_path(args, "report")
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        if args.format == "csv":
            report.write_csv(fh)
        else:
            doc = report.to_dict()
            doc["source"] = source
            doc["classes"] = list(data.class_names)
            json.dump(doc, fh, indent=1)
            fh.write("\n")
    best = max(report.scores.items(), key=lambda kv: kv[1].f1)
    _summary("classify", counter, args.seed, samples=len(data.labels), models=len(kinds),
             best=f"{best[0]}:{best[1].f1:.4f}", out=dest)


# simulate

def cmd_simulate(args, counter):
    from .simnet import ScenarioError, load_blacklist, run_scenario

    blacklist = None
    if args.blacklist:
        try:
            with open(args.blacklist, encoding="utf-8") as fh:
                blacklist = load_blacklist(fh)
        except OSError as e:
            raise CliError(f"cannot read blacklist: {e}") from e
    try:
        report = run_scenario(
            args.scenario,
            alpha=args.alpha,
            h_max=args.hmax,
            duration=args.duration,
            seed=args.seed,
            target=args.target,
            transport=args.transport,
            realtime=args.realtime,
            blacklist=blacklist,
            frame_log_path=args.frame_log,
        )
    except (ScenarioError, ValueError) as e:
        raise CliError(str(e)) from e
    if report.client.get("error") and args.scenario != "keyless":
        log.warning("client ended early: %s", report.client["error"])
    dest = _out_path(args, "report")
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        if args.format == "json":
            fh.write(report.to_json() + "\n")
        else:
            import csv

            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["scenario", "seed", "accepted_hashes", "attempted", "blacklist", "payload", "payload_time"])
            v = report.verdicts
            w.writerow([report.scenario, report.seed, report.accepted_hashes, report.client["attempted"],
                        int(v["blacklist"].flagged), int(v["payload"].flagged),
                        "" if v["payload"].time_of_flag is None else v["payload"].time_of_flag])
    v = report.verdicts
    _summary("simulate", counter, args.seed, scenario=args.scenario, hashes=report.accepted_hashes,
             blacklist="flagged" if v["blacklist"].flagged else "silent",
             payload="flagged" if v["payload"].flagged else "silent", out=dest)


# economics

def _constants(args):
    from .economics import MarketConstants

    try:
        return MarketConstants(args.pay_rate, args.price)
    except ValueError as e:
        raise CliError(str(e)) from e


def cmd_economics(args, counter):
    import csv

    from . import economics as eco

    c = _constants(args)
    what = args.what
    if what == "device-table":
        try:
            devs = eco.load_devices(args.devices)
            alphas = [float(a) for a in args.alphas.split(",")] if args.alphas else None
            rows = eco.device_table(devs, alphas, c)
        except (OSError, KeyError, ValueError) as e:
            raise CliError(f"device table: {e}") from e
        dest = _out_path(args, "device_table")
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            if args.format == "csv":
                eco.write_device_csv(rows, devs, fh)
            else:
                json.dump([{
                    "device": r.device, "alpha": r.alpha, "h": r.h, "b_c": r.b_c,
                    "P_XMR": r.profit.xmr, "P_USD": r.profit.usd, "L_USD": r.loss,
                    "gap_USD": r.gap, "T_years": r.years,
                } for r in rows], fh, indent=1)
                fh.write("\n")
        _summary("economics device-table", counter, args.seed, rows=len(rows), out=dest)
    elif what == "website":
        try:
            prof = eco.WebsiteProfile(args.visits, eco.parse_duration(args.duration), args.hashrate)
        except ValueError as e:
            raise CliError(str(e)) from e
        usd = eco.website_profit(prof, c)
        dest = _out_path(args, "website")
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            if args.format == "csv":
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["visits", "duration_s", "hash_rate", "P_CJ_USD"])
                w.writerow([f"{prof.monthly_visits:.6g}", prof.avg_visit_duration, prof.visitor_hash_rate, f"{usd:.4g}"])
            else:
                json.dump({"visits": prof.monthly_visits, "duration_s": prof.avg_visit_duration,
                           "hash_rate": prof.visitor_hash_rate, "P_CJ_USD": usd}, fh, indent=1)
                fh.write("\n")
        _summary("economics website", counter, args.seed, usd_per_month=f"{usd:.4g}", out=dest)
    elif what == "sites":
        ds = eco.load_websites(args.sites_file)
        rows = {"top": ds.top, "cryptojacking": ds.cryptojacking, "all": ds.top + ds.cryptojacking}[args.set]
        dest = _out_path(args, f"sites_{args.set}")
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            if args.format == "csv":
                eco.write_website_csv(rows, fh, args.hashrate or ds.hash_rate, c)
            else:
                json.dump([{"site": r.site, "visits": r.visits, "time": r.time,
                            "P_CJ_USD": eco.website_profit(r.profile(args.hashrate or ds.hash_rate), c),
                            "P_Ads_USD": r.ads_monthly_usd} for r in rows], fh, indent=1)
                fh.write("\n")
        _summary("economics sites", counter, args.seed, rows=len(rows), out=dest)
    else:  # block-stats
        try:
            target = int(args.target, 0)
            b = eco.block_stats(target, args.hash_rate)
        except ValueError as e:
            raise CliError(str(e)) from e
        dest = _out_path(args, "block_stats")
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            if args.format == "csv":
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["target", "hash_rate", "P_r", "H", "T_B_s"])
                w.writerow([hex(target), args.hash_rate, f"{b.P_r:.6g}", f"{b.H:.6g}", f"{b.T_B:.6g}"])
            else:
                json.dump({"target": hex(target), "hash_rate": args.hash_rate, "P_r": b.P_r, "H": b.H,
                           "T_B_s": b.T_B}, fh, indent=1)
                fh.write("\n")
        _summary("economics block-stats", counter, args.seed, T_B=f"{b.T_B:.6g}", out=dest)


# parser

def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    from .simnet import SCENARIOS

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (directory for correlate)")
    common.add_argument("--format", choices=("csv", "json"), default=None, help="csv (default) or json; simulate defaults to json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=_positive_int, default=1, help="worker count for parallel steps")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="cryptolab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="extract script features from a corpus")
    a.add_argument("corpus", help="root with one subdirectory per class")
    a.add_argument("--websites", action="store_true", help="aggregate websites/<class>/<site>/ trees instead")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("correlate", parents=[common], help="per-class correlation and feature selection")
    c.add_argument("features", help="feature CSV from analyze")
    c.set_defaults(func=cmd_correlate)

    k = sub.add_parser("classify", parents=[common], help="repeated-holdout evaluation of the classifiers")
    k.add_argument("features", nargs="?", help="feature CSV from analyze")
    k.add_argument("--synthetic", type=_positive_int, metavar="N", help="use N synthetic samples per class")
    k.add_argument("--models", default="lr,lda,knn,svm,rf")
    k.add_argument("--split", type=float, default=0.75)
    k.add_argument("--reps", type=_positive_int, default=20)
    k.add_argument("--knn-metric", choices=("euclidean", "manhattan"), default="euclidean")
    k.add_argument("--k", type=_positive_int, default=3, help="neighbours for k-NN")
    k.add_argument("--max-depth", type=_positive_int, default=None)
    k.set_defaults(func=cmd_classify)

    s = sub.add_parser("simulate", parents=[common], help="run a mining/detection scenario")
    s.add_argument("--scenario", choices=SCENARIOS, required=True)
    s.add_argument("--alpha", type=float, default=0.1)
    s.add_argument("--hmax", type=float, default=1000.0)
    s.add_argument("--duration", type=float, default=30.0)
    s.add_argument("--target", default="ffffff00")
    s.add_argument("--transport", choices=("inprocess", "tcp"), default="inprocess")
    s.add_argument("--realtime", action="store_true", help="use wall-clock time instead of the virtual clock")
    s.add_argument("--blacklist", help="file with one endpoint per line")
    s.add_argument("--frame-log", help="write the server frame log (JSON lines) here")
    s.set_defaults(func=cmd_simulate, default_format="json")

    e = sub.add_parser("economics", help="profit/loss tables and estimates")
    esub = e.add_subparsers(dest="what", required=True)
    money = argparse.ArgumentParser(add_help=False)
    money.add_argument("--pay-rate", type=float, default=2.894e-5, help="XMR per 10^6 hashes")
    money.add_argument("--price", type=float, default=200.0, help="USD per XMR")

    d = esub.add_parser("device-table", parents=[common, money], help="profit, loss and payout per device and throttle")
    d.add_argument("--devices", help="device profile JSON (default: shipped profiles)")
    d.add_argument("--alphas", help="comma-separated throttle values")
    w = esub.add_parser("website", parents=[common, money], help="monthly revenue for one site")
    w.add_argument("--visits", type=float, required=True)
    w.add_argument("--duration", required=True, help="MM:SS")
    w.add_argument("--hashrate", type=float, default=20.0)
    t = esub.add_parser("sites", parents=[common, money], help="reference site table")
    t.add_argument("--set", choices=("top", "cryptojacking", "all"), default="top")
    t.add_argument("--sites-file")
    t.add_argument("--hashrate", type=float, default=None)
    b = esub.add_parser("block-stats", parents=[common, money], help="block probability and time for a target")
    b.add_argument("--target", default=hex(2**224), help="256-bit target (decimal or 0x hex)")
    b.add_argument("--hash-rate", type=float, default=1e6)
    e.set_defaults(func=cmd_economics)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "format", None) is None:
        args.format = getattr(args, "default_format", "csv")
    counter = _Counter()
    root = logging.getLogger()
    stream = logging.StreamHandler(sys.stderr)
    stream.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    old_level = root.level
    root.addHandler(counter)
    root.addHandler(stream)
    root.setLevel(logging.INFO if getattr(args, "verbose", False) else logging.WARNING)
    try:
        args.func(args, counter)
    except CliError as e:
        log.error("%s", e)
        print(f"cryptolab {args.command} failed errors={counter.errors} seed={getattr(args, 'seed', 0)}")
        return 1
    finally:
        root.removeHandler(counter)
        root.removeHandler(stream)
        root.setLevel(old_level)
    return 0 if counter.errors == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
