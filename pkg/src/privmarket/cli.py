"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""

import argparse
import csv
import io
import os
import sys

import numpy as np

from . import config as config_mod
from .exceptions import InputError, InternalError
from .laplace import PrivacyParams
from .pricing import price, price_many, price_prior_free
from .priors import AvailabilityPrior
from .simulator import METRICS, QUANTILE_LEVELS, run
from .verify import run_checks

SEED_ENV = "PRIVMARKET_SEED"
MODELS = ("prior-free", "unit", "binomial", "uniform")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _fmt12(v):
    if v is None:
        return "NA"
    s = f"{v:.12g}"
    if s.lstrip("-").isdigit():
        s += ".0"
    return s


def _fmt(v):
    """Round-trip float formatting, independent of locale."""
    return repr(float(v))


def _number_list(text, cast):
    try:
        values = [cast(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"cannot parse list {text!r}") from None
    if not values:
        raise UsageError(f"empty list {text!r}")
    return values


def parse_sweep(text):
    """Inclusive ``min:max:step`` sweep, or a single number."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) != 3:
            raise ValueError
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"bad sweep {text!r}; expected min:max:step") from None
    return _sweep(lo, hi, step)


def _sweep(lo, hi, step):
    if not step > 0 or hi < lo:
        raise UsageError(f"empty sweep {lo}:{hi}:{step}")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def _model_prior(model, n, p):
    if model == "prior-free":
        if p is not None:
            raise UsageError("--p is not used by the prior-free model")
        return None
    if n is None:
        raise UsageError(f"--n is required for the {model} model")
    if model == "uniform":
        if p is not None:
            raise UsageError("--p is not accepted by the uniform model")
        return AvailabilityPrior("uniform", n)
    if p is None:
        raise UsageError(f"--p is required for the {model} model")
    return AvailabilityPrior(model, n, p)


def cmd_quote(args, out):
    prior = _model_prior(args.model, args.n, args.p)
    privacy = PrivacyParams(args.lam)
    if prior is None:
        q = price_prior_free(args.c_s, privacy, args.k_star, args.x, n=args.n)
    else:
        q = price(args.c_s, privacy, prior, args.k_star, args.x)
    fields = [f"premium={_fmt12(q.premium)}", f"normalized={_fmt12(q.normalized)}"]
    if q.posterior_mean is not None:
        fields += [f"posterior_mean={_fmt12(q.posterior_mean)}", f"p_exceed={_fmt12(q.tail_probability)}"]
    fields.append(f"model={q.model.replace(' ', '')}")
    out.write(" ".join(fields) + "\n")
    return 0


def _curve_settings(args):
    doc = config_mod.load(args.config) if args.config else {}
    sweep = doc.get("sweep", {})
    prior_doc = doc.get("prior_true", {})
    model = args.model or prior_doc.get("kind")
    if model is None:
        raise UsageError("--model is required")
    n = args.n if args.n is not None else prior_doc.get("n")
    lam = args.lam if args.lam is not None else doc.get("lambda")
    if lam is None:
        raise UsageError("--lambda is required")
    if args.k_star is not None:
        k_stars = _number_list(args.k_star, int)
    else:
        k_stars = sweep.get("k_star") or ([doc["k_star"]] if "k_star" in doc else None)
    if k_stars is None:
        raise UsageError("--k-star is required")
    if args.p is not None:
        ps = _number_list(args.p, float)
    else:
        ps = sweep.get("p") or ([prior_doc["p"]] if "p" in prior_doc else [None])
    if args.x is not None:
        xs = parse_sweep(args.x)
    elif {"x_min", "x_max", "x_step"} <= sweep.keys():
        xs = _sweep(sweep["x_min"], sweep["x_max"], sweep["x_step"])
    else:
        raise UsageError("--x sweep is required")
    c_s = args.c_s if args.c_s is not None else doc.get("costs", {}).get("c_s", 1.0)
    if n is None:
        raise UsageError("--n is required for curve normalisation")
    return model, n, lam, k_stars, ps, xs, c_s


def cmd_curve(args, out):
    model, n, lam, k_stars, ps, xs, c_s = _curve_settings(args)
    privacy = PrivacyParams(lam)
    columns, labels = [], []
    for p in ps:
        for k in k_stars:
            label = []
            if len(k_stars) > 1 or len(ps) == 1:
                label.append(f"k_star={k}")
            if len(ps) > 1:
                label.append(f"p={p!r}")
            labels.append(";".join(label))
            if model == "prior-free":
                if p is not None and args.p is not None:
                    raise UsageError("--p is not used by the prior-free model")
                prem = np.array([price_prior_free(c_s, privacy, k, x).premium for x in xs])
            else:
                prior = _model_prior(model, n, p)
                prem = price_many(c_s, privacy, prior, k, xs)
            columns.append(prem / (c_s * n) if n > 0 else np.zeros_like(prem))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", *labels])
    for r, x in enumerate(xs):
        writer.writerow([_fmt(x), *(_fmt(col[r]) for col in columns)])
    _emit(buf.getvalue(), args.out, out)
    return 0


def _emit(text, path, out):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)


def _resolve_seed(flag, doc):
    if flag is not None:
        return flag
    if "seed" in doc:
        return doc["seed"]
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return 0


def report_csv(report):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    qnames = [f"q{int(round(level * 100)):02d}" for level in QUANTILE_LEVELS]
    writer.writerow(["metric", "mean", "std_error", "count", *qnames])
    for name in METRICS:
        m = report.metrics[name]
        qs = [_fmt(report.gap_quantiles[level]) for level in QUANTILE_LEVELS] if name == "transfer_gap" else [""] * 5
        writer.writerow([name, _fmt(m.mean), _fmt(m.std_error), m.count, *qs])
    return buf.getvalue()


def cmd_simulate(args, out, err):
    doc = config_mod.load(args.config)
    scenario = config_mod.scenario_from_config(
        doc, replications=args.replications, seed=_resolve_seed(args.seed, doc)
    )
    report = run(scenario)
    _emit(report_csv(report), args.out, out)
    gap = report.metrics["transfer_gap"]
    err.write(
        f"{scenario.replications} episodes, true={scenario.prior_true.describe()}, "
        f"pricing={scenario.prior_pricing.describe()}, k_star={scenario.k_star}, seed={scenario.seed}\n"
        f"mean premium {report.metrics['premium'].mean:.6g}, "
        f"mean excess cost {report.metrics['excess_cost'].mean:.6g}\n"
        f"transfer gap {gap.mean:.6g} +/- {gap.std_error:.3g} (z = {report.gap_z_score():.3g})\n"
    )
    if report.note:
        err.write(f"note: {report.note}\n")
    return 0


def cmd_verify(args, out):
    seed = _resolve_seed(args.seed, {})
    if args.instances < 1:
        raise UsageError("--instances must be >= 1")
    results = run_checks(args.instances, seed)
    out.write(f"{'check':<34} {'instances':>9} {'max_error':>12}  status\n")
    for r in results:
        status = "PASS" if r.passed else f"FAIL ({r.failures})"
        out.write(f"{r.name:<34} {r.instances:>9} {r.max_error:>12.3e}  {status}\n")
    failed = [r for r in results if not r.passed]
    for r in failed:
        params = ", ".join(f"{k}={v!r}" for k, v in r.failure.items())
        out.write(f"FAILED {r.name}: {params}\n")
    return 1 if failed else 0


def build_parser():
    parser = _Parser(prog="privmarket", description="Option pricing for Laplace-obfuscated supplier stock.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("quote", help="price a single declaration")
    q.add_argument("--model", choices=MODELS, required=True)
    q.add_argument("--n", type=int)
    q.add_argument("--p", type=float)
    q.add_argument("--lambda", dest="lam", type=float, required=True)
    q.add_argument("--k-star", type=int, required=True)
    q.add_argument("--x", type=float, required=True)
    q.add_argument("--c-s", type=float, default=1.0)

    c = sub.add_parser("curve", help="normalised premium over a sweep of declarations (CSV)")
    c.add_argument("--config")
    c.add_argument("--model", choices=MODELS)
    c.add_argument("--n", type=int)
    c.add_argument("--p", help="comma-separated list")
    c.add_argument("--lambda", dest="lam", type=float)
    c.add_argument("--k-star", help="comma-separated list")
    c.add_argument("--x", help="min:max:step, inclusive")
    c.add_argument("--c-s", type=float)
    c.add_argument("--out")

    s = sub.add_parser("simulate", help="Monte Carlo risk-transfer study from a JSON scenario")
    s.add_argument("config")
    s.add_argument("--replications", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--out")

    v = sub.add_parser("verify", help="cross-check independent computation paths")
    v.add_argument("--instances", type=int, default=200)
    v.add_argument("--seed", type=int)
    return parser


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.command == "quote":
            return cmd_quote(args, out)
        if args.command == "curve":
            return cmd_curve(args, out)
        if args.command == "simulate":
            return cmd_simulate(args, out, err)
        return cmd_verify(args, out)
    except (UsageError, InputError) as exc:
        err.write(f"error: {exc}\n")
        return 2
    except InternalError as exc:
        err.write(f"internal error: {exc}\n")
        return 1
    except SystemExit as exc:
        # --help exits 0 through argparse
        return 0 if exc.code in (0, None) else 2
