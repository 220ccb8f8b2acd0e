"""Command-line pipeline: simulate, fit, predict, compare.

Every output file opens with comment lines embedding the resolved
configuration and seed, and contains no timestamps, so identical seeded
invocations produce byte-identical files.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import data as data_mod
from .diagnostics import max_abs_error, mae as mean_abs_error, posterior_mean_probs
from .fit import fit_bayes
from .glm import bic, fit_glm_mle
from .links import LinkSpec, SYMMETRIC_FAMILIES
from .mcmc import MHConfig, PosteriorSamples, load_samples_csv, save_samples_csv
from .model import Dataset, PriorSpec, success_prob
from .predict import (
    cumulative_curves,
    expected_count,
    frequentist_classify,
    posterior_predictive,
    summarize_predictive,
)
from .simulate import experiment1, experiment2

LINK_CHOICES = ("logit", "probit", "cloglog", "gev", "weibull", "frechet")
_INIT_SHAPES = {"gev": 0.1, "weibull": 1.0, "frechet": 1.0}

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _resolved_config(args) -> str:
    skip = {"func"}
    payload = {k: v for k, v in vars(args).items() if k not in skip}
    return json.dumps(payload, sort_keys=True, default=str)


def _header(args, what):
    return [f"skewlink {what}", f"config: {_resolved_config(args)}"]


def _make_link(name: str) -> LinkSpec:
    if name in SYMMETRIC_FAMILIES:
        return LinkSpec(name)
    return LinkSpec(name, _INIT_SHAPES[name])


def _load_dataset(path):
    """Returns (dataset, face_or_None); accepts either CSV schema."""
    if data_mod.is_policy_csv(path):
        records = data_mod.load_csv(path)
        encoded = data_mod.encode(records)
        return encoded.dataset, encoded.face, encoded.plan
    return data_mod.read_design_csv(path), None, None


# ---------------------------------------------------------------- simulate


def cmd_simulate(args) -> int:
    if args.experiment == 1:
        link = LinkSpec.from_name(args.link, _INIT_SHAPES.get(args.link)) if args.link else None
        dataset = experiment1(args.seed, true_link=link)
    else:
        dataset = experiment2(args.seed)
    data_mod.write_design_csv(dataset, args.out, header_comments=_header(args, "simulate"))
    print(f"wrote {dataset.n} rows ({int(dataset.y.sum())} positives) to {args.out}")
    return EXIT_OK


# -------------------------------------------------------------------- fit


def _mh_config(args) -> MHConfig:
    return MHConfig(
        iterations=args.iterations,
        burn_in=args.burn_in,
        thin=args.thin,
        seed=args.seed,
        chains=args.chains,
    )


def _prior(args) -> PriorSpec:
    return PriorSpec(
        beta_variance=args.prior_beta_var,
        gev_shape_variance=args.prior_xi_var,
        gamma_shape=args.gamma_shape,
        gamma_rate=args.gamma_rate,
    )


def _freq_probs(fit, X):
    return success_prob(fit.link, X @ fit.estimates)


def _fit_one(name, dataset, args):
    """Returns a per-link result dict for reporting."""
    link = _make_link(name)
    if name in SYMMETRIC_FAMILIES:
        fit = fit_glm_mle(link, dataset)
        if not fit.converged:
            raise RuntimeError(f"{name} maximum-likelihood fit did not converge")
        q_hat = _freq_probs(fit, dataset.X)
        half = 1.959963984540054 * fit.standard_errors
        return {
            "link": name,
            "kind": "mle",
            "names": list(fit.column_names),
            "estimates": fit.estimates,
            "lower": fit.estimates - half,
            "upper": fit.estimates + half,
            "stats": {
                "neg_log_lik": -fit.log_likelihood_at_mle,
                "bic": bic(fit, dataset),
                "ks": max_abs_error(dataset.y, q_hat),
                "mae": mean_abs_error(dataset.y, q_hat),
            },
            "fit": fit,
        }
    samples, report = fit_bayes(link, dataset, prior=_prior(args), config=_mh_config(args))
    return {
        "link": name,
        "kind": "bayes",
        "names": report.parameter_names,
        "estimates": report.means,
        "lower": report.hpd_lower,
        "upper": report.hpd_upper,
        "stats": {
            "dic": report.dic,
            "p_d": report.p_d,
            "neg_log_lik": report.neg_log_lik_at_mean,
            "ks": report.ks,
            "mae": report.mae,
        },
        "samples": samples,
        "report": report,
    }


_STAT_ROWS = ("dic", "neg_log_lik", "bic", "ks", "mae")


def _comparison_rows(results, base_names):
    """Wide rows (label -> per-link cell) mirroring the study tables."""
    rows = []
    for j, nm in enumerate(base_names):
        est = {}
        lo = {}
        hi = {}
        for r in results:
            est[r["link"]] = r["estimates"][j]
            lo[r["link"]] = r["lower"][j]
            hi[r["link"]] = r["upper"][j]
        rows.append((nm, est))
        rows.append((f"{nm}_lower", lo))
        rows.append((f"{nm}_upper", hi))
    shape_rows = [r for r in results if r["kind"] == "bayes"]
    if shape_rows:
        est = {r["link"]: r["estimates"][-1] for r in shape_rows}
        lo = {r["link"]: r["lower"][-1] for r in shape_rows}
        hi = {r["link"]: r["upper"][-1] for r in shape_rows}
        rows.append(("shape", est))
        rows.append(("shape_lower", lo))
        rows.append(("shape_upper", hi))
    for stat in _STAT_ROWS:
        rows.append((stat, {r["link"]: r["stats"][stat] for r in results if stat in r["stats"]}))
    return rows


def _write_table(path, rows, links, comments):
    with open(path, "w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["row"] + list(links))
        for label, cells in rows:
            writer.writerow([label] + [repr(float(cells[l])) if l in cells else "" for l in links])


def _format_text_table(rows, links) -> str:
    width = max(len(r[0]) for r in rows) + 2
    colw = 14
    out = ["".ljust(width) + "".join(l.rjust(colw) for l in links)]
    for label, cells in rows:
        line = label.ljust(width)
        for l in links:
            line += (f"{cells[l]:.4f}" if l in cells else "").rjust(colw)
        out.append(line)
    return "\n".join(out) + "\n"


def cmd_fit(args) -> int:
    dataset, _, plan = _load_dataset(args.data)
    names = list(LINK_CHOICES) if args.link == "all" else [args.link]
    results = [_fit_one(nm, dataset, args) for nm in names]
    comments = _header(args, "fit")
    if plan is not None:
        plan.save(f"{args.out}_encoding.json")

    for r in results:
        if r["kind"] == "bayes":
            save_samples_csv(r["samples"], f"{args.out}_{r['link']}_samples.csv", comments)

    rows = _comparison_rows(results, list(dataset.names()))
    suffix = "comparison" if len(results) > 1 else "report"
    if args.format == "tabular":
        _write_table(f"{args.out}_{suffix}.csv", rows, names, comments)
        print(f"wrote {args.out}_{suffix}.csv")
    else:
        text = _format_text_table(rows, names)
        with open(f"{args.out}_{suffix}.txt", "w") as fh:
            for line in comments:
                fh.write(f"# {line}\n")
            fh.write(text)
        print(f"wrote {args.out}_{suffix}.txt")
    return EXIT_OK


# ----------------------------------------------------------------- predict


def _samples_from_csv(path, link, seed):
    draws, chain_ids, names = load_samples_csv(path)
    chains = int(chain_ids.max()) + 1 if len(chain_ids) else 1
    config = MHConfig(
        iterations=max(len(draws), 1), burn_in=1, thin=1, seed=seed, chains=chains, tune=False
    )
    return PosteriorSamples(
        draws=draws,
        chain_ids=chain_ids,
        log_posteriors=np.zeros(len(draws)),
        acceptance_rates=np.zeros(chains),
        parameter_names=names,
        config=config,
        step_sizes=np.ones(draws.shape[1]),
    )


def cmd_predict(args) -> int:
    link = _make_link(args.link)
    if args.plan:
        plan = data_mod.EncodingPlan.load(args.plan)
    else:
        plan = None
    if data_mod.is_policy_csv(args.data):
        records = data_mod.load_csv(args.data)
        encoded = data_mod.encode(records, plan) if plan else data_mod.encode(records)
        dataset, face = encoded.dataset, encoded.face
    else:
        dataset, face = data_mod.read_design_csv(args.data), None
    samples = _samples_from_csv(args.samples, link, args.seed)

    rng = np.random.default_rng(args.seed)
    draws = posterior_predictive(samples, link, dataset.X, face=face, rng=rng)
    summary = summarize_predictive(draws)
    q_hat = posterior_mean_probs(samples, link, dataset.X)
    _, thresh_count = frequentist_classify(q_hat, args.threshold)
    exp_count = expected_count(q_hat)

    comments = _header(args, "predict")
    rows = [
        ("predictive_mean_count", summary.mean_count),
        ("count_hpd_lower", summary.count_interval[0]),
        ("count_hpd_upper", summary.count_interval[1]),
        (f"thresholded_count@{args.threshold}", float(thresh_count)),
        ("expected_count", exp_count),
    ]
    if summary.mean_benefit is not None:
        thresh_benefit = float(np.sum(face[q_hat > args.threshold]))
        rows += [
            ("predictive_mean_benefit", summary.mean_benefit),
            ("benefit_hpd_lower", summary.benefit_interval[0]),
            ("benefit_hpd_upper", summary.benefit_interval[1]),
            (f"thresholded_benefit@{args.threshold}", thresh_benefit),
            ("expected_benefit", float(np.sum(q_hat * face))),
        ]
    if args.format == "tabular":
        path = f"{args.out}_prediction.csv"
        with open(path, "w", newline="") as fh:
            for line in comments:
                fh.write(f"# {line}\n")
            writer = csv.writer(fh)
            writer.writerow(["quantity", "value"])
            for label, value in rows:
                writer.writerow([label, repr(float(value))])
    else:
        path = f"{args.out}_prediction.txt"
        with open(path, "w") as fh:
            for line in comments:
                fh.write(f"# {line}\n")
            for label, value in rows:
                fh.write(f"{label} = {float(value):.6f}\n")

    curves = cumulative_curves(draws)
    cpath = f"{args.out}_curves.csv"
    with open(cpath, "w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        header = ["position", "count_mean", "count_lower", "count_upper"]
        has_benefit = curves.benefit_mean is not None
        if has_benefit:
            header += ["benefit_mean", "benefit_lower", "benefit_upper"]
        writer.writerow(header)
        for i in range(len(curves.count_mean)):
            row = [
                i + 1,
                repr(float(curves.count_mean[i])),
                repr(float(curves.count_lower[i])),
                repr(float(curves.count_upper[i])),
            ]
            if has_benefit:
                row += [
                    repr(float(curves.benefit_mean[i])),
                    repr(float(curves.benefit_lower[i])),
                    repr(float(curves.benefit_upper[i])),
                ]
            writer.writerow(row)
    print(f"wrote {path} and {cpath}")
    return EXIT_OK


# ------------------------------------------------------------------- main


def _add_fit_flags(sub):
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--iterations", type=int, default=20000)
    sub.add_argument("--burn-in", type=int, default=1000, dest="burn_in")
    sub.add_argument("--thin", type=int, default=50)
    sub.add_argument("--chains", type=int, default=3)
    sub.add_argument("--prior-beta-var", type=float, default=10.0, dest="prior_beta_var")
    sub.add_argument("--prior-xi-var", type=float, default=1.0, dest="prior_xi_var")
    sub.add_argument("--gamma-shape", type=float, default=3.0, dest="gamma_shape")
    sub.add_argument("--gamma-rate", type=float, default=4.0, dest="gamma_rate")
    sub.add_argument("--format", choices=("text", "tabular"), default="tabular")
    sub.add_argument("--out", required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skewlink",
        description="Binary regression with symmetric and skewed links for imbalanced outcomes",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="generate a synthetic study dataset")
    sim.add_argument("--experiment", type=int, choices=(1, 2), required=True)
    sim.add_argument("--link", choices=LINK_CHOICES, default=None,
                     help="true link for experiment 1 (default probit)")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True)
    sim.set_defaults(func=cmd_simulate)

    fit_p = subs.add_parser("fit", help="fit one link or all six to a dataset")
    fit_p.add_argument("--data", required=True)
    fit_p.add_argument("--link", choices=LINK_CHOICES + ("all",), default="all")
    _add_fit_flags(fit_p)
    fit_p.set_defaults(func=cmd_fit)

    cmp_p = subs.add_parser("compare", help="fit all six links and tabulate the comparison")
    cmp_p.add_argument("--data", required=True)
    _add_fit_flags(cmp_p)
    cmp_p.set_defaults(func=cmd_fit, link="all")

    pred = subs.add_parser("predict", help="posterior predictive aggregates for a portfolio")
    pred.add_argument("--samples", required=True, help="samples CSV from a Bayesian fit")
    pred.add_argument("--link", choices=LINK_CHOICES, required=True)
    pred.add_argument("--data", required=True)
    pred.add_argument("--plan", default=None, help="encoding plan JSON from the fit")
    pred.add_argument("--threshold", type=float, default=0.5)
    pred.add_argument("--seed", type=int, default=0)
    pred.add_argument("--format", choices=("text", "tabular"), default="tabular")
    pred.add_argument("--out", required=True)
    pred.set_defaults(func=cmd_predict)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except data_mod.DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
