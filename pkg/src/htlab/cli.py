"""Command-line front end.  Exit codes: 0 ok, 2 usage, 3 regime, 4 I/O."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict

from .dist import HeavyTailLaw, make_rng
from .errors import ConfigError, HTLabError, InvalidLaw, RegimeError
from .mat import (decompose, default_thresholds, diagnostics, read_matrix, sample_matrix,
                  write_matrix, write_sparse)
from .norms import NormProblem, ground_state, grothendieck_value, operator_norm
from . import xlab

EXIT_OK, EXIT_USAGE, EXIT_REGIME, EXIT_IO = 0, 2, 3, 4


def _json(obj) -> str:
    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return None if math.isnan(v) else str(v)
        return v
    return json.dumps({k: clean(v) for k, v in obj.items()}, sort_keys=True)


def _add_law(p):
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--sv", default="constant", choices=("constant", "log_power"))
    p.add_argument("--c", type=float, default=0.0, help="log_power exponent")
    p.add_argument("--shift", type=float, default=0.0)
    p.add_argument("--sign", default="symmetric", choices=("symmetric", "positive", "two_point"))
    p.add_argument("--q", type=float, default=0.5, help="two_point probability of +")
    p.add_argument("--centered", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="htlab", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("sample", help="sample a symmetric heavy-tailed matrix")
    _add_law(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("decompose", help="split a matrix into small/intermediate/large parts")
    p.add_argument("matrix")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--regime", default="small_alpha", choices=("small_alpha", "centered_alpha"))
    p.add_argument("--r", type=float, default=4.0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--eta", type=float)
    p.add_argument("--zeta", type=float)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--out-prefix", required=True)

    p = sub.add_parser("norm", help="r->p operator norm of a matrix file")
    p.add_argument("matrix")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--method", default="auto",
                   choices=("auto", "power", "ascent", "oracle", "closed"))
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("groth", help="l_r Grothendieck value of a matrix file")
    p.add_argument("matrix")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("ground", help="exact ground state (n <= 20)")
    p.add_argument("matrix")

    p = sub.add_parser("experiment", help="run a Monte Carlo campaign from a config file")
    p.add_argument("config")
    p.add_argument("--seed", type=int, help="override master_seed")
    p.add_argument("--records")
    p.add_argument("--summary")
    p.add_argument("--plotdata")
    p.add_argument("--threads", type=int)

    p = sub.add_parser("report", help="summarize a records file")
    p.add_argument("records")
    p.add_argument("--config", help="campaign config; needed for KS columns")
    p.add_argument("--summary", help="CSV output path (default: stdout)")
    return ap


def _cmd_sample(a):
    law = HeavyTailLaw(a.alpha, a.sv, a.c, a.shift, a.sign, a.q, a.centered)
    write_matrix(a.out, sample_matrix(law, a.n, make_rng(a.seed), seed=a.seed))


def _cmd_decompose(a):
    A = read_matrix(a.matrix)
    if a.eta is None or a.zeta is None:
        eta, zeta = default_thresholds(a.regime, a.alpha, a.r, a.p)
    else:
        eta, zeta = a.eta, a.zeta
    dec = decompose(A, a.alpha, eta, zeta)
    write_matrix(f"{a.out_prefix}.small", dec.small)
    write_sparse(f"{a.out_prefix}.inter", dec.inter)
    write_sparse(f"{a.out_prefix}.large", dec.large)
    rep = diagnostics(A, a.alpha, a.delta, eta, zeta)
    out = asdict(rep)
    out.update(eta=eta, zeta=zeta, t_low=dec.t_low, t_high=dec.t_high)
    print(_json(out))


def _cmd_norm(a):
    cert = operator_norm(read_matrix(a.matrix), NormProblem(a.r, a.p), a.method, a.restarts,
                         rng=make_rng(a.seed))
    print(_json({"value": cert.value, "method": cert.method,
                 "kkt_residual": cert.kkt_residual, "iterations": cert.iterations}))


def _cmd_groth(a):
    cert = grothendieck_value(read_matrix(a.matrix), a.r, a.restarts, make_rng(a.seed))
    print(_json({"value": cert.value, "method": cert.method, "exact": cert.exact,
                 "kkt_residual": cert.kkt_residual, "iterations": cert.iterations}))


def _cmd_ground(a):
    print(repr(ground_state(read_matrix(a.matrix))))


def _cmd_experiment(a):
    cfg = xlab.load_config(a.config)
    if a.seed is not None:
        cfg.master_seed = a.seed
    for key in ("records", "summary", "plotdata"):
        if getattr(a, key):
            setattr(cfg, key, getattr(a, key))
    reference = xlab.build_reference(cfg)
    records, summary = xlab.run_experiment(cfg, a.threads, reference)
    if cfg.records:
        xlab.emit_records(records, cfg.records)
    if cfg.plotdata:
        xlab.emit_plotdata(records, reference, cfg.plotdata)
    xlab.emit_summary(summary, cfg.summary or sys.stdout)


def _cmd_report(a):
    records = xlab.parse_records(a.records)
    cfg = reference = None
    if a.config:
        cfg = xlab.load_config(a.config)
        reference = xlab.build_reference(cfg)
    xlab.emit_summary(xlab.summarize(records, cfg, reference), a.summary or sys.stdout)


COMMANDS = {"sample": _cmd_sample, "decompose": _cmd_decompose, "norm": _cmd_norm,
            "groth": _cmd_groth, "ground": _cmd_ground, "experiment": _cmd_experiment,
            "report": _cmd_report}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        COMMANDS[args.cmd](args)
    except RegimeError as exc:
        print(f"htlab: regime error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (ConfigError, InvalidLaw) as exc:
        print(f"htlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"htlab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (HTLabError, ValueError) as exc:
        print(f"htlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
