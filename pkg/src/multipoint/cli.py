"""Command-line harness: run chains, benchmark grids, and the exact verifier.

Subcommands: ``sample``, ``benchmark``, ``verify-balance``, ``plot-data``.
Config files are JSON (UTF-8); CSV output uses '.' decimals, '\\n' line
endings, and full round-trip precision so identical config + seed gives
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import fast
from .core import ConfigurationError, SharedProposal
from .diagnostics import CSV_HEADER, acceptance_rate, lag1_correlation
from .models import (
    GaussianSequentialProposal,
    gaussian_random_walk,
    make_target,
)
from .samplers import (
    MultiPointConfig,
    iid_generic_step,
    liu_mtm_step,
    mh_step,
    mp_generic_step,
    qin_mp_step,
    run_chain,
)
from .verification import (
    DiscreteModel,
    DiscreteProposal,
    check_detailed_balance,
    balance_flows,
    enumerate_kernel,
    uniform_discrete_proposal,
)
from .weights import UNIT_LAMBDA, make_weight_family

SAMPLER_IDS = ("generic", "iid", "qin", "mtm", "mh")
_FAST_SAMPLER = {"generic": 0, "iid": 1, "mh": 2}


@dataclass
class ExperimentConfig:
    target: str = "bimodal-quartic"
    proposal: dict = field(default_factory=lambda: {
        "family": "gaussian-sequential", "sigma2": 1.0,
        "gamma1": 0.2, "gamma2": 0.8})
    samplers: list = field(default_factory=lambda: ["generic"])
    weights: list = field(default_factory=lambda: [{"id": "W1", "theta": 0.5}])
    n_list: list = field(default_factory=lambda: [1, 2, 5, 10, 20, 50, 100])
    steps: int = 20000
    burn_in: int = 2000
    runs: int = 200
    seed: int = 1
    x0: float = 0.0
    out: str = "benchmark.csv"

    def validate(self) -> None:
        make_target(self.target)
        prop = self.proposal
        if prop.get("family") not in ("gaussian-sequential", "gaussian-random-walk"):
            raise ConfigurationError(f"unknown proposal family {prop.get('family')!r}")
        if not float(prop.get("sigma2", 1.0)) > 0:
            raise ConfigurationError("sigma2 must be > 0")
        g1 = float(prop.get("gamma1", 0.2))
        g2 = float(prop.get("gamma2", 0.8))
        if abs(g1 + g2 - 1.0) > 1e-12:
            raise ConfigurationError("gamma1 + gamma2 must equal 1")
        for s in self.samplers:
            if s not in SAMPLER_IDS:
                raise ConfigurationError(f"unknown sampler {s!r}")
        for w in self.weights:
            make_weight_family(w["id"], {k: v for k, v in w.items() if k != "id"})
        if any(n < 1 for n in self.n_list):
            raise ConfigurationError("N values must be >= 1")
        if not self.steps > self.burn_in >= 0:
            raise ConfigurationError("need steps > burn_in >= 0")
        if self.runs < 1:
            raise ConfigurationError("runs must be >= 1")

    @staticmethod
    def from_dict(d: dict) -> "ExperimentConfig":
        known = {f for f in ExperimentConfig.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        cfg = ExperimentConfig(**d)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)


def load_experiment_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return ExperimentConfig.from_dict(json.load(fh))


def weight_label(w: dict) -> str:
    wid = w["id"]
    if wid in ("W1", "RATIO_THETA"):
        return f"{wid}({float(w.get('theta', 0.5 if wid == 'W1' else 1.0))!r})"
    return wid


def _cell_seed(base_seed: int, cell_idx: int, replica: int) -> int:
    ss = np.random.SeedSequence([int(base_seed), int(cell_idx), int(replica)])
    return int(ss.generate_state(1, np.uint32)[0])


def _valid_cell(sampler: str, wid: str) -> bool:
    if sampler in ("qin", "mtm"):
        return wid == "LAMBDA"
    if sampler == "iid" and wid == "W2":
        # products over within-step candidates are statistically meaningless
        # for i.i.d. tries; the i.i.d. scheme pairs only with W1/W3-style weights
        return False
    return True


def _fast_cell(cfg: ExperimentConfig, sampler: str, w: dict) -> bool:
    return (cfg.target == "bimodal-quartic"
            and cfg.proposal["family"] == "gaussian-sequential"
            and sampler in _FAST_SAMPLER
            and w["id"] in fast.WEIGHT_IDS)


def _reference_kernel(cfg: ExperimentConfig, sampler: str, w: dict, n: int):
    target = make_target(cfg.target)
    sigma2 = float(cfg.proposal.get("sigma2", 1.0))
    if sampler in ("iid", "mtm", "mh"):
        props = gaussian_random_walk(sigma2)
    else:
        props = GaussianSequentialProposal(
            sigma2=sigma2,
            gamma1=float(cfg.proposal.get("gamma1", 0.2)),
            gamma2=float(cfg.proposal.get("gamma2", 0.8)))
    params = {k: v for k, v in w.items() if k != "id"}
    if w["id"] == "LAMBDA":
        params.setdefault("lambda", UNIT_LAMBDA)
    family = make_weight_family(w["id"], params)
    if sampler == "mh":
        return lambda x, rng: mh_step(target, props, x, rng)
    mp_cfg = MultiPointConfig(n_tries=n, target=target, props=props,
                              weights=family)
    step = {"generic": mp_generic_step, "qin": qin_mp_step,
            "iid": iid_generic_step, "mtm": liu_mtm_step}[sampler]
    return lambda x, rng: step(mp_cfg, x, rng)


def _run_cell(cfg: ExperimentConfig, cell_idx: int, sampler: str, w: dict,
              n: int):
    """Replicated metrics for one (sampler, weights, N) grid cell."""
    seeds = np.array([_cell_seed(cfg.seed, cell_idx, r)
                      for r in range(cfg.runs)], dtype=np.int64)
    if _fast_cell(cfg, sampler, w):
        acc, corr = fast.replica_stats(
            seeds, _FAST_SAMPLER[sampler], float(cfg.x0), cfg.steps,
            cfg.burn_in, n, float(cfg.proposal["sigma2"]),
            float(cfg.proposal.get("gamma1", 0.2)),
            float(cfg.proposal.get("gamma2", 0.8)),
            fast.WEIGHT_IDS[w["id"]], float(w.get("theta", 0.5)))
    else:
        kernel = _reference_kernel(cfg, sampler, w, n)
        acc = np.empty(cfg.runs)
        corr = np.empty(cfg.runs)
        for r, s in enumerate(seeds):
            trace = run_chain(kernel, cfg.x0, cfg.steps, cfg.burn_in,
                              seed=int(s), sampler_id=sampler)
            acc[r] = acceptance_rate(trace)
            rho = lag1_correlation(trace)
            corr[r] = np.nan if rho is None else rho
    corr = corr[~np.isnan(corr)]
    return acc, corr


def _se(v: np.ndarray) -> float:
    return float(v.std(ddof=1) / np.sqrt(v.size)) if v.size > 1 else 0.0


def run_experiment(cfg: ExperimentConfig, out_path=None) -> str:
    """Run the full grid; returns the CSV text (also written to cfg.out)."""
    cfg.validate()
    cells = []
    for sampler in sorted(cfg.samplers):
        for w in sorted(cfg.weights, key=weight_label):
            if not _valid_cell(sampler, w["id"]):
                print(f"note: skipping invalid cell {sampler} x {w['id']}",
                      file=sys.stderr)
                continue
            for n in sorted(cfg.n_list):
                if sampler == "mh" and n != sorted(cfg.n_list)[0]:
                    continue  # MH ignores N; emit one row
                cells.append((sampler, w, n))
    lines = [CSV_HEADER]
    for idx, (sampler, w, n) in enumerate(cells):
        acc, corr = _run_cell(cfg, idx, sampler, w, n)
        row = (f"{sampler},{weight_label(w)},{n},{cfg.runs},"
               f"{float(acc.mean())!r},{_se(acc)!r},"
               f"{float(corr.mean())!r},{_se(corr)!r},{cfg.seed}")
        lines.append(row)
        print(row)
    text = "\n".join(lines) + "\n"
    target = Path(out_path or cfg.out)
    target.write_text(text, encoding="utf-8", newline="\n")
    return text


# ---------------------------------------------------------------------------
# verify-balance
# ---------------------------------------------------------------------------

def load_discrete_model(d: dict):
    M = int(d["M"])
    n = int(d.get("N", 1))
    prop = d.get("proposal", {"type": "uniform"})
    shared = bool(prop.get("shared", d.get("sampler") in ("iid", "mtm", "mh")))
    if prop.get("type", "uniform") == "uniform":
        props = uniform_discrete_proposal(M, depth=n, shared=shared)
    else:
        table = {tuple(int(t) for t in key.split(",")): np.asarray(val, float)
                 for key, val in prop["tables"].items()}
        props = DiscreteProposal(M=M, table=table, shared=shared)
    model = DiscreteModel(M=M, log_p=np.asarray(d["log_p"], float), props=props)
    wspec = d.get("weights", {"id": "W1", "theta": 1.0})
    weights = make_weight_family(
        wspec["id"], {k: v for k, v in wspec.items() if k != "id"})
    return model, weights, n, d.get("sampler", "generic")


def run_verify_balance(config_path, residuals_path="residuals.csv") -> float:
    with open(config_path, encoding="utf-8") as fh:
        model, weights, n, variant = load_discrete_model(json.load(fh))
    A = enumerate_kernel(model, weights, n, variant)
    flows = balance_flows(A, model.log_p)
    residual = max(r[4] for r in flows)
    lines = ["x,y,forward_flow,backward_flow,residual"]
    for x, y, fwd, bwd, res in flows:
        lines.append(f"{x},{y},{float(fwd)!r},{float(bwd)!r},{float(res)!r}")
    Path(residuals_path).write_text("\n".join(lines) + "\n",
                                    encoding="utf-8", newline="\n")
    print(f"variant={variant} M={model.M} N={n} weights={weights.family_id}")
    print(f"max detailed-balance residual: {residual:.3e}")
    print(f"residual table written to {residuals_path}")
    return residual


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="multipoint",
        description="Multi-point Metropolis samplers, benchmarks, and the "
                    "exact detailed-balance verifier")
    sub = p.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--config", type=str, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", type=str, default=None)

    sp = sub.add_parser("sample", help="run a single chain, write a trace CSV")
    common(sp)
    sp.add_argument("--sampler", type=str, default="generic")
    sp.add_argument("--weights", type=str, default="W1")
    sp.add_argument("--theta", type=float, default=0.5)
    sp.add_argument("--n", type=str, default="10")
    sp.add_argument("--steps", type=int, default=100000)
    sp.add_argument("--burn-in", type=int, default=0)

    sp = sub.add_parser("benchmark", help="run the experiment grid, write CSV")
    common(sp)
    sp.add_argument("--n", type=str, default=None,
                    help="comma-separated list of tries; overrides the config")
    sp.add_argument("--sampler", type=str, default=None)
    sp.add_argument("--weights", type=str, default=None)
    sp.add_argument("--theta", type=float, default=None)
    sp.add_argument("--runs", type=int, default=None)
    sp.add_argument("--steps", type=int, default=None)
    sp.add_argument("--burn-in", type=int, default=None)

    sp = sub.add_parser("verify-balance",
                        help="enumerate a discrete kernel and report residuals")
    common(sp)

    sp = sub.add_parser("plot-data", help="delegate to the plotting component")
    sp.add_argument("--csv", type=str, required=True)
    sp.add_argument("--kind", type=str, required=True)
    sp.add_argument("--out", type=str, required=True)
    sp.add_argument("--target", type=str, default="bimodal-quartic")
    return p


def cmd_sample(args) -> int:
    n = int(args.n.split(",")[0])
    seed = args.seed if args.seed is not None else 1
    sampler = args.sampler
    theta = args.theta
    if sampler == "generic" and args.weights in fast.WEIGHT_IDS:
        states, accept, alphas = fast.run_generic_chain(
            seed, 0.0, args.steps, n, 1.0, 0.2, 0.8,
            fast.WEIGHT_IDS[args.weights], theta)
    elif sampler == "iid" and args.weights in fast.WEIGHT_IDS:
        states, accept, alphas = fast.run_iid_chain(
            seed, 0.0, args.steps, n, 1.0, fast.WEIGHT_IDS[args.weights], theta)
    elif sampler == "mh":
        states, accept, alphas = fast.run_mh_chain(seed, 0.0, args.steps, 1.0)
    else:
        print(f"error: sample supports generic/iid/mh with W1/W2/W3, "
              f"got {sampler}/{args.weights}", file=sys.stderr)
        return 1
    b = args.burn_in
    lines = ["t,state,accepted,alpha"]
    for t in range(b, len(states)):
        lines.append(f"{t},{float(states[t])!r},{int(accept[t])},"
                     f"{float(alphas[t])!r}")
    out = Path(args.out or "trace.csv")
    out.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    print(f"wrote {len(states) - b} states to {out}")
    return 0


def cmd_benchmark(args) -> int:
    if args.config:
        cfg = load_experiment_config(args.config)
    else:
        cfg = ExperimentConfig()
    if args.n is not None:
        flag_n = [int(v) for v in args.n.split(",")]
        if flag_n != cfg.n_list:
            print(f"warning: --n {flag_n} overrides config N list {cfg.n_list}",
                  file=sys.stderr)
        cfg.n_list = flag_n
    if args.sampler is not None:
        cfg.samplers = args.sampler.split(",")
    if args.weights is not None:
        w = {"id": args.weights}
        if args.theta is not None:
            w["theta"] = args.theta
        cfg.weights = [w]
    for attr, val in (("runs", args.runs), ("steps", args.steps),
                      ("burn_in", args.burn_in), ("seed", args.seed)):
        if val is not None:
            setattr(cfg, attr, val)
    cfg.validate()
    run_experiment(cfg, out_path=args.out)
    return 0


def cmd_verify_balance(args) -> int:
    config = args.config
    if config is None:
        config = resources.files("multipoint").joinpath("configs/balance3.json")
    residual = run_verify_balance(config, args.out or "residuals.csv")
    return 0 if residual <= 1e-12 else 1


def cmd_plot_data(args) -> int:
    try:
        from multipoint_plots.cli import main as plots_main
    except ImportError:
        print("error: the plotting component (multipoint-plots) is not "
              "installed", file=sys.stderr)
        return 1
    return plots_main(["--csv", args.csv, "--kind", args.kind,
                       "--out", args.out, "--target", args.target])


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return {"sample": cmd_sample, "benchmark": cmd_benchmark,
                "verify-balance": cmd_verify_balance,
                "plot-data": cmd_plot_data}[args.command](args)
    except (ConfigurationError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
