"""Command-line entry point.

Subcommands: analyze, project, bimodal, dhn, spin. Every randomized command
takes an explicit seed; outputs are CSV/JSON files under --out-dir plus a
human-readable summary on stdout. Exit codes: 0 success, 2 argument parse
failure, 3 input validation failure, 4 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import chains, landscape, projection, spectral, spins, tuning
from .errors import ConfigInvalid, ParseError, PermChainError

EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_RUNTIME = 4

DHN_BOUND_CONSTANT = 5.0


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_matrix(path: str) -> tuple[chains.StochasticMatrix, chains.ProbabilityVector]:
    mat = chains.read_matrix(path)
    pi = mat.stationary or chains.stationary_of(mat)
    return mat, pi


def cmd_analyze(args) -> int:
    mat, pi = _load_matrix(args.matrix)
    report: dict = {"n": mat.n, "trace": float(np.trace(mat.m))}
    rev = chains.is_reversible(mat.m, pi.p)
    report["reversible"] = rev.reversible
    report["max_detailed_balance_violation"] = rev.max_violation
    sl = projection.speed_limit_report(mat.m, pi.p)
    report["speed_limit"] = {
        "trace_one": sl.trace_one,
        "sylvester_overlap": sl.sylvester_overlap,
        "gap_half_condition": sl.gap_half_condition,
        "min_eigen_gap": sl.min_eigen_gap,
    }
    pimat = chains.stationary_matrix(pi)
    from .divergence import kl_rate

    report["kl_to_stationary"] = float(kl_rate(mat.m, pimat.m, pi.p))
    if rev.reversible:
        spec = spectral.spectrum(mat.m, pi.p)
        report["spectrum"] = {
            "eigenvalues": [float(v) for v in spec.eigenvalues],
            "slem": spec.slem,
            "gap": spec.gap,
            "relaxation_time": spec.relaxation_time,
            "eigentime": spec.eigentime,
        }
        report["variance"] = {
            "worst_case": spectral.worst_case_av(mat.m, pi.p),
            "average_case": spectral.average_case_av(mat.m, pi.p),
        }
    else:
        report["general_eigenvalues"] = [
            [float(v.real), float(v.imag)] for v in spectral.general_eigenvalues(mat.m)]
    text = json.dumps(report, indent=2)
    if args.format == "json":
        path = _out_dir(args) / "analyze.json"
        path.write_text(text + "\n")
        print(f"wrote {path}")
    print(text)
    return 0


def cmd_project(args) -> int:
    mat, pi = _load_matrix(args.matrix)
    involutions = []
    for pf in args.permutations:
        mapping = tuning.read_permutation_map(pf, mat.n)
        involutions.append(chains.involution_from_map(mapping, pi, mode="tolerance"))
    sched = projection.ProjectionSchedule(tuple(involutions))
    if args.sweeps == 0:
        # report only the starting iterate
        from .divergence import kl_rate

        pimat = chains.stationary_matrix(pi)
        run = projection.ProjectionRun(
            (mat.m,), (), (), (float(kl_rate(mat.m, pimat.m, pi.p)),),
            (spectral.spectrum(mat.m, pi.p).slem,), float(np.trace(mat.m)),
            False, math.inf, pi)
    else:
        run = projection.alternating_projections(mat.m, sched,
                                                 max_sweeps=args.sweeps,
                                                 eps=args.eps)
    path = _out_dir(args) / "projection_run.csv"
    run.write_csv(path)
    print(f"steps={run.steps} converged={run.converged} "
          f"final_step={run.final_step:.3e} trace={run.trace:.12g}")
    print(f"wrote {path}")
    return 0


def _bimodal_rows(j: int, betas: list[float]) -> tuple[list[dict], list[dict], dict]:
    xs, h, prop, _ = landscape.bimodal_instance(j)

    def base(beta: float):
        ls = landscape.make_landscape(h, prop, beta)
        kern = landscape.mh_kernel(ls)
        return kern.m, kern.stationary.p

    def projected(beta: float):
        _, _, _, swap = landscape.bimodal_instance(j, beta)
        ls = landscape.make_landscape(h, prop, beta)
        kern = landscape.mh_kernel(ls)
        proj = projection.project(kern.m, swap, kern.stationary.p)
        return proj.m, kern.stationary.p

    rows_base = landscape.arrhenius_table(base, betas)
    rows_proj = landscape.arrhenius_table(projected, betas)

    support = landscape.support_of(prop.m)
    height = landscape.critical_height(support, h).height
    _, _, _, swap = landscape.bimodal_instance(j)
    qnq = chains.conjugate(swap, prop.m)
    mixed_support = landscape.support_of(0.5 * prop.m + 0.5 * qnq)
    height_proj = landscape.critical_height(mixed_support, h).height
    heights = {"J": j, "critical_height": height,
               "critical_height_projected": height_proj}
    return rows_base, rows_proj, heights


def _write_arrhenius_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["beta", "gap", "t_rel", "ln_t_rel"])
        for r in rows:
            w.writerow([r["beta"], f"{r['gap']:.12g}",
                        f"{r['t_rel']:.12g}", f"{r['ln_t_rel']:.12g}"])


def cmd_bimodal(args) -> int:
    betas = [float(b) for b in args.beta_grid.split(",")]
    rows_base, rows_proj, heights = _bimodal_rows(args.J, betas)
    out = _out_dir(args)
    base_path = out / "arrhenius_standard.csv"
    proj_path = out / "arrhenius_projected.csv"
    _write_arrhenius_csv(base_path, rows_base)
    _write_arrhenius_csv(proj_path, rows_proj)
    hpath = out / "critical_height.json"
    hpath.write_text(json.dumps(heights, indent=2) + "\n")
    if len(betas) >= 4:
        slope = float(np.polyfit(betas, [r["ln_t_rel"] for r in rows_base], 1)[0])
        slope_proj = float(np.polyfit(betas, [r["ln_t_rel"] for r in rows_proj], 1)[0])
        print(f"arrhenius slope standard={slope:.4f} projected={slope_proj:.4f}")
    print(json.dumps(heights))
    print(f"wrote {base_path}, {proj_path} and {hpath}")
    return 0


def cmd_dhn(args) -> int:
    n = args.n
    base = chains.birth_death_chain(n)
    pi = base.stationary
    bound = math.log(n) / math.log(2) + DHN_BOUND_CONSTANT * math.sqrt(math.log(n))
    out = _out_dir(args)
    path = out / "dhn.csv"
    within = 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trial", "n", "t_mix", "bound"])
        for trial in range(args.trials):
            q = chains.random_permutation(n, (args.seed, trial))
            proj = projection.project(base.m, q, pi.p)
            t = spectral.mixing_time(proj.m, pi.p, args.eps)
            within += int(t <= bound)
            w.writerow([trial, n, t, f"{bound:.6g}"])
    print(f"n={n} trials={args.trials} within_bound={within}/{args.trials} "
          f"bound={bound:.3f}")
    print(f"wrote {path}")
    return 0


def parse_config_file(path) -> spins.ExperimentConfig:
    """Flat 'key = value' settings for a spin experiment."""
    values: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParseError("expected 'key = value'", line=lineno)
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    known_int = {"d", "steps", "seed", "explore_steps", "adapt_every",
                 "record_stride", "couplings_seed"}
    known_float = {"beta", "beta_e"}
    known_bool = {"fix_ground"}
    kwargs: dict = {}
    for key, val in values.items():
        if key in known_int:
            kwargs[key] = int(val)
        elif key in known_float:
            kwargs[key] = float(val)
        elif key in known_bool:
            kwargs[key] = val.lower() in ("1", "true", "yes")
        elif key in ("model", "sampler"):
            kwargs[key] = val
        else:
            raise ConfigInvalid(f"unknown config key {key!r}")
    for required in ("model", "d", "beta", "steps", "seed", "sampler"):
        if required not in kwargs:
            raise ConfigInvalid(f"missing config key {required!r}")
    return spins.ExperimentConfig(**kwargs)


def cmd_spin(args) -> int:
    config = parse_config_file(args.config)
    out = _out_dir(args)
    samplers = ["standard"]
    if config.sampler != "standard":
        samplers.append(config.sampler)
    results = []
    for sampler in samplers:
        cfg = config if sampler == config.sampler else spins.ExperimentConfig(
            model=config.model, d=config.d, beta=config.beta,
            steps=config.steps, seed=config.seed, sampler="standard",
            beta_e=config.beta_e, explore_steps=config.explore_steps,
            adapt_every=config.adapt_every, record_stride=config.record_stride,
            couplings_seed=config.couplings_seed, fix_ground=config.fix_ground)
        trace = spins.run_experiment(cfg)
        tag = f"{config.model}_{sampler}"
        cpath = out / f"trace_{tag}.csv"
        trace.write_csv(cpath)
        summary = spins.summary_json(cfg, trace)
        jpath = out / f"summary_{tag}.json"
        jpath.write_text(json.dumps(summary, indent=2) + "\n")
        results.append((sampler, summary, cpath, jpath))
    for sampler, summary, cpath, jpath in results:
        print(f"{sampler}: mean={summary['sample_mean']:.4f} "
              f"ci=[{summary['ci_low']:.4f},{summary['ci_high']:.4f}] "
              f"avg_jump={summary['avg_jump_distance']:.6f}")
        print(f"wrote {cpath} and {jpath}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="permchain",
        description="Permutation-projection accelerated Markov chain toolkit")
    parser.add_argument("--out-dir", default=".", help="output directory")
    parser.add_argument("--format", choices=["csv", "json"], default="csv")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="spectral/variance/speed-limit report")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("project", help="run cyclic alternating projections")
    p.add_argument("matrix")
    p.add_argument("permutations", nargs="+",
                   help="permutation files ('x y' per moved state)")
    p.add_argument("--sweeps", type=int, default=10_000)
    p.add_argument("--eps", type=float, default=1e-10)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("bimodal", help="two-mode landscape study")
    p.add_argument("--J", type=int, required=True)
    p.add_argument("--beta-grid", default="1,2,3,4")
    p.set_defaults(func=cmd_bimodal)

    p = sub.add_parser("dhn", help="mixing times of projected uniform walks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_dhn)

    p = sub.add_parser("spin", help="spin-system sampler comparison")
    p.add_argument("config")
    p.set_defaults(func=cmd_spin)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ConfigInvalid) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except PermChainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # pragma: no cover - defensive
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
