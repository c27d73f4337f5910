"""Command-line interface: run | sweep | lattice | oracle.

File outputs
------------
results.csv   one row per completed point, columns:
              g, beta, lx, ly, nn, seed, e_mean, e_err, abs_mH_mean,
              abs_mH_err, abs_mH_sliceavg_mean, abs_psiH_mean, abs_psiH_err,
              n_mean, L_final, max_nh, saturated, valid
samples_<g>_<seed>.csv   thinned slice-averaged order-parameter stream:
              sweep, re_mH, im_mH, re_psiH, im_psiH
bins.csv      per-bin means (g, seed, bin, e, abs_mH, abs_mH_sliceavg,
              abs_psiH, n)

Exit codes: 0 success, 1 configuration or I/O error, 2 run completed but
flagged invalid (operator-string saturation during measurement).
"""
from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys

from .config import RunConfig, parse_config
from .lattice import (
    ConfigurationError,
    build_lattice,
    dump_lattice,
    lattice_svg,
)

RESULT_COLUMNS = [
    "g", "beta", "lx", "ly", "nn", "seed",
    "e_mean", "e_err", "abs_mH_mean", "abs_mH_err", "abs_mH_sliceavg_mean",
    "abs_psiH_mean", "abs_psiH_err", "n_mean", "L_final", "max_nh",
    "saturated", "valid",
]


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _result_row(config: RunConfig, lat, result) -> dict:
    return {
        "g": config.g,
        "beta": config.beta,
        "lx": config.lx,
        "ly": config.ly,
        "nn": lat.nn,
        "seed": config.seed,
        "e_mean": result.means["e"],
        "e_err": result.errors["e"],
        "abs_mH_mean": result.means["abs_mH"],
        "abs_mH_err": result.errors["abs_mH"],
        "abs_mH_sliceavg_mean": result.means["abs_mH_sliceavg"],
        "abs_psiH_mean": result.means["abs_psiH"],
        "abs_psiH_err": result.errors["abs_psiH"],
        "n_mean": result.means["n"],
        "L_final": result.metadata["L_final"],
        "max_nh": result.metadata["max_nh"],
        "saturated": result.metadata["saturated"],
        "valid": result.metadata["valid"],
    }


def _write_results(path: str, rows: list[dict], append: bool = False) -> None:
    new_file = not (append and os.path.exists(path))
    mode = "a" if append else "w"
    with open(path, mode, encoding="utf-8") as fh:
        if new_file:
            fh.write(",".join(RESULT_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) for c in RESULT_COLUMNS) + "\n")


def _write_samples(path: str, samples) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("sweep,re_mH,im_mH,re_psiH,im_psiH\n")
        for row in samples:
            fh.write(f"{int(row[0])},{row[1]:.12g},{row[2]:.12g},{row[3]:.12g},{row[4]:.12g}\n")


def _write_bins(path: str, config: RunConfig, result, append: bool = False) -> None:
    new_file = not (append and os.path.exists(path))
    with open(path, "a" if append else "w", encoding="utf-8") as fh:
        if new_file:
            fh.write("g,seed,bin,e,abs_mH,abs_mH_sliceavg,abs_psiH,n\n")
        nb = len(result.bins["e"])
        for b in range(nb):
            vals = [config.g, config.seed, b]
            vals += [result.bins[k][b] for k in ("e", "abs_mH", "abs_mH_sliceavg", "abs_psiH", "n")]
            fh.write(",".join(_fmt(v) for v in vals) + "\n")


def _samples_name(config: RunConfig) -> str:
    return f"samples_{config.g:g}_{config.seed}.csv"


def _execute_point(config: RunConfig):
    from .engine import run_simulation

    lat = build_lattice(config.lx, config.ly, config.pattern)
    result = run_simulation(config, graph=lat)
    os.makedirs(config.out_dir, exist_ok=True)
    _write_samples(os.path.join(config.out_dir, _samples_name(config)), result.samples)
    return _result_row(config, lat, result), result


def cmd_run(config: RunConfig) -> int:
    row, result = _execute_point(config)
    _write_results(os.path.join(config.out_dir, "results.csv"), [row], append=True)
    _write_bins(os.path.join(config.out_dir, "bins.csv"), config, result, append=True)
    print(
        f"g={config.g:g} beta={config.beta:g} L_final={row['L_final']} "
        f"e={row['e_mean']:.6f}({row['e_err']:.6f}) "
        f"|m_H|={row['abs_mH_mean']:.4f} |psi_H|={row['abs_psiH_mean']:.4f} "
        f"valid={row['valid']}"
    )
    if result.metadata.get("diagnostic"):
        print("warning:", result.metadata["diagnostic"], file=sys.stderr)
    return 0 if row["valid"] else 2


def _sweep_worker(args):
    config_dict, g, stream = args
    config = RunConfig(**config_dict).with_point(g, stream)
    row, result = _execute_point(config)
    _write_bins(os.path.join(config.out_dir, f"bins_{config.g:g}_{config.seed}.csv"),
                config, result, append=False)
    return row


def cmd_sweep(config: RunConfig, g_list: list[float], parallel: int = 1) -> int:
    if not g_list:
        print("error: sweep needs a non-empty --g-list", file=sys.stderr)
        return 1
    tasks = [(config.as_dict(), g, k) for k, g in enumerate(g_list)]
    rows, failures = [], []
    if parallel > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=parallel) as pool:
            futs = {pool.submit(_sweep_worker, t): t[1] for t in tasks}
            for fut in concurrent.futures.as_completed(futs):
                try:
                    rows.append(fut.result())
                except Exception as exc:  # noqa: BLE001 - report and continue
                    failures.append((futs[fut], str(exc)))
    else:
        for t in tasks:
            try:
                rows.append(_sweep_worker(t))
            except Exception as exc:  # noqa: BLE001
                failures.append((t[1], str(exc)))
    rows.sort(key=lambda r: r["g"])
    os.makedirs(config.out_dir, exist_ok=True)
    _write_results(os.path.join(config.out_dir, "results.csv"), rows)
    for row in rows:
        print(f"g={row['g']:g} e={row['e_mean']:.6f}({row['e_err']:.6f}) "
              f"|m_H|={row['abs_mH_mean']:.4f} |psi_H|={row['abs_psiH_mean']:.4f}")
    if failures:
        for g, msg in failures:
            print(f"error: point g={g:g} failed: {msg}", file=sys.stderr)
        return 1
    return 2 if any(not r["valid"] for r in rows) else 0


def cmd_lattice(args) -> int:
    lat = build_lattice(args.lx, args.ly, args.pattern)
    doc = dump_lattice(lat)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(doc)
    else:
        print(doc)
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(lattice_svg(lat))
    return 0


def cmd_oracle(args) -> int:
    from . import oracle

    try:
        if args.oracle_kind == "ed":
            with open(args.graph, encoding="utf-8") as fh:
                graph = oracle.SpinGraph.from_json(fh.read())
            if args.g is not None:
                graph.g = args.g
            res = oracle.exact_thermal(graph, args.beta, order_params=graph.has_units)
            doc = {"kind": "ed", "n": graph.n, "g": graph.g, "beta": args.beta,
                   "energy_density": res.energy_density, **res.obs}
        elif args.oracle_kind == "classical":
            with open(args.graph, encoding="utf-8") as fh:
                graph = oracle.SpinGraph.from_json(fh.read())
            res = oracle.classical_enumerate(graph, args.beta)
            doc = {"kind": "classical", "n": graph.n, "beta": args.beta,
                   "energy_density": res.energy_density,
                   "abs_mH": res.abs_mH, "abs_psiH": res.abs_psiH,
                   "ground": json.loads(res.report.to_json())}
        else:
            lat = build_lattice(args.lx, args.ly, args.pattern)
            rep = oracle.ground_states_dp(lat, cap=args.cap)
            doc = {"kind": "ground", "lx": args.lx, "ly": args.ly,
                   **json.loads(rep.to_json())}
    except oracle.CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = json.dumps(doc, indent=1)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text)
    return 0


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--lx", type=int)
    p.add_argument("--ly", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--isteps", type=int)
    p.add_argument("--nbins", type=int)
    p.add_argument("--mstep", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--thin", type=int)
    p.add_argument("--init")
    p.add_argument("--pattern", choices=["default", "ferro"])
    p.add_argument("--msnorm", choices=["per_sublattice", "literal"])
    p.add_argument("--out", dest="out_dir", help="output directory")


def _config_from_args(args) -> RunConfig:
    overrides = {
        k: getattr(args, k)
        for k in ("lx", "ly", "beta", "g", "isteps", "nbins", "mstep", "seed",
                  "thin", "init", "pattern", "msnorm", "out_dir")
    }
    text = ""
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    return parse_config(text, overrides)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hexsse", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single Monte Carlo chain at one field value")
    _add_config_flags(p_run)

    p_sweep = sub.add_parser("sweep", help="one chain per field value")
    _add_config_flags(p_sweep)
    p_sweep.add_argument("--g-list", required=True,
                         help="comma-separated transverse-field values")
    p_sweep.add_argument("--parallel", type=int, default=1)

    p_lat = sub.add_parser("lattice", help="build and dump the lattice")
    p_lat.add_argument("--lx", type=int, required=True)
    p_lat.add_argument("--ly", type=int, required=True)
    p_lat.add_argument("--pattern", choices=["default", "ferro"], default="default")
    p_lat.add_argument("--out", help="write JSON here instead of stdout")
    p_lat.add_argument("--svg", help="also write a convention diagram")

    p_or = sub.add_parser("oracle", help="exact reference calculations")
    orsub = p_or.add_subparsers(dest="oracle_kind", required=True)
    p_ed = orsub.add_parser("ed", help="dense thermal diagonalization (n <= 12)")
    p_ed.add_argument("--graph", required=True, help="JSON graph {n, g, bonds}")
    p_ed.add_argument("--beta", type=float, required=True)
    p_ed.add_argument("--g", type=float, help="override the graph's field")
    p_ed.add_argument("--out")
    p_cl = orsub.add_parser("classical", help="exhaustive g=0 enumeration (n <= 24)")
    p_cl.add_argument("--graph", required=True)
    p_cl.add_argument("--beta", type=float, required=True)
    p_cl.add_argument("--out")
    p_gr = orsub.add_parser("ground", help="honeycomb ground states by transfer DP")
    p_gr.add_argument("--lx", type=int, required=True)
    p_gr.add_argument("--ly", type=int, required=True)
    p_gr.add_argument("--pattern", choices=["default", "ferro"], default="default")
    p_gr.add_argument("--cap", type=int, default=4096)
    p_gr.add_argument("--out")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(_config_from_args(args))
        if args.command == "sweep":
            g_list = [float(x) for x in args.g_list.split(",") if x.strip()]
            return cmd_sweep(_config_from_args(args), g_list, parallel=args.parallel)
        if args.command == "lattice":
            return cmd_lattice(args)
        return cmd_oracle(args)
    except (ConfigurationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
