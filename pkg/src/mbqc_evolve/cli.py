"""Command-line front end.

Every subcommand accepts ``--config FILE``: an INI file whose section named
after the subcommand (``[spectrum]``, ``[pattern.count]``, ...) supplies
defaults, with ``[common]`` shared by all. Flags given on the command line
win. Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 failed
verification.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .executor import (
    EnumerateAll,
    ErrorSpec,
    Forced,
    Sample,
    check_dependencies,
    DependencyMismatch,
    enumerate_branches,
    execute,
)
from .graph import (
    AXES,
    GENERATORS,
    POLICIES,
    compactified_state,
    compactify_sequence,
    cluster_state,
    generator_matrix,
    pauli_projector,
    projected_state,
    propagate_projector,
)
from .oracle import (
    HubbardParams,
    KitaevParams,
    hamiltonian,
    rotation,
    step_unitary,
)
from .pattern import (
    MeasurementPattern,
    PatternError,
    Site,
    compactify_pattern,
    count_resources,
    euler_leg,
    hubbard_pattern,
    kitaev_pattern,
    runtime_comparison,
    rzz_pattern,
    rzzz_pattern,
)
from .spectral import (
    CRITERIA,
    SpectralConfig,
    config_hash,
    error_experiment,
    exact_series,
    fmt,
    min_trotter_table,
    precision_report,
    trotter_series,
    write_energies,
    write_metadata,
    write_overlaps,
    write_peaks,
    write_precision,
    write_spectrum,
)
from .statevec import ImpossibleBranch, Statevector, fidelity

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3
OUT_ENV = "MBQC_EVOLVE_OUT"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


# ----------------------------------------------------------------------
# helpers


def _out_dir(args) -> Path:
    d = Path(args.out or os.environ.get(OUT_ENV, "."))
    d.mkdir(parents=True, exist_ok=True)
    return d


def _config(args) -> dict:
    skip = {"func", "config", "out", "plot", "jobs"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(obj: dict) -> None:
    print(json.dumps(obj, sort_keys=True, default=str))


def _model_params(model: str, N: int, g: float):
    if model == "kitaev":
        return KitaevParams(N, g)
    if model == "hubbard":
        return HubbardParams(N, g)
    raise UsageError(f"unknown model {model!r}")


def target_unitary(p: MeasurementPattern) -> np.ndarray:
    """Dense logical unitary a built pattern is meant to implement."""
    kind = p.name.split()[0]
    pr = p.params
    if kind == "rzz":
        return rotation("zz", (1, 2), p.phi_m, 2)
    if kind == "rzzz":
        return rotation("zzz", (1, 2, 3), p.phi_m, 3)
    if kind == "euler":
        return rotation("x", (1,), pr["gamma"], 1) @ rotation("z", (1,), pr["beta"], 1) @ rotation("x", (1,), pr["alpha"], 1)
    if kind in ("kitaev", "hubbard"):
        N, M = int(pr["N"]), int(pr["M"])
        params = KitaevParams(N, pr["g_mu"]) if kind == "kitaev" else HubbardParams(N, pr["g_U"])
        return np.linalg.matrix_power(step_unitary(params, p.phi_m, "block"), M)
    raise PatternError(f"no target unitary known for pattern {p.name!r}")


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)


def _parse_force(text: str) -> dict[Site, int]:
    out = {}
    for item in text.split(";"):
        item = item.strip()
        if not item:
            continue
        tok, _, val = item.partition("=")
        if val not in ("0", "1"):
            raise UsageError(f"bad forced outcome {item!r}; use block,row,col=0|1")
        out[Site.parse(tok)] = int(val)
    return out


def _read_pattern(path: str) -> MeasurementPattern:
    return MeasurementPattern.from_text(Path(path).read_text())


def _build_pattern(args) -> MeasurementPattern:
    if args.model == "rzz":
        return rzz_pattern(args.theta)
    if args.model == "rzzz":
        return rzzz_pattern(args.theta)
    if args.model == "euler":
        return euler_leg(args.alpha, args.beta, args.gamma)
    if args.model == "kitaev":
        return kitaev_pattern(args.N, args.M, args.g, args.phi_m)
    return hubbard_pattern(args.N, args.M, args.g, args.phi_m)


# ----------------------------------------------------------------------
# verification suites


def _branch_fidelities(p: MeasurementPattern, psi: np.ndarray, mode) -> list[float]:
    tgt = target_unitary(p) @ psi
    res = execute(p, psi, mode)
    res = list(res) if isinstance(mode, EnumerateAll) else [res]
    return [r.fidelity_to(tgt) for r in res]


def suite_rzz_exhaustive(thetas=(0.0, np.pi / 7, np.pi / 2, 1.234, -2.5), inputs: int = 20, seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)
    fids, branches = [], 0
    for th in thetas:
        p = rzz_pattern(th)
        for _ in range(inputs):
            f = _branch_fidelities(p, random_state(2, rng), EnumerateAll())
            branches += len(f)
            fids += f
    worst = min(fids)
    return {"suite": "rzz-exhaustive", "branches": branches, "min_fidelity": worst, "passed": worst >= 1 - 1e-10}


def suite_rzzz_sampled(samples: int = 200, seed: int = 0, theta: float = 0.731) -> dict:
    rng = np.random.default_rng(seed)
    p = rzzz_pattern(theta)
    tgt_u = target_unitary(p)
    fids, peak = [], 0
    for k in range(samples):
        psi = random_state(3, rng)
        r = execute(p, psi, Sample(seed * 100003 + k))
        fids.append(r.fidelity_to(tgt_u @ psi))
        peak = max(peak, r.peak_live)
    worst = min(fids)
    return {
        "suite": "rzzz-sampled",
        "branches": samples,
        "min_fidelity": worst,
        "peak_live": peak,
        "passed": worst >= 1 - 1e-9 and peak <= 12,
    }


def _model_suite(name: str, cases, samples: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    report, ok = [], True
    for build in cases:
        p = build()
        check_dependencies(p)
        u = target_unitary(p)
        fids = []
        for k in range(samples):
            psi = random_state(p.num_logical, rng)
            fids.append(execute(p, psi, Sample(seed * 1000003 + k)).fidelity_to(u @ psi))
        worst = min(fids)
        ok &= worst >= 1 - 1e-9
        report.append({"pattern": p.name, "branches": samples, "min_fidelity": worst})
    return {"suite": name, "cases": report, "min_fidelity": min(c["min_fidelity"] for c in report), "passed": ok}


def suite_kitaev(samples: int = 100, seed: int = 0) -> dict:
    cases = [lambda N=N, M=M: kitaev_pattern(N, M, 0.4, 0.05) for N in (2, 3) for M in (1, 2)]
    return _model_suite("kitaev", cases, samples, seed)


def suite_hubbard(samples: int = 100, seed: int = 0) -> dict:
    return _model_suite("hubbard", [lambda: hubbard_pattern(2, 1, 0.4, 0.05)], samples, seed)


def suite_compactify(theta: float = np.pi / 7) -> dict:
    """Graph-state identity for all Pauli-x branches of the rzz lattice, under two policies."""
    p = rzz_pattern(theta)
    g = p.graph
    removed = [n.site for n in p.nodes if n.role == "body" and n.angle is None]
    state = cluster_state(g)
    worst, agree = 1.0, 1.0
    for bits in range(2 ** len(removed)):
        ms = [1 - 2 * ((bits >> i) & 1) for i in range(len(removed))]
        ref = projected_state(state, removed, ["x"] * len(removed), ms)
        outs = []
        for pol in ("smallest", "largest"):
            res = compactify_sequence(g, removed, ["x"] * len(removed), ms, POLICIES[pol])
            st = compactified_state(res, ref.labels)
            outs.append(st)
            worst = min(worst, fidelity(ref, st))
        agree = min(agree, fidelity(outs[0], outs[1]))
    c = compactify_pattern(p)
    sizes = {"qubits": len(c.nodes), "measurements": len(c.measured)}
    passed = worst >= 1 - 1e-10 and agree >= 1 - 1e-10 and sizes == {"qubits": 5, "measurements": 3}
    return {
        "suite": "compactify",
        "branches": 2 ** len(removed),
        "min_fidelity": worst,
        "policy_agreement": agree,
        **sizes,
        "passed": passed,
    }


def suite_propagation_rules() -> dict:
    """``P_{a,m} U = U P_{a',m'}`` as matrices for every generator, axis and outcome."""
    checked, worst = 0, 0.0
    for gen in GENERATORS:
        u = generator_matrix(gen)
        for a in AXES:
            for m in (1, -1):
                b, m2, _ = propagate_projector(a, m, gen)
                err = np.abs(pauli_projector(a, m) @ u - u @ pauli_projector(b, m2)).max()
                worst = max(worst, float(err))
                checked += 1
    return {"suite": "propagation-rules", "identities": checked, "max_error": worst, "passed": worst < 1e-12}


SUITES = {
    "rzz-exhaustive": suite_rzz_exhaustive,
    "rzzz-sampled": suite_rzzz_sampled,
    "kitaev": suite_kitaev,
    "hubbard": suite_hubbard,
    "compactify": suite_compactify,
    "propagation-rules": suite_propagation_rules,
}


# ----------------------------------------------------------------------
# subcommands


def cmd_pattern(args) -> int:
    out = _out_dir(args)
    if args.action == "build":
        p = _build_pattern(args)
        path = Path(args.output) if args.output else out / f"{p.name.split()[0]}.pattern"
        path.write_text(p.to_text())
        _emit({"pattern": p.name, "file": str(path), "qubits": len(p.nodes), "measured": len(p.measured)})
        return EXIT_OK
    if args.action == "compactify":
        return cmd_compactify(args)
    table = {
        rep: count_resources(args.model, rep, args.N, args.M, args.mode) for rep in ("slcs", "ccs", "circuit")
    }
    print("representation,count")
    for rep, n in table.items():
        print(f"{rep},{n}")
    print(f"# {args.model} N={args.N} M={args.M} mode={args.mode}: {table['slcs']} / {table['ccs']} / {table['circuit']}")
    return EXIT_OK


def cmd_compactify(args) -> int:
    if not args.input:
        raise UsageError("compactify needs an input pattern file")
    p = _read_pattern(args.input)
    c = compactify_pattern(p)
    path = Path(args.output) if args.output else _out_dir(args) / (Path(args.input).stem + ".ccs.pattern")
    path.write_text(c.to_text())
    _emit({"pattern": c.name, "file": str(path), "qubits": len(c.nodes), "measured": len(c.measured)})
    return EXIT_OK


def cmd_execute(args) -> int:
    p = _read_pattern(args.pattern)
    n = p.num_logical
    if args.input:
        psi = Statevector.from_dump(Path(args.input).read_text(), range(n)).amps
    else:
        psi = random_state(n, np.random.default_rng(args.seed))
    if sum(bool(x) for x in (args.force, args.enumerate)) > 1:
        raise UsageError("--force and --enumerate are exclusive")
    if args.enumerate:
        results = list(enumerate_branches(p, psi))
    elif args.force:
        results = [execute(p, psi, Forced(_parse_force(args.force)))]
    else:
        results = [execute(p, psi, Sample(args.seed))]
    try:
        tgt = target_unitary(p) @ psi
    except PatternError:
        tgt = None
    fids = [r.fidelity_to(tgt) for r in results] if tgt is not None else []
    summary = {
        "pattern": p.name,
        "branches": len(results),
        "total_probability": fmt(sum(r.probability for r in results)),
        "peak_live": max(r.peak_live for r in results),
        "config_hash": config_hash(_config(args)),
    }
    if fids:
        summary["min_fidelity"] = fmt(min(fids))
    if args.dump:
        Path(args.dump).write_text(results[0].output.dump())
        summary["dump"] = args.dump
    _emit(summary)
    return EXIT_OK


def cmd_verify(args) -> int:
    kwargs = {}
    if args.suite in ("rzzz-sampled", "kitaev", "hubbard") and args.samples is not None:
        kwargs["samples"] = args.samples
    if args.suite == "rzz-exhaustive" and args.inputs is not None:
        kwargs["inputs"] = args.inputs
    if args.suite not in ("compactify", "propagation-rules"):
        kwargs["seed"] = args.seed
    try:
        report = SUITES[args.suite](**kwargs)
    except DependencyMismatch as exc:
        report = {"suite": args.suite, "passed": False, "error": str(exc)}
    _emit(report)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def _spectral_cfg(args) -> SpectralConfig:
    return SpectralConfig(args.L, args.domega, args.eta, args.delta_f, args.delta_t)


def _parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}; use low:high") from exc
    return lo, hi


def cmd_spectrum(args) -> int:
    params = _model_params(args.model, args.N, args.g)
    cfg = _spectral_cfg(args)
    conf = _config(args)
    h = config_hash(conf)
    out = _out_dir(args)
    stem = f"spectrum_{args.model}_{h}"
    extra = {}
    if args.error:
        lo, hi = _parse_range(args.ranges)
        roles = ("phi",) if args.error == "symmetric" else ("phi", "psi3")
        spec = ErrorSpec(
            {f"{r}_{q}": ("uniform", lo, hi) for q in range(1, args.N + 1) for r in roles},
            symmetric_matched=args.error == "symmetric",
            relative=True,
        )
        exp = error_experiment(params, cfg, spec, seed=args.seed, M=args.M)
        series = exp.clean
        write_spectrum(out / f"{stem}_perturbed.csv", exp.perturbed.spectrum, cfg, h)
        write_peaks(out / f"{stem}_perturbed_peaks.csv", exp.perturbed.peaks, h)
        extra = {"errors": exp.errors, "max_peak_shift": exp.max_shift(), "new_peaks": len(exp.new_peaks)}
        print(f"error={args.error} max_peak_shift={fmt(exp.max_shift())} new_peaks={len(exp.new_peaks)}")
    elif args.evolver == "trotter":
        series = trotter_series(params, cfg, args.M)
    else:
        series = exact_series(params, cfg)
    write_overlaps(out / f"{stem}_overlaps.csv", series.overlaps, cfg, h)
    write_spectrum(out / f"{stem}.csv", series.spectrum, cfg, h)
    write_peaks(out / f"{stem}_peaks.csv", series.peaks, h)
    energies = np.linalg.eigvalsh(hamiltonian(params))
    if args.eigenvalues:
        write_energies(out / f"{stem}_energies.csv", energies, h)
    write_metadata(
        out / f"{stem}.json",
        conf,
        {"sum_rule_deviation": series.sum_rule_deviation, "peaks": [p.omega for p in series.peaks], **extra},
    )
    if args.plot:
        _plot_spectrum(out / f"{stem}.png", series, energies)
    worst = max((float(np.min(np.abs(energies - p.omega))) for p in series.peaks), default=0.0)
    print(f"peaks={len(series.peaks)} sum_rule_deviation={fmt(series.sum_rule_deviation)} max_peak_to_eigenvalue={fmt(worst)} config_hash={h}")
    for p in series.peaks:
        print(f"  omega={fmt(p.omega)} weight={fmt(p.weight)}")
    return EXIT_OK


def _min_m_job(job):
    model, N, g, cfg, m_max, criterion = job
    try:
        return min_trotter_table(_model_params(model, N, g), cfg, m_max=m_max, criterion=criterion)
    except RuntimeError as exc:
        return str(exc)


def cmd_precision(args) -> int:
    cfg = _spectral_cfg(args)
    conf = _config(args)
    h = config_hash(conf)
    out = _out_dir(args)
    failures = 0
    jobs = [(args.model, args.N, g, cfg, args.m_max, args.criterion) for g in args.g]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            tables = list(pool.map(_min_m_job, jobs))
    else:
        tables = [_min_m_job(j) for j in jobs]
    for g, Ms in zip(args.g, tables):
        if isinstance(Ms, str):
            print(f"g={g}: {Ms}", file=sys.stderr)
            failures += 1
            continue
        rep = precision_report(Ms, cfg, g)
        write_precision(out / f"precision_{args.model}_g{g}_{h}.csv", rep, h)
        print(f"g={g!r} max_M={max(Ms)} max_chi={fmt(rep.max_chi)} min_g_chi={fmt(rep.min_g_chi)}")
        if args.plot:
            _plot_precision(out / f"precision_{args.model}_g{g}_{h}.png", rep)
    write_metadata(out / f"precision_{args.model}_{h}.json", conf, {"criterion_id": CRITERIA[args.criterion]})
    return EXIT_NUMERIC if failures else EXIT_OK


def cmd_resources(args) -> int:
    rows = []
    for model in args.model:
        for rep in ("slcs", "ccs", "circuit"):
            rows.append((model, rep, count_resources(model, rep, args.N, args.M, args.mode)))
    print("model,representation,count")
    for r in rows:
        print(",".join(str(x) for x in r))
    if args.dt_ratio is not None:
        for model in args.model:
            n_m = count_resources(model, "ccs", args.N, args.M, args.mode)
            n_g = count_resources(model, "circuit", args.N, args.M, args.mode)
            c = runtime_comparison(n_m, n_g, args.dt_ratio)
            print(f"# {model}: regime={c.regime} T_M={fmt(c.t_mbqc)} T_C={fmt(c.t_cbqc)}")
    return EXIT_OK


def _plot_spectrum(path: Path, series, energies) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(series.omegas, series.spectrum, lw=1)
    for e in energies:
        ax.axvline(e, color="0.8", lw=0.5, zorder=0)
    ax.set_xlabel("omega / w")
    ax.set_ylabel("A(omega)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _plot_precision(path: Path, rep) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (a1, a2) = plt.subplots(1, 2, figsize=(8, 3))
    a1.plot(rep.n, rep.M, ".")
    a1.set_xlabel("n")
    a1.set_ylabel("M_n")
    a2.plot(rep.n, rep.chi, ".")
    a2.set_xlabel("n")
    a2.set_ylabel("chi_n")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


# ----------------------------------------------------------------------
# parser


def _spectral_flags(sp) -> None:
    sp.add_argument("--L", type=int, default=1272)
    sp.add_argument("--domega", type=float, default=0.01)
    sp.add_argument("--eta", type=float, default=0.02)
    sp.add_argument("--delta-f", dest="delta_f", type=float, default=1e-2)
    sp.add_argument("--delta-t", dest="delta_t", type=float, default=1e-2)


def _common(sp) -> None:
    sp.add_argument("--config", help="INI file with defaults; flags override it")
    sp.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or .)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mbqc-evolve", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("pattern", help="build, compactify or count patterns")
    _common(sp)
    sp.add_argument("action", choices=("build", "compactify", "count"))
    sp.add_argument("input", nargs="?", help="pattern file (compactify)")
    sp.add_argument("--model", choices=("rzz", "rzzz", "euler", "kitaev", "hubbard"), default="kitaev")
    for m in ("rzz", "rzzz", "euler", "kitaev", "hubbard"):
        sp.add_argument(f"--{m}", dest="model", action="store_const", const=m, help=argparse.SUPPRESS)
    sp.add_argument("--N", type=int, default=2)
    sp.add_argument("--M", type=int, default=1)
    sp.add_argument("--g", type=float, default=0.4)
    sp.add_argument("--phi-m", dest="phi_m", type=float, default=0.05)
    sp.add_argument("--theta", type=float, default=0.0)
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--beta", type=float, default=0.0)
    sp.add_argument("--gamma", type=float, default=0.0)
    sp.add_argument("--mode", choices=("formula", "census"), default="formula")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_pattern)

    sp = sub.add_parser("compactify", help="remove Pauli-x qubits from a pattern file")
    _common(sp)
    sp.add_argument("input")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_compactify)

    sp = sub.add_parser("execute", help="run a pattern file on an input state")
    _common(sp)
    sp.add_argument("pattern")
    sp.add_argument("--input", help="state dump over the logical inputs (default: seeded random state)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--force", help="outcomes as 'block,row,col=0|1;...'")
    sp.add_argument("--enumerate", action="store_true")
    sp.add_argument("--dump", help="write the corrected output of the first branch here")
    sp.set_defaults(func=cmd_execute)

    sp = sub.add_parser("verify", help="run an equivalence suite")
    _common(sp)
    sp.add_argument("suite", choices=sorted(SUITES))
    sp.add_argument("--samples", type=int)
    sp.add_argument("--inputs", type=int, help="random inputs per angle (rzz-exhaustive)")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("spectrum", help="overlap series, spectral function and peaks")
    _common(sp)
    sp.add_argument("--model", choices=("kitaev", "hubbard"), default="kitaev")
    sp.add_argument("--N", type=int, default=4)
    sp.add_argument("--g", "--gmu", "--gu", dest="g", type=float, default=0.4)
    _spectral_flags(sp)
    sp.add_argument("--evolver", choices=("exact", "trotter"), default="exact")
    sp.add_argument("--M", type=int, default=8500)
    sp.add_argument("--error", choices=("symmetric", "independent"))
    sp.add_argument("--ranges", default="0.45:0.56")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--eigenvalues", action="store_true", help="also write the ED eigenvalue list")
    sp.add_argument("--plot", action="store_true", help="render a PNG next to the CSVs (needs matplotlib)")
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("precision", help="minimum Trotter steps and measurement-angle precision")
    _common(sp)
    sp.add_argument("--model", choices=("kitaev", "hubbard"), default="kitaev")
    sp.add_argument("--N", type=int, default=4)
    sp.add_argument("--g", "--gmu", "--gu", dest="g", type=float, nargs="+", default=[0.4])
    _spectral_flags(sp)
    sp.set_defaults(L=46)
    sp.add_argument("--criterion", choices=sorted(CRITERIA), default="overlap")
    sp.add_argument("--m-max", dest="m_max", type=int, default=2**20)
    sp.add_argument("--jobs", type=int, default=1, help="worker processes over g values")
    sp.add_argument("--plot", action="store_true")
    sp.set_defaults(func=cmd_precision)

    sp = sub.add_parser("resources", help="SLCS / CCS / circuit counts and runtime regime")
    _common(sp)
    sp.add_argument("--model", choices=("kitaev", "hubbard"), nargs="+", default=["kitaev", "hubbard"])
    sp.add_argument("--N", type=int, default=2)
    sp.add_argument("--M", type=int, default=1)
    sp.add_argument("--mode", choices=("formula", "census"), default="formula")
    sp.add_argument("--dt-ratio", dest="dt_ratio", type=float, help="gate time over measurement time")
    sp.set_defaults(func=cmd_resources)
    return ap


def _subparser(ap: argparse.ArgumentParser, name: str) -> argparse.ArgumentParser:
    for action in ap._subparsers._group_actions:
        if name in action.choices:
            return action.choices[name]
    raise KeyError(name)


def _apply_config(ap, argv: list[str]) -> None:
    """Load ``--config`` sections as parser defaults before the real parse."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    cp = configparser.ConfigParser()
    cp.optionxform = str
    if not cp.read(known.config):
        raise UsageError(f"cannot read config file {known.config!r}")
    cmd = next((a for a in argv if not a.startswith("-") and a in _subparser_names(ap)), None)
    if cmd is None:
        return
    sp = _subparser(ap, cmd)
    sections = ["common", cmd]
    action = next((a for a in argv[argv.index(cmd) + 1 :] if not a.startswith("-")), None)
    if action:
        sections.append(f"{cmd}.{action}")
    dests = {a.dest: a for a in sp._actions}
    values = {}
    for sec in sections:
        if cp.has_section(sec):
            for k, v in cp.items(sec):
                key = k.replace("-", "_")
                if key not in dests:
                    raise UsageError(f"unknown config key {k!r} in [{sec}]")
                act = dests[key]
                if act.nargs in ("+", "*"):
                    conv = act.type or str
                    values[key] = [conv(x) for x in v.split()]
                elif isinstance(act, argparse._StoreTrueAction):
                    values[key] = cp.getboolean(sec, k)
                else:
                    values[key] = act.type(v) if act.type else v
    sp.set_defaults(**values)


def _subparser_names(ap) -> set[str]:
    return set(ap._subparsers._group_actions[0].choices)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        _apply_config(ap, argv)
        try:
            args = ap.parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
        return args.func(args)
    except (UsageError, PatternError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (RuntimeError, ImpossibleBranch, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
