"""Command-line surface: validate, besov, evolve, counterexample, reproduce, riemann.

Exit codes: 0 success, 1 property failure, 2 configuration error,
3 numerical blow-up.  Options may come from flags or from an INI-style
config file (flags win).  BESOVLAB_THREADS caps experiment parallelism.
"""

from __future__ import annotations

import configparser
import csv
import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import counterexamples as cx
from . import experiments as xp
from .equations import (
    BlowUpError,
    EquationVariant,
    EvolutionConfig,
    NonlocalKit,
    evolve,
    self_convergence_ratio,
    v_from_u,
)
from .grid import Grid, GridError, SpectralField, lp_norm, make_grid
from .littlewood_paley import BesovIndex, DyadicPartition, besov_norm, \
    block_energies
from .validate import run_suites

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_CONFIG = 2
EXIT_BLOWUP = 3


class ConfigError(ValueError):
    pass


def _parse_length(text) -> float:
    """Domain half-length: either a float or 'Kpi' shorthand (e.g. '24pi')."""
    if isinstance(text, (int, float)):
        return float(text)
    text = text.strip().lower()
    if text.endswith("pi"):
        return float(text[:-2] or 1) * math.pi
    return float(text)


def _parse_extended(text) -> float:
    if str(text).strip().lower() in ("inf", "infinity"):
        return np.inf
    return float(text)


def _parse_list(text, cast):
    """Comma list with 'a..b' integer range shorthand."""
    out = []
    for piece in str(text).split(","):
        piece = piece.strip()
        if not piece:
            continue
        if ".." in piece:
            lo, hi = piece.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(cast(piece))
    if not out:
        raise ConfigError(f"empty list: {text!r}")
    return out


def _load_config(path) -> dict:
    if path is None:
        return {}
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    flat = {}
    for section in parser.sections():
        for key, val in parser.items(section):
            flat[f"{section}.{key}"] = val
    return flat


def _setting(flags: dict, cfg: dict, flag_key: str, cfg_key: str, default):
    if flags.get(flag_key) is not None:
        return flags[flag_key]
    if cfg_key in cfg:
        return cfg[cfg_key]
    return default


def _build_grid(flags: dict, cfg: dict, default_L: str, default_N: int) -> Grid:
    L = _parse_length(_setting(flags, cfg, "grid_l", "grid.l", default_L))
    N = int(_setting(flags, cfg, "grid_n", "grid.n", default_N))
    try:
        return make_grid(L, N)
    except GridError as exc:
        raise ConfigError(str(exc)) from exc


def _build_index(flags: dict, cfg: dict) -> BesovIndex:
    s = float(_setting(flags, cfg, "s", "index.s", 3.0))
    p = _parse_extended(_setting(flags, cfg, "p", "index.p", 2.0))
    r = _parse_extended(_setting(flags, cfg, "r", "index.r", 2.0))
    try:
        return BesovIndex(s, p, r)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _make_field(spec: str, grid: Grid, idx: BesovIndex) -> SpectralField:
    """Built-in field specs: phi, fn:N, gn:N, const:C, coskx:K."""
    name, _, arg = spec.partition(":")
    phi = None
    if name in ("phi", "fn", "gn"):
        phi = cx.make_phi(grid)
    if name == "phi":
        return phi
    if name == "fn":
        return cx.make_fn(int(arg), idx, grid, phi)
    if name == "gn":
        return cx.make_gn(int(arg), grid, phi)
    if name == "const":
        return SpectralField(grid, values=np.full(grid.size, float(arg)))
    if name == "coskx":
        k = float(arg)
        units = k / grid.lattice_spacing
        if abs(units - round(units)) > 1e-9:
            raise ConfigError(f"frequency {k} is not on the lattice")
        return SpectralField(grid, values=np.cos(k * grid.x))
    raise ConfigError(f"unknown field spec {spec!r}")


_COMMON = [
    click.option("--config", "config_path", type=click.Path(), default=None,
                 help="INI config file; flags override its values."),
    click.option("--grid-L", "grid_l", default=None, help="domain half-length, e.g. 24pi"),
    click.option("--grid-N", "grid_n", type=int, default=None, help="grid size (power of two)"),
    click.option("--s", type=float, default=None),
    click.option("--p", default=None),
    click.option("--r", default=None),
    click.option("--seed", type=int, default=None),
    click.option("--out", "out_dir", type=click.Path(), default=None),
]


def common_options(fn):
    for opt in reversed(_COMMON):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Besov-space laboratory for cubic nonlocal shallow-water equations."""


@main.command("validate")
@common_options
@click.option("--suite", default=None, help="run a single suite or group (e.g. lp)")
@click.option("--inject-broken-phi", is_flag=True, hidden=True,
              help="negative control: corrupt the dyadic partition")
def cmd_validate(config_path, suite, inject_broken_phi, **flags):
    """Run the randomized property suites and print a pass/fail table."""
    try:
        cfg = _load_config(config_path)
        grid = _build_grid(flags, cfg, "12pi", 4096)
        seed = int(_setting(flags, cfg, "seed", "run.seed", 0))
        results = run_suites(grid, seed=seed, only=suite, break_phi=inject_broken_phi)
    except (ConfigError, ValueError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    width = max(len(r.name) for r in results)
    ok = True
    for r in results:
        status = "pass" if r.passed else "FAIL"
        click.echo(f"{r.name:<{width}}  {status}  worst={r.worst:.3e}  {r.detail}")
        ok = ok and r.passed
    sys.exit(EXIT_OK if ok else EXIT_PROPERTY)


@main.command("besov")
@common_options
@click.argument("field_spec")
def cmd_besov(config_path, field_spec, **flags):
    """Print the Besov norm and per-block energy table of a built-in field."""
    try:
        cfg = _load_config(config_path)
        grid = _build_grid(flags, cfg, "24pi", 2**17)
        idx = _build_index(flags, cfg)
        f = _make_field(field_spec, grid, idx)
    except (ConfigError, ValueError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    part = DyadicPartition(grid)
    energies = block_energies(f, idx, part)
    click.echo(f"besov_norm({field_spec}; s={idx.s}, p={idx.p}, r={idx.r}) = "
               f"{besov_norm(f, idx, part):.12g}")
    click.echo("j,block_energy")
    for j, e in zip(range(-1, part.j_max + 1), energies):
        click.echo(f"{j},{e:.17g}")
    out_dir = flags.get("out_dir")
    if out_dir:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        with open(path / "blocks.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["j", "block_energy"])
            for j, e in zip(range(-1, part.j_max + 1), energies):
                w.writerow([j, f"{e:.17g}"])
    sys.exit(EXIT_OK)


@main.command("evolve")
@common_options
@click.argument("field_spec")
@click.option("--variant", type=click.Choice(["forq", "novikov"]), default=None)
@click.option("--form", type=click.Choice(["u", "v"]), default="u")
@click.option("--dt", type=float, default=None)
@click.option("--t-list", default=None)
@click.option("--self-convergence", is_flag=True)
def cmd_evolve(config_path, field_spec, variant, form, dt, t_list, self_convergence,
               **flags):
    """Evolve a built-in field and dump snapshots as CSV + JSON sidecar."""
    try:
        cfg = _load_config(config_path)
        grid = _build_grid(flags, cfg, "12pi", 4096)
        idx = _build_index(flags, cfg)
        f0 = _make_field(field_spec, grid, idx)
        dt = float(_setting({"dt": dt}, cfg, "dt", "evolution.dt", 1e-3))
        times = _parse_list(_setting({"t": t_list}, cfg, "t", "evolution.t_list",
                                     "0.05,0.1"), float)
        variant = _setting({"v": variant}, cfg, "v", "evolution.variant", "forq")
        tag = {"forq": "FORQ", "novikov": "NOVIKOV"}[variant] + ("_V" if form == "v" else "_U")
        ecfg = EvolutionConfig(grid, dt=dt, t_end=max(times), variant=EquationVariant[tag])
        out_dir = Path(flags.get("out_dir") or ".")
        out_dir.mkdir(parents=True, exist_ok=True)
    except (ConfigError, ValueError, KeyError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    try:
        snaps = evolve(f0, ecfg, times)
        conv = self_convergence_ratio(f0, ecfg) if self_convergence else None
    except BlowUpError as exc:
        click.echo(f"blow-up: {exc}", err=True)
        sys.exit(EXIT_BLOWUP)
    except ValueError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    with open(out_dir / "snapshots.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x"] + [f"t={t:g}" for t, _ in snaps])
        cols = [s.values for _, s in snaps]
        for i in range(grid.size):
            w.writerow([f"{grid.x[i]:.17g}"] + [f"{c[i]:.17g}" for c in cols])
    sidecar = {
        "field": field_spec,
        "grid": {"half_length": grid.half_length, "size": grid.size},
        "dt": dt,
        "times": times,
        "variant": ecfg.variant.value,
        "self_convergence": conv,
    }
    with open(out_dir / "snapshots.json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
    click.echo(f"wrote {out_dir / 'snapshots.csv'}")
    sys.exit(EXIT_OK)


@main.command("counterexample")
@common_options
@click.option("--n-list", default=None)
def cmd_counterexample(config_path, n_list, **flags):
    """Dump the data families f_n, g_n, key terms and block-energy tables."""
    try:
        cfg = _load_config(config_path)
        grid = _build_grid(flags, cfg, "24pi", 2**17)
        idx = _build_index(flags, cfg)
        ns = _parse_list(_setting({"n": n_list}, cfg, "n", "experiments.n_list",
                                  "5..10"), int)
        out_dir = Path(flags.get("out_dir") or ".")
        out_dir.mkdir(parents=True, exist_ok=True)
    except (ConfigError, ValueError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    part = DyadicPartition(grid)
    phi = cx.make_phi(grid)
    fields = {"psi": cx.key_term(max(5, ns[0]), idx, grid, phi).psi}
    rows = {}
    for n in ns:
        kt = cx.key_term(n, idx, grid, phi)
        fields[f"fn_{n}"] = cx.make_fn(n, idx, grid, phi)
        fields[f"gn_{n}"] = cx.make_gn(n, grid, phi)
        fields[f"tn_{n}"] = kt.term
        rows[n] = block_energies(kt.term, idx.shifted(-1.0), part)
    with open(out_dir / "fields.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        names = sorted(fields)
        w.writerow(["x"] + names)
        cols = [fields[k].values for k in names]
        stride = max(1, grid.size // 8192)  # decimate for file size
        for i in range(0, grid.size, stride):
            w.writerow([f"{grid.x[i]:.17g}"] + [f"{c[i]:.17g}" for c in cols])
    with open(out_dir / "blocks.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["j"] + [f"tn_{n}" for n in ns])
        for row_i, j in enumerate(range(-1, part.j_max + 1)):
            w.writerow([j] + [f"{rows[n][row_i]:.17g}" for n in ns])
    click.echo(f"wrote {out_dir / 'fields.csv'} and {out_dir / 'blocks.csv'}")
    sys.exit(EXIT_OK)


@main.command("riemann")
@common_options
@click.option("--n-max", type=int, default=10, help="largest carrier octave")
def cmd_riemann(config_path, n_max, **flags):
    """Print the oscillatory-averaging convergence sequence for psi."""
    try:
        cfg = _load_config(config_path)
        grid = _build_grid(flags, cfg, "24pi", 2**17)
        idx = _build_index(flags, cfg)
        p = idx.p
        if p == np.inf:
            raise ConfigError("riemann requires finite p")
    except (ConfigError, ValueError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    phi = cx.make_phi(grid)
    psi = cx.key_term(5, idx, grid, phi).psi
    lambdas = [cx.CARRIER_RATIO * 2.0**n for n in range(5, n_max + 1)]
    report = cx.riemann_limit(p, lambdas, psi)
    click.echo(f"target = {report.target:.12g} (avg factor {report.average_factor:.6f})")
    click.echo("lambda,value,rel_error")
    for lam, val, err in zip(report.lambdas, report.values, report.relative_errors):
        click.echo(f"{lam:.6g},{val:.12g},{err:.3e}")
    sys.exit(EXIT_OK)


@main.command("reproduce")
@common_options
@click.option("--n-list", default=None)
@click.option("--t-list", default=None)
@click.option("--dt", type=float, default=None)
@click.option("--t-max", type=float, default=None)
@click.option("--variant", type=click.Choice(["forq", "novikov"]), default=None)
def cmd_reproduce(config_path, n_list, t_list, dt, t_max, variant, **flags):
    """Full reproduction run: nonuniform sweep, drift fits, block table."""
    try:
        cfg = _load_config(config_path)
        idx = _build_index(flags, cfg)
        ns = _parse_list(_setting({"n": n_list}, cfg, "n", "experiments.n_list",
                                  "5..10"), int)
        ts = _parse_list(_setting({"t": t_list}, cfg, "t", "experiments.t_list",
                                  "0.005,0.01,0.02"), float)
        dt = float(_setting({"dt": dt}, cfg, "dt", "experiments.dt", 1e-3))
        variant = _setting({"v": variant}, cfg, "v", "experiments.variant", "forq")
        t_max = _setting({"tm": t_max}, cfg, "tm", "experiments.t_max", max(ts))
        if float(t_max) <= 0:
            raise ConfigError("t_max must be positive")
        if min(ts) <= 0 or any(t > float(t_max) for t in ts):
            raise ConfigError("t values must lie in (0, t_max]")
        seed = int(_setting(flags, cfg, "seed", "run.seed", 0))
        grid = _build_grid(flags, cfg, "24pi", 2**18)
        out_dir = Path(flags.get("out_dir") or "reproduction")
        out_dir.mkdir(parents=True, exist_ok=True)
        vtag = EquationVariant.FORQ_V if variant == "forq" else EquationVariant.NOVIKOV_V
        ecfg = EvolutionConfig(grid, dt=dt, t_end=float(t_max), variant=vtag)
    except (ConfigError, ValueError, GridError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)

    try:
        part = DyadicPartition(grid)
        phi = cx.make_phi(grid)
        records = xp.run_nonuniform(ns, ts, idx, ecfg, part, phi)

        # drift experiments on a smaller grid (low-frequency data)
        dgrid = make_grid(grid.half_length, 2**14)
        dpart = DyadicPartition(dgrid)
        dphi = cx.make_phi(dgrid)
        dkit = NonlocalKit(dgrid)
        dts = [0.001, 0.002, 0.004, 0.008, 0.016]
        dcfg = EvolutionConfig(dgrid, dt=2.5e-4, t_end=max(dts), variant=vtag)
        v0_bump = v_from_u(dphi, dkit)
        v0_pair = cx.make_pair(6, idx, dgrid, dphi).v1_0
        prop2 = xp.run_prop2(v0_bump, idx, dts, dcfg, dpart, label=-1) + \
            xp.run_prop2(v0_pair, idx, dts, dcfg, dpart, label=6)
        prop3 = xp.run_prop3(v0_bump, idx, dts, dcfg, dpart, label=-1) + \
            xp.run_prop3(v0_pair, idx, dts, dcfg, dpart, label=6)

        # block-energy table of the key terms
        bgrid = make_grid(grid.half_length, 2**17)
        bpart = DyadicPartition(bgrid)
        bphi = cx.make_phi(bgrid)
        energies = {n: block_energies(cx.key_term(n, idx, bgrid, bphi).term,
                                      idx.shifted(-1.0), bpart) for n in ns}
        psi = cx.key_term(ns[0], idx, bgrid, bphi).psi
    except BlowUpError as exc:
        click.echo(f"blow-up: {exc}", err=True)
        sys.exit(EXIT_BLOWUP)
    except ValueError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)

    xp.emit_csv(records, out_dir / "nonuniform.csv")
    xp.emit_csv(prop2, out_dir / "prop2.csv")
    xp.emit_csv(prop3, out_dir / "prop3.csv")
    with open(out_dir / "blocks.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["j"] + [f"tn_{n}" for n in ns])
        for row_i, j in enumerate(range(-1, bpart.j_max + 1)):
            w.writerow([j] + [f"{energies[n][row_i]:.17g}" for n in ns])

    bump_p3 = [r for r in prop3 if r.n == -1]
    fits = {
        "prop2_sm2_exponent": xp.drift_exponent([r for r in prop2 if r.n == -1],
                                                "drift_sm2").exponent,
        "prop2_sm1_exponent": xp.drift_exponent([r for r in prop2 if r.n == -1],
                                                "drift_sm1").exponent,
        "prop3_remainder_exponent": xp.drift_exponent(bump_p3,
                                                      "approx_remainder").exponent,
    }
    summary = xp.summarize_nonuniform(
        records, psi_lp=lp_norm(psi, idx.p),
        correction_t2=_t2_scale(bump_p3),
    )
    fits["init_distance_log2_slope"] = summary.init_slope

    xp.write_manifest(
        out_dir / "manifest.json",
        config={
            "grid": {"half_length": grid.half_length, "size": grid.size},
            "index": {"s": idx.s, "p": str(idx.p), "r": str(idx.r)},
            "n_list": ns, "t_list": ts, "dt": dt, "variant": variant,
            "seed": seed, "t_max": float(t_max),
        },
        extra={"fits": fits, "summary": {
            "verdict": summary.verdict,
            "init_slope": summary.init_slope,
            "analytic_target": summary.analytic_target,
            "lower_constant": summary.lower_constant,
            "min_block_ratio": summary.min_block_ratio,
            "correction_halfn": summary.correction_halfn,
            "correction_t2": summary.correction_t2,
        }},
    )
    click.echo(f"separation of scales: {summary.verdict}")
    click.echo(f"  init-distance log2 slope  {summary.init_slope:+.4f}")
    click.echo(f"  analytic target           {summary.analytic_target:.6g}")
    click.echo(f"  min block separation / t  {summary.min_block_ratio:.6g}")
    sys.exit(EXIT_OK if summary.verdict == "holds" else EXIT_PROPERTY)


def _t2_scale(prop3_records) -> float:
    """Empirical coefficient of the quadratic remainder, max over cells."""
    vals = [r.approx_remainder / r.t**2 for r in prop3_records if r.t > 0]
    return max(vals) if vals else 0.0


if __name__ == "__main__":
    main()
