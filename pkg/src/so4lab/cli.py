"""Command-line interface.

Global flags come before the subcommand:

    so4lab [--config FILE] [--format json|csv|svg] [--out PATH] CMD [args]

Exit codes: 0 success (and all checks passed for verify/breaking),
1 check failure, 2 usage/configuration/domain error, 3 numerical failure.
Reports are deterministic: identical configuration gives byte-identical
output.  When `--out` is given, the verify and breaking commands also
render a PNG figure next to the data file.
"""

from __future__ import annotations

import os

for _var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

import argparse
import math
import sys
from dataclasses import dataclass, field as dc_field, fields as dc_fields

import numpy as np

from . import report_io
from .breaking import DELTA_STENCILS, LambParams, breaking_report
from .oplab.space import RadialGrid, single_m
from .oplab.verify import DEFAULT_TOLERANCES, VerifyConfig, verify_so4
from .radial import build_solution
from .report_io import SCHEMA
from .spectra import (
    PhysicalConstants,
    QuantumNumbers,
    degeneracy,
    depression,
    enumerate_states,
    monopolar_energy,
    MonopoleQuantumNumbers,
    sommerfeld_energy,
    to_frequency,
)

__all__ = [
    "RunConfig",
    "ConfigError",
    "parse_config",
    "cmd_spectrum",
    "cmd_depressions",
    "cmd_levels_svg",
    "cmd_radial",
    "cmd_verify",
    "cmd_breaking",
    "main",
]


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    """Flat run configuration; every key can come from a config file."""

    a: float = 7.2973525693e-3
    electron_rest_frequency: float = 1.2355899e20
    j: float = 0.5
    grid_coarse: int = 1000
    grid_fine: int = 2000
    r_max_over_a: float = 200.0
    n_max: int = 3
    couplings: str = ""
    mu: float = -1.0  # sentinel: derive a^2 at use time
    include_delta: bool = True
    include_spin_orbit: bool = True
    delta_stencil: str = "triangle"
    breaking_points: int = 3000
    breaking_r_max_over_a: float = 120.0
    cluster_gap_tol: float = 1e-7
    kerd_threshold: float = 0.5
    kerd_floor: float = 1e-8
    order_min: float = 1.6
    order_floor: float = 1e-10
    tolerances: dict = dc_field(default_factory=dict)

    def constants(self) -> PhysicalConstants:
        return PhysicalConstants(a=self.a, electron_rest_frequency=self.electron_rest_frequency)

    def coupling_values(self) -> tuple[float, ...]:
        if not self.couplings.strip():
            return ()
        try:
            return tuple(float(tok) for tok in self.couplings.split(",") if tok.strip())
        except ValueError as exc:
            raise ConfigError(f"couplings must be a comma list of numbers: {exc}") from exc

    def mu_value(self) -> float:
        # -1.0 is the "unset" sentinel: default regulator mu = a^2 (in units of M)
        return self.a**2 if self.mu == -1.0 else self.mu

    def verify_config(self) -> VerifyConfig:
        return VerifyConfig(
            constants=self.constants(),
            j=self.j,
            grids=(self.grid_coarse, self.grid_fine),
            r_max_over_a=self.r_max_over_a,
            n_max=self.n_max,
            couplings=self.coupling_values(),
            cluster_gap_tol=self.cluster_gap_tol,
            kerd_threshold=self.kerd_threshold,
            kerd_floor=self.kerd_floor,
            order_min=self.order_min,
            order_floor=self.order_floor,
            tolerances=dict(self.tolerances),
        )

    def lamb_params(self) -> LambParams:
        return LambParams(
            mu=self.mu_value(),
            include_delta=self.include_delta,
            include_spin_orbit=self.include_spin_orbit,
        )


_SIMPLE_KEYS = {
    f.name: f.type for f in dc_fields(RunConfig) if f.name != "tolerances"
}


def _parse_bool(raw: str, key: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"config key '{key}' expects a boolean, got {raw!r}")


def parse_config(path: str) -> RunConfig:
    """Strict flat key=value file; any unknown key is an error naming it."""
    cfg = RunConfig()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {stripped!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key.startswith("tol."):
            tol_name = key[4:]
            base = tol_name
            if base.startswith("kramers"):
                base = "kramers"
            if base not in DEFAULT_TOLERANCES and base not in ("commutator_H_I", "commutator_H_R"):
                raise ConfigError(f"{path}:{lineno}: unknown tolerance key '{key}'")
            try:
                cfg.tolerances[tol_name] = float(raw)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: key '{key}' expects a number") from exc
            continue
        if key not in _SIMPLE_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key '{key}'")
        ftype = _SIMPLE_KEYS[key]
        try:
            if ftype in ("bool", bool):
                value = _parse_bool(raw, key)
            elif ftype in ("int", int):
                value = int(raw)
            elif ftype in ("float", float):
                value = float(raw)
            else:
                value = raw
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: key '{key}' has invalid value {raw!r}") from exc
        setattr(cfg, key, value)
    if cfg.delta_stencil not in DELTA_STENCILS:
        raise ConfigError(
            f"delta_stencil must be one of {DELTA_STENCILS}, got {cfg.delta_stencil!r}"
        )
    return cfg


def cmd_spectrum(n_max: int, j_filter: float | None, config: RunConfig) -> tuple[dict, int]:
    constants = config.constants()
    states = enumerate_states(n_max, j_filter)
    if not states:
        raise ValueError(f"no states with n <= {n_max} match the filter")
    rows = []
    for qn in states:
        e = sommerfeld_energy(qn, constants)
        rows.append(
            [
                qn.n,
                qn.j,
                qn.spectroscopic(),
                e,
                to_frequency(1.0 - e, constants),
                degeneracy(qn.n, qn.j),
            ]
        )
    payload = {
        "schema": SCHEMA,
        "command": "spectrum",
        "meta": {
            "n_max": n_max,
            "j_filter": j_filter,
            "a": constants.a,
            "electron_rest_frequency": constants.electron_rest_frequency,
        },
        "columns": ["n", "j", "label", "energy_over_m", "binding_hz", "degeneracy"],
        "rows": rows,
    }
    return payload, 0


def _levels(n_max: int) -> list[tuple[int, float]]:
    out = []
    for n in range(1, n_max + 1):
        two_j = 1
        while two_j / 2.0 + 0.5 <= n:
            out.append((n, two_j / 2.0))
            two_j += 2
    out.sort()
    return out


def cmd_depressions(n_max: int, q: float, config: RunConfig) -> tuple[dict, int]:
    constants = config.constants()
    rows = []
    skipped = 0
    for n, j in _levels(n_max):
        if not j + 0.5 > abs(q):
            skipped += 1
            continue
        d = depression(n, j, q, constants)
        rows.append([n, j, q, d, to_frequency(d, constants)])
    if not rows:
        raise ValueError(f"no level with j + 1/2 > |q| = {abs(q)} below n_max = {n_max}")
    payload = {
        "schema": SCHEMA,
        "command": "depressions",
        "meta": {"n_max": n_max, "q": q, "a": constants.a, "skipped_levels": skipped},
        "columns": ["n", "j", "q", "depression", "depression_hz"],
        "rows": rows,
    }
    return payload, 0


def cmd_levels_svg(n_max: int, q: float, config: RunConfig) -> tuple[dict, int]:
    constants = config.constants()
    point_rows = []
    mono_rows = []
    for n, j in _levels(n_max):
        label = f"n={n} j={int(round(2 * j))}/2"
        e0 = sommerfeld_energy(QuantumNumbers(n, j, -1), constants)
        point_rows.append({"label": label, "energy": e0})
        if j + 0.5 > abs(q):
            n_radial = n - int(round(j + 0.5))
            e1 = monopolar_energy(MonopoleQuantumNumbers(n_radial, j, q), constants)
            mono_rows.append(
                {"label": label, "energy": e1, "depression": e0 - e1}
            )
    svg = report_io.levels_svg(
        point_rows, mono_rows, q, title=f"level depressions, n <= {n_max}, a = {constants.a:g}"
    )
    payload = {
        "schema": SCHEMA,
        "command": "levels-svg",
        "meta": {"n_max": n_max, "q": q, "a": constants.a},
        "svg": svg,
    }
    return payload, 0


def cmd_radial(n: int, j: float, kappa_sign: int, config: RunConfig) -> tuple[dict, int]:
    constants = config.constants()
    sol = build_solution(n, j, kappa_sign, constants)
    w = sol.mesh.weights
    scale = 1.0 / math.sqrt(sol.norm)
    f = scale * sol.f
    g = scale * sol.g
    cumulative = np.cumsum(w * (f**2 + g**2))
    rows = [
        [float(r), float(fv), float(gv), float(c)]
        for r, fv, gv, c in zip(sol.mesh.nodes, f, g, cumulative)
    ]
    payload = {
        "schema": SCHEMA,
        "command": "radial",
        "meta": {
            "n": n,
            "j": j,
            "kappa_sign": kappa_sign,
            "energy_over_m": sol.energy,
            "norm": sol.norm,
            "b_overlap": sol.b,
            "lower_phase": sol.lower_phase,
            "kappa_eigenvalue": sol.kappa,
            "a": constants.a,
        },
        "columns": ["r", "f", "g", "cumulative_norm"],
        "rows": rows,
        "csv_footer": [
            f"b = {report_io.fmt_float(sol.b)}",
            f"norm = {report_io.fmt_float(sol.norm)}",
        ],
    }
    return payload, 0


def _report_payload(command: str, report) -> dict:
    columns = ["label", "value", "tolerance", "passed", "coarse", "order", "note"]
    rows = [[rec[c] for c in columns] for rec in report.to_records()]
    return {
        "schema": SCHEMA,
        "command": command,
        "meta": report.meta,
        "passed": report.passed,
        "columns": columns,
        "rows": rows,
    }


def cmd_verify(config: RunConfig) -> tuple[dict, int]:
    report = verify_so4(config.verify_config())
    payload = _report_payload("verify", report)
    return payload, 0 if report.passed else 1


def cmd_breaking(config: RunConfig) -> tuple[dict, int]:
    constants = config.constants()
    grid = RadialGrid.uniform(config.breaking_points, config.breaking_r_max_over_a / constants.a)
    space = single_m(config.j, grid)
    report = breaking_report(
        space,
        config.lamb_params(),
        constants,
        stencil=config.delta_stencil,
    )
    payload = _report_payload("breaking", report)
    return payload, 0 if report.passed else 1


def _serialize(payload: dict, fmt: str) -> str:
    if "svg" in payload:
        if fmt not in ("svg", ""):
            raise ValueError(f"command '{payload['command']}' only supports --format svg")
        return payload["svg"]
    if fmt == "svg":
        raise ValueError(f"command '{payload['command']}' does not produce svg")
    if fmt in ("json", ""):
        clean = {k: v for k, v in payload.items() if k != "csv_footer"}
        return report_io.emit_json(clean)
    if fmt == "csv":
        return report_io.emit_csv(
            payload["columns"], payload["rows"], payload.get("csv_footer")
        )
    raise ValueError(f"unknown format {fmt!r}")


def _add_common(parser: argparse.ArgumentParser, top: bool) -> None:
    # present on the top parser with real defaults and on every subparser
    # with SUPPRESS, so the flags work on either side of the subcommand
    d = {"config": None, "format": "", "out": None} if top else {}
    sup = argparse.SUPPRESS
    parser.add_argument(
        "--config",
        default=d.get("config", sup),
        help="flat key=value configuration file",
    )
    parser.add_argument(
        "--format",
        default=d.get("format", sup),
        choices=["", "json", "csv", "svg"],
        help="output format",
    )
    parser.add_argument(
        "--out",
        default=d.get("out", sup),
        help="write output to this path instead of stdout",
    )


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="so4lab",
        description="Relativistic hydrogen laboratory: exact spectra, hidden-symmetry checks, breaking reports.",
    )
    _add_common(p, top=True)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="closed-form bound levels")
    sp.add_argument("--n-max", type=int, required=True)
    sp.add_argument("--j", type=float, default=None, help="restrict to one j")
    _add_common(sp, top=False)

    dp = sub.add_parser("depressions", help="monopolar level depressions")
    dp.add_argument("--n-max", type=int, required=True)
    dp.add_argument("--q", type=float, required=True)
    _add_common(dp, top=False)

    lv = sub.add_parser("levels-svg", help="two-column level diagram (SVG)")
    lv.add_argument("--n-max", type=int, required=True)
    lv.add_argument("--q", type=float, required=True)
    _add_common(lv, top=False)

    rd = sub.add_parser("radial", help="closed-form radial pair on the quadrature mesh")
    rd.add_argument("--n", type=int, required=True)
    rd.add_argument("--j", type=float, required=True)
    rd.add_argument("--kappa-sign", type=int, required=True, choices=[-1, 1])
    _add_common(rd, top=False)

    vf = sub.add_parser("verify", help="run the symmetry battery; exit 0 iff all checks pass")
    _add_common(vf, top=False)
    bk = sub.add_parser("breaking", help="run the breaking report; exit 0 iff expected pattern holds")
    _add_common(bk, top=False)
    return p


def _dispatch(args, config: RunConfig) -> tuple[dict, int]:
    if args.command == "spectrum":
        return cmd_spectrum(args.n_max, args.j, config)
    if args.command == "depressions":
        return cmd_depressions(args.n_max, args.q, config)
    if args.command == "levels-svg":
        return cmd_levels_svg(args.n_max, args.q, config)
    if args.command == "radial":
        return cmd_radial(args.n, args.j, args.kappa_sign, config)
    if args.command == "verify":
        return cmd_verify(config)
    if args.command == "breaking":
        return cmd_breaking(config)
    raise ValueError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = parse_config(args.config) if args.config else RunConfig()
        payload, code = _dispatch(args, config)
        text = _serialize(payload, args.format)
    except ConfigError as exc:
        print(f"so4lab: config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"so4lab: {exc}", file=sys.stderr)
        return 2
    except np.linalg.LinAlgError as exc:
        print(f"so4lab: numerical failure: {exc}", file=sys.stderr)
        return 3
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        if args.command in ("verify", "breaking"):
            from .plots import render_report_figure
            from .oplab.verify import SymmetryReport, ReportEntry

            entries = [
                ReportEntry(
                    label=row[0],
                    value=row[1],
                    tolerance=row[2],
                    passed=row[3],
                    coarse=row[4],
                    order=row[5],
                    note=row[6],
                )
                for row in payload["rows"]
            ]
            stem, _ = os.path.splitext(args.out)
            render_report_figure(
                SymmetryReport(entries=entries, meta=payload["meta"]),
                stem + ".png",
                f"{payload['command']} report",
            )
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
