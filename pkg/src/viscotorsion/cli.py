"""Command-line front end: ``viscotorsion {roots,solve,eval,verify,spectrum}``."""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .errors import ConfigError, TorsionError
from .fields import evaluate, inside
from .material import axial_wavenumbers
from .modal_basis import make_mode
from .special_fn import modal_roots, root_condition
from .verify import GridSpec, verify_solution

EXIT_GATE_FAILED = 8

FIELD_COLUMNS = (
    "u1", "u2", "u3", "u_r", "u_theta", "u_z",
    "t_rr", "t_rtheta", "t_rz", "t_ztheta", "t_zz", "psi",
)


def _fmt(x) -> str:
    # repr of a float is the shortest string that round-trips exactly
    return "" if x is None else repr(float(x))


def _write(text: str, out_dir: str | None, name: str):
    if out_dir is None:
        sys.stdout.write(text)
        return
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    (path / name).write_text(text)


def _csv_text(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        nr, nz = (int(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("grid must be NR,NZ") from None
    if nr < 1 or nz < 1:
        raise argparse.ArgumentTypeError("grid sizes must be positive")
    return nr, nz


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _config(args) -> io.RunConfig:
    cfg = io.load_config(args.config) if getattr(args, "config", None) else replace(io.DEFAULT_CONFIG)
    if getattr(args, "elastic_limit", False):
        cfg.elastic_limit = True
    return cfg


# --- roots --------------------------------------------------------------------

def cmd_roots(args) -> int:
    cfg = _config(args)
    roots = modal_roots(args.count)
    mat, geom = cfg.material(), cfg.geometry()
    modes = axial_wavenumbers(mat, geom, roots, args.count + 1)[1:]
    rows = []
    for md, k in zip(modes, roots):
        rows.append({
            "n": md.n, "k_n": k, "residual": abs(float(root_condition(np.array(k)))),
            "c_n": make_mode(md.n, roots, geom.a).c_n,
            "gamma_re": md.gamma.real, "gamma_im": md.gamma.imag,
        })
    if args.format == "json":
        text = json.dumps({"config": cfg.to_dict(), "roots": rows}, indent=2) + "\n"
    elif args.format == "csv":
        cols = list(rows[0])
        text = _csv_text(cols, [[r["n"]] + [_fmt(r[c]) for c in cols[1:]] for r in rows])
    else:
        lines = [f"{'n':>3} {'k_n':>22} {'residual':>10} {'c_n':>20} {'gamma_n':>44}"]
        for r in rows:
            lines.append(f"{r['n']:>3} {r['k_n']:>22.16g} {r['residual']:>10.2e} {r['c_n']:>20.14g} "
                         f"{complex(r['gamma_re'], r['gamma_im'])!s:>44}")
        text = "\n".join(lines) + "\n"
    _write(text, args.out, f"roots.{'txt' if args.format == 'table' else args.format}")
    return 0


# --- solve --------------------------------------------------------------------

def cmd_solve(args) -> int:
    cfg = _config(args)
    base = Path(args.config).parent if args.config else None
    sol = io.solve_config(cfg, base)
    out = Path(args.out or cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    io.save_solution(sol, out / "solution.json", cfg)
    print(f"wrote {out / 'solution.json'} (N={sol.N}, suggested N'={sol.suggested_truncation})")
    return 0


# --- eval ---------------------------------------------------------------------

def _read_points(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["r", "theta", "z"]:
        raise ConfigError(f"{path}: point list header must be 'r,theta,z'")
    try:
        return np.array([[float(c) for c in row] for row in rows[1:] if row], dtype=float).reshape(-1, 3)
    except ValueError:
        raise ConfigError(f"{path}: non-numeric or ragged point rows") from None


def sample_rows(sol, pts: np.ndarray) -> list[dict]:
    """One dict per point; points outside the cylinder carry ``inside=0`` and no values."""
    r, th, z = pts.T
    ok = inside(sol, r, z)
    rows = [{"r": p[0], "theta": p[1], "z": p[2], "inside": int(o)} for p, o in zip(pts, ok)]
    if ok.any():
        fs = evaluate(sol, r[ok], th[ok], z[ok])
        comps = {
            "u1": fs.u_cart[:, 0], "u2": fs.u_cart[:, 1], "u3": fs.u_cart[:, 2],
            "u_r": fs.u_cyl[:, 0], "u_theta": fs.u_cyl[:, 1], "u_z": fs.u_cyl[:, 2],
            **fs.tractions, "psi": fs.psi,
        }
        for j, i in enumerate(np.flatnonzero(ok)):
            for name in FIELD_COLUMNS:
                rows[i][name] = complex(comps[name][j])
    return rows


def cmd_eval(args) -> int:
    sol = io.load_solution(args.solution)
    if args.points:
        pts = _read_points(args.points)
    else:
        nr, nz = args.grid
        r = np.linspace(0.0, sol.geometry.a, nr)
        z = np.linspace(0.0, sol.geometry.h, nz)
        R, Z = np.meshgrid(r, z, indexing="ij")
        pts = np.stack([R.ravel(), np.full(R.size, args.theta), Z.ravel()], axis=1)
    rows = sample_rows(sol, pts)
    if args.format == "json":
        out = []
        for row in rows:
            d = {k: row[k] for k in ("r", "theta", "z", "inside")}
            for name in FIELD_COLUMNS:
                d[name] = None if name not in row else [row[name].real, row[name].imag]
            out.append(d)
        text = json.dumps(out, indent=1) + "\n"
    else:
        header = ["r", "theta", "z", "inside"] + [f"{n}_{p}" for n in FIELD_COLUMNS for p in ("re", "im")]
        body = []
        for row in rows:
            line = [_fmt(row["r"]), _fmt(row["theta"]), _fmt(row["z"]), row["inside"]]
            for name in FIELD_COLUMNS:
                v = row.get(name)
                line += ["", ""] if v is None else [_fmt(v.real), _fmt(v.imag)]
            body.append(line)
        text = _csv_text(header, body)
    _write(text, args.out, f"fields.{args.format}")
    return 0


# --- verify -------------------------------------------------------------------

def cmd_verify(args) -> int:
    sol = io.load_solution(args.solution)
    cfg = io.load_config(args.config) if args.config else io.DEFAULT_CONFIG
    nr, nz = args.grid or (cfg.grid_r, cfg.grid_z)
    grid = GridSpec(nr, args.n_theta or cfg.grid_theta, nz, args.step or cfg.fd_step)
    report = verify_solution(sol, grid)
    doc = report.to_dict()
    text = json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"
    _write(text, args.out, "verify_report.json")
    if args.out:
        status = "PASS" if report.passed else "FAIL: " + ", ".join(report.failed)
        print(f"verify {status}")
    if not report.passed:
        print("failed gates: " + ", ".join(report.failed), file=sys.stderr)
        return EXIT_GATE_FAILED
    return 0


# --- spectrum -----------------------------------------------------------------

def cmd_spectrum(args) -> int:
    """Tidy CSVs for the standard line plots."""
    sol = io.load_solution(args.solution)
    a, h = sol.geometry.a, sol.geometry.h
    rows = []
    for md, fn in zip(sol.modes, sol.spectrum.coeffs):
        rows.append([md.n, _fmt(md.k_n), _fmt(abs(fn)), _fmt(fn.real), _fmt(fn.imag), _fmt(abs(fn) ** 2 / md.n)])
    files = {"spectrum.csv": _csv_text(["n", "k_n", "abs_f_n", "f_n_re", "f_n_im", "abs_f_n_sq_over_n"], rows)}

    nr, nz = args.grid
    r = np.linspace(0.0, a, nr)
    z_fix = args.z if args.z is not None else 0.0
    fs = evaluate(sol, r, np.zeros_like(r), np.full_like(r, z_fix))
    files["profile_r.csv"] = _csv_text(
        ["r", "z", "abs_u_theta"], [[_fmt(x), _fmt(z_fix), _fmt(abs(u))] for x, u in zip(r, fs.u_cyl[:, 1])]
    )
    z = np.linspace(0.0, h, nz)
    r_fix = args.r if args.r is not None else a
    fs = evaluate(sol, np.full_like(z, r_fix), np.zeros_like(z), z)
    files["profile_z.csv"] = _csv_text(
        ["r", "z", "abs_u_theta"], [[_fmt(r_fix), _fmt(x), _fmt(abs(u))] for x, u in zip(z, fs.u_cyl[:, 1])]
    )
    out = Path(args.out or "out")
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text)
    print(f"wrote {', '.join(sorted(files))} to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="viscotorsion",
                                description="Torsion of a clamped viscoelastic cylinder by a bottom-face torque")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("roots", help="modal eigenvalues k_n, c_n and gamma_n")
    s.add_argument("--count", type=_positive_int, required=True)
    s.add_argument("--config")
    s.add_argument("--format", choices=("table", "csv", "json"), default="table")
    s.add_argument("--out")
    s.add_argument("--elastic-limit", action="store_true")
    s.set_defaults(func=cmd_roots)

    s = sub.add_parser("solve", help="assemble the series solution and write solution.json")
    s.add_argument("--config")
    s.add_argument("--out")
    s.add_argument("--elastic-limit", action="store_true")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("eval", help="sample fields from a solution file")
    s.add_argument("solution")
    s.add_argument("--grid", type=_parse_grid, default=(32, 32))
    s.add_argument("--theta", type=float, default=0.0)
    s.add_argument("--points", help="CSV with header r,theta,z")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--out")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("verify", help="residual certification; exit 0 iff every gate passes")
    s.add_argument("solution")
    s.add_argument("--config", help="supplies grid_r, grid_theta, grid_z, fd_step")
    s.add_argument("--grid", type=_parse_grid)
    s.add_argument("--n-theta", type=_positive_int)
    s.add_argument("--step", type=float)
    s.add_argument("--out")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("spectrum", help="tidy CSVs: |f_n| vs n, |u_theta|(r), |u_theta|(z)")
    s.add_argument("solution")
    s.add_argument("--grid", type=_parse_grid, default=(65, 65))
    s.add_argument("--z", type=float, help="height of the radial profile (default 0)")
    s.add_argument("--r", type=float, help="radius of the axial profile (default a)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_spectrum)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TorsionError as exc:
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error [OSError]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
