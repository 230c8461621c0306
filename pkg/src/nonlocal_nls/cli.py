"""Command line front end.

Subcommands map onto the library layers: `spectrum` and `zeros` expose the
discrete scattering data, `sectors` the ray decomposition, `delta` and
`asymptote` the conjugation factor and the long-time formulas, `evolve` and
`compare` the direct PDE run and the ray-wise comparison, and `validate`
runs the internal consistency suite.

Output contract
---------------
Every command writes <out>/<command>.<ext>. CSV files start with comment
lines `# key: value` (always including `# schema: 1`) followed by a header
row; complex columns are split into re_*/im_* pairs. JSON documents carry
{"schema": 1, "command", "meta", "columns", "rows"} with complex entries as
[re, im] pairs and non-finite floats as null. Floats are printed with
shortest round-trip repr. `--format svg` writes the CSV as well and renders
the figure purely from that file. All writes are atomic (temp file plus
rename) and byte-deterministic for a fixed seed.

Exit codes: 0 success, 2 bad arguments or config, 3 unsupported input
(degenerate parameters, boundary rays), 4 numerical failure (including
blow-up and a failing validation suite).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile

import numpy as np

from . import asymptotics, deformation, numerics, pde, scattering, spectrum

__all__ = ["main"]

_REQUIRED = object()


# --- formatting and atomic output ----------------------------------------

def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _atomic_write(path: str, data: bytes):
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _expand_columns(columns):
    """CSV header names: complex columns become re_*/im_* pairs."""
    names = []
    for name, kind in columns:
        if kind == "complex":
            names.extend([f"re_{name}", f"im_{name}"])
        else:
            names.append(name)
    return names


def _write_csv(path: str, command: str, meta: dict, columns, rows):
    buf = io.StringIO()
    buf.write("# schema: 1\n")
    buf.write(f"# command: {command}\n")
    for k, v in meta.items():
        buf.write(f"# {k}: {_fmt(v)}\n")
    buf.write(",".join(_expand_columns(columns)) + "\n")
    for row in rows:
        cells = []
        for (name, kind), v in zip(columns, row):
            if kind == "complex":
                v = complex(v)
                cells.extend([repr(v.real), repr(v.imag)])
            else:
                cells.append(_fmt(v))
        buf.write(",".join(cells) + "\n")
    _atomic_write(path, buf.getvalue().encode())


def _json_safe(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if np.isfinite(v) else None
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return v


def _write_json(path: str, command: str, meta: dict, columns, rows):
    out_rows = []
    for row in rows:
        cells = []
        for (name, kind), v in zip(columns, row):
            if kind == "complex":
                v = complex(v)
                cells.append([_json_safe(v.real), _json_safe(v.imag)])
            else:
                cells.append(_json_safe(v))
        out_rows.append(cells)
    doc = {
        "schema": 1,
        "command": command,
        "meta": {k: _json_safe(v) for k, v in meta.items()},
        "columns": [{"name": n, "type": t} for n, t in columns],
        "rows": out_rows,
    }
    _atomic_write(path, (json.dumps(doc, indent=2, allow_nan=False) + "\n").encode())


def _read_csv(path: str):
    meta, rows = {}, []
    with open(path, newline="") as fh:
        header = None
        for line in fh:
            if line.startswith("#"):
                k, _, v = line[1:].strip().partition(":")
                meta[k.strip()] = v.strip()
                continue
            if header is None:
                header = [c.strip() for c in line.strip().split(",")]
                continue
            rows.append(dict(zip(header, line.strip().split(","))))
    return meta, rows


def _render_svg(fig, path: str):
    import matplotlib
    matplotlib.rcParams["svg.hashsalt"] = "nonlocal-nls"
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    _atomic_write(path, buf.getvalue())


def _figure():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt.figure(figsize=(7.0, 4.5))


def _cols(rows, *names):
    return tuple(np.array([float(r[n]) for r in rows]) for n in names)


def _plot(command: str, csv_path: str, svg_path: str):
    """Render the figure for `command` from its just-written CSV file."""
    meta, rows = _read_csv(csv_path)
    fig = _figure()
    ax = fig.add_subplot(111)
    if command in ("spectrum", "zeros"):
        re, im = _cols(rows, "re_zero", "im_zero")
        ax.scatter(re, im, marker="x", color="tab:red")
        ax.axhline(0.0, lw=0.5, color="gray")
        ax.axvline(0.0, lw=0.5, color="gray")
        ax.set_xlabel("Re k")
        ax.set_ylabel("Im k")
        ax.set_title(f"spectral zeros (A={meta.get('A')}, R={meta.get('R')})")
    elif command == "sectors":
        finite = [abs(float(r[c])) for r in rows for c in ("lo", "hi")
                  if np.isfinite(float(r[c]))]
        span = 1.5 * max(finite) if finite else 1.0
        colors = {"i": "tab:green", "ii": "tab:blue",
                  "iii": "tab:orange", "iv": "tab:purple"}
        for r in rows:
            lo = max(float(r["lo"]), -span)
            hi = min(float(r["hi"]), span)
            ax.plot([lo, hi], [int(r["m"])] * 2, lw=6,
                    color=colors[r["case"]],
                    solid_capstyle="butt")
            ax.text(0.5 * (lo + hi), int(r["m"]) + 0.12, r["case"],
                    ha="center", fontsize=8)
        ax.set_xlabel("xi")
        ax.set_ylabel("band m")
        ax.set_title("sector decomposition")
    elif command == "delta":
        k, dre, dim = _cols(rows, "k", "re_delta", "im_delta")
        ax.plot(k, dre, label="Re delta")
        ax.plot(k, dim, label="Im delta")
        ax.set_xlabel("k")
        ax.legend()
        ax.set_title(f"conjugation factor, xi={meta.get('xi')}")
    elif command == "asymptote":
        t, aq = _cols(rows, "t", "abs_q")
        ax.plot(t, aq, marker="o")
        ax.set_xlabel("t")
        ax.set_ylabel("|q|")
        ax.set_title(f"asymptotics along xi={meta.get('xi')}")
    elif command == "evolve":
        t, x, aq = _cols(rows, "t", "x", "abs_q")
        for tv in sorted(set(t)):
            sel = t == tv
            ax.plot(x[sel], aq[sel], label=f"t={tv:g}", lw=0.8)
        ax.set_xlabel("x")
        ax.set_ylabel("|q|")
        ax.legend(fontsize=8)
        ax.set_title("direct integration")
    elif command == "compare":
        t, err = _cols(rows, "t", "abs_err")
        ax.semilogy(t, err, marker="o")
        ax.set_xlabel("t")
        ax.set_ylabel("|q_num - q_asym|")
        ax.set_title(f"ray comparison, xi={meta.get('xi')}")
    elif command == "validate":
        names = [r["check"] for r in rows]
        passed = [int(r["passed"]) for r in rows]
        ax.barh(range(len(names)), passed,
                color=["tab:green" if p else "tab:red" for p in passed])
        ax.set_yticks(range(len(names)))
        ax.set_yticklabels(names, fontsize=7)
        ax.set_xlabel("passed")
        ax.set_title("validation suite")
    fig.tight_layout()
    _render_svg(fig, svg_path)
    import matplotlib.pyplot as plt
    plt.close(fig)


def _emit(args, command: str, meta: dict, columns, rows) -> str:
    os.makedirs(args.out, exist_ok=True)
    fmt = args.format
    if fmt == "json":
        path = os.path.join(args.out, f"{command}.json")
        _write_json(path, command, meta, columns, rows)
        return path
    csv_path = os.path.join(args.out, f"{command}.csv")
    _write_csv(csv_path, command, meta, columns, rows)
    if fmt == "svg":
        svg_path = os.path.join(args.out, f"{command}.svg")
        _plot(command, csv_path, svg_path)
        return svg_path
    return csv_path


# --- config file ----------------------------------------------------------

def _load_config(path: str) -> dict:
    """Flat key = value pairs; later keys override earlier ones."""
    out = {}
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, eq, val = line.partition("=")
            if not eq:
                raise ValueError(f"{path}:{ln}: expected key = value")
            out[key.strip()] = val.strip()
    return out


def _resolve(args, parser, opts: dict):
    """Fill argument values from the config file, then hard defaults.

    Precedence: command line > config file > default. Entries whose default
    is the REQUIRED sentinel must come from one of the first two.
    """
    cfg = {}
    if args.config is not None:
        try:
            cfg = _load_config(args.config)
        except OSError as exc:
            parser.error(f"cannot read config: {exc}")
        except ValueError as exc:
            parser.error(str(exc))
    for dest, (conv, default) in opts.items():
        if getattr(args, dest, None) is not None:
            continue
        if dest in cfg:
            try:
                setattr(args, dest, conv(cfg[dest]))
            except ValueError as exc:
                parser.error(f"config key {dest}: {exc}")
        elif default is _REQUIRED:
            parser.error(f"missing required option --{dest.replace('_', '-')}")
        else:
            setattr(args, dest, default)


def _times(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise ValueError(f"bad time list {text!r}")
    if not vals:
        raise ValueError("empty time list")
    return vals


def _choice(options):
    def conv(text):
        if text not in options:
            raise ValueError(f"expected one of {options}, got {text!r}")
        return text
    return conv


# --- shared pipeline pieces ------------------------------------------------

def _spectral(args):
    params = scattering.StepParams(A=args.A, R=args.R)
    sd = scattering.shifted_step_spectral(params)
    ds = spectrum.solve_spectrum(params)
    return params, sd, ds


def _param_meta(args) -> dict:
    return {"A": args.A, "R": args.R}


# --- subcommands -----------------------------------------------------------

def _cmd_spectrum(args) -> int:
    params, sd, ds = _spectral(args)
    nc = spectrum.norming_constants(sd, ds)
    columns = [("label", "str"), ("zero", "complex"),
               ("residual", "float"), ("norming", "complex")]
    rows = [("ik0", 1j * ds.k0,
             abs(complex(np.asarray(sd.a1(np.array([1j * ds.k0])))[0])),
             nc.gamma0)]
    for j in range(1, ds.n + 1):
        pj = ds.p_at(j)
        rows.append((f"p{j}", pj,
                     abs(complex(np.asarray(sd.a1(np.array([pj])))[0])),
                     nc.eta[j - 1]))
    meta = _param_meta(args)
    meta.update(n=ds.n, boundary=int(ds.boundary), total_zeros=ds.total_zeros)
    path = _emit(args, "spectrum", meta, columns, rows)
    print(f"n = {ds.n}, {ds.total_zeros} zeros; wrote {path}")
    return 0


def _cmd_zeros(args) -> int:
    params, sd, ds = _spectral(args)
    count = spectrum.argument_principle_count(params)
    columns = [("label", "str"), ("zero", "complex"), ("residual", "float")]
    rows = []
    for label, z in [("ik0", 1j * ds.k0)] + \
            [(f"p{j}", ds.p_at(j)) for j in range(1, ds.n + 1)] + \
            [(f"p{j}_mirror", -np.conj(ds.p_at(j))) for j in range(1, ds.n + 1)]:
        rows.append((label, z,
                     abs(complex(np.asarray(sd.a1(np.array([z])))[0]))))
    max_res = max(r[2] for r in rows)
    meta = _param_meta(args)
    meta.update(expected=ds.total_zeros, contour_count=count,
                max_residual=max_res,
                passed=int(count == ds.total_zeros and max_res <= 1e-10))
    path = _emit(args, "zeros", meta, columns, rows)
    print(f"{count} zeros by contour count (expected {ds.total_zeros}), "
          f"max residual {max_res:.2e}; wrote {path}")
    if not meta["passed"]:
        print("zero verification FAILED", file=sys.stderr)
        return 4
    return 0


def _cmd_sectors(args) -> int:
    params, sd, ds = _spectral(args)
    table = asymptotics.sector_table(ds)
    columns = [("lo", "float"), ("hi", "float"), ("m", "int"),
               ("kind", "str"), ("case", "str")]
    rows = [(r.lo, r.hi, r.m, r.kind, r.case) for r in table]
    meta = _param_meta(args)
    meta.update(n=ds.n, count=len(table))
    path = _emit(args, "sectors", meta, columns, rows)
    print(f"{len(table)} sectors; wrote {path}")
    return 0


def _cmd_delta(args) -> int:
    params, sd, ds = _spectral(args)
    eta = abs(args.xi)
    ctx = deformation.build_delta_context(eta, sd, ds, tol=args.tol)
    delta0 = deformation.delta_eval(0.0, ctx)
    k_min = args.k_min if args.k_min is not None else -eta + 0.05 * max(1.0, eta)
    k_max = args.k_max if args.k_max is not None else eta + 5.0 * max(1.0, eta)
    if not k_min < k_max:
        raise scattering.DomainError("need k_min < k_max")
    if k_min <= -eta:
        raise scattering.DomainError(
            f"k grid must stay right of the branch point -eta = {-eta}")
    grid = np.linspace(k_min, k_max, args.num)
    columns = [("k", "float"), ("delta", "complex")]
    rows = []
    for k in grid:
        skip = abs(k) < 1e-9 or any(abs(k + om) < 1e-9 for om in ctx.omegas_used)
        if skip:
            continue
        rows.append((float(k), deformation.delta_eval(complex(k), ctx)))
    meta = _param_meta(args)
    meta.update(xi=args.xi, m=ctx.m,
                re_nu=ctx.nu.real, im_nu=ctx.nu.imag,
                re_delta0=complex(delta0).real, im_delta0=complex(delta0).imag)
    path = _emit(args, "delta", meta, columns, rows)
    print(f"nu = {ctx.nu:.6g} (band m={ctx.m}); wrote {path}")
    return 0


def _cmd_asymptote(args) -> int:
    params, sd, ds = _spectral(args)
    ray = asymptotics.ray_context(args.xi, sd, ds, tol=args.tol)
    columns = [("t", "float"), ("x", "float"), ("q", "complex"),
               ("abs_q", "float"), ("q_full", "complex")]
    rows = []
    for t in args.times:
        x = 4.0 * args.xi * t
        ev = asymptotics.q_asymptotic(x, t, sd, ds, tol=args.tol, ray=ray)
        rows.append((t, x, ev.value, abs(ev.value), ev.value_full))
    lead = asymptotics.plateau_constant(args.xi, sd, ds, ray=ray)
    meta = _param_meta(args)
    meta.update(xi=args.xi, m=ray.sector.m, kind=ray.sector.kind,
                case=ray.sector.case, re_nu=ray.nu.real, im_nu=ray.nu.imag,
                re_leading=complex(lead).real, im_leading=complex(lead).imag)
    path = _emit(args, "asymptote", meta, columns, rows)
    print(f"sector case {ray.sector.case} (m={ray.sector.m}, "
          f"{ray.sector.kind}); wrote {path}")
    return 0


def _build_profile(args):
    if args.profile == "constant":
        return pde.constant_profile(args.A)
    params = scattering.StepParams(A=args.A, R=args.R)
    if args.profile == "step":
        return pde.step_profile(params)
    return pde.smooth_step(params, eps=args.eps)


def _cmd_evolve(args) -> int:
    profile = _build_profile(args)
    grid = pde.GridConfig(L=args.L, N=args.N, dt=args.dt, t_end=args.t_end)
    times = args.times if args.times is not None else (args.t_end,)
    traj = pde.evolve(profile, grid, times)
    stride = max(1, args.stride)
    columns = [("t", "float"), ("x", "float"), ("q", "complex"),
               ("abs_q", "float")]
    rows = []
    for st in traj.states:
        for xv, qv in zip(traj.x[::stride], st.q[::stride]):
            rows.append((st.t, float(xv), complex(qv), abs(complex(qv))))
    meta = {"A": args.A, "profile": profile.name, "L": grid.L, "N": grid.N,
            "dt": grid.dt, "t_end": grid.t_end, "stride": stride}
    if args.profile != "constant":
        meta["R"] = args.R
        if args.profile == "smooth":
            meta["eps"] = args.eps
    path = _emit(args, "evolve", meta, columns, rows)
    print(f"{len(traj.states)} snapshots on [{-grid.L}, {grid.L}]; wrote {path}")
    return 0


def _cmd_compare(args) -> int:
    params, sd, ds = _spectral(args)
    profile = pde.smooth_step(params, eps=args.eps)
    t_end = max(args.times)
    grid = pde.GridConfig(L=args.L, N=args.N, dt=args.dt, t_end=t_end)
    traj = pde.evolve(profile, grid, args.times)
    points = pde.compare_ray(traj, args.xi, sd, ds, c_g=args.c_g, tol=args.tol)
    columns = [("t", "float"), ("x", "float"), ("q_num", "complex"),
               ("q_asym", "complex"), ("abs_err", "float"), ("rel_err", "float")]
    rows = [(p.t, p.x, p.q_num, p.q_asym, p.abs_err, p.abs_err / args.A)
            for p in points]
    meta = _param_meta(args)
    meta.update(xi=args.xi, eps=args.eps, L=grid.L, N=grid.N, dt=grid.dt)
    path = _emit(args, "compare", meta, columns, rows)
    worst = max(p.abs_err for p in points)
    print(f"{len(points)} ray points, worst |err| = {worst:.3e}; wrote {path}")
    return 0


def _cmd_validate(args) -> int:
    params, sd, ds = _spectral(args)
    rng = np.random.default_rng(args.seed)
    checks = []  # (name, value, threshold)

    k = np.concatenate([-np.geomspace(0.05, 30.0, 120)[::-1],
                        np.geomspace(0.05, 30.0, 120)])
    rep = scattering.validate_unitarity(sd, k)
    checks.append(("det_identity", rep.max_det_residual, 1e-10))
    checks.append(("schwarz_symmetry",
                   max(rep.max_schwarz_a1, rep.max_schwarz_a2), 1e-10))

    zs = [1j * ds.k0] + [ds.p_at(j) for j in range(1, ds.n + 1)] + \
         [-np.conj(ds.p_at(j)) for j in range(1, ds.n + 1)]
    res = max(abs(complex(np.asarray(sd.a1(np.array([z])))[0])) for z in zs)
    checks.append(("zero_residuals", res, 1e-10))
    count = spectrum.argument_principle_count(params)
    checks.append(("zero_count", abs(count - ds.total_zeros), 0.5))

    if not ds.boundary:
        table = asymptotics.sector_table(ds)
        checks.append(("sector_count", abs(len(table) - (4 * ds.n + 2)), 0.5))

        # random interior rays: exponent bound and the two evaluation routes
        worst_im, worst_gap = 0.0, 0.0
        finite = [r for r in table if np.isfinite(r.lo) and np.isfinite(r.hi)]
        for _ in range(args.samples):
            if finite and rng.random() < 0.8:
                row = finite[rng.integers(len(finite))]
                xi = float(row.lo + (0.2 + 0.6 * rng.random()) * (row.hi - row.lo))
            else:
                outer = max([ds.omega_at(j) for j in range(1, ds.n + 1)]
                            + [ds.re_p_abs(j) for j in range(1, ds.n + 1)]
                            + [1.0])
                xi = float(rng.uniform(1.2, 3.0) * outer
                           * (1 if rng.random() < 0.5 else -1))
            ray = asymptotics.ray_context(xi, sd, ds, tol=args.tol)
            worst_im = max(worst_im, abs(ray.nu.imag))
            t = float(rng.uniform(5.0, 50.0))
            ev = asymptotics.q_asymptotic(4 * xi * t, t, sd, ds, ray=ray)
            qp = asymptotics.q_via_parametrix(4 * xi * t, t, sd, ds, ray=ray)
            scale = max(abs(ev.value_full), abs(qp), 1e-300)
            worst_gap = max(worst_gap, abs(ev.value_full - qp) / scale)
        checks.append(("exponent_bound", worst_im, 0.5 - 1e-6))
        checks.append(("route_agreement", worst_gap, 1e-10))

        # jump of delta across the cut, by one-sided boundary values
        top = ds.omega_at(1) if ds.n else 2.0
        eta = float(rng.uniform(0.3, 0.9)) * top
        ctx = deformation.build_delta_context(eta, sd, ds, tol=args.tol)
        pair = scattering.reflection_coeffs(sd)
        worst_jump = 0.0
        for _ in range(3):
            kr = -eta - float(rng.uniform(0.1, 2.0))
            if any(abs(kr + ds.omega_at(j)) < 1e-3 for j in range(1, ds.n + 1)):
                continue
            dp = deformation.delta_boundary(kr, ctx, +1)
            dm = deformation.delta_boundary(kr, ctx, -1)
            jump = 1.0 + complex(np.asarray(
                pair.product(np.array([kr], dtype=complex)))[0])
            worst_jump = max(worst_jump, abs(dp / dm - jump))
        checks.append(("delta_jump", worst_jump, 1e-8))

    columns = [("check", "str"), ("value", "float"),
               ("threshold", "float"), ("passed", "int")]
    rows, ok = [], True
    for name, value, threshold in checks:
        good = value <= threshold
        ok = ok and good
        rows.append((name, float(value), float(threshold), int(good)))
        print(f"{'PASS' if good else 'FAIL'} {name}: {value:.3e} "
              f"(threshold {threshold:.3e})")
    meta = _param_meta(args)
    meta.update(passed=int(ok), seed=args.seed, samples=args.samples)
    path = _emit(args, "validate", meta, columns, rows)
    print(f"wrote {path}")
    return 0 if ok else 4


# --- parser ----------------------------------------------------------------

def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output directory (default .)")
    common.add_argument("--format", default=None, choices=["csv", "json", "svg"],
                        help="output format (default csv; svg also writes csv)")
    common.add_argument("--tol", type=float, default=None,
                        help="quadrature / root tolerance (default 1e-10)")
    common.add_argument("--seed", type=int, default=None,
                        help="seed for sampled checks (default 0)")
    common.add_argument("--config", default=None,
                        help="flat key = value config file; command line wins")

    ap = argparse.ArgumentParser(
        prog="nonlocal-nls",
        description="Inverse scattering and long-time asymptotics of the "
                    "nonlocal focusing NLS equation with shifted-step data.")
    sub = ap.add_subparsers(dest="command", required=True)

    base_opts = {
        "out": (str, "."),
        "format": (_choice(("csv", "json", "svg")), "csv"),
        "tol": (float, 1e-10),
        "seed": (int, 0),
    }

    def add(name, fn, help_, extra=None, opts=None):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("-A", type=float, default=None, help="step height A > 0")
        if name not in ("evolve",):
            p.add_argument("-R", type=float, default=None, help="step shift R > 0")
        if extra:
            extra(p)
        full = dict(base_opts)
        full["A"] = (float, _REQUIRED)
        if name not in ("evolve",):
            full["R"] = (float, _REQUIRED)
        if opts:
            full.update(opts)
        p.set_defaults(fn=fn, opts=full, parser=p)
        return p

    add("spectrum", _cmd_spectrum,
        "discrete spectrum and norming constants")
    add("zeros", _cmd_zeros,
        "verify the zero set against a contour count")
    add("sectors", _cmd_sectors,
        "sector decomposition of the xi axis")

    def delta_extra(p):
        p.add_argument("--xi", type=float, default=None, help="ray parameter")
        p.add_argument("--k-min", dest="k_min", type=float, default=None)
        p.add_argument("--k-max", dest="k_max", type=float, default=None)
        p.add_argument("--num", type=int, default=None, help="grid size")
    add("delta", _cmd_delta, "conjugation factor on a k grid",
        extra=delta_extra,
        opts={"xi": (float, _REQUIRED), "num": (int, 201),
              "k_min": (float, None), "k_max": (float, None)})

    def asym_extra(p):
        p.add_argument("--xi", type=float, default=None, help="ray parameter")
        p.add_argument("--times", type=_times, default=None,
                       help="comma separated times (default 10,20,30,40)")
    add("asymptote", _cmd_asymptote, "long-time formulas along a ray",
        extra=asym_extra,
        opts={"xi": (float, _REQUIRED),
              "times": (_times, (10.0, 20.0, 30.0, 40.0))})

    def evolve_extra(p):
        p.add_argument("-R", type=float, default=None, help="step shift R > 0")
        p.add_argument("--profile", default=None,
                       choices=["smooth", "step", "constant"])
        p.add_argument("--eps", type=float, default=None,
                       help="smoothing width of the step (default 0.5)")
        p.add_argument("--L", type=float, default=None)
        p.add_argument("--N", type=int, default=None)
        p.add_argument("--dt", type=float, default=None)
        p.add_argument("--t-end", dest="t_end", type=float, default=None)
        p.add_argument("--times", type=_times, default=None,
                       help="snapshot times (default t_end)")
        p.add_argument("--stride", type=int, default=None,
                       help="write every stride-th grid point")
    add("evolve", _cmd_evolve, "direct integration of the equation",
        extra=evolve_extra,
        opts={"R": (float, None), "profile": (_choice(("smooth", "step", "constant")), "smooth"),
              "eps": (float, 0.5), "L": (float, 200.0), "N": (int, 16384),
              "dt": (float, 5e-4), "t_end": (float, 40.0),
              "times": (_times, None), "stride": (int, 8)})

    def compare_extra(p):
        p.add_argument("--xi", type=float, default=None, help="ray parameter")
        p.add_argument("--eps", type=float, default=None,
                       help="smoothing width (default 0.5)")
        p.add_argument("--L", type=float, default=None)
        p.add_argument("--N", type=int, default=None)
        p.add_argument("--dt", type=float, default=None)
        p.add_argument("--times", type=_times, default=None,
                       help="comparison times (default 10,20,30,40)")
        p.add_argument("--c-g", dest="c_g", type=float, default=None,
                       help="group speed bound for the trust window")
    add("compare", _cmd_compare, "direct run vs asymptotics along a ray",
        extra=compare_extra,
        opts={"xi": (float, _REQUIRED), "eps": (float, 0.5),
              "L": (float, 200.0), "N": (int, 16384), "dt": (float, 5e-4),
              "times": (_times, (10.0, 20.0, 30.0, 40.0)),
              "c_g": (float, None)})

    def validate_extra(p):
        p.add_argument("--samples", type=int, default=None,
                       help="random rays for the sampled checks (default 4)")
    add("validate", _cmd_validate, "run the internal consistency suite",
        extra=validate_extra, opts={"samples": (int, 4)})

    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    _resolve(args, args.parser, args.opts)
    if args.command == "evolve" and args.profile != "constant" and args.R is None:
        args.parser.error("-R is required unless --profile constant")
    try:
        return args.fn(args)
    except (scattering.DomainError, deformation.BranchCutError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (spectrum.BoundaryParamsError, deformation.BoundaryRayError) as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return 3
    except (scattering.ScatteringError, spectrum.SpectrumError,
            deformation.DeformationError, numerics.NumericsError,
            pde.PDEError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
