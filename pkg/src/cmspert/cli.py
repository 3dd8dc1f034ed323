"""Command-line front end.

Every command writes one deterministic JSON document (or CSV for
``spectrum``/``diag``).  Floats are printed with 17 significant digits and
rationals as ``"num/den"`` strings.

Exit codes: 0 ok, 2 configuration error, 3 unresolved degeneracy,
4 internal consistency failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import __version__
from .assembly import BasisWindow, t_matrix, wk_matrix
from .elliptic import Nome, p0_solve, p0_target, w_max, wp_lattice, wp_qseries_eval
from .jack import ConsistencyError, cauchy_check, jack, norm_sq_ratio
from .lattice import CouplingData, DominantWeight, lift_partition, parse_rational, trig_eigenvalue
from .perturbation import (
    DegenerateBlock,
    NonDegenerate,
    UnresolvedDegeneracy,
    WindowTooSmall,
    check_eigen_identity,
    check_normalization,
    coupling_ball,
    degeneracy_scan,
    degenerate_block_series,
    rs_series,
    series_eval,
    window_for,
)

EXIT_OK, EXIT_CONFIG, EXIT_UNRESOLVED, EXIT_INTERNAL = 0, 2, 3, 4
SCHEMA_VERSION = 1
SUITES = ("jack", "cauchy", "norms", "wp", "symmetry", "perturbation", "rank")


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# deterministic output


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def rat(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def dumps(obj: Any, indent: int = 0) -> str:
    """JSON text with 17-digit floats and exact rationals; key order is preserved."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, Fraction):
        return json.dumps(rat(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = ",\n".join(f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent + 1)}" for k, v in obj.items())
        return "{\n" + body + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        body = ",\n".join(pad + dumps(v, indent + 1) for v in obj)
        return "[\n" + body + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def header(command: str) -> dict:
    return {"version": f"cmspert {__version__}", "schema": SCHEMA_VERSION, "command": command}


def write_output(text: str, path: str | None) -> None:
    if not path or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".cmspert-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --------------------------------------------------------------------------
# configuration


def read_config_file(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    for no, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{no}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def _int(v, name: str, lo: int | None = None) -> int:
    try:
        x = int(str(v))
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {v!r}") from None
    if lo is not None and x < lo:
        raise ConfigError(f"{name} must be >= {lo}, got {x}")
    return x


def _coupling(cfg) -> CouplingData:
    if cfg.N is None or cfg.beta is None:
        raise ConfigError("N and beta are required")
    N = _int(cfg.N, "N", 2)
    try:
        beta = parse_rational(cfg.beta)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if beta <= 0:
        raise ConfigError(f"beta must be positive, got {beta}")
    return CouplingData(N, beta)


def _weight(text: str, N: int) -> DominantWeight:
    try:
        parts = tuple(int(x) for x in str(text).replace(" ", "").split(",") if x != "")
    except ValueError:
        raise ConfigError(f"lambda must be comma-separated integers, got {text!r}") from None
    if len(parts) > N:
        raise ConfigError(f"lambda {text!r} has more than N={N} parts")
    parts = parts + (0,) * (N - len(parts))
    try:
        return DominantWeight(parts)
    except ValueError as exc:
        raise ConfigError(f"lambda: {exc}") from None


def _p_list(v) -> list[float]:
    if v is None:
        return []
    items = [s for s in str(v).replace(";", ",").split(",") if s.strip()]
    out = []
    for s in items:
        try:
            x = float(s)
        except ValueError:
            raise ConfigError(f"p must be a number or comma-separated list, got {s!r}") from None
        if not abs(x) < 1:
            raise ConfigError(f"|p| must be < 1, got {x}")
        out.append(x)
    return out


# --------------------------------------------------------------------------
# commands


def cmd_jack(cfg) -> tuple[int, str]:
    c = _coupling(cfg)
    if cfg.lam is None:
        raise ConfigError("lambda is required")
    lam = _weight(cfg.lam, c.N)
    J = jack(lam, c)
    n = lam.size
    coeffs = {}
    for mu in J.expansion.support()[::-1]:
        coeffs[",".join(map(str, lift_partition(mu.parts, n)))] = J.expansion.coeff(mu)
    doc = header("jack")
    doc.update(
        N=c.N,
        beta=c.beta,
        **{"lambda": str(lam)},
        eigenvalue=J.eigenvalue,
        coefficients=coeffs,
        expansion=J.expansion.to_json_obj(),
    )
    return EXIT_OK, dumps(doc) + "\n"


def _series_doc(s, p_list) -> dict:
    if s.exact:
        vectors = [
            {str(mu): {"b": s.b[k][mu], "ratio": s.ratios[mu]} for mu in sorted(s.b[k], key=lambda m: (m.size, tuple(-x for x in m.parts)))}
            for k in range(len(s.b))
        ]
    else:
        vectors = [{str(mu): v for mu, v in vec.items()} for vec in s.vectors]
    evals = []
    for p in p_list:
        val = series_eval(s, p)
        evals.append({"p": p, "energy": val.energy, "tail_estimate": val.tail_estimate})
    return {
        "label": str(s.label),
        "exact": s.exact,
        "K": s.K,
        "energy": list(s.energy),
        "vectors": vectors,
        "evaluations": evals,
    }


def _window_or_error(lam_list, K: int, L: int | None, c: CouplingData, auto: bool) -> BasisWindow:
    need = 0
    for lam in lam_list:
        need = max(need, max(mu.size for mu in coupling_ball(lam, K + 1)))
    if L is None or auto:
        L = max(L or 0, need)
    return BasisWindow.ball(c.N, c.beta, L)


def cmd_spectrum(cfg) -> tuple[int, str]:
    c = _coupling(cfg)
    if cfg.lam is None:
        raise ConfigError("lambda is required")
    lams = [_weight(t, c.N) for t in str(cfg.lam).split(";") if t.strip()]
    K = _int(cfg.order if cfg.order is not None else 4, "order", 0)
    L = _int(cfg.cutoff, "cutoff", 0) if cfg.cutoff is not None else None
    p_list = _p_list(cfg.p)
    win = _window_or_error(lams, K, L, c, bool(cfg.auto_window))
    doc = header("spectrum")
    doc.update(N=c.N, beta=c.beta, order=K, cutoff=win.L)
    if len(lams) == 1:
        scan = degeneracy_scan(lams[0], K, c)
        if isinstance(scan, NonDegenerate):
            block = None
        else:
            block = scan
    else:
        try:
            block = DegenerateBlock.from_members(lams, c)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    code = EXIT_OK
    if block is None:
        s = rs_series(lams[0], K, win)
        doc["degeneracy"] = {"degenerate": False, "members": [str(lams[0])]}
        doc["series"] = [_series_doc(s, p_list)]
        series = [s]
    else:
        doc["degeneracy"] = {"degenerate": True, "members": [str(m) for m in block.members], "energy": block.energy}
        try:
            series = degenerate_block_series(block, K, win)
        except UnresolvedDegeneracy as exc:
            doc["degeneracy"].update(
                unresolved=True,
                residual_norm=exc.residual_norm,
                unresolved_energies=[{"multiplicity": m, "energy": e} for m, e in exc.unresolved_energies],
            )
            series = exc.resolved
            code = EXIT_UNRESOLVED
        doc["series"] = [_series_doc(s, p_list) for s in series]
    for s in series:
        if s.exact and not (check_eigen_identity(s, win) and check_normalization(s)):
            raise ConsistencyError(f"series for {s.label} fails its identity checks")
    if cfg.format == "csv":
        return code, _spectrum_csv(series, p_list)
    return code, dumps(doc) + "\n"


def _spectrum_csv(series, p_list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "order", "coefficient", "p", "energy", "error"])
    for s in series:
        for k, e in enumerate(s.energy):
            w.writerow([str(s.label), k, rat(e) if isinstance(e, Fraction) else fmt_float(float(e)), "", "", ""])
        for p in p_list:
            v = series_eval(s, p)
            w.writerow([str(s.label), "", "", fmt_float(p), fmt_float(v.energy), fmt_float(v.tail_estimate)])
    return buf.getvalue()


def cmd_diag(cfg) -> tuple[int, str]:
    from .oracle import diag_truncated

    c = _coupling(cfg)
    K = _int(cfg.order if cfg.order is not None else 6, "order", 0)
    L = _int(cfg.cutoff if cfg.cutoff is not None else 8, "cutoff", 0)
    p_list = _p_list(cfg.p if cfg.p is not None else "0")
    win = BasisWindow.ball(c.N, c.beta, L)
    orders = [wk_matrix(k, win) for k in range(1, K + 1)]
    lam = _weight(cfg.lam, c.N) if cfg.lam else None
    series = None
    if lam is not None:
        swin = window_for(lam, K, c.beta) if any(mu not in win for mu in coupling_ball(lam, K)) else win
        try:
            series = rs_series(lam, K, swin)
        except ValueError:
            series = None
    rows = []
    for p in p_list:
        rep = diag_truncated(t_matrix(p, win, K, orders))
        entry = {
            "p": p,
            "eigenvalues": rep.eigenvalues.tolist(),
            "max_residual": float(np.max(rep.residuals)) if len(rep.residuals) else 0.0,
        }
        if lam is not None:
            e = float(rep.eigenvalues[rep.overlap_index(lam)])
            entry["lambda_eigenvalue"] = e
            if series is not None:
                entry["series_delta"] = series_eval(series, p).energy - e
        rows.append(entry)
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["order", "coefficient", "p", "energy", "error"])
        for r in rows:
            for e in r["eigenvalues"]:
                w.writerow(["", "", fmt_float(r["p"]), fmt_float(e), fmt_float(r["max_residual"])])
        return EXIT_OK, buf.getvalue()
    doc = header("diag")
    doc.update(N=c.N, beta=c.beta, order=K, cutoff=L, labels=[str(m) for m in win], results=rows)
    return EXIT_OK, dumps(doc) + "\n"


def cmd_bounds(cfg) -> tuple[int, str]:
    c = _coupling(cfg)
    p_list = _p_list(cfg.p) or [0.001, 0.005, 0.01, 0.05, 0.1]
    p0 = p0_solve(c)
    doc = header("bounds")
    doc.update(
        N=c.N,
        beta=c.beta,
        w_max=[{"p": p, "value": w_max(p, c)} for p in p_list],
        target=p0_target(c),
        p0=p0,
        w_max_at_p0=w_max(p0, c) if p0 < 1 else None,
    )
    return EXIT_OK, dumps(doc) + "\n"


def cmd_wp(cfg) -> tuple[int, str]:
    if cfg.x is None or cfg.p is None:
        raise ConfigError("x and p are required")
    try:
        x = float(cfg.x)
    except ValueError:
        raise ConfigError(f"x must be a number, got {cfg.x!r}") from None
    ps = _p_list(cfg.p)
    if len(ps) != 1:
        raise ConfigError("wp takes a single p")
    p = ps[0]
    if p <= 0:
        raise ConfigError("wp needs 0 < p < 1 for the lattice evaluation")
    nome = Nome(p)
    q = wp_qseries_eval(x, nome)
    lat = wp_lattice(x, nome.tau, int(cfg.cutoff) if cfg.cutoff is not None else 60)
    doc = header("wp")
    doc.update(
        x=x,
        p=p,
        qseries=q.value.real,
        qseries_tail_bound=q.tail_bound,
        lattice=lat.real,
        difference=abs(q.value - lat),
    )
    return EXIT_OK, dumps(doc) + "\n"


# ---- verify


def _suite_jack():
    from .jack import h0_apply
    from .lattice import partitions

    checks = []
    for N in (2, 3):
        c = CouplingData(N, Fraction(2))
        n_ok = 0
        total = 0
        for n in range(5):
            for p in partitions(n, N):
                if p[-1]:
                    continue
                J = jack(DominantWeight(p), c)
                total += 1
                n_ok += h0_apply(J.expansion, c) == J.expansion * J.eigenvalue
        checks.append({"name": f"eigen_identity_N{N}", "pass": n_ok == total, "checked": total})
    return checks


def _suite_cauchy():
    out = []
    for N in (2, 3):
        r = cauchy_check(CouplingData(N, Fraction(2)), 4)
        out.append({"name": f"cauchy_N{N}", "pass": r.ok, "checked": r.checked})
    return out


def _suite_norms():
    from .oracle import QuadratureGrid, quad_inner

    c = CouplingData(2, Fraction(2))
    g = QuadratureGrid(2, 2, 64)
    zero = DominantWeight.zero(2)
    n0 = quad_inner(jack(zero, c).expansion, jack(zero, c).expansion, g)
    worst = 0.0
    for a in range(5):
        lam = DominantWeight((a, 0))
        J = jack(lam, c).expansion
        q = quad_inner(J, J, g) / n0
        worst = max(worst, abs(q / float(norm_sq_ratio(lam, zero, c)) - 1))
    return [{"name": "norm_ratio_N2", "pass": worst <= 1e-8, "max_rel_error": worst}]


def _suite_wp():
    worst = 0.0
    for x in np.linspace(0.5, math.pi, 5):
        for p in np.linspace(0.01, 0.1, 5):
            n = Nome(float(p))
            worst = max(worst, abs(wp_qseries_eval(float(x), n).value - wp_lattice(float(x), n.tau)))
    return [{"name": "dual_wp", "pass": worst <= 1e-10, "max_difference": worst}]


def _suite_symmetry():
    out = []
    for N in (2, 3):
        win = BasisWindow.ball(N, 2, 6)
        ok = True
        for k in range(1, 4):
            m = wk_matrix(k, win)
            ok &= m.is_symmetric() and m.support_ok()
        out.append({"name": f"symmetry_support_N{N}", "pass": bool(ok)})
    return out


def _suite_perturbation():
    from .oracle import convergence_probe

    lam = DominantWeight((2, 0))
    r = convergence_probe(lam, 3, BasisWindow.ball(2, 2, 10), [0.02, 0.01, 0.005])
    s = rs_series(lam, 3, window_for(lam, 3, 2))
    ident = check_eigen_identity(s, window_for(lam, 3, 2)) and check_normalization(s)
    return [
        {"name": "convergence_exponent", "pass": r.passed, "exponent": r.exponent, "errors": r.errors},
        {"name": "series_identities", "pass": ident},
    ]


def _suite_rank():
    from .oracle import projection_rank

    c = CouplingData(2, Fraction(2))
    center = trig_eigenvalue(DominantWeight((2, 0)), c)
    win = BasisWindow.ball(2, 2, 10)
    ranks = [projection_rank(p, center, 1.0, win, 6) for p in (0.0, 0.005, 0.01)]
    return [{"name": "rank_stability", "pass": ranks == [1, 1, 1], "ranks": ranks}]


_SUITE_FUNCS = {
    "jack": _suite_jack,
    "cauchy": _suite_cauchy,
    "norms": _suite_norms,
    "wp": _suite_wp,
    "symmetry": _suite_symmetry,
    "perturbation": _suite_perturbation,
    "rank": _suite_rank,
}


def cmd_verify(cfg) -> tuple[int, str]:
    names = [s.strip() for s in str(cfg.suite or ",".join(SUITES)).split(",") if s.strip()]
    for n in names:
        if n not in _SUITE_FUNCS:
            raise ConfigError(f"unknown suite {n!r}; choose from {', '.join(SUITES)}")
    doc = header("verify")
    results = {}
    all_ok = True
    for n in names:
        checks = _SUITE_FUNCS[n]()
        ok = all(ch["pass"] for ch in checks)
        all_ok &= ok
        results[n] = {"pass": ok, "checks": checks}
    doc["pass"] = all_ok
    doc["suites"] = results
    return (EXIT_OK if all_ok else EXIT_INTERNAL), dumps(doc) + "\n"


COMMANDS = {
    "jack": cmd_jack,
    "spectrum": cmd_spectrum,
    "diag": cmd_diag,
    "bounds": cmd_bounds,
    "wp": cmd_wp,
    "verify": cmd_verify,
}


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file; flags override it")
    common.add_argument("--N", dest="N", default=None)
    common.add_argument("--beta", default=None, help="coupling as a rational, e.g. 2/1")
    common.add_argument("--lambda", dest="lam", default=None, help="partition, e.g. 2,0 (';' separates block members)")
    common.add_argument("--p", default=None, help="nome value or comma-separated list")
    common.add_argument("--cutoff", "--L", dest="cutoff", default=None, help="degree cutoff L")
    common.add_argument("--order", "--K", dest="order", default=None, help="perturbation order K")
    common.add_argument("--x", default=None)
    common.add_argument("--suite", default=None, help=f"comma-separated subset of {', '.join(SUITES)}")
    common.add_argument("--format", default=None, choices=["json", "csv"])
    common.add_argument("--output", "-o", default=None)
    common.add_argument("--auto-window", dest="auto_window", action="store_const", const=True, default=None,
                        help="enlarge the cutoff to cover the coupling ball")

    parser = argparse.ArgumentParser(prog="cmspert", description="Elliptic Calogero-Moser spectra by nome perturbation.")
    parser.add_argument("--version", action="version", version=f"cmspert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


_KEYS = ("N", "beta", "lam", "p", "cutoff", "order", "x", "suite", "format", "output", "auto_window")
_ALIASES = {"lambda": "lam", "L": "cutoff", "K": "order"}


def resolve_config(args: argparse.Namespace) -> argparse.Namespace:
    if args.config:
        for k, v in read_config_file(args.config).items():
            k = _ALIASES.get(k, k)
            if k not in _KEYS:
                raise ConfigError(f"unknown config key {k!r}")
            if getattr(args, k) is None:
                if k == "auto_window":
                    v = v.lower() in ("1", "true", "yes")
                setattr(args, k, v)
    if args.format is None:
        args.format = "json"
    if args.format not in ("json", "csv"):
        raise ConfigError(f"format must be json or csv, got {args.format!r}")
    return args


def _fail(kind: str, message: str, extra: dict | None = None) -> None:
    payload = {"error": kind, "message": message}
    if extra:
        payload.update(extra)
    sys.stderr.write(json.dumps(payload, separators=(",", ":"), default=str) + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        args = resolve_config(args)
        code, text = COMMANDS[args.command](args)
    except (ConfigError, WindowTooSmall) as exc:
        _fail("config", str(exc))
        return EXIT_CONFIG
    except UnresolvedDegeneracy as exc:
        _fail("unresolved_degeneracy", str(exc), {"residual_norm": exc.residual_norm})
        return EXIT_UNRESOLVED
    except ConsistencyError as exc:
        _fail("internal_consistency", str(exc))
        return EXIT_INTERNAL
    except ValueError as exc:
        _fail("config", str(exc))
        return EXIT_CONFIG
    write_output(text, args.output)
    if code == EXIT_UNRESOLVED:
        _fail("unresolved_degeneracy", "degenerate block not split at the requested order; see output")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
