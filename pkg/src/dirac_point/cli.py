"""Command-line front end: reproducible experiments with CSV/JSON output.

Subcommands: ``convert`` (Lambda <-> A), ``eta`` (coupling sweep),
``spectrum`` (Nystrom eigenvalues of K), ``converge`` (norm-resolvent
distance sweep), ``renorm`` (W^A and the coupling scaling law).  Flags
override config-file values, which override built-in defaults; identical
configurations produce byte-identical output files.  Exit codes: 0 on
success, 2 on validation errors, 3 on numerical failures.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import approx_resolvent as ar
from . import kernel_ops as ko
from .errors import NearPole, NumericalError, PoleOfTan, ValidationError
from .exact_resolvent import SpectralPoint
from .lambda_bridge import (
    AdmissibleLambda,
    BranchSelector,
    GeneratorA,
    check_admissible,
    coupling_scale,
    electrostatic_lambda,
    generator_a,
    log_branches,
    scalar_multiple,
    w_matrix,
)
from .matrix_core import exp2


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _fmt_complex(x: complex) -> str:
    x = complex(x)
    if x.imag == 0.0:
        return _fmt(x.real)
    if x.real == 0.0:
        return f"{x.imag:.12g}j"
    return f"{x.real:.12g}{x.imag:+.12g}j"


def _parse_complex(text: str) -> complex:
    try:
        return complex(str(text).replace(" ", ""))
    except ValueError as exc:
        raise ValidationError(f"cannot parse complex value {text!r}") from exc


def _parse_list(text, parse=float) -> list:
    if isinstance(text, (list, tuple)):
        return [parse(t) for t in text]
    items = [t for t in str(text).split(",") if t.strip()]
    if not items:
        raise ValidationError("empty list value")
    return [parse(t.strip()) for t in items]


def _parse_generator(spec: str) -> GeneratorA:
    vals = _parse_list(spec, float)
    if len(vals) == 3:
        return generator_a(complex(vals[0], 0.0), vals[1], vals[2])
    if len(vals) == 4:
        return generator_a(complex(vals[0], vals[1]), vals[2], vals[3])
    raise ValidationError(
        "--a takes 'a,b,c' (real a) or 'a_re,a_im,b,c'"
    )


def _parse_lambda(cfg: dict) -> AdmissibleLambda:
    if cfg.get("lambda_identity"):
        phi = float(cfg.get("phi") or 0.0) % (2.0 * math.pi)
        diag = 1.0
        if phi >= math.pi:
            phi -= math.pi
            diag = -1.0
        return AdmissibleLambda(phi, diag, 0.0, 0.0, diag)
    spec = cfg.get("lam")
    if not spec:
        raise ValidationError("a boundary matrix is required (--lambda/--lambda-identity)")
    kind, _, rest = str(spec).partition(":")
    if kind == "diag":
        val = float(rest)
        if val == 0.0:
            raise ValidationError("diag:VALUE needs VALUE != 0")
        lam = AdmissibleLambda(0.0, val, 0.0, 0.0, 1.0 / val)
    elif kind == "electrostatic":
        lam = electrostatic_lambda(float(rest))
    elif kind == "params":
        vals = _parse_list(rest, float)
        if len(vals) != 5:
            raise ValidationError("params: needs phi,alpha,beta,gamma,delta")
        lam = AdmissibleLambda(*vals)
    else:
        raise ValidationError(f"unknown lambda spec {spec!r}")
    return check_admissible(lam.matrix())


def _parse_profile(cfg: dict) -> ko.PotentialProfile:
    spec = str(cfg.get("profile") or "indicator01")
    scale = float(cfg.get("scale") or 1.0)
    kind, _, rest = spec.partition(":")
    if kind == "indicator01":
        return ko.indicator01(scale)
    if kind == "gaussian":
        vals = _parse_list(rest, float) if rest else [0.5, 0.15, 3.0]
        if len(vals) != 3:
            raise ValidationError("gaussian: needs center,width,cutoff")
        return ko.truncated_gaussian(*vals, scale=scale)
    if kind == "table":
        prof = ko.profile_from_csv(rest)
        if scale != 1.0:
            raise ValidationError("--scale is not supported for table profiles")
        return prof
    raise ValidationError(f"unknown profile spec {spec!r}")


def _merge(defaults: dict, args: argparse.Namespace) -> dict:
    cfg = dict(defaults)
    path = getattr(args, "config", None)
    if path:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config file {path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ValidationError("config file must hold a JSON object")
        cfg.update(loaded)
    for key, val in vars(args).items():
        if key in ("command", "config"):
            continue
        if val is not None:
            cfg[key] = val
    return cfg


def _write(cfg: dict, text: str) -> None:
    out = cfg.get("out")
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _mat_json(m: np.ndarray) -> list:
    return [[[float(m[r, c].real), float(m[r, c].imag)] for c in range(2)] for r in range(2)]


def _lambda_json(lam: AdmissibleLambda) -> dict:
    return {
        "phi": float(lam.phi),
        "alpha": float(lam.alpha),
        "beta": float(lam.beta),
        "gamma": float(lam.gamma),
        "delta": float(lam.delta),
    }


def _gen_json(gen: GeneratorA, sel: BranchSelector | None = None) -> dict:
    rec = {
        "a_re": float(gen.a.real),
        "a_im": float(gen.a.imag),
        "b": float(gen.b),
        "c": float(gen.c),
        "class": gen.klass,
        "nu_squared": float(gen.nu.nu_squared),
    }
    if sel is not None:
        rec["branch"] = sel.n
        rec["m"] = sel.m
        if sel.family_param is not None:
            rec["family_param"] = sel.family_param
    return rec


def _json_dump(record: dict) -> str:
    return json.dumps(record, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

_CONVERT_DEFAULTS = {"branch": 0, "m": 0, "family_param": None, "direction": None}


def cmd_convert(cfg: dict) -> int:
    sel = BranchSelector(
        n=int(cfg.get("branch") or 0),
        m=int(cfg.get("m") or 0),
        family_param=cfg.get("family_param"),
    )
    direction = cfg.get("direction")
    if direction is None:
        direction = "exp" if cfg.get("a") else "log"
    record: dict = {"command": "convert", "direction": direction}
    if cfg.get("seed") is not None:
        record["seed"] = int(cfg["seed"])

    if direction == "log":
        lam = _parse_lambda(cfg)
        gen = log_branches(lam, sel)
        resid = float(np.max(np.abs(exp2(gen.matrix()) - lam.matrix())))
        record["lambda"] = _lambda_json(lam)
        record["a"] = _gen_json(gen, sel)
        record["roundtrip_residual"] = resid
    elif direction == "exp":
        if not cfg.get("a"):
            raise ValidationError("--direction exp needs --a")
        gen = _parse_generator(cfg["a"])
        lam = check_admissible(exp2(gen.matrix()))
        resid = float(np.max(np.abs(lam.matrix() - exp2(gen.matrix()))))
        record["a"] = _gen_json(gen, sel)
        record["lambda"] = _lambda_json(lam)
        record["roundtrip_residual"] = resid
    else:
        raise ValidationError(f"unknown direction {direction!r}")
    _write(cfg, _json_dump(record))
    return 0


_ETA_DEFAULTS = {"profile": "indicator01", "scale": 1.0, "n_grid": 2048, "nu": "0.5,1,2"}


def cmd_eta(cfg: dict) -> int:
    prof = _parse_profile(cfg)
    grid = ko.grid_for(prof, int(cfg["n_grid"]))
    nus = _parse_list(cfg["nu"], _parse_complex)
    lines = ["nu,eta_numeric,eta_closed,abs_err,odd_term"]
    for nu in nus:
        try:
            eta_num, odd = ko.eta_odd_pair(prof, nu, grid)
            eta_cl = ko.eta_closed(nu, prof.integral_c)
            lines.append(
                ",".join(
                    [
                        _fmt_complex(nu),
                        _fmt(eta_num.real),
                        _fmt(eta_cl.real),
                        _fmt(abs(eta_num - eta_cl)),
                        _fmt(abs(odd)),
                    ]
                )
            )
        except (NearPole, PoleOfTan):
            lines.append(
                ",".join([_fmt_complex(nu)] + ["NEAR_POLE"] * 4)
            )
    _write(cfg, "\n".join(lines) + "\n")
    return 0


_SPECTRUM_DEFAULTS = {"profile": "indicator01", "scale": 1.0, "n_grid": 4096, "pairs": 2}


def cmd_spectrum(cfg: dict) -> int:
    prof = _parse_profile(cfg)
    grid = ko.grid_for(prof, int(cfg["n_grid"]))
    count = 2 * int(cfg["pairs"])
    vals = ko.k_spectrum(ko.build_k(prof, grid), count)
    targets = ko.k_eigenvalue_targets(prof.integral_c, count)
    lines = ["index,eig_re,eig_im,target,abs_err"]
    for i, (val, tgt) in enumerate(zip(vals, targets)):
        lines.append(
            ",".join(
                [str(i), _fmt(val.real), _fmt(val.imag), _fmt(tgt), _fmt(abs(val - tgt))]
            )
        )
    _write(cfg, "\n".join(lines) + "\n")
    return 0


_CONVERGE_DEFAULTS = {
    "profile": "indicator01",
    "scale": 1.0,
    "z": "1j",
    "eps": "0.5,0.25,0.125,0.0625,0.03125,0.015625",
    "box_l": 10.0,
    "n_box": 256,
    "n_grid": 1024,
}


def cmd_converge(cfg: dict) -> int:
    if not cfg.get("a"):
        raise ValidationError("converge needs --a")
    gen = _parse_generator(cfg["a"])
    prof = _parse_profile(cfg)
    z = SpectralPoint(_parse_complex(cfg["z"]))
    eps_list = _parse_list(cfg["eps"], float)
    workers = int(os.environ.get("DIRAC_POINT_THREADS", "1"))
    rows = ar.converge_table(
        z,
        gen,
        prof,
        eps_list,
        box_l=float(cfg["box_l"]),
        n_box=int(cfg["n_box"]),
        n_grid=int(cfg["n_grid"]),
        max_workers=max(1, workers),
    )
    lines = ["eps,hs_distance,box_L,n_box,N_grid,z_re,z_im"]
    for row in rows:
        dist = row.error if row.error else _fmt(row.hs_distance)
        lines.append(
            ",".join(
                [
                    _fmt(row.eps),
                    dist,
                    _fmt(row.box_half_width),
                    str(row.n_box),
                    str(row.n_grid),
                    _fmt(row.z.real),
                    _fmt(row.z.imag),
                ]
            )
        )
    _write(cfg, "\n".join(lines) + "\n")
    return 0


_RENORM_DEFAULTS = {"t_grid": "0,0.5,1,1.5,2"}


def cmd_renorm(cfg: dict) -> int:
    if not cfg.get("a"):
        raise ValidationError("renorm needs --a")
    gen = _parse_generator(cfg["a"])
    w = w_matrix(gen)
    mult, resid = scalar_multiple(gen, w)
    coupling = []
    for t in _parse_list(cfg["t_grid"], float):
        entry: dict = {"t": float(t)}
        try:
            entry["scale"] = coupling_scale(gen, t)
        except PoleOfTan:
            entry["error"] = "PoleOfTan"
        coupling.append(entry)
    record = {
        "command": "renorm",
        "a": _gen_json(gen),
        "w_matrix": _mat_json(w),
        "scalar_multiple": [float(mult.real), float(mult.imag)],
        "multiple_residual": float(resid),
        "coupling": coupling,
    }
    if cfg.get("seed") is not None:
        record["seed"] = int(cfg["seed"])
    _write(cfg, _json_dump(record))
    return 0


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--seed", type=int, help="recorded in JSON outputs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dirac-point",
        description="Dirac point-interaction numerics: conversions, couplings, "
        "spectra, and norm-resolvent convergence sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert between Lambda and A")
    p.add_argument("--lambda", dest="lam", help="diag:V | electrostatic:ETA | params:phi,alpha,beta,gamma,delta")
    p.add_argument("--lambda-identity", action="store_true", default=None, help="Lambda = e^{i phi} I")
    p.add_argument("--phi", type=float, help="phase for --lambda-identity")
    p.add_argument("--a", help="generator 'a,b,c' (real a) or 'a_re,a_im,b,c'")
    p.add_argument("--direction", choices=["log", "exp"])
    p.add_argument("--branch", type=int, help="branch integer n (Im a = phi + n pi)")
    p.add_argument("--m", type=int, help="pi-multiple family index")
    p.add_argument("--family-param", dest="family_param", type=float)
    _add_common(p)

    p = sub.add_parser("eta", help="coupling eta: Nystrom vs closed form")
    p.add_argument("--profile", help="indicator01 | gaussian:c,w,k | table:PATH")
    p.add_argument("--scale", type=float)
    p.add_argument("--n-grid", dest="n_grid", type=int)
    p.add_argument("--nu", help="comma list of nu values (complex accepted)")
    _add_common(p)

    p = sub.add_parser("spectrum", help="largest Nystrom eigenvalues of K")
    p.add_argument("--profile")
    p.add_argument("--scale", type=float)
    p.add_argument("--n-grid", dest="n_grid", type=int)
    p.add_argument("--pairs", type=int, help="emit the top 2*pairs eigenvalues")
    _add_common(p)

    p = sub.add_parser("converge", help="norm-resolvent distance sweep over eps")
    p.add_argument("--a", help="generator 'a,b,c' or 'a_re,a_im,b,c'")
    p.add_argument("--profile")
    p.add_argument("--scale", type=float)
    p.add_argument("--z")
    p.add_argument("--eps", help="strictly decreasing comma list")
    p.add_argument("--box-l", dest="box_l", type=float)
    p.add_argument("--n-box", dest="n_box", type=int)
    p.add_argument("--n-grid", dest="n_grid", type=int)
    _add_common(p)

    p = sub.add_parser("renorm", help="W^A and the coupling scaling law")
    p.add_argument("--a", help="generator 'a,b,c' or 'a_re,a_im,b,c'")
    p.add_argument("--t-grid", dest="t_grid", help="comma list of potential scales t")
    _add_common(p)
    return parser


_DISPATCH = {
    "convert": (cmd_convert, _CONVERT_DEFAULTS),
    "eta": (cmd_eta, _ETA_DEFAULTS),
    "spectrum": (cmd_spectrum, _SPECTRUM_DEFAULTS),
    "converge": (cmd_converge, _CONVERGE_DEFAULTS),
    "renorm": (cmd_renorm, _RENORM_DEFAULTS),
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    func, defaults = _DISPATCH[args.command]
    try:
        cfg = _merge(defaults, args)
        return func(cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
