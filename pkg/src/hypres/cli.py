"""Command line front end: ``hypres {resonances,band-plot,verify,weyl,constants}``.

Exit codes: 0 success, 1 verification failure, 2 usage or schema error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Optional

from .lorentz_core import DomainError
from .resonance_spectrum import (Enumeration, SpectrumEntry, Window, c00, enumerate_resonances,
                                 exceptional_points, m_loop_bound, pairing_constant, synthetic_spectrum, weyl)

__all__ = ["main", "SchemaError", "load_spectrum", "parse_spectrum", "records", "encode_json", "encode_csv",
           "decode_output", "band_plot_data", "parse_complex", "format_number"]

CSV_COLUMNS = ("re", "im", "mult", "band_m", "ell", "source_sigma", "flags")
EXCLUDED_COLUMNS = ("re", "im", "mult", "band_m", "ell", "source_sigma", "reason")


class SchemaError(ValueError):
    """Input file does not match the spectrum schema."""


# ---------------------------------------------------------------------------
# input
# ---------------------------------------------------------------------------

def _int_field(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(f"{where}: expected an integer, got {v!r}")
    return v


def _real_field(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SchemaError(f"{where}: expected a finite number, got {v!r}")
    return float(v)


def parse_spectrum(text: str, source: str = "<input>") -> tuple[int, Optional[float], list[SpectrumEntry]]:
    """Parse ``{"n": int, "volume": real?, "entries": [{"m", "sigma", "mult"}]}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{source}:{e.lineno}:{e.colno}: invalid JSON: {e.msg}") from None
    if not isinstance(doc, dict):
        raise SchemaError(f"{source}: top level must be an object")
    unknown = set(doc) - {"n", "volume", "entries"}
    if unknown:
        raise SchemaError(f"{source}: unknown field(s) {sorted(unknown)}")
    if "n" not in doc:
        raise SchemaError(f"{source}: missing field 'n'")
    n = _int_field(doc["n"], f"{source}: n")
    if n < 1:
        raise SchemaError(f"{source}: n: must be >= 1")
    volume = doc.get("volume")
    if volume is not None:
        volume = _real_field(volume, f"{source}: volume")
    entries = doc.get("entries", [])
    if not isinstance(entries, list):
        raise SchemaError(f"{source}: entries: expected a list")
    lines = _entry_lines(text, len(entries))
    out = []
    for i, e in enumerate(entries):
        where = f"{source}:{lines[i]}: entries[{i}]" if lines[i] else f"{source}: entries[{i}]"
        if not isinstance(e, dict):
            raise SchemaError(f"{where}: expected an object")
        extra = set(e) - {"m", "sigma", "mult"}
        if extra:
            raise SchemaError(f"{where}: unknown field(s) {sorted(extra)}")
        for k in ("m", "sigma"):
            if k not in e:
                raise SchemaError(f"{where}: missing field '{k}'")
        m = _int_field(e["m"], f"{where}.m")
        sigma = _real_field(e["sigma"], f"{where}.sigma")
        mult = _int_field(e.get("mult", 1), f"{where}.mult")
        entry = SpectrumEntry(m, sigma, mult)
        try:
            entry.validate(n)
        except DomainError as err:
            raise SchemaError(f"{where}: {err}") from None
        out.append(entry)
    return n, volume, out


def _entry_lines(text: str, count: int) -> list[Optional[int]]:
    """Best-effort line numbers of the entry objects, for diagnostics."""
    start = text.find('"entries"')
    if start < 0:
        return [None] * count
    lines, depth, line = [], 0, text.count("\n", 0, start) + 1
    for ch in text[start:]:
        if ch == "\n":
            line += 1
        elif ch == "{":
            if depth == 0:
                lines.append(line)
            depth += 1
        elif ch == "}":
            depth -= 1
        elif ch == "]" and depth == 0:
            break
    return (lines + [None] * count)[:count]


def load_spectrum(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise SchemaError(f"{path}: {e.strerror}") from None
    return parse_spectrum(text, path)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def format_number(x: float) -> str:
    """Decimal with 17 significant digits; integral values keep a trailing '.0'."""
    x = float(x)
    if x == 0:
        return "0.0"
    s = format(x, ".17g")
    if all(c in "-0123456789" for c in s):
        s += ".0"
    return s


def _emit(obj, indent: int = 0) -> str:
    pad, pad1 = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = ",\n".join(f"{pad1}{json.dumps(k)}: {_emit(v, indent + 1)}" for k, v in obj.items())
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_emit(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad1 + _emit(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError("non-finite float in output")
        return format_number(obj)
    raise TypeError(f"cannot encode {type(obj).__name__}")


def records(enum: Enumeration) -> tuple[list[dict], list[dict]]:
    res = [{"re": r.lam.real, "im": r.lam.imag, "mult": r.mult, "band_m": r.m, "ell": r.ell,
            "source_sigma": float(r.source_sigma), "flags": sorted(r.flags)} for r in enum.resonances]
    exc = [{"re": r.lam.real, "im": r.lam.imag, "mult": r.mult, "band_m": r.m, "ell": r.ell,
            "source_sigma": float(r.source_sigma), "reason": r.reason} for r in enum.excluded]
    return res, exc


def encode_json(enum: Enumeration) -> str:
    res, exc = records(enum)
    w = enum.window
    doc = {"n": enum.n, "window": {"re_min": float(w.re_min), "re_max": float(w.re_max), "im_max": float(w.im_max)},
           "resonances": res, "excluded": exc}
    return _emit(doc) + "\n"


def encode_csv(enum: Enumeration) -> str:
    res, exc = records(enum)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(CSV_COLUMNS)
    for r in res:
        wr.writerow([format_number(r["re"]), format_number(r["im"]), r["mult"], r["band_m"], r["ell"],
                     format_number(r["source_sigma"]), "|".join(r["flags"])])
    buf.write("\n# excluded\n")
    wr.writerow(EXCLUDED_COLUMNS)
    for r in exc:
        wr.writerow([format_number(r["re"]), format_number(r["im"]), r["mult"], r["band_m"], r["ell"],
                     format_number(r["source_sigma"]), r["reason"]])
    return buf.getvalue()


def decode_output(text: str, fmt: str) -> tuple[list[dict], list[dict]]:
    """Inverse of the encoders: (resonance records, excluded records)."""
    if fmt == "json":
        doc = json.loads(text)
        return doc["resonances"], doc["excluded"]
    main, _, tail = text.partition("\n# excluded\n")

    def rows(block, cols, last):
        rd = list(csv.reader(io.StringIO(block)))
        out = []
        for row in rd[1:]:
            if not row:
                continue
            d = {"re": float(row[0]), "im": float(row[1]), "mult": int(row[2]), "band_m": int(row[3]),
                 "ell": int(row[4]), "source_sigma": float(row[5])}
            d[last] = (row[6].split("|") if row[6] else []) if last == "flags" else row[6]
            out.append(d)
        return out

    return rows(main, CSV_COLUMNS, "flags"), rows(tail, EXCLUDED_COLUMNS, "reason")


def band_plot_data(n: int, enum: Enumeration) -> dict:
    """Points, vertical band lines Re = -n/2-m and exceptional markers inside the window."""
    w = enum.window
    pts = [{"re": r.lam.real, "im": r.lam.imag, "m": r.m, "ell": r.ell, "mult": r.mult} for r in enum.resonances]
    lines = []
    for m in range(0, m_loop_bound(n, w) + 1):
        x = -n / 2 - m
        if w.re_min <= x <= w.re_max:
            lines.append({"re": x, "m": m})
    exc = exceptional_points(n)
    marks, k = [], 0
    while exc.start - k / 2 >= w.re_min:
        x = exc.start - k / 2
        if x <= w.re_max:
            marks.append({"re": x, "im": 0.0})
        k += 1
    return {"n": n, "window": {"re_min": float(w.re_min), "re_max": float(w.re_max), "im_max": float(w.im_max)},
            "points": pts, "vertical_lines": lines, "exceptional_points": marks}


def _write(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _window(a) -> Window:
    return Window(a.re_min, a.re_max, a.im_max)


def _spectrum_from_args(a):
    if a.input is not None:
        return load_spectrum(a.input)
    if getattr(a, "synthetic", None) is not None:
        if a.n is None:
            raise SchemaError("--synthetic needs --n")
        return a.n, None, synthetic_spectrum(a.n, a.synthetic, a.seed)
    raise SchemaError("one of --input or --synthetic is required")


def cmd_resonances(a) -> int:
    n, _, spec = _spectrum_from_args(a)
    enum = enumerate_resonances(n, spec, _window(a))
    _write(encode_csv(enum) if a.format == "csv" else encode_json(enum), a.out)
    return 0


def cmd_band_plot(a) -> int:
    n, _, spec = _spectrum_from_args(a)
    enum = enumerate_resonances(n, spec, _window(a))
    _write(_emit(band_plot_data(n, enum)) + "\n", a.out)
    return 0


def _parse_tols(items) -> dict:
    from .verify import DEFAULT_TOLS

    out = {}
    for it in items or []:
        key, sep, val = it.partition("=")
        if not sep:
            key, val = "all", key
        if key != "all" and key not in DEFAULT_TOLS:
            raise SchemaError(f"--tol: unknown tolerance {key!r}; known: {', '.join(sorted(DEFAULT_TOLS))}")
        try:
            out[key] = float(val)
        except ValueError:
            raise SchemaError(f"--tol: {val!r} is not a number") from None
    return out


def cmd_verify(a) -> int:
    from .verify import SUITES, run_suite

    names = list(SUITES) if a.suite == "all" else [a.suite]
    tols = _parse_tols(a.tol)
    kw_for = {
        "lie": {"ns": (a.n,)} if a.n else {},
        "boundary": {"ns": (a.n,)} if a.n else {},
        "tensor": {"m_max": a.m} if a.m is not None else {},
        "transport": {"ns": (a.n,)} if a.n else {},
        "horocyclic": {k: v for k, v in (("n", a.n), ("m", a.m)) if v is not None},
        "poisson": {k: v for k, v in (("n", a.n), ("m", a.m)) if v is not None},
    }
    reports = []
    for name in names:
        rep = run_suite(name, seed=a.seed, tols=tols, **kw_for.get(name, {}))
        reports.append(rep)
        print("\n".join(rep.lines()), flush=True)
    ok = all(r.passed for r in reports)
    print(f"overall: {'PASS' if ok else 'FAIL'}")
    if a.out:
        _write(json.dumps([r.as_dict() for r in reports], indent=2) + "\n", a.out)
    return 0 if ok else 1


def cmd_weyl(a) -> int:
    if a.n is None or a.m is None or a.R is None or a.volume is None:
        raise SchemaError("weyl needs --n, --m, --R and --volume")
    w = weyl(a.n, a.m, a.R, a.volume)
    print(f"n={w.n} m={w.m} R={format_number(w.R)} volume={format_number(w.volume)}")
    print(f"c0={w.c0:.15g}")
    print(f"c1={w.c1}")
    print(f"c2={w.c2}")
    print(f"band_coefficient={w.band_coefficient:.15g}")
    print(f"eig_coefficient={w.eig_coefficient:.15g}")
    print(f"leading_band_count={w.leading_band_count:.15g}")
    print(f"leading_eig_count={w.leading_eig_count:.15g}")
    return 0


def parse_complex(s: str) -> complex:
    t = s.strip().replace(" ", "").replace("I", "j").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise SchemaError(f"cannot parse {s!r} as a complex number") from None


def _fmt(z) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.15g}"
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real:.15g}{sign}{abs(z.imag):.15g}i"


def _need(a, *names):
    miss = [f"--{k.replace('lam', 'lambda')}" for k in names if getattr(a, k) is None]
    if miss:
        raise SchemaError(f"constants --name {a.name} needs {', '.join(miss)}")


def cmd_constants(a) -> int:
    from .poisson_operator import boundary_leading_constant, indicial_roots
    from .resonance_spectrum import analytic_constants

    name = a.name
    lam = parse_complex(a.lam) if a.lam is not None else None
    if name == "c00":
        _need(a, "n", "lam")
        print(f"c00(n={a.n}, lambda={_fmt(lam)}) = {_fmt(c00(a.n, lam))}")
    elif name == "pairing":
        _need(a, "n", "m", "ell", "lam")
        print(f"c_ml(n={a.n}, m={a.m}, l={a.ell}, lambda={_fmt(lam)}) = "
              f"{_fmt(pairing_constant(a.n, a.m, a.ell, lam))}")
    elif name == "indicial":
        _need(a, "n", "m", "sigma")
        roots = sorted({(round(r.lam.real, 12) + 0.0, round(r.lam.imag, 12) + 0.0)
                        for r in indicial_roots(a.n, a.m, a.sigma)})
        print("{" + ", ".join(_fmt(complex(*r)) for r in roots) + "}")
    elif name == "boundary":
        _need(a, "n", "m", "lam")
        print(f"boundary leading constant(n={a.n}, m={a.m}, lambda={_fmt(lam)}) = "
              f"{_fmt(boundary_leading_constant(a.n, a.m, lam))}")
    elif name in ("hadamard", "sphere", "twist", "main"):
        p = {"hadamard": dict(alpha=a.alpha, beta=a.beta, chi0=a.chi0),
             "sphere": dict(n=a.n, ell=a.ell),
             "twist": dict(n=a.n, m=a.m, r=a.r, seed=a.seed),
             "main": dict(n=a.n, lam=lam, m=a.m if a.m is not None else 0)}[name]
        missing = [k for k, v in p.items() if v is None]
        if missing:
            raise SchemaError(f"constants --name {name} needs " +
                              ", ".join("--" + ("lambda" if k == "lam" else k) for k in missing))
        if name == "hadamard":
            p["alpha"], p["beta"] = parse_complex(p["alpha"]), parse_complex(p["beta"])
        rep = analytic_constants(name, oracle=not a.no_oracle, **p)
        print(f"{name} = {_fmt(rep.value)}")
        if rep.oracle is not None:
            print(f"oracle = {_fmt(rep.oracle)}")
            print(f"deviation = {rep.deviation:.3e}")
        if rep.divergent:
            print("note: parameters in the divergent range; value is the regularised constant")
    else:
        raise SchemaError(f"unknown constant {name!r}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    from .verify import DEFAULT_TOLS, SUITES

    p = argparse.ArgumentParser(prog="hypres", description="Resonance enumeration and verification harness.")
    sub = p.add_subparsers(dest="command", required=True)

    def spectrum_args(sp):
        sp.add_argument("--input", help="spectrum JSON file {n, volume?, entries:[{m, sigma, mult}]}")
        sp.add_argument("--synthetic", type=int, metavar="COUNT",
                        help="use a seeded synthetic spectrum with COUNT entries per tensor order")
        sp.add_argument("--n", type=int, help="dimension for --synthetic")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--re-min", type=float, default=-5.0)
        sp.add_argument("--re-max", type=float, default=0.0)
        sp.add_argument("--im-max", type=float, default=10.0)

    r = sub.add_parser("resonances", help="enumerate resonances from Laplace eigenvalues")
    spectrum_args(r)
    r.add_argument("--format", choices=("json", "csv"), default="json")
    r.set_defaults(func=cmd_resonances)

    b = sub.add_parser("band-plot", help="emit plot data for the band structure")
    spectrum_args(b)
    b.set_defaults(func=cmd_band_plot)

    tol_help = "; ".join(f"{k}={v:g}" for k, v in DEFAULT_TOLS.items())
    v = sub.add_parser("verify", help="run verification suites",
                       epilog=f"default tolerances: {tol_help}")
    v.add_argument("--suite", choices=("all", *SUITES), default="all")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", action="append", metavar="[KEY=]VALUE",
                   help="override a tolerance (repeatable); a bare value overrides all")
    v.add_argument("--n", type=int)
    v.add_argument("--m", type=int)
    v.add_argument("--out", help="write the JSON report here")
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("weyl", help="Weyl-law constants and leading counts")
    w.add_argument("--n", type=int)
    w.add_argument("--m", type=int)
    w.add_argument("--R", type=float)
    w.add_argument("--volume", type=float)
    w.set_defaults(func=cmd_weyl)

    c = sub.add_parser("constants", help="evaluate a named constant (15 significant digits)")
    c.add_argument("--name", required=True,
                   choices=("c00", "pairing", "indicial", "boundary", "hadamard", "sphere", "twist", "main"))
    c.add_argument("--n", type=int)
    c.add_argument("--m", type=int)
    c.add_argument("--ell", type=int)
    c.add_argument("--lambda", dest="lam")
    c.add_argument("--sigma", type=float)
    c.add_argument("--alpha")
    c.add_argument("--beta")
    c.add_argument("--chi0", type=float, default=1.0)
    c.add_argument("--r", type=float)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--no-oracle", action="store_true", help="skip the numerical oracle")
    c.set_defaults(func=cmd_constants)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (SchemaError, DomainError, ArithmeticError, ValueError) as e:
        print(f"hypres {args.command}: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
