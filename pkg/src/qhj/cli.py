"""Command-line interface: ``qhj spectrum|wavefunction|residues|verify|classify``.

Exit codes: 0 success, 1 bad arguments, 2 computation error, 3 the verify
report contains a mismatch.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys

from . import engine
from .errors import InvalidPotential, QHJError
from .potentials import (
    GeneralizedMorse,
    PoschlTeller,
    classify_symmetry,
    from_json,
    pt_defect,
    reality_condition,
    to_json,
)
from .verification import GridOracleConfig, adjudicate, default_grid, cpair

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_MISMATCH = 0, 1, 2, 3

_COMPLEX_RE = re.compile(r"^\s*\(?\s*(.*?)\s*\)?\s*$")


def parse_complex(text: str) -> complex:
    """Accept '1.5', '2i', '-1+2i', '3-4j', 'i', '-i'."""
    s = _COMPLEX_RE.match(text).group(1).replace(" ", "").replace("i", "j")
    if s in ("j", "+j", "-j"):
        s = s.replace("j", "1j")
    s = re.sub(r"(?<=[+-])j", "1j", s)
    try:
        return complex(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_potential_args(sp: argparse.ArgumentParser):
    g = sp.add_argument_group("potential")
    g.add_argument("--spec", help="JSON potential spec file ('-' for stdin)")
    g.add_argument("--kind", choices=("morse", "poschl_teller"))
    for name in ("v1", "v2", "v0", "q", "alpha"):
        g.add_argument(f"--{name}", type=parse_complex)


def _add_grid_args(sp: argparse.ArgumentParser):
    sp.add_argument("--x-min", type=float)
    sp.add_argument("--x-max", type=float)
    sp.add_argument("--num-points", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qhj", description="Quantum Hamilton-Jacobi spectra of Morse and Poschl-Teller potentials")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("spectrum", help="pipeline and printed energies")
    _add_potential_args(sp)
    sp.add_argument("--n-max", type=int, default=3)
    sp.add_argument("--policy", choices=engine.POLICIES, default="auto")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    _add_grid_args(sp)

    sp = sub.add_parser("wavefunction", help="sample psi on a grid")
    _add_potential_args(sp)
    sp.add_argument("--n", type=int, default=0)
    sp.add_argument("--policy", choices=engine.POLICIES, default="auto")
    sp.add_argument("--format", choices=("json", "csv"), default="csv")
    _add_grid_args(sp)

    sp = sub.add_parser("residues", help="balance residues at the selected energy")
    _add_potential_args(sp)
    sp.add_argument("--n-max", type=int, default=0)
    sp.add_argument("--n", type=int, help="a single level instead of 0..n-max")
    sp.add_argument("--policy", choices=engine.POLICIES, default="auto")

    sp = sub.add_parser("verify", help="adjudication report")
    _add_potential_args(sp)
    sp.add_argument("--n-max", type=int, default=3)
    sp.add_argument("--policy", choices=engine.POLICIES, default="auto")
    sp.add_argument("--out", help="write the JSON report here instead of stdout")
    _add_grid_args(sp)

    sp = sub.add_parser("classify", help="symmetry class of the potential")
    _add_potential_args(sp)
    sp.add_argument("--emit-spec", action="store_true", help="print the JSON potential spec")
    return ap


def potential_from_args(args, parser) -> GeneralizedMorse | PoschlTeller:
    if args.spec:
        text = sys.stdin.read() if args.spec == "-" else open(args.spec).read()
        try:
            return from_json(json.loads(text))
        except (ValueError, TypeError, InvalidPotential) as exc:
            parser.error(f"bad --spec: {exc}")
    if args.kind is None:
        parser.error("give --spec or --kind")
    need = ("v1", "v2", "alpha") if args.kind == "morse" else ("v0", "q", "alpha")
    extra = [n for n in ("v1", "v2", "v0", "q") if n not in need and getattr(args, n) is not None]
    missing = [n for n in need if getattr(args, n) is None]
    if missing:
        parser.error(f"--kind {args.kind} needs " + ", ".join(f"--{n}" for n in missing))
    if extra:
        parser.error(f"--kind {args.kind} does not take " + ", ".join(f"--{n}" for n in extra))
    vals = [getattr(args, n) for n in need]
    try:
        return GeneralizedMorse(*vals) if args.kind == "morse" else PoschlTeller(*vals)
    except InvalidPotential as exc:
        parser.error(str(exc))


def grid_from_args(args, p, parser) -> GridOracleConfig:
    base = default_grid(p)
    x_min = base.x_min if args.x_min is None else args.x_min
    x_max = base.x_max if args.x_max is None else args.x_max
    num = base.num_points if args.num_points is None else args.num_points
    try:
        return GridOracleConfig(x_min, x_max, num)
    except ValueError as exc:
        parser.error(str(exc))


def _write(text: str, out: str | None = None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _spectrum_rows(p, r, n_max, policy, cfg):
    rows = []
    for n in range(n_max + 1):
        for fid, params in engine.applicable_formulas(p).items():
            for lv in engine.printed_energy(fid, params, n):
                rows.append((n, fid + lv.branch_record.get("sign", ""), lv.energy, None))
        try:
            for lv in engine.quantize(r, n, policy, cfg):
                rows.append((n, "pipeline", lv.energy, lv.branch_record))
        except QHJError as exc:
            rows.append((n, "pipeline", None, {"error": f"{type(exc).__name__}: {exc}"}))
    return rows


def cmd_spectrum(args, parser) -> int:
    p = potential_from_args(args, parser)
    cfg = grid_from_args(args, p, parser)
    r = engine.transform(p)
    rows = _spectrum_rows(p, r, args.n_max, args.policy, cfg)
    failed = [rec["error"] for _, src, E, rec in rows if src == "pipeline" and E is None]
    if len(failed) == args.n_max + 1:
        sys.stderr.write(f"qhj: {failed[0]}\n")
        return EXIT_COMPUTE
    if args.format == "csv":
        out = [(n, src, E.real + 0.0, E.imag + 0.0) for n, src, E, _ in rows if E is not None]
        _write(_csv(out, ("n", "source", "re", "im")))
    else:
        doc = {"potential": to_json(p), "policy": engine.resolve_policy(r, args.policy),
               "levels": [{"n": n, "source": src, "energy": cpair(E), "branch": rec}
                          for n, src, E, rec in rows]}
        _write(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def cmd_wavefunction(args, parser) -> int:
    p = potential_from_args(args, parser)
    cfg = grid_from_args(args, p, parser)
    r = engine.transform(p)
    lv = engine.quantize(r, args.n, args.policy, cfg)[0]
    ef = engine.build_eigenfunction(r, lv)
    xs = cfg.x
    psi = engine.sample_eigenfunction(ef, xs)
    if args.format == "csv":
        rows = [(float(x), float(z.real), float(z.imag)) for x, z in zip(xs, psi)]
        _write(_csv(rows, ("x", "re", "im")))
    else:
        doc = {"potential": to_json(p), "n": args.n, "energy": cpair(lv.energy),
               "x": xs.tolist(), "psi": [cpair(z) for z in psi]}
        _write(json.dumps(doc) + "\n")
    return EXIT_OK


def _residue_record(p, r, n, policy) -> dict:
    lv = engine.quantize(r, n, policy)[0]
    rs = engine.pole_residues(r, lv.energy)
    doc = {
        "n": n,
        "energy": cpair(lv.energy),
        "branch": lv.branch_record,
        "selected": {k: cpair(v) for k, v in lv.residues.items()},
        "balance_roots": {
            "b1": [cpair(z) for z in rs.b1_pair],
            "lambda": [cpair(z) for z in rs.lambda_pair],
            "a0": [cpair(z) for z in rs.a0_pair],
        },
        "quantization_defect": cpair(engine.quantization_defect(r, lv)),
        "printed": {k: [cpair(z) for z in v] for k, v in engine.printed_residues(p, lv.energy).items()},
    }
    if rs.b1p_pair is not None:
        doc["balance_roots"]["b1p"] = [cpair(z) for z in rs.b1p_pair]
        doc["balance_roots"]["b1pp"] = [cpair(z) for z in rs.b1pp_pair]
    return doc


def cmd_residues(args, parser) -> int:
    p = potential_from_args(args, parser)
    r = engine.transform(p)
    ns = [args.n] if args.n is not None else range(args.n_max + 1)
    levels, errors = [], []
    for n in ns:
        try:
            levels.append(_residue_record(p, r, n, args.policy))
        except QHJError as exc:
            errors.append(exc)
            levels.append({"n": n, "error": f"{type(exc).__name__}: {exc}"})
    if len(errors) == len(levels):
        raise errors[0]
    _write(json.dumps({"potential": to_json(p), "levels": levels}, indent=2) + "\n")
    return EXIT_OK


def cmd_verify(args, parser) -> int:
    p = potential_from_args(args, parser)
    cfg = grid_from_args(args, p, parser)
    report = adjudicate(p, args.n_max, cfg, args.policy)
    _write(json.dumps(report.to_json(), indent=2) + "\n", args.out)
    return EXIT_MISMATCH if report.has_mismatch() else EXIT_OK


def cmd_classify(args, parser) -> int:
    p = potential_from_args(args, parser)
    if args.emit_spec:
        _write(json.dumps(to_json(p)) + "\n")
        return EXIT_OK
    doc = {"potential": to_json(p), "symmetry": classify_symmetry(p).value, "pt_defect": pt_defect(p)}
    if isinstance(p, PoschlTeller):
        doc["reality_condition"] = reality_condition(p.v0, p.q)
    _write(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "wavefunction": cmd_wavefunction,
    "residues": cmd_residues,
    "verify": cmd_verify,
    "classify": cmd_classify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    try:
        return COMMANDS[args.command](args, sub)
    except QHJError as exc:
        sys.stderr.write(f"qhj: {type(exc).__name__}: {exc}\n")
        return EXIT_COMPUTE
    except OSError as exc:
        sys.stderr.write(f"qhj: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
