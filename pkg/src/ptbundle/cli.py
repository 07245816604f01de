"""Command-line front end for the certification pipeline.

Subcommands expose the pipeline stages separately: trace solving,
holonomy reconstruction, the monodromy action with its characteristic
polynomials, the generic twisted Alexander engine for presentation
files, and the one-shot certifier.  Every stochastic choice is pinned
by --seed, so identical invocations produce identical output bytes.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .alexander import (
    RingRep,
    monodromy_action,
    relative_char_poly,
    twisted_alexander,
)
from .certify import (
    ALL_REPS,
    INCONCLUSIVE,
    CertificateEvidence,
    certify,
    report_json,
    report_text,
)
from .holonomy import build_solutions, holonomy_residuals
from .numeric import (
    LaurentPoly,
    Tolerances,
    char_poly,
    integer_round,
    normalize_unit,
    root_multiplicity,
)
from .presentation import (
    is_hyperbolic,
    load_presentation,
    monodromy_endo,
    monodromy_trace,
    parse_monodromy,
)


# ---------------------------------------------------------------------------
# Factored display of integer polynomials.
# ---------------------------------------------------------------------------


def deflate_at_one(coeffs: Sequence[int]) -> tuple[int, list[int]]:
    """Exact integer division by (t - 1) for as long as it stays exact."""
    count = 0
    rest = list(coeffs)
    while len(rest) > 1:
        quot = [0] * (len(rest) - 1)
        acc = 0
        for i in range(len(rest) - 1, 0, -1):
            acc = rest[i] + acc
            quot[i - 1] = acc
        if rest[0] + acc != 0:
            break
        rest = quot
        count += 1
    return count, rest


def _int_poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca == 0:
            continue
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return out


def _exact_int_division(num: Sequence[int], den: Sequence[int]) -> Optional[list[int]]:
    """num / den over the integers for monic den, or None if not exact."""
    deg = len(num) - len(den)
    if deg < 0 or den[-1] != 1:
        return None
    work = list(num)
    quot = [0] * (deg + 1)
    top = len(den) - 1
    for k in range(deg, -1, -1):
        c = work[k + top]
        quot[k] = c
        if c:
            for j, d in enumerate(den):
                work[k + j] -= c * d
    if any(work):
        return None
    return quot


def _root_orbits(rest: Sequence[int], tol: float = 1e-6) -> list[list[complex]]:
    """Cluster the roots into sets closed under conjugation and reciprocal.

    Each orbit is a minimal root set that a real palindromic-ish integer
    factor could have; duplicated roots are left in separate orbits so
    that repeated factors come out as powers rather than as squares.
    """
    roots = [complex(z) for z in np.roots(list(reversed(rest)))]
    used: set[int] = set()
    orbits: list[list[complex]] = []
    for i, z in enumerate(roots):
        if i in used:
            continue
        used.add(i)
        cluster = [z]
        queue = [z]
        while queue:
            w = queue.pop()
            targets = []
            if w != 0:
                targets = [w.conjugate(), 1 / w, 1 / w.conjugate()]
            for target in targets:
                near = tol * max(1.0, abs(target))
                if any(abs(target - c) <= near for c in cluster):
                    continue
                best, best_dist = None, near
                for j, y in enumerate(roots):
                    if j in used:
                        continue
                    if abs(y - target) <= best_dist:
                        best, best_dist = j, abs(y - target)
                if best is None:
                    continue
                used.add(best)
                cluster.append(roots[best])
                queue.append(roots[best])
        cluster.sort(key=lambda c: (round(c.real, 9), round(c.imag, 9)))
        orbits.append(cluster)
    orbits.sort(key=lambda c: (len(c), round(c[0].real, 9), round(c[0].imag, 9)))
    return orbits


def _candidate_factor(rest: list[int]) -> Optional[list[int]]:
    """Smallest integer factor suggested by root clustering, if any divides."""
    orbits = _root_orbits(rest)
    degree_cap = min(6, len(rest) - 1)
    combos = []
    for size in (1, 2, 3):
        for combo in itertools.combinations(range(len(orbits)), size):
            degree = sum(len(orbits[k]) for k in combo)
            if 1 <= degree <= degree_cap:
                combos.append((degree, combo))
    combos.sort()
    for _, combo in combos:
        cluster = [z for k in combo for z in orbits[k]]
        monic = np.poly(np.array(cluster, dtype=complex))
        coeffs = list(reversed([c.real for c in monic]))
        rounded = [round(c) for c in coeffs]
        if max(abs(c - r) for c, r in zip(coeffs, rounded)) > 1e-3:
            continue
        if _exact_int_division(rest, rounded) is not None:
            return rounded
    return None


def format_int_poly(coeffs: Sequence[int], var: str = "t") -> str:
    """Render an integer coefficient list (exponent 0 first) as a polynomial."""
    terms = []
    for e in range(len(coeffs) - 1, -1, -1):
        c = coeffs[e]
        if c == 0:
            continue
        mag = abs(c)
        if e == 0:
            body = str(mag)
        else:
            power = var if e == 1 else f"{var}^{e}"
            body = power if mag == 1 else f"{mag}{power}"
        if not terms:
            terms.append(("-" if c < 0 else "") + body)
        else:
            terms.append(("- " if c < 0 else "+ ") + body)
    return " ".join(terms) if terms else "0"


def factored_display(coeffs: Sequence[int], var: str = "t") -> Optional[str]:
    """Factored rendering over the integers, or None when matching fails.

    Divides out (t - 1) exactly, then peels integer factors of degree at
    most six suggested by root clusters.  The assembled factorization is
    re-multiplied over the integers and must reproduce the input exactly,
    so a wrong guess can only fall back, never mislead.
    """
    ints = list(coeffs)
    if not ints or ints[-1] == 0:
        return None
    unit = 1
    if ints[-1] < 0:
        unit = -1
        ints = [-c for c in ints]
    ones, rest = deflate_at_one(ints)
    factors: list[tuple[tuple[int, ...], int]] = []
    if ones:
        factors.append(((-1, 1), ones))
    while len(rest) > 1:
        candidate = _candidate_factor(rest)
        if candidate is None:
            return None
        power = 0
        while True:
            quotient = _exact_int_division(rest, candidate)
            if quotient is None:
                break
            rest = quotient
            power += 1
        factors.append((tuple(candidate), power))
    constant = rest[0]

    check = [unit * constant]
    for factor, power in factors:
        for _ in range(power):
            check = _int_poly_mul(check, list(factor))
    if check != list(coeffs):
        return None

    pieces = []
    if unit * constant == -1:
        pieces.append("-")
    elif unit * constant != 1:
        pieces.append(str(unit * constant) + " ")
    for factor, power in factors:
        body = f"({format_int_poly(list(factor), var)})"
        pieces.append(body if power == 1 else f"{body}^{power}")
    return " ".join(pieces).replace("- (", "-(").strip()


# ---------------------------------------------------------------------------
# Configuration.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CliConfig:
    """Parsed command line: one input source plus shared knobs."""

    command: str
    monodromy: Optional[str]
    input_path: Optional[str]
    tolerances: Tolerances
    seed: int
    starts: int
    reps: tuple[str, ...]
    solution: Optional[int]
    fmt: str
    output: Optional[str]

    def __post_init__(self):
        if (self.monodromy is None) == (self.input_path is None):
            raise ValueError("exactly one input source is required")
        for name in ("det", "root", "null"):
            if getattr(self.tolerances, name) <= 0:
                raise ValueError(f"tolerance --tol-{name} must be positive")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptbundle",
        description="Holonomy, twisted Alexander polynomials, and rigidity "
        "certificates for hyperbolic once-punctured torus bundles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--tol-det", type=float, default=Tolerances().det,
                       help="determinant / interpolation tolerance")
        p.add_argument("--tol-root", type=float, default=Tolerances().root,
                       help="root multiplicity and integer rounding tolerance")
        p.add_argument("--tol-null", type=float, default=Tolerances().null,
                       help="nullspace rank cutoff")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for the multistart trace solver")
        p.add_argument("--starts", type=int, default=64,
                       help="number of Newton starts")
        p.add_argument("--solution", type=int, default=None,
                       help="restrict to one trace solution by index")
        p.add_argument("--format", choices=("text", "json"), default="text",
                       dest="fmt", help="output format")
        p.add_argument("--output", default=None,
                       help="write output to this path instead of stdout")

    def monodromy_command(name: str, helptext: str, with_reps: bool = False):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("monodromy", help="monodromy word, e.g. LLRR or -R^2L")
        if with_reps:
            p.add_argument("--reps", default=",".join(ALL_REPS),
                           help="comma-separated subset of sl4,v,gl16")
        common(p)
        return p

    monodromy_command("certify", "full pipeline and rigidity report",
                      with_reps=True)
    monodromy_command("holonomy", "traces and 2x2 / 4x4 holonomy matrices")
    monodromy_command("trace-solve", "trace solutions only")
    monodromy_command("action", "monodromy action on cocycles and its "
                      "characteristic polynomials", with_reps=True)

    alexander = sub.add_parser(
        "alexander", help="generic twisted Alexander invariant from a "
        "presentation file")
    alexander.add_argument("file", help="presentation JSON path")
    common(alexander)
    return parser


def _config(args: argparse.Namespace) -> CliConfig:
    reps = getattr(args, "reps", None)
    if reps is None:
        chosen: tuple[str, ...] = ALL_REPS
    else:
        tokens = [tok.strip() for tok in reps.split(",") if tok.strip()]
        for tok in tokens:
            if tok not in ALL_REPS:
                raise ValueError(f"unknown representation {tok!r} in --reps")
        if not tokens:
            raise ValueError("--reps selected no representations")
        chosen = tuple(label for label in ALL_REPS if label in tokens)
    return CliConfig(
        command=args.command,
        monodromy=getattr(args, "monodromy", None),
        input_path=getattr(args, "file", None),
        tolerances=Tolerances(det=args.tol_det, root=args.tol_root,
                              null=args.tol_null),
        seed=args.seed,
        starts=args.starts,
        reps=chosen,
        solution=args.solution,
        fmt=args.fmt,
        output=args.output,
    )


# ---------------------------------------------------------------------------
# Shared serialization helpers.
# ---------------------------------------------------------------------------


def _pair(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _cmatrix(mat: np.ndarray) -> list[list[list[float]]]:
    return [[_pair(c) for c in row] for row in np.asarray(mat, dtype=complex)]


def _rmatrix(mat: np.ndarray) -> list[list[float]]:
    return [[float(x) for x in row] for row in np.asarray(mat, dtype=float)]


def _poly_data(poly: LaurentPoly) -> dict:
    if poly.is_zero():
        return {"min_exp": 0, "coefficients": []}
    lo, coeffs = poly.dense()
    return {"min_exp": lo, "coefficients": [_pair(c) for c in coeffs]}


def _dumps(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _format_matrix_text(mat: np.ndarray, indent: str = "    ") -> list[str]:
    mat = np.asarray(mat)
    lines = []
    for row in mat:
        cells = []
        for value in row:
            z = complex(value)
            if abs(z.imag) < 1e-14:
                cells.append(f"{z.real: .10g}")
            else:
                cells.append(f"{z.real: .10g}{z.imag:+.10g}j")
        lines.append(indent + "[" + ", ".join(cells) + "]")
    return lines


def _poly_text(poly: LaurentPoly, var: str, tol: float) -> str:
    """Factored form when the coefficients round to integers, else a list."""
    ints = integer_round(poly, tol=tol)
    if ints is None:
        ints = integer_round(normalize_unit(poly), tol=tol)
    if ints is not None:
        factored = factored_display(ints, var=var)
        if factored is not None:
            return factored
        return f"coefficients (exponent {poly.min_exp} up): {ints}"
    _, coeffs = poly.dense()
    shown = ", ".join(f"{c:.6g}" for c in coeffs)
    return f"coefficients (exponent {poly.min_exp} up): [{shown}]"


def _certify_poly_display(tol: float) -> Callable[[CertificateEvidence], str]:
    def show(ev: CertificateEvidence) -> str:
        return _poly_text(ev.polynomial, "t", tol)
    return show


# ---------------------------------------------------------------------------
# Subcommand handlers; each returns (exit code, output text).
# ---------------------------------------------------------------------------


def _solutions_for(config: CliConfig):
    spec = parse_monodromy(config.monodromy)
    if not is_hyperbolic(spec):
        raise ValueError(
            f"monodromy {spec.text()!r} is not hyperbolic (|trace| <= 2)"
        )
    endo = monodromy_endo(spec)
    solutions = build_solutions(
        endo, starts=config.starts, seed=config.seed,
        tolerances=config.tolerances,
    )
    if config.solution is not None:
        if not 0 <= config.solution < len(solutions):
            raise ValueError(
                f"solution index {config.solution} out of range "
                f"(found {len(solutions)} solutions)"
            )
        picked = [(config.solution, solutions[config.solution])]
    else:
        picked = list(enumerate(solutions))
    return spec, endo, picked


def _cmd_certify(config: CliConfig) -> tuple[int, str]:
    report = certify(
        parse_monodromy(config.monodromy),
        seed=config.seed,
        starts=config.starts,
        tolerances=config.tolerances,
        reps=config.reps,
        solution_index=config.solution,
    )
    if config.fmt == "json":
        text = report_json(report)
    else:
        text = report_text(
            report, poly_display=_certify_poly_display(config.tolerances.root)
        )
    if not report.solutions:
        raise ArithmeticError("no trace solutions found; try more --starts")
    return (0 if report.verdict != INCONCLUSIVE else 4), text


def _cmd_trace_solve(config: CliConfig) -> tuple[int, str]:
    spec, _, picked = _solutions_for(config)
    if not picked:
        raise ArithmeticError("no trace solutions found; try more --starts")
    if config.fmt == "json":
        data = {
            "monodromy": spec.text(),
            "trace": monodromy_trace(spec),
            "seed": config.seed,
            "starts": config.starts,
            "solutions": [
                {"index": index, "traces": [_pair(t) for t in sol.triple.as_tuple()]}
                for index, sol in picked
            ],
        }
        return 0, _dumps(data)
    lines = [f"monodromy {spec.text()}   trace {monodromy_trace(spec)}   "
             f"{len(picked)} solution(s)"]
    for index, sol in picked:
        a, b, c = sol.triple.as_tuple()
        lines.append(
            f"solution {index}: tr(a)={a:.12g}  tr(b)={b:.12g}  tr(ab)={c:.12g}"
        )
    return 0, "\n".join(lines) + "\n"


def _cmd_holonomy(config: CliConfig) -> tuple[int, str]:
    spec, endo, picked = _solutions_for(config)
    if not picked:
        raise ArithmeticError("no trace solutions found; try more --starts")
    entries = []
    for index, sol in picked:
        entries.append({
            "index": index,
            "traces": [_pair(t) for t in sol.triple.as_tuple()],
            "residuals": {
                k: float(v)
                for k, v in sorted(holonomy_residuals(sol.sl2, endo).items())
            },
            "sl2": {
                "a": _cmatrix(sol.sl2.mat_a),
                "b": _cmatrix(sol.sl2.mat_b),
                "x": _cmatrix(sol.sl2.mat_x),
            },
            "so31": {
                "a": _rmatrix(sol.lorentz.mat_a),
                "b": _rmatrix(sol.lorentz.mat_b),
                "x": _rmatrix(sol.lorentz.mat_x),
            },
        })
    if config.fmt == "json":
        data = {
            "monodromy": spec.text(),
            "trace": monodromy_trace(spec),
            "seed": config.seed,
            "starts": config.starts,
            "solutions": entries,
        }
        return 0, _dumps(data)
    lines = [f"monodromy {spec.text()}   trace {monodromy_trace(spec)}"]
    for entry, (index, sol) in zip(entries, picked):
        lines.append("")
        a, b, c = sol.triple.as_tuple()
        lines.append(f"solution {index}: tr(a)={a:.12g}  tr(b)={b:.12g}  "
                     f"tr(ab)={c:.12g}")
        worst = max(entry["residuals"].values())
        lines.append(f"  worst residual: {worst:.3g}")
        for name, mat in (("a", sol.sl2.mat_a), ("b", sol.sl2.mat_b),
                          ("x", sol.sl2.mat_x)):
            lines.append(f"  sl2 {name}:")
            lines.extend(_format_matrix_text(mat))
        for name, mat in (("a", sol.lorentz.mat_a), ("b", sol.lorentz.mat_b),
                          ("x", sol.lorentz.mat_x)):
            lines.append(f"  so31 {name}:")
            lines.extend(_format_matrix_text(mat))
    return 0, "\n".join(lines) + "\n"


def _cmd_action(config: CliConfig) -> tuple[int, str]:
    spec, endo, picked = _solutions_for(config)
    if not picked:
        raise ArithmeticError("no trace solutions found; try more --starts")
    tols = config.tolerances
    entries = []
    for index, sol in picked:
        reps_out = {}
        for label in config.reps:
            images = sol.representation(label)
            action = monodromy_action(endo, images, "inverse", tolerances=tols)
            relative = relative_char_poly(action, tol=tols.det)
            full = char_poly(np.asarray(action.matrix, dtype=complex),
                             tol=tols.det)
            mult, deflated = root_multiplicity(relative, 1.0, tol=tols.root)
            ints = integer_round(relative, tol=tols.root)
            if ints is None:
                ints = integer_round(normalize_unit(relative), tol=tols.root)
            reps_out[label] = {
                "dimension": images[0].shape[0],
                "kernel_dimension": int(action.kernel_basis.shape[1]),
                "action_matrix": _cmatrix(action.matrix),
                "action_char_poly": _poly_data(full),
                "relative_char_poly": _poly_data(relative),
                "relative_char_poly_integer": ints,
                "multiplicity_at_one": mult,
                "deflated_at_one": _pair(deflated.evaluate(1.0)),
                "relative_poly_obj": relative,
            }
        entries.append((index, sol, reps_out))
    if config.fmt == "json":
        data = {
            "monodromy": spec.text(),
            "trace": monodromy_trace(spec),
            "seed": config.seed,
            "starts": config.starts,
            "direction": "inverse",
            "solutions": [
                {
                    "index": index,
                    "traces": [_pair(t) for t in sol.triple.as_tuple()],
                    "representations": {
                        label: {k: v for k, v in body.items()
                                if k != "relative_poly_obj"}
                        for label, body in reps_out.items()
                    },
                }
                for index, sol, reps_out in entries
            ],
        }
        return 0, _dumps(data)
    lines = [f"monodromy {spec.text()}   trace {monodromy_trace(spec)}   "
             f"direction inverse"]
    for index, sol, reps_out in entries:
        lines.append("")
        lines.append(f"solution {index}")
        for label, body in reps_out.items():
            dim = body["dimension"]
            lines.append(
                f"  {label}: action matrix {2 * dim}x{2 * dim} on cocycle "
                f"pairs, kernel dimension {body['kernel_dimension']}"
            )
            lines.append(
                f"    relative characteristic polynomial "
                f"(multiplicity {body['multiplicity_at_one']} at t=1):"
            )
            lines.append("      " + _poly_text(body["relative_poly_obj"], "t",
                                               tols.root))
    return 0, "\n".join(lines) + "\n"


def _cmd_alexander(config: CliConfig) -> tuple[int, str]:
    pres, alpha, matrices = load_presentation(config.input_path)
    if matrices is None:
        raise ValueError(
            f"presentation file {config.input_path!r} has no "
            "representation matrices"
        )
    rep = RingRep(tuple(matrices), alpha.exponents)
    invariant = twisted_alexander(pres, rep, tolerances=config.tolerances)
    normalized = invariant.normalized_quotient()
    ints = None
    if normalized is not None:
        ints = integer_round(normalized, tol=config.tolerances.root)
    if config.fmt == "json":
        data = {
            "file": config.input_path,
            "generators": list(pres.generator_names),
            "weights": list(alpha.exponents),
            "dimension": rep.dimension,
            "column": invariant.column,
            "numerator": _poly_data(invariant.numerator),
            "denominator": _poly_data(invariant.denominator),
            "quotient": None if invariant.quotient is None
            else _poly_data(invariant.quotient),
            "normalized_quotient": None if normalized is None
            else _poly_data(normalized),
            "integer_quotient": ints,
        }
        return 0, _dumps(data)
    lines = [
        f"presentation {config.input_path}: generators "
        f"{', '.join(pres.generator_names)}; weights {list(alpha.exponents)}; "
        f"representation dimension {rep.dimension}",
        f"removed generator column {invariant.column} "
        f"({pres.generator_names[invariant.column]})",
    ]
    if invariant.quotient is not None:
        lines.append("invariant (normalized quotient, up to units):")
        lines.append("  " + _poly_text(normalized, "x", config.tolerances.root))
    else:
        lines.append("division is not exact; the invariant is the fraction")
        lines.append("  numerator:   "
                     + _poly_text(invariant.numerator, "x",
                                  config.tolerances.root))
        lines.append("  denominator: "
                     + _poly_text(invariant.denominator, "x",
                                  config.tolerances.root))
    return 0, "\n".join(lines) + "\n"


_HANDLERS = {
    "certify": _cmd_certify,
    "trace-solve": _cmd_trace_solve,
    "holonomy": _cmd_holonomy,
    "action": _cmd_action,
    "alexander": _cmd_alexander,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point returning the process exit status.

    0 success, 2 input error, 3 numerical failure, 4 when the certifier
    ran but every solution came back inconclusive.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        config = _config(args)
        code, text = _HANDLERS[config.command](config)
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (ArithmeticError, np.linalg.LinAlgError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3
    if config.output:
        with open(config.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
