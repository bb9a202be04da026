"""Command-line front end.

Exit codes: 0 on success, 2 on validation failures (bad input, failed
checks), 1 on internal errors.  Reports are canonical JSON (sorted keys,
floats rounded to 12 significant digits); time series are CSV.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import scalars as sc
from .algebra import (AlgebraSpec, Element, associator, check_algebra_axioms, jacobiator,
                      load_algebra, multiply, _parse_vector)
from .enveloping import (basis_ops, commutator_op, evaluate_word, identity_op, left_op,
                         multiplication_algebra, span_closure, word_from_json)
from .errors import AlgebraFileError, InvalidInputError, NAQMError
from . import instances
from .states import (TraceFunctional, check_trace_axioms, check_uncertainty_relation,
                     state_from_dict, tracial_state, uncertainty)

VALIDATION_EXIT = 2
INTERNAL_EXIT = 1


class ValidationFailure(Exception):
    """A check ran to completion and failed; the report is still emitted."""

    def __init__(self, payload):
        super().__init__("validation failed")
        self.payload = payload


# ---------------------------------------------------------------------------
# canonical JSON

def _num(x: float) -> float:
    x = float(f"{float(x):.12g}")
    return 0.0 if x == 0 else x


def jsonable(obj):
    """Convert numbers, arrays and nested containers into canonical JSON values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()] if obj.ndim else jsonable(obj.item())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, sc.GaussianRational):
        return [_num(obj.re), _num(obj.im)]
    if isinstance(obj, (complex, np.complexfloating)):
        return [_num(obj.real), _num(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


def format_element(a: Element) -> str:
    """Compact display such as ``-e0`` or ``1/2*e11 + 1/2*e22``."""
    parts = []
    for c, name in zip(a.coeffs, a.algebra.labels):
        if c == 0:
            continue
        if c == 1:
            parts.append(name)
        elif c == -1:
            parts.append(f"-{name}")
        else:
            parts.append(f"{c}*{name}")
    return " + ".join(parts).replace("+ -", "- ") if parts else "0"


# ---------------------------------------------------------------------------
# inputs

BUILTINS = "octonion, pauli, jordan:N, matrix:N, lie:su2"


def builtin_algebra(name: str, exact: bool = True) -> AlgebraSpec:
    kind, _, arg = name.partition(":")
    if kind == "octonion":
        return instances.octonion_algebra(exact)
    if kind == "pauli":
        return instances.pauli_jordan(exact)
    if kind in ("jordan", "matrix"):
        try:
            n = int(arg)
        except ValueError:
            raise InvalidInputError(f"builtin {name!r} needs a size, e.g. {kind}:2") from None
        if kind == "jordan":
            return instances.jordan_matrix_algebra(n, exact)
        return instances.associative_matrix_algebra(n, exact)
    if kind == "lie" and arg == "su2":
        return instances.lie_unitization(instances.su2_constants(), exact, label="su2")
    raise InvalidInputError(f"unknown builtin {name!r}; choose from {BUILTINS}")


def load_scenario(path) -> dict:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        lines = text.splitlines()
        line = lines[exc.lineno - 1] if exc.lineno - 1 < len(lines) else ""
        raise AlgebraFileError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}\n    {line}") from None
    if not isinstance(data, dict):
        raise AlgebraFileError(f"{path}: scenario must be a JSON object")
    return data


def resolve_algebra(args, scenario: dict) -> AlgebraSpec:
    exact = not args.float
    source = args.algebra or scenario.get("algebra")
    if args.builtin:
        A = builtin_algebra(args.builtin, exact)
    elif source is None:
        raise InvalidInputError(f"pass --algebra FILE or --builtin ({BUILTINS})")
    elif str(source).startswith("builtin:"):
        A = builtin_algebra(str(source)[len("builtin:"):], exact)
    else:
        if args.scenario and not Path(source).is_absolute() and not args.algebra:
            source = Path(args.scenario).parent / source
        A = load_algebra(source, exact)
    if "trace" in scenario:
        t = _parse_vector(scenario["trace"], A.dim, A.exact, "scenario.trace")
        A = AlgebraSpec(A.structure_constants, A.star_map, A.unit, A.unit_index, A.labels,
                        A.label, t, A.matrix_basis, A.kind)
    return A


def parse_word(A: AlgebraSpec, spec) -> object:
    """An operator from a word given as JSON data, a JSON file, or compact text.

    Compact text is a ``+``-separated sum of terms ``[coef*]SYM o SYM ...``
    where ``SYM`` is ``L<idx|label>`` or ``R<idx|label>`` (e.g. ``1j*L7``,
    ``L1 o L2 o L4``, ``1`` for the identity).
    """
    if isinstance(spec, (list, dict)):
        return evaluate_word(word_from_json(A, spec if isinstance(spec, list) else [spec]), A)
    text = str(spec).strip()
    if text.startswith("["):
        try:
            return parse_word(A, json.loads(text))
        except json.JSONDecodeError as exc:
            raise AlgebraFileError(f"word: {exc.msg} at column {exc.colno}") from None
    if text.endswith(".json") or (os.path.sep in text and Path(text).exists()):
        return parse_word(A, load_scenario_list(text))
    total = None
    for term in text.replace(" - ", " + -").split("+"):
        term = term.strip()
        if not term:
            continue
        coef, body = 1, term
        if "*" in term:
            c, body = term.split("*", 1)
            coef = _parse_coef(c)
        elif term.startswith("-"):
            coef, body = -1, term[1:].strip()
        syms = [s.strip() for s in body.split(" o ") if s.strip()]
        if syms == ["1"]:
            op = identity_op(A)
        else:
            op = evaluate_word(syms, A)
        op = op * coef if coef != 1 else op
        total = op if total is None else total + op
    if total is None:
        raise InvalidInputError("empty word")
    return total


def _parse_coef(text: str):
    text = text.strip().replace("i", "j") if text.strip() not in ("",) else "1"
    try:
        z = complex(text)
    except ValueError:
        raise InvalidInputError(f"bad coefficient {text!r}") from None
    ez = sc.exact_scalar(z)
    return ez if ez is not None else z


def load_scenario_list(path) -> list:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AlgebraFileError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return data


def parse_vector_arg(A: AlgebraSpec, text) -> Element:
    if isinstance(text, list):
        raw = text
    else:
        try:
            raw = json.loads(text)
        except json.JSONDecodeError:
            raw = [s for s in str(text).split(",")]
    if isinstance(raw, list) and raw and not isinstance(raw[0], list):
        raw = [_coef_pair(x) for x in raw]
    return A.element(_parse_vector(raw, A.dim, A.exact, "vector"))


def _coef_pair(x):
    if isinstance(x, (int, float)):
        return [x, 0]
    z = complex(str(x).strip().replace("i", "j"))
    return [z.real, z.imag]


def _state(A: AlgebraSpec, scenario: dict):
    return state_from_dict(A, scenario.get("state", {"kind": "tracial"}))


# ---------------------------------------------------------------------------
# subcommands

def cmd_algebra_check(args, scenario):
    A = resolve_algebra(args, scenario)
    report = check_algebra_axioms(A)
    out = {"algebra": report.to_dict(), "dim": A.dim, "label": A.label}
    ok = report.passed
    if A.trace is not None:
        tr = check_trace_axioms(TraceFunctional.of(A))
        out["trace"] = tr.to_dict()
        ok = ok and tr.passed
    if not ok:
        raise ValidationFailure(out)
    return out


def cmd_env_dim(args, scenario):
    A = resolve_algebra(args, scenario)
    kinds = ("L",) if args.left_only else ("L", "R")
    sub = span_closure(basis_ops(A, kinds), include_unit=True, label=A.label)
    return sub.report()


def cmd_gns(args, scenario):
    from .gns import purity
    A = resolve_algebra(args, scenario)
    omega = _state(A, scenario)
    mb = multiplication_algebra(A)
    rep = purity(omega, mb)
    lam = rep.gram_eigenvalues
    return {"quotient_dim": rep.quotient_dim, "gram_eigenvalues": lam[: rep.quotient_dim],
            "commutant_dim": rep.commutant_dim, "pure": rep.pure}


def _op_from(A, args, scenario, key):
    spec = getattr(args, key, None) or scenario.get(key)
    if spec is None:
        raise InvalidInputError(f"missing --{key.replace('_', '-')}")
    return parse_word(A, spec)


def cmd_eigen(args, scenario):
    from .eigen import operator_eigen
    A = resolve_algebra(args, scenario)
    X = _op_from(A, args, scenario, "op")
    pairs = operator_eigen(X)
    return [{"lambda": p.value, "residual": p.residual, "vector": p.vector.coeffs,
             "generalized": p.generalized} for p in pairs]


def cmd_uncertainty(args, scenario):
    A = resolve_algebra(args, scenario)
    omega = _state(A, scenario)
    O1 = _op_from(A, args, scenario, "op1")
    if getattr(args, "op2", None) or "op2" in scenario:
        O2 = _op_from(A, args, scenario, "op2")
        r = check_uncertainty_relation(omega, O1, O2)
        out = {"delta_1": r.delta_1, "delta_2": r.delta_2, "lhs": r.lhs, "rhs": r.rhs,
               "slack": r.slack, "passed": r.passed, "commutator_mean": r.commutator_mean}
        if not r.passed:
            raise ValidationFailure(out)
        return out
    return {"delta": uncertainty(omega, O1), "mean": omega(O1)}


def cmd_evolve(args, scenario):
    from .dynamics import Hamiltonian, trajectory
    A = resolve_algebra(args, scenario)
    Hop = _op_from(A, args, scenario, "hamiltonian")
    hbar = args.hbar if args.hbar is not None else float(scenario.get("hbar", 1.0))
    H = Hamiltonian(Hop, hbar)
    psi_spec = args.psi0 if args.psi0 is not None else scenario.get("psi0")
    if psi_spec is None:
        raise InvalidInputError("missing --psi0")
    psi0 = parse_vector_arg(A, psi_spec)
    grid = scenario.get("times", {})
    t0 = args.t0 if args.t0 is not None else float(grid.get("t0", 0.0))
    t1 = args.t1 if args.t1 is not None else float(grid.get("t1", 1.0))
    steps = args.steps if args.steps is not None else int(grid.get("steps", 10))
    if steps < 1 or not t1 > t0:
        raise InvalidInputError("time grid must be strictly increasing (t1 > t0, steps >= 1)")
    observables = {}
    for spec in args.observable or []:
        name, _, word = spec.partition("=")
        observables[name] = parse_word(A, word)
    for name, word in scenario.get("observables", {}).items():
        observables[name] = parse_word(A, word)
    traj = trajectory(H, psi0, np.linspace(t0, t1, steps + 1), observables)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["t"]
    for lab in A.labels:
        header += [f"re_{lab}", f"im_{lab}"]
    header += [f"exp_{k}" for k in observables]
    w.writerow(header)
    for k, t in enumerate(traj.times):
        row = [f"{_num(t):.12g}"]
        for z in traj.states[k]:
            row += [f"{_num(z.real):.12g}", f"{_num(z.imag):.12g}"]
        row += [f"{_num(traj.expectations[name][k].real):.12g}" for name in observables]
        w.writerow(row)
    return buf.getvalue()


def _table(A: AlgebraSpec) -> list[list[str]]:
    e = [A.basis(i) for i in range(A.dim)]
    return [[format_element(multiply(a, b)) for b in e] for a in e]


def demo_octonion() -> dict:
    from .gns import purity
    O = instances.octonion_algebra()
    e = [O.basis(i) for i in range(8)]
    tau = TraceFunctional.of(O)
    w = tracial_state(tau)
    A = left_op(e[7]) * sc.I
    B = left_op(e[1]) @ left_op(e[2]) @ left_op(e[4])
    rel = check_uncertainty_relation(w, A, B)
    mb = multiplication_algebra(O)
    pur = purity(w, mb)
    return {
        "algebra": "octonion",
        "multiplication_table": _table(O),
        "axioms": check_algebra_axioms(O).to_dict(),
        "trace_axioms": check_trace_axioms(tau).to_dict(),
        "associator_e1_e2_e4": format_element(associator(e[1], e[2], e[4])),
        "jacobiator_e1_e2_e4": format_element(jacobiator(e[1], e[2], e[4])),
        "commutator_trace": w(commutator_op(A, B)),
        "delta_A": rel.delta_1,
        "delta_B": rel.delta_2,
        "uncertainty_slack": rel.slack,
        "min_uncertainty": abs(rel.slack) <= 1e-10,
        "enveloping_dim": span_closure([left_op(x) for x in e[1:]], True).dim,
        "tracial_gns_quotient_dim": pur.quotient_dim,
        "tracial_state_pure": pur.pure,
    }


def demo_jordan(n: int) -> dict:
    from .gns import purity
    from .instances import bonafide_hamiltonian
    J = instances.jordan_matrix_algebra(n)
    tau = TraceFunctional.of(J)
    mb = multiplication_algebra(J)
    out = {
        "algebra": J.label,
        "multiplication_table": _table(J),
        "axioms": check_algebra_axioms(J).to_dict(),
        "trace_axioms": check_trace_axioms(tau).to_dict(),
        "enveloping_dim": mb.dim,
        "tracial_gns_quotient_dim": purity(tracial_state(tau), mb).quotient_dim,
    }
    P = instances.pauli_jordan()
    H = bonafide_hamiltonian(P.basis(2), P.basis(3))
    out["bonafide_hamiltonian_is_z"] = bool(sc.is_zero(H.matrix - left_op(P.basis(3)).matrix))
    return out


def cmd_demo(args, scenario):
    if args.which == "octonion":
        return demo_octonion()
    if args.which == "jordan":
        if args.n is None:
            raise InvalidInputError("demo jordan needs a size N")
        return demo_jordan(args.n)
    raise InvalidInputError(f"unknown demo {args.which!r}")


# ---------------------------------------------------------------------------
# argument parsing

def _common(p: argparse.ArgumentParser):
    p.add_argument("--algebra", help="algebra definition JSON file")
    p.add_argument("--builtin", help=f"builtin algebra ({BUILTINS})")
    p.add_argument("--scenario", help="scenario JSON file")
    p.add_argument("--out", help="write the report here instead of stdout")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exact rational arithmetic (default)")
    mode.add_argument("--float", action="store_true", help="floating-point arithmetic")
    p.add_argument("--tol", type=float, help="float comparison tolerance (overrides NAQM_TOL)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="naqm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_alg = sub.add_parser("algebra", help="algebra-level checks")
    alg_sub = p_alg.add_subparsers(dest="action", required=True)
    p = alg_sub.add_parser("check", help="verify unit, star and trace axioms")
    _common(p)
    p.set_defaults(func=cmd_algebra_check)

    p_env = sub.add_parser("env", help="multiplication algebra")
    env_sub = p_env.add_subparsers(dest="action", required=True)
    p = env_sub.add_parser("dim", help="dimension of the generated multiplication algebra")
    _common(p)
    p.add_argument("--left-only", action="store_true", help="use only left multiplications")
    p.set_defaults(func=cmd_env_dim)

    p = sub.add_parser("gns", help="GNS quotient, commutant and purity of a state")
    _common(p)
    p.set_defaults(func=cmd_gns)

    p = sub.add_parser("eigen", help="eigenpairs of an operator word")
    _common(p)
    p.add_argument("--op", help="operator word (text, JSON or file)")
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("uncertainty", help="uncertainties and the uncertainty relation")
    _common(p)
    p.add_argument("--op1", help="first observable word")
    p.add_argument("--op2", help="second observable word")
    p.set_defaults(func=cmd_uncertainty)

    p = sub.add_parser("evolve", help="Schrodinger evolution on a time grid (CSV)")
    _common(p)
    p.add_argument("--hamiltonian", help="Hamiltonian word (text, JSON or file)")
    p.add_argument("--psi0", help="initial vector, JSON list or comma-separated coefficients")
    p.add_argument("--t0", type=float)
    p.add_argument("--t1", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--hbar", type=float)
    p.add_argument("--observable", action="append", metavar="NAME=WORD",
                   help="expectation value column; may be repeated")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("demo", help="headline computations for a builtin instance")
    p.add_argument("which", choices=["octonion", "jordan"])
    p.add_argument("n", nargs="?", type=int)
    p.add_argument("--out")
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_demo, scenario=None)
    return parser


def _emit(result, out_path):
    text = result if isinstance(result, str) else dumps(result)
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "tol", None) is not None:
        os.environ["NAQM_TOL"] = repr(args.tol)
    try:
        scenario = load_scenario(args.scenario) if getattr(args, "scenario", None) else {}
        result = args.func(args, scenario)
        out = args.out or scenario.get("out")
        _emit(result, out)
        return 0
    except ValidationFailure as vf:
        _emit(vf.payload, getattr(args, "out", None))
        return VALIDATION_EXIT
    except (NAQMError, FileNotFoundError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"naqm: error: {msg}", file=sys.stderr)
        return VALIDATION_EXIT
    except Exception as exc:  # noqa: BLE001 - report, do not traceback
        print(f"naqm: internal error: {exc!r}", file=sys.stderr)
        return INTERNAL_EXIT


if __name__ == "__main__":
    sys.exit(main())
