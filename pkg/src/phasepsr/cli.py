"""Command-line front end.

Subcommands: ``run``, ``sweep``, ``sample``, ``verify``, ``lp``,
``export-circuit``. Exit status is 0 on success, 1 when a verification fails
and 2 on usage errors.

Sampling draws each sweep point from its own xoshiro256** stream
``rng.stream(seed, point_index)``; rows are emitted in point order.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass

import numpy as np

from phasepsr import comb, protocols as pr, rng
from phasepsr import qlinalg as la
from phasepsr.verify import SUITES, run_suites

PROTOCOLS = ("single", "qudit", "two_toffoli", "two_cnot", "vmc")
FIELDS = ("protocol", "phi", "label", "probability", "frequency", "success", "fidelity")


class UsageError(ValueError):
    pass


_ANGLE = re.compile(
    r"^\s*(?P<coef>[+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?\s*$"
)


def parse_angle(text):
    """Decimal radians or a rational multiple of pi: ``1.2``, ``pi/2``, ``-3pi/4``."""
    m = _ANGLE.match(text.lower())
    if m:
        coef = m.group("coef")
        if coef in ("", "+"):
            value = 1.0
        elif coef == "-":
            value = -1.0
        else:
            value = float(coef)
        den = float(m.group("den")) if m.group("den") else 1.0
        if den == 0:
            raise UsageError(f"zero denominator in angle {text!r}")
        return value * math.pi / den
    try:
        value = float(text)
    except ValueError:
        raise UsageError(f"cannot parse angle {text!r}") from None
    if not math.isfinite(value):
        raise UsageError(f"angle must be finite, got {text!r}")
    return value


def parse_sweep(text):
    """``start:stop:points`` -> ``points`` angles, both ends included."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"sweep must be start:stop:points, got {text!r}")
    start, stop = parse_angle(parts[0]), parse_angle(parts[1])
    try:
        points = int(parts[2])
    except ValueError:
        raise UsageError(f"sweep points must be an integer, got {parts[2]!r}") from None
    if points < 1:
        raise UsageError("sweep needs at least one point")
    return [float(x) for x in np.linspace(start, stop, points)]


_NAMED = {
    "0": (1, 0),
    "1": (0, 1),
    "+": (1, 1),
    "-": (1, -1),
    "+i": (1, 1j),
    "-i": (1, -1j),
}


def parse_xi(text) -> la.DensityMatrix:
    """Named pure state, ``bloch:x,y,z``, ``haar:SEED`` or ``mixed:SEED``."""
    if text in _NAMED:
        v = np.array(_NAMED[text], dtype=complex)
        return la.StateVector((2,), v / np.linalg.norm(v)).density()
    kind, _, arg = text.partition(":")
    try:
        if kind == "bloch":
            x, y, z = (float(t) for t in arg.split(","))
            return la.bloch_state(x, y, z)
        if kind == "haar":
            return la.haar_qubit(rng.Xoshiro256(int(arg))).density()
        if kind == "mixed":
            return la.bloch_ball_qubit(rng.Xoshiro256(int(arg)))
    except ValueError as exc:
        raise UsageError(f"bad state spec {text!r}: {exc}") from None
    raise UsageError(f"unknown state spec {text!r}")


@dataclass(frozen=True)
class RunConfig:
    protocol: str
    n: int
    k: int
    phis: tuple
    xi: str = "+"
    shots: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise UsageError(f"protocol must be one of {PROTOCOLS}")
        if self.shots < 0:
            raise UsageError("shots must be >= 0")
        if self.protocol == "qudit" and self.n < 1:
            raise UsageError("qudit protocol needs --n >= 1")
        if self.protocol == "vmc" and self.k < 1:
            raise UsageError("vmc protocol needs --k >= 1")
        if not self.phis:
            raise UsageError("no phase angle given")

    def runner(self):
        n, k = self.n, self.k
        return {
            "single": lambda phi, xi: pr.retrieve_single(pr.store_single(phi), xi),
            "qudit": lambda phi, xi: pr.retrieve_qudit(n, pr.store_qudit(n, phi), xi),
            "two_toffoli": pr.run_2to1_toffoli,
            "two_cnot": pr.run_2to1_cnot,
            "vmc": lambda phi, xi: pr.run_vmc(k, phi, xi),
        }[self.protocol]


def run(config: RunConfig):
    """Report rows, one per (phi, outcome)."""
    xi = parse_xi(config.xi)
    runner = config.runner()
    rows = []
    for index, phi in enumerate(config.phis):
        outcomes = runner(phi, xi)
        target = pr.target_state(phi, xi)
        if config.shots:
            counts = rng.stream(config.seed, index).sample_counts(
                [o.probability for o in outcomes], config.shots
            )
        for i, o in enumerate(outcomes):
            rows.append({
                "protocol": config.protocol,
                "phi": float(phi),
                "label": o.label,
                "probability": float(o.probability),
                "frequency": int(counts[i]) / config.shots if config.shots else None,
                "success": o.success,
                "fidelity": la.fidelity(o.post_state, target) if o.post_state is not None else None,
            })
    return rows


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def format_rows(rows, fmt):
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(FIELDS)
    for r in rows:
        writer.writerow([_cell(r[f]) for f in FIELDS])
    return buf.getvalue()


def _emit(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _export_circuit(name, phi):
    builders = {
        "prep_2to1": lambda: pr.prep_2to1(),
        "shift_down_v3": lambda: pr.shift_down_v3(),
        "rccx": lambda: pr.relative_phase_toffoli((0, 1)),
        "two_toffoli": lambda: pr.build_2to1_toffoli(phi),
        "two_cnot": lambda: pr.build_2to1_cnot(phi),
    }
    return builders[name]()


def build_parser():
    parser = argparse.ArgumentParser(
        prog="phasepsr",
        description="Probabilistic storage and retrieval of qubit phase gates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def protocol_args(p, need_phi):
        p.add_argument("--protocol", required=True, choices=PROTOCOLS)
        p.add_argument("--n", type=int, default=0, help="uses of the gate (qudit protocol)")
        p.add_argument("--k", type=int, default=0, help="program qubits (vmc protocol)")
        grp = p.add_mutually_exclusive_group(required=need_phi)
        grp.add_argument("--phi", help="angle: radians or multiple of pi, e.g. pi/2")
        grp.add_argument("--phi-sweep", help="start:stop:points")
        p.add_argument("--xi", default="+",
                       help="0,1,+,-,+i,-i | bloch:x,y,z | haar:SEED | mixed:SEED")
        p.add_argument("--shots", type=int, default=0, help="0 = exact branch enumeration")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", metavar="PATH")

    protocol_args(sub.add_parser("run", help="one phase angle"), True)
    protocol_args(sub.add_parser("sweep", help="a range of phase angles"), True)
    protocol_args(sub.add_parser("sample", help="Monte Carlo sampling of outcomes"), True)

    v = sub.add_parser("verify", help="run invariant suites")
    v.add_argument("suite", nargs="?", default="all", choices=(*SUITES, "all"))

    lp = sub.add_parser("lp", help="solve the storage/retrieval LP")
    lp.add_argument("n_pos", nargs="?", type=int, metavar="N")
    lp.add_argument("--n", type=int)
    lp.add_argument("--format", choices=("text", "json"), default="text")

    ex = sub.add_parser("export-circuit", help="write a circuit as JSON")
    ex.add_argument("name", choices=("prep_2to1", "shift_down_v3", "rccx", "two_toffoli",
                                     "two_cnot"))
    ex.add_argument("--phi", default="0")
    ex.add_argument("--out", metavar="PATH")
    return parser


def _cmd_protocol(args):
    if args.command == "sweep" and not args.phi_sweep:
        raise UsageError("sweep needs --phi-sweep start:stop:points")
    if args.command == "sample" and args.shots < 1:
        raise UsageError("sample needs --shots >= 1")
    phis = parse_sweep(args.phi_sweep) if args.phi_sweep else [parse_angle(args.phi)]
    config = RunConfig(args.protocol, args.n, args.k, tuple(phis), args.xi,
                       args.shots, args.seed)
    _emit(format_rows(run(config), args.format), args.out)
    return 0


def _cmd_verify(args):
    checks = run_suites(args.suite)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 1 if failed else 0


def _cmd_lp(args):
    n = args.n if args.n is not None else args.n_pos
    if n is None or n < 1:
        raise UsageError("lp needs N >= 1")
    res = comb.solve_lp(n)
    if args.format == "json":
        print(res.to_json(indent=1))
        return 0
    print(f"N = {n}")
    print(f"optimum      = {res.optimum!r}")
    print(f"N/(N+1)      = {res.closed_form!r}")
    print(f"p            = {[round(x, 15) for x in res.argmax_p]}")
    print(f"mu           = {[round(x, 15) for x in res.argmax_mu]}")
    print(f"f_J          = {[round(x, 15) for x in res.certificate_weights]}")
    print(f"(N+1)/N sum mu = {res.certificate_bound()!r} (<= 1)")
    return 0


def _cmd_export(args):
    c = _export_circuit(args.name, parse_angle(args.phi))
    _emit(c.to_json(indent=1) + "\n", args.out)
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_protocol,
        "sweep": _cmd_protocol,
        "sample": _cmd_protocol,
        "verify": _cmd_verify,
        "lp": _cmd_lp,
        "export-circuit": _cmd_export,
    }
    try:
        return handlers[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"phasepsr: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
