"""Command-line front end.

Subcommands: ``bounds``, ``simulate``, ``lp``, ``prove``, ``plotdata`` and
``replay``.  Every number on the command line is an exact rational ("p/q" or
an integer).  Exit codes: 0 success, 2 domain error, 3 verification failure,
4 LP infeasible/unbounded.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import __version__
from .bounds import (
    achievable_envelope,
    all_bounds,
    comparison_table_row,
    cutset_bound,
    envelope_curve,
    exact_segments,
    lower_envelope,
    reference_bounds,
)
from .lp import CertificateError, DualCertificate, LpStatusError, build_problem, solve_min_rate, verify_certificate
from .model import CaseTag, Demand, DomainError, NetworkConfig, covering_demands, demand_family, is_covering, make_demand
from .proof import ChainError, to_json as chain_to_json, to_transcript, verify_chain
from .proof.builders import build_theorem1_chain, build_theorem2_chain
from .rational import format_line, format_rational, parse_rational
from .schemas import PLOT_CSV_HEADER, header
from .schemes import simulate

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_VERIFY = 3
EXIT_LP = 4


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_DOMAIN):
        super().__init__(message)
        self.code = code


@dataclass
class RunRecord:
    command: List[str]
    config: Dict[str, object]
    inputs: Dict[str, str]
    outputs: Dict[str, object]
    version: str = __version__
    timestamp: str = ""

    def to_json(self) -> dict:
        return {**header("run_record"), **asdict(self)}

    @classmethod
    def from_json(cls, data: dict) -> "RunRecord":
        return cls(
            command=list(data["command"]),
            config=dict(data["config"]),
            inputs=dict(data["inputs"]),
            outputs=dict(data["outputs"]),
            version=data.get("version", ""),
            timestamp=data.get("timestamp", ""),
        )


@dataclass
class Outcome:
    code: int = EXIT_OK
    lines: List[str] = field(default_factory=list)
    files: Dict[str, str] = field(default_factory=dict)  # path -> written text
    inputs: Dict[str, str] = field(default_factory=dict)  # path -> read text

    def say(self, text: str = "") -> None:
        self.lines.append(text)

    def emit_json(self, doc: dict) -> None:
        self.lines.append(json.dumps(doc, indent=1, sort_keys=True))

    def write(self, path: str, text: str) -> None:
        Path(path).write_text(text)
        self.files[path] = text

    def read(self, path: str) -> str:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise CliError(f"cannot read {path}: {exc.strerror}") from None
        self.inputs[path] = text
        return text

    @property
    def stdout(self) -> str:
        return "".join(line + "\n" for line in self.lines)


# ------------------------------------------------------------ parsing


def rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def ints_arg(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.replace(" ", "").strip("()").split(",") if v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _config(args: argparse.Namespace) -> NetworkConfig:
    if args.n is None or args.k is None:
        raise CliError("--n and --k are required")
    return NetworkConfig(args.n, args.k)


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


# ------------------------------------------------------------- bounds


def cmd_bounds(args: argparse.Namespace, out: Outcome) -> None:
    cfg = _config(args)
    bounds = all_bounds(cfg)
    segments = exact_segments(cfg)
    doc: dict = {
        **header("bounds"),
        "n": cfg.N,
        "k": cfg.K,
        "case": cfg.case.value,
        "boundary": cfg.is_boundary,
        "degenerate": cfg.N == 1,
        "bounds": [b.to_json() for b in bounds],
        "segments": [s.to_json() for s in segments],
    }
    if cfg.N >= 2:
        doc["comparison"] = comparison_table_row(cfg).to_json()
    else:
        doc["comparison"] = None
    if args.m is not None:
        m = args.m
        if not 0 <= m <= cfg.N:
            raise CliError(f"memory {format_rational(m)} outside [0, N={cfg.N}]")
        env = lower_envelope(bounds, m)
        ach = achievable_envelope(cfg).evaluate(m)
        doc.update(
            m=format_rational(m),
            envelope=format_rational(env),
            achievable=format_rational(ach),
            status="exact" if env == ach else "gap",
            bracket=[format_rational(env), format_rational(ach)],
        )
    if args.format == "json":
        out.emit_json(doc)
        return
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lo", "hi", "status", "lower", "upper", "lower_origin", "upper_origin"])
        for s in segments:
            j = s.to_json()
            w.writerow([*j["interval"], j["status"], j["lower"], j["upper"], j["lower_origin"], j["upper_origin"]])
        out.lines.append(buf.getvalue().rstrip("\n"))
        return
    out.say(f"({cfg.N},{cfg.K}) cache network, {cfg.case.value}{' (boundary)' if cfg.is_boundary else ''}")
    if cfg.N == 1:
        out.say("N=1: degenerate network (single file); no comparison row")
    out.say("lower bounds:")
    for b in bounds:
        out.say(f"  {b}   [{b.origin}]")
    out.say("segments:")
    for s in segments:
        line = format_line(*s.lower)
        if s.status == "exact":
            out.say(f"  exact: {line} on [{format_rational(s.lo)},{format_rational(s.hi)}]")
        else:
            out.say(f"  gap: {line} <= R* <= {format_line(*s.upper)} on [{format_rational(s.lo)},{format_rational(s.hi)}]")
    if doc.get("comparison"):
        c = doc["comparison"]
        out.say(
            f"comparison at M={c['memory']}: cut-set {c['cut_set']}, prior best {c['prior_best']}, new {c['new_bound']}"
        )
    if args.m is not None:
        out.say(f"M={doc['m']}: envelope {doc['envelope']}, status {doc['status']}, bracket [{doc['envelope']}, {doc['achievable']}]")


# ----------------------------------------------------------- simulate


def cmd_simulate(args: argparse.Namespace, out: Outcome) -> None:
    cfg = _config(args)
    if args.scheme == "yu" and args.t is None:
        raise CliError("--scheme yu needs --t")
    if args.scheme == "yu" and not 0 <= args.t <= cfg.K:
        raise CliError(f"--t must lie in 0..K={cfg.K}")
    if args.demand is not None:
        d = make_demand(cfg, args.demand)
        if not is_covering(cfg, d) and not args.allow_outside:
            raise CliError(f"demand {d} is non-covering (not every file is requested); pass --allow-outside to run it")
        demands = [d]
    elif args.all_covering:
        demands = covering_demands(cfg)
    else:
        demands = demand_family(cfg)
    file_bits = args.file_bits
    t = args.t if args.scheme == "yu" else None
    reports = [simulate(cfg, args.scheme, d, t=t, file_bits=file_bits, seed=args.seed) for d in demands]
    ok = all(r.decode_ok for r in reports)
    if args.format == "json":
        out.emit_json({**header("simulate"), "all_decoded": ok, "reports": [r.to_json() for r in reports]})
    else:
        for r in reports:
            status = "decoded" if r.decode_ok else "DECODE FAILURE"
            label = "" if r.in_D else " (outside D)"
            out.say(f"{args.scheme} d={r.demand}{label}: M={format_rational(r.memory)} rate={format_rational(r.measured_rate)} {status}")
        out.say(f"{len(reports)} reports, {'all decoded' if ok else 'decode failures present'}")
    if not ok:
        out.code = EXIT_VERIFY


# ----------------------------------------------------------------- lp


def _lp_demands(cfg: NetworkConfig, spec: str) -> List[Demand]:
    if spec == "family":
        return demand_family(cfg)
    if spec == "covering":
        return covering_demands(cfg)
    demands = []
    for part in spec.split(";"):
        demands.append(make_demand(cfg, ints_arg(part)))
    if len(set(demands)) != len(demands):
        raise CliError("duplicate demand in --demands")
    return demands


def cmd_lp(args: argparse.Namespace, out: Outcome) -> None:
    if args.verify:
        return _lp_verify(args, out)
    cfg = _config(args)
    if args.m is None:
        raise CliError("--m is required")
    if not 0 <= args.m <= cfg.N:
        raise CliError(f"memory {format_rational(args.m)} outside [0, N={cfg.N}]")
    demands = _lp_demands(cfg, args.demands)
    problem = build_problem(cfg, demands, symmetry=not args.no_symmetry, cap=args.cap)
    try:
        sol = solve_min_rate(problem, args.m, method=args.method)
    except LpStatusError as exc:
        raise CliError(f"LP not solved to optimality: {exc}", EXIT_LP) from None
    pdesc = {
        "n": cfg.N,
        "k": cfg.K,
        "demands": [list(d.requests) for d in demands],
        "symmetry": problem.symmetry,
        "cap": problem.gs.cap,
    }
    if args.emit_certificate:
        doc = {
            **header("certificate"),
            "problem": pdesc,
            "m": format_rational(args.m),
            "value": format_rational(sol.value),
            "certificate": sol.certificate.to_json(),
        }
        out.write(args.emit_certificate, json.dumps(doc, indent=1, sort_keys=True) + "\n")
    if args.format == "json":
        res = sol.to_json()
        res["method"] = res["method"].split(" ")[0]
        out.emit_json({**header("lp"), **res, "problem": pdesc})
    else:
        out.say(f"min R at M={format_rational(args.m)}: {format_rational(sol.value)}")
        out.say(f"implied bound: {sol.implied}")
        out.say(f"demands: {' '.join(str(d) for d in demands)}; reduced LP {sol.reduced_size[0]} rows x {sol.reduced_size[1]} cols")
        if args.emit_certificate:
            out.say(f"certificate written to {args.emit_certificate} ({len(sol.certificate.multipliers)} multipliers)")


def _lp_verify(args: argparse.Namespace, out: Outcome) -> None:
    try:
        doc = json.loads(out.read(args.verify))
        p = doc["problem"]
        cfg = NetworkConfig(p["n"], p["k"])
        demands = [make_demand(cfg, d) for d in p["demands"]]
        cert = DualCertificate.from_json(doc["certificate"])
        m = parse_rational(doc["m"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"malformed certificate file: {exc}") from None
    problem = build_problem(cfg, demands, symmetry=p["symmetry"], cap=p["cap"])
    try:
        implied = verify_certificate(problem, cert)
    except CertificateError as exc:
        raise CliError(f"certificate rejected: {exc}", EXIT_VERIFY) from None
    if cert.implied is not None and implied.coefficients != cert.implied.coefficients:
        raise CliError(f"certificate proves {implied}, but the file claims {cert.implied}", EXIT_VERIFY)
    at_m = implied.rate_at(m)
    if "value" in doc and at_m != parse_rational(doc["value"]):
        raise CliError(f"implied bound gives {format_rational(at_m)} at M={format_rational(m)}, file claims {doc['value']}", EXIT_VERIFY)
    if args.format == "json":
        out.emit_json(
            {**header("verify"), "ok": True, "implied": implied.to_json(), "m": format_rational(m), "value_at_m": format_rational(at_m)}
        )
    else:
        out.say(f"certificate OK: {implied}")
        out.say(f"at M={format_rational(m)} the implied bound gives R >= {format_rational(at_m)}")


# -------------------------------------------------------------- prove


def cmd_prove(args: argparse.Namespace, out: Outcome) -> None:
    cfg = _config(args)
    builder = build_theorem1_chain if args.theorem == 1 else build_theorem2_chain
    want = CaseTag.CASE_I if args.theorem == 1 else CaseTag.CASE_II
    if cfg.case != want and not args.override and not (args.theorem == 2 and cfg.is_boundary):
        raise CliError(
            f"case mismatch: ({cfg.N},{cfg.K}) is {cfg.case.value}, theorem {args.theorem} needs {want.value}"
            " (pass --override to build the chain anyway)"
        )
    if cfg.case != want and not cfg.is_boundary:
        raise CliError(
            f"--override only applies at the boundary N = ceil((K+1)/2) = {cfg.threshold}; ({cfg.N},{cfg.K}) is outside it"
        )
    doc = {**header("prove"), "n": cfg.N, "k": cfg.K, "theorem": args.theorem}
    try:
        chain = builder(cfg, override=args.override)
        doc["claimed"] = chain.claimed.to_json()
        doc["steps"] = len(chain.steps)
        proved = verify_chain(chain)
        doc.update(ok=True, proved=proved.to_json())
    except ChainError as exc:
        doc.setdefault("claimed", _claimed_bound(cfg, args.theorem).to_json())
        doc.update(ok=False, error=str(exc))
        chain = None
        out.code = EXIT_VERIFY
    if chain is not None and args.transcript_out:
        if args.transcript_out.endswith(".json"):
            out.write(args.transcript_out, json.dumps(chain_to_json(chain), indent=1) + "\n")
        else:
            out.write(args.transcript_out, to_transcript(chain))
    if args.format == "json":
        out.emit_json(doc)
    elif doc["ok"]:
        out.say(f"OK: ({cfg.N},{cfg.K}) chain of {doc['steps']} steps proves {proved}")
        if args.transcript_out:
            out.say(f"transcript written to {args.transcript_out}")
    else:
        out.say(f"FAILED: ({cfg.N},{cfg.K}) chain for {_claimed_bound(cfg, args.theorem)}: {doc['error']}")


def _claimed_bound(cfg: NetworkConfig, theorem: int):
    from .bounds import theorem1_bound, theorem2_bound

    return theorem1_bound(cfg) if theorem == 1 else theorem2_bound(cfg, override=True)


# ----------------------------------------------------------- plotdata


def plot_rows(cfg: NetworkConfig, step: Fraction) -> List[Tuple[Fraction, Fraction, str]]:
    """Rows (M, R, source) for plotting the rate-memory tradeoff of ``cfg``."""
    if step <= 0:
        raise CliError("grid step must be positive")
    n = Fraction(cfg.N)
    new = all_bounds(cfg)
    known = cutset_bound(cfg) + reference_bounds(cfg)
    low_new = envelope_curve(new, Fraction(0), n)
    low_known = envelope_curve(known, Fraction(0), n)
    ach = achievable_envelope(cfg)
    xs = set()
    x = Fraction(0)
    while x <= n:
        xs.add(x)
        x += step
    xs.add(n)
    for curve in (low_new, low_known, ach):
        xs.update(m for m, _ in curve.breakpoints if 0 <= m <= n)
    rows = []
    for m in sorted(xs):
        lo, kn, up = low_new.evaluate(m), low_known.evaluate(m), ach.evaluate(m)
        rows.append((m, lo, "new_bound"))
        rows.append((m, kn, "known_bound"))
        rows.append((m, up, "achievable"))
        if lo == up:
            rows.append((m, lo, "exact"))
    return rows


def cmd_plotdata(args: argparse.Namespace, out: Outcome) -> None:
    cfg = _config(args)
    rows = plot_rows(cfg, args.step)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PLOT_CSV_HEADER)
    for m, r, src in rows:
        w.writerow([format_rational(m), format_rational(r), src])
    text = buf.getvalue()
    if args.out:
        out.write(args.out, text)
        out.say(f"{len(rows)} rows written to {args.out}")
    else:
        out.lines.append(text.rstrip("\n"))


# ------------------------------------------------------------- replay


def cmd_replay(args: argparse.Namespace, out: Outcome) -> None:
    try:
        rec = RunRecord.from_json(json.loads(out.read(args.record_file)))
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"malformed run record: {exc}") from None
    again = run(rec.command)
    want = rec.outputs
    problems = []
    if again.stdout != want.get("stdout"):
        problems.append("stdout differs")
    if again.code != want.get("exit_code"):
        problems.append(f"exit code {again.code} != {want.get('exit_code')}")
    for path, digest in sorted(dict(want.get("files", {})).items()):
        got = again.files.get(path)
        if got is None or _sha(got) != digest:
            problems.append(f"file {path} differs")
    if problems:
        out.say("replay MISMATCH: " + "; ".join(problems))
        out.code = EXIT_VERIFY
    else:
        out.say(f"replay OK: {' '.join(rec.command)} reproduced byte-identically")


# --------------------------------------------------------------- main


COMMANDS = {
    "bounds": cmd_bounds,
    "simulate": cmd_simulate,
    "lp": cmd_lp,
    "prove": cmd_prove,
    "plotdata": cmd_plotdata,
    "replay": cmd_replay,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2, which is our domain-error code too
        raise CliError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default values for any flag (keys = flag names)")
    common.add_argument("--record", help="write a RunRecord JSON describing this run")
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    net = argparse.ArgumentParser(add_help=False)
    net.add_argument("--n", type=int, help="number of files N")
    net.add_argument("--k", type=int, help="number of users K")

    p = _Parser(prog="codedcache", description="Rate-memory tradeoff toolkit for coded caching.")
    p.add_argument("--version", action="version", version=f"codedcache {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bounds", parents=[common, net], help="lower bounds, envelope, exact segments, comparison row")
    b.add_argument("--m", type=rational_arg, help="memory point (p/q)")

    s = sub.add_parser("simulate", parents=[common, net], help="place/deliver/decode a scheme bit-exactly")
    s.add_argument("--scheme", choices=("chen", "yu"), required=False, default="chen")
    s.add_argument("--t", type=int, help="placement parameter of the yu scheme")
    s.add_argument("--demand", type=ints_arg, help="single demand, e.g. 1,2,3,1 (default: the demand family)")
    s.add_argument("--all-covering", action="store_true", help="run every covering demand")
    s.add_argument("--allow-outside", action="store_true", help="accept a non-covering --demand")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--file-bits", type=int, help="bits per file (multiple of the subpacketization)")

    lp = sub.add_parser("lp", parents=[common, net], help="exact Shannon-LP lower bound with dual certificate")
    lp.add_argument("--m", type=rational_arg, help="memory point (p/q)")
    lp.add_argument("--demands", default="family", help="'family', 'covering' or explicit '1,2,1,2;2,1,2,1'")
    lp.add_argument("--no-symmetry", action="store_true", help="do not add user-symmetry equalities")
    lp.add_argument("--cap", type=int, default=12, help="maximum number of ground-set variables")
    lp.add_argument("--method", choices=("auto", "float", "exact"), default="auto")
    lp.add_argument("--emit-certificate", metavar="FILE", help="write the dual certificate as JSON")
    lp.add_argument("--verify", metavar="FILE", help="re-check a certificate file instead of solving")

    pr = sub.add_parser("prove", parents=[common, net], help="build and check a converse chain")
    pr.add_argument("--theorem", type=int, choices=(1, 2), required=False, default=1)
    pr.add_argument("--override", action="store_true", help="build the chain outside its case")
    pr.add_argument("--transcript-out", metavar="FILE", help="write the transcript (.json for the JSON form)")

    pd = sub.add_parser("plotdata", parents=[common, net], help="CSV M,R,source for plotting the tradeoff")
    pd.add_argument("--step", type=rational_arg, default=Fraction(1, 16), help="grid step (p/q)")
    pd.add_argument("--out", metavar="FILE", help="write CSV here instead of stdout")

    rp = sub.add_parser("replay", parents=[common], help="re-run a RunRecord and compare outputs")
    rp.add_argument("record_file")
    return p


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str], out: Outcome) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    try:
        data = json.loads(out.read(args.config))
    except ValueError as exc:
        raise CliError(f"config {args.config}: {exc}") from None
    if not isinstance(data, dict):
        raise CliError(f"config {args.config}: expected a JSON object")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in sub._actions}
    defaults = {}
    for key, val in data.items():
        dest = key.replace("-", "_")
        if dest not in known or dest in ("config", "record"):
            raise CliError(f"config {args.config}: unknown key {key!r} for {args.command}")
        action = next(a for a in sub._actions if a.dest == dest)
        if action.type is not None and isinstance(val, (str, int)) and not isinstance(val, bool):
            try:
                val = action.type(str(val))
            except argparse.ArgumentTypeError as exc:
                raise CliError(f"config {args.config}: {key}: {exc}") from None
        defaults[dest] = val
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)  # explicit flags still win over the file


def run(argv: Sequence[str]) -> Outcome:
    out = Outcome()
    try:
        parser = build_parser()
        args = _apply_config(parser, list(argv), out)
        COMMANDS[args.command](args, out)
    except CliError as exc:
        out.code = exc.code
        out.say(f"error: {exc}")
    except DomainError as exc:
        out.code = EXIT_DOMAIN
        out.say(f"error: {exc}")
    except LpStatusError as exc:
        out.code = EXIT_LP
        out.say(f"error: {exc}")
    except ValueError as exc:
        out.code = EXIT_DOMAIN
        out.say(f"error: {exc}")
    else:
        if getattr(args, "record", None):
            config = {k: _jsonable(v) for k, v in sorted(vars(args).items()) if k not in ("record",)}
            rec = RunRecord(
                command=[a for a in _strip_record(argv)],
                config=config,
                inputs={p: _sha(t) for p, t in sorted(out.inputs.items())},
                outputs={"stdout": out.stdout, "exit_code": out.code, "files": {p: _sha(t) for p, t in sorted(out.files.items())}},
                timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            )
            Path(args.record).write_text(json.dumps(rec.to_json(), indent=1, sort_keys=True) + "\n")
    return out


def _strip_record(argv: Sequence[str]) -> List[str]:
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        if a == "--record":
            skip = True
            continue
        if a.startswith("--record="):
            continue
        out.append(a)
    return out


def _jsonable(v):
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, tuple):
        return list(v)
    return v


def main(argv: Optional[Sequence[str]] = None) -> int:
    out = run(sys.argv[1:] if argv is None else argv)
    stream = sys.stdout if out.code == EXIT_OK or not out.lines or not out.lines[-1].startswith("error:") else sys.stderr
    stream.write(out.stdout)
    return out.code


if __name__ == "__main__":
    sys.exit(main())
