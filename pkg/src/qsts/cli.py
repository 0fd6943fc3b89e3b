"""Command-line entry point: ``qsts {share,security,decoy,efficiency}``.

Exit status is 0 on success, 1 on a usage error and 2 when a decoy check
aborts a ``share`` run. Output is deterministic for fixed arguments; the
default seed can be set with ``QSTS_SEED``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import __version__
from .adversary import intercept_resend_experiment, missing_controller_experiment
from .decoys import EveModel
from .metrics import efficiency
from .protocol import AGENTS, Party, ProtocolConfig, ProtocolError, run_protocol, secret_labels
from .qstate import QStateError, StateVector

SEED_ENV = "QSTS_SEED"
SECRET_NORM_TOL = 1e-6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse number list {text!r}") from None


def parse_secret(spec: str, m: int, phases: str | None = None) -> StateVector | None:
    """``"random"`` or comma-separated real amplitudes, with optional phases in radians."""
    if spec == "random":
        if phases is not None:
            raise UsageError("--phases needs an explicit --secret")
        return None
    amps = np.array(_floats(spec))
    if amps.size != 2**m:
        raise UsageError(f"--secret needs {2**m} amplitudes for m={m}, got {amps.size}")
    if phases is not None:
        ph = np.array(_floats(phases))
        if ph.size != amps.size:
            raise UsageError("--phases must match --secret in length")
        amps = amps * np.exp(1j * ph)
    norm = np.linalg.norm(amps)
    if abs(norm - 1) > SECRET_NORM_TOL:
        raise UsageError(f"--secret is not normalised (norm {norm:.9f})")
    return StateVector(secret_labels(m), amps, normalize=True)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qsts", description="Five-party quantum state sharing simulator.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, m_default=1):
        p.add_argument("--m", type=int, default=m_default, help="number of shared qubits")
        p.add_argument("--seed", type=int, default=None, help=f"random seed (default ${SEED_ENV} or 0)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--output", "-o", default=None, help="write here instead of stdout")

    agents = [p.value for p in AGENTS]
    eves = [e.value for e in EveModel] + ["random", "z"]

    share = sub.add_parser("share", help="run the protocol once and print its transcript")
    common(share)
    share.add_argument("--receiver", choices=agents, default="charlie")
    share.add_argument("--secret", default="random", help='"random" or real amplitudes a0,a1,...')
    share.add_argument("--phases", default=None, help="phases in radians for --secret amplitudes")
    share.add_argument("--decoys", type=int, default=0, help="decoys per transmitted sequence")
    share.add_argument("--eve", choices=eves, default="none")
    share.add_argument("--threshold", type=int, default=0, help="tolerated decoy mismatches")

    sec = sub.add_parser("security", help="missing-controller guessing experiment")
    common(sec)
    sec.add_argument("--receiver", choices=agents, default="charlie")
    sec.add_argument(
        "--missing",
        default=None,
        help='comma-separated withholding controllers, or "none" (default: first controller)',
    )
    sec.add_argument("--trials", type=int, default=10000)

    dec = sub.add_parser("decoy", help="intercept-resend detection on decoy photons")
    common(dec)
    dec.add_argument("--decoys", type=int, default=32, help="decoys per check")
    dec.add_argument("--trials", type=int, default=100, help="number of checks pooled")
    dec.add_argument("--eve", choices=eves + ["all"], default="all")

    eff = sub.add_parser("efficiency", help="qubit/bit accounting")
    common(eff)
    return parser


def _rows_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ";".join(map(str, v)) if isinstance(v, list) else v for k, v in row.items()})
    return buf.getvalue()


def _flatten(doc: dict) -> dict:
    out = {}
    for k, v in doc.items():
        if isinstance(v, dict):
            out.update({f"{k}_{kk}": vv for kk, vv in v.items()})
        else:
            out[k] = v
    return out


def _render(doc, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    rows = doc["results"] if isinstance(doc, dict) and "results" in doc else [doc]
    return _rows_csv([_flatten(r) for r in rows])


def _execute(args) -> tuple[dict, int]:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.command == "share":
        if args.format == "csv":
            raise UsageError("transcripts are JSON only")
        config = ProtocolConfig(
            args.m,
            receiver=args.receiver,
            seed=seed,
            decoys_per_sequence=args.decoys,
            eve=EveModel.parse(args.eve),
            decoy_threshold=args.threshold,
        )
        secret = parse_secret(args.secret, args.m, args.phases)
        transcript = run_protocol(config, secret)
        return transcript.to_dict(), 2 if transcript.aborted else 0
    if args.command == "security":
        ProtocolConfig(args.m, receiver=args.receiver)
        receiver = Party.parse(args.receiver)
        if args.missing is None:
            missing = [next(p for p in AGENTS if p is not receiver)]
        elif args.missing.lower() == "none":
            missing = []
        else:
            missing = [s.strip() for s in args.missing.split(",") if s.strip()]
        stats = missing_controller_experiment(args.m, missing, args.trials, seed, receiver)
        out = stats.to_dict()
        out["seed"] = seed
        # only the product of the guessed signs matters, so any nonempty set of
        # withholding controllers leaves one fair coin per shared qubit
        out["expected_rate"] = 0.5**args.m if stats.missing else 1.0
        return out, 0
    if args.command == "decoy":
        models = list(EveModel) if args.eve == "all" else [EveModel.parse(args.eve)]
        results = []
        for eve in models:
            d = intercept_resend_experiment(args.decoys, eve, args.trials, seed)
            results.append({**d.to_dict(), "seed": seed})
        return {"schema_version": results[0]["schema_version"], "kind": "decoy_experiment", "results": results}, 0
    if args.command == "efficiency":
        return efficiency(args.m).to_dict(), 0
    raise UsageError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        doc, status = _execute(args)
        text = _render(doc, args.format)
    except (UsageError, ProtocolError, QStateError, ValueError) as exc:
        print(f"qsts: error: {exc}", file=sys.stderr)
        return 1
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
