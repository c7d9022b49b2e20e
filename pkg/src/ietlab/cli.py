"""Command-line front end.

Every command reads exact data (an IET file or a certificate file plus
exact scalar flags), runs one pipeline, and writes a JSON or CSV artifact.
All arithmetic is exact, so identical configurations produce byte
identical artifacts.  A config file supplies defaults; command-line flags
override it.  Hard failures exit with machine-readable JSON on stderr:
parse problems exit 2, precondition violations exit 3, verification
failures exit 4.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from .errors import (
    IetLabError,
    ParseError,
    VerificationError,
)
from .exactnum import parse_scalar, scalar
from .iet import IET, SCHEMA, check_idoc
from .intervals import Interval, IntervalSet, dyadic
from .mixing import mixing_window_check, rigidity_blocks_mixing
from .rigidity import (
    RigidityCertificate,
    backward_partition,
    certify_rigidity,
    classify_pairs,
    verify_certificate,
)
from .return_map import first_return

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_VERIFICATION = 4


def _exit_code(exc: IetLabError) -> int:
    if isinstance(exc, ParseError):
        return EXIT_PARSE
    if isinstance(exc, VerificationError):
        return EXIT_VERIFICATION
    return EXIT_PRECONDITION


def _load_json_file(path: str):
    try:
        with open(path, "r") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ParseError("file not found", path=path) from None
    except json.JSONDecodeError as exc:
        raise ParseError("invalid JSON", path=path, cause=str(exc)) from None


def _load_iet(path: str) -> IET:
    return IET.from_json(_load_json_file(path))


def _load_certificate(path: str) -> RigidityCertificate:
    return RigidityCertificate.from_json(_load_json_file(path))


def _write_text(path, text: str):
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_json(path, obj):
    _write_text(path, json.dumps(obj, indent=2) + "\n")


# -- config handling ---------------------------------------------------------

_COMMAND_FIELDS = {
    "return-map": {"iet", "lo", "hi", "step_cap", "output", "seed"},
    "certify-rigidity": {
        "iet",
        "epsilon",
        "n",
        "n_list",
        "assume_minimal",
        "output",
        "seed",
    },
    "verify-certificate": {"certificate", "output", "seed"},
    "correlations": {"iet", "n_from", "n_to", "depth", "output", "seed"},
    "mixing-window": {"iet", "j", "k", "epsilon", "depth", "output", "seed"},
    "block-mixing": {"certificate", "epsilon", "output", "seed"},
    "minimality": {"iet", "depth", "output", "seed"},
    "partition": {"iet", "n", "output", "seed"},
}


def _merge_config(args: argparse.Namespace) -> dict:
    """Config-file values overridden by explicit command-line flags."""
    fields = _COMMAND_FIELDS[args.command]
    merged = {}
    if args.config is not None:
        cfg = _load_json_file(args.config)
        if not isinstance(cfg, dict):
            raise ParseError("config must be a JSON object", path=args.config)
        unknown = sorted(set(cfg) - fields - {"command"})
        if unknown:
            raise ParseError("unknown config fields", fields=unknown)
        declared = cfg.get("command")
        if declared is not None and declared != args.command:
            raise ParseError(
                "config written for a different command",
                config_command=declared,
                command=args.command,
            )
        merged.update({k: v for k, v in cfg.items() if k != "command"})
    for name in fields:
        value = getattr(args, name, None)
        if value is not None and value is not False:
            merged[name] = value
    return merged


def _require(params: dict, *names):
    missing = [n for n in names if params.get(n) is None]
    if missing:
        raise ParseError("missing required parameters", missing=missing)


# -- commands ----------------------------------------------------------------


def _cmd_return_map(params):
    _require(params, "iet", "lo", "hi")
    iet = _load_iet(params["iet"])
    base = Interval(parse_scalar(str(params["lo"])), parse_scalar(str(params["hi"])))
    cap = params.get("step_cap")
    system = first_return(iet, base, None if cap is None else int(cap))
    _write_json(params.get("output"), system.to_json())


def _cmd_minimality(params):
    _require(params, "iet", "depth")
    iet = _load_iet(params["iet"])
    report = check_idoc(iet, int(params["depth"]))
    _write_json(params.get("output"), report.to_json())


def _cmd_partition(params):
    _require(params, "iet", "n")
    iet = _load_iet(params["iet"])
    bp = backward_partition(iet, int(params["n"]))
    payload = bp.to_json()
    payload["classes"] = [c.to_json() for c in classify_pairs(bp, iet)]
    _write_json(params.get("output"), payload)


def _parse_n_list(raw) -> list:
    if isinstance(raw, list):
        values = [int(v) for v in raw]
    else:
        try:
            values = [int(part) for part in str(raw).split(",") if part.strip()]
        except ValueError:
            raise ParseError("n_list must be comma-separated integers",
                             value=str(raw)) from None
    if not values:
        raise ParseError("n_list is empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ParseError("n_list must be strictly increasing", value=values)
    return values


def _cmd_certify(params):
    _require(params, "iet", "epsilon")
    iet = _load_iet(params["iet"])
    eps = parse_scalar(str(params["epsilon"]))
    assume = bool(params.get("assume_minimal", False))
    if params.get("n") is None and params.get("n_list") is None:
        raise ParseError("missing required parameters", missing=["n or n_list"])
    if params.get("n") is not None and params.get("n_list") is not None:
        raise ParseError("give either n or n_list, not both")
    if params.get("n") is not None:
        cert = certify_rigidity(iet, eps, int(params["n"]), assume_minimal=assume)
        _write_json(params.get("output"), cert.to_json())
        return
    values = _parse_n_list(params["n_list"])
    certificates = []
    ks = []
    for n in values:
        cert = certify_rigidity(iet, eps, n, assume_minimal=assume)
        iet.clear_power_cache()
        certificates.append(cert.to_json())
        ks.append(cert.k)
    ratios = [Fraction(b, a) for a, b in zip(sorted(set(ks)), sorted(set(ks))[1:])]
    payload = {
        "schema": SCHEMA,
        "kind": "certificate-batch",
        "iet": iet.to_json(),
        "epsilon": str(eps),
        "n_values": values,
        "k_values": ks,
        "max_k_ratio": str(max(ratios)) if ratios else None,
        "certificates": certificates,
    }
    if params.get("seed") is not None:
        payload["seed"] = int(params["seed"])
    _write_json(params.get("output"), payload)


def _cmd_verify_certificate(params):
    _require(params, "certificate")
    cert = _load_certificate(params["certificate"])
    report = verify_certificate(cert)
    _write_json(params.get("output"), report.to_json())
    report.ensure()


def _cmd_correlations(params):
    _require(params, "iet", "n_from", "n_to")
    iet = _load_iet(params["iet"])
    n_from, n_to = int(params["n_from"]), int(params["n_to"])
    depth = int(params.get("depth", 1))
    if n_from > n_to:
        raise ParseError("need n_from <= n_to", n_from=n_from, n_to=n_to)
    if depth < 0:
        raise ParseError("depth must be >= 0", depth=depth)
    leaves = [IntervalSet.of(dyadic(depth, b)) for b in range(2**depth)]
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["n", "a", "b", "value", "target", "deviation"])
    for n in range(n_from, n_to + 1):
        pw = iet.power(-n)
        pulled = [pw.image_of_set(leaf) for leaf in leaves]
        for a, pa in enumerate(pulled):
            measure_a = leaves[a].measure()
            for b, leaf_b in enumerate(leaves):
                value = pa.intersect(leaf_b).measure()
                target = measure_a * leaf_b.measure()
                deviation = value - target
                if deviation.sign() < 0:
                    deviation = -deviation
                writer.writerow([n, a, b, str(value), str(target), str(deviation)])
    _write_text(params.get("output"), buffer.getvalue())


def _cmd_mixing_window(params):
    _require(params, "iet", "j", "k", "epsilon")
    iet = _load_iet(params["iet"])
    report = mixing_window_check(
        iet,
        int(params["j"]),
        int(params["k"]),
        parse_scalar(str(params["epsilon"])),
        int(params.get("depth", 6)),
    )
    _write_json(params.get("output"), report.to_json())


def _cmd_block_mixing(params):
    _require(params, "certificate")
    cert = _load_certificate(params["certificate"])
    if params.get("epsilon") is not None:
        cert = cert.with_epsilon(parse_scalar(str(params["epsilon"])))
    witness = rigidity_blocks_mixing(cert.iet, cert)
    _write_json(params.get("output"), witness.to_json())


_HANDLERS = {
    "return-map": _cmd_return_map,
    "certify-rigidity": _cmd_certify,
    "verify-certificate": _cmd_verify_certificate,
    "correlations": _cmd_correlations,
    "mixing-window": _cmd_mixing_window,
    "block-mixing": _cmd_block_mixing,
    "minimality": _cmd_minimality,
    "partition": _cmd_partition,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ietlab",
        description="exact interval-exchange computations with replayable certificates",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--output", help="artifact path (default: stdout)")
        p.add_argument("--seed", type=int, help="recorded in batch artifacts")

    p = sub.add_parser("return-map", help="first-return system on an interval")
    common(p)
    p.add_argument("--iet", help="IET JSON file")
    p.add_argument("--lo", help="base interval left endpoint (exact scalar)")
    p.add_argument("--hi", help="base interval right endpoint (exact scalar)")
    p.add_argument("--step-cap", dest="step_cap", type=int)

    p = sub.add_parser("certify-rigidity", help="emit a rigidity certificate")
    common(p)
    p.add_argument("--iet")
    p.add_argument("--epsilon", help="displacement bound (exact scalar)")
    p.add_argument("--n", type=int, help="partition depth")
    p.add_argument("--n-list", dest="n_list", help="comma-separated depths")
    p.add_argument("--assume-minimal", dest="assume_minimal", action="store_true")

    p = sub.add_parser("verify-certificate", help="re-check a certificate from scratch")
    common(p)
    p.add_argument("--certificate", help="certificate JSON file")

    p = sub.add_parser("correlations", help="dyadic-pair correlations as CSV")
    common(p)
    p.add_argument("--iet")
    p.add_argument("--n-from", dest="n_from", type=int)
    p.add_argument("--n-to", dest="n_to", type=int)
    p.add_argument("--depth", type=int)

    p = sub.add_parser("mixing-window", help="dyadic mixing-window membership")
    common(p)
    p.add_argument("--iet")
    p.add_argument("--j", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--epsilon")
    p.add_argument("--depth", type=int)

    p = sub.add_parser("block-mixing", help="dyadic obstruction from a certificate")
    common(p)
    p.add_argument("--certificate")
    p.add_argument("--epsilon", help="re-issue the certificate at this epsilon first")

    p = sub.add_parser("minimality", help="distinct-orbit certification")
    common(p)
    p.add_argument("--iet")
    p.add_argument("--depth", type=int)

    p = sub.add_parser("partition", help="backward-orbit partition and pair classes")
    common(p)
    p.add_argument("--iet")
    p.add_argument("--n", type=int)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        params = _merge_config(args)
        _HANDLERS[args.command](params)
    except IetLabError as exc:
        error = {"schema": SCHEMA, "kind": "error", "error": exc.to_json()}
        sys.stderr.write(json.dumps(error, indent=2) + "\n")
        return _exit_code(exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
