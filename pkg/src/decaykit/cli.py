"""Command-line interface: every subcommand prints one JSON report."""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from typing import Any, Callable, Sequence

from . import __version__
from .backends import backend_for
from .builtin import builtin_certificate_json
from .cable import (
    CableParams,
    LOVerdict,
    cable_abelianization,
    abelian_image,
    cable_peripherals,
    lo_window,
    satellite_quotient,
    satellite_target,
    satellite_target_backend,
)
from .certificate import (
    CertificateFormatError,
    DecayCertificate,
    GridError,
    conclude_decay,
    fraction_text,
    verify_derivation,
)
from .presentations import load_presentation
from .registry import Registry, RegistryError, knot_presentation, parse_knot_id
from .search import SearchOutcome, cone_search, enumerate_ball, replay_trace, torsion_scan
from .words import WordSyntaxError, parse_word

__all__ = ["EXIT_OK", "EXIT_REJECT", "EXIT_INPUT", "Report", "canonical", "main"]

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_INPUT = 2
SEARCH_EXIT = {
    SearchOutcome.ASSIGNMENT: 0,
    SearchOutcome.CONTRADICTION: 3,
    SearchOutcome.NO_OBSTRUCTION: 4,
}


class InputError(Exception):
    """Bad user input; reported with exit code 2."""


class Report(dict):
    """A JSON report: command, inputs, verdict, details, version, timing."""

    def dumps(self) -> str:
        return json.dumps(self, indent=2, sort_keys=True)


def canonical(report: dict[str, Any]) -> str:
    """Report text without the timing field, for byte comparison."""
    return json.dumps({k: v for k, v in report.items() if k != "timing"}, indent=2, sort_keys=True)


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from None


def _params(p: int, q: int) -> CableParams:
    try:
        return CableParams.of(p, q)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _registry(args) -> Registry:
    try:
        return Registry.load(args.registry)
    except RegistryError as exc:
        raise InputError(str(exc)) from None


def _companion_decay(args, knot: str) -> Fraction | None:
    reg = _registry(args)
    try:
        key = str(parse_knot_id(knot))
    except RegistryError as exc:
        raise InputError(str(exc)) from None
    if key not in reg.ids():
        raise InputError(f"unknown companion {knot!r}; add it with 'registry add'")
    return reg.lookup(key).decay


def _window(p: int, q: int) -> dict[str, Any]:
    lo, hi = p * q - p - q, p * q
    return {"left_orderable_below": str(lo), "unknown": [str(lo), str(hi)], "not_left_orderable_from": str(hi)}


# ---------------------------------------------------------------------------
# Subcommands: each returns (inputs, verdict, details, exit code, summary)
# ---------------------------------------------------------------------------


def cmd_cable(args):
    params = _params(args.p, args.q)
    decay = _companion_decay(args, args.of)
    meridian, longitude = cable_peripherals(params)
    slope = params.slope
    details: dict[str, Any] = {
        "u": params.u,
        "v": params.v,
        "meridian": str(meridian),
        "longitude": str(longitude),
        "companion_decay": fraction_text(decay) if decay is not None else None,
        "lo_window": _window(args.p, args.q),
    }
    inputs = {"p": args.p, "q": args.q, "of": args.of}
    if decay is None:
        details["decay"] = None
        details["message"] = f"cabling criterion inapplicable: companion {args.of} has no known decay bound"
        return inputs, "INAPPLICABLE", details, EXIT_OK, details["message"]
    if slope <= decay:
        details["decay"] = None
        details["message"] = f"cabling criterion inapplicable: {fraction_text(slope)} <= {fraction_text(decay)}"
        return inputs, "INAPPLICABLE", details, EXIT_OK, details["message"]
    pq = args.p * args.q
    details["decay"] = str(pq)
    w = details["lo_window"]
    summary = f"decayed {pq}, LO for r < {w['left_orderable_below']}, unknown [{w['unknown'][0]}, {w['unknown'][1]})"
    return inputs, "DECAYED", details, EXIT_OK, summary


def cmd_verify(args):
    inputs = {"certificate": args.path, "grid": args.grid}
    try:
        cert = DecayCertificate.load(args.path)
        report = verify_derivation(cert, args.grid)
    except OSError as exc:
        raise InputError(f"cannot read certificate: {exc}") from None
    except (CertificateFormatError, GridError) as exc:
        raise InputError(str(exc)) from None
    details = report.to_json()
    if report.accepted:
        conclusion = conclude_decay(report)
        details["conclusion"] = conclusion.to_json()
        return inputs, "ACCEPT", details, EXIT_OK, f"ACCEPT: {conclusion.statement} (grid-limited)"
    first = report.failures[0] if report.failures else {"reason": "branch tree not exhaustive"}
    return inputs, "REJECT", details, EXIT_REJECT, f"REJECT: {first}"


def cmd_gen(args):
    inputs = {"p": args.p, "q": args.q, "r": fraction_text(args.r)}
    try:
        data = builtin_certificate_json(args.p, args.q, args.r)
    except ValueError as exc:
        if "inapplicable" in str(exc):
            return inputs, "INAPPLICABLE", {"message": str(exc)}, EXIT_OK, str(exc)
        raise InputError(str(exc)) from None
    cert = DecayCertificate.from_json(data)
    details: dict[str, Any] = {"judgments": len(cert.judgments), "leaves": len(cert.leaves)}
    if args.out:
        cert.save(args.out)
        details["written"] = args.out
        inputs["out"] = args.out
    else:
        details["certificate"] = cert.to_json()
    return inputs, "GENERATED", details, EXIT_OK, f"certificate for cable({args.p},{args.q}) over r = {inputs['r']}"


def cmd_registry(args):
    reg = _registry(args)
    if args.action == "list":
        records = reg.to_json()
        return {"action": "list"}, "OK", {"records": records}, EXIT_OK, f"{len(records)} records"
    inputs = {"action": args.action, "knot": args.knot}
    try:
        if args.action == "lookup":
            key = str(parse_knot_id(args.knot))
            if key not in reg.ids():
                return inputs, "NOT_FOUND", {"knot": key}, EXIT_REJECT, f"{key} not in registry"
            rec = reg.lookup(key)
        else:
            rec = reg.add(args.knot)
            reg.save()
    except RegistryError as exc:
        raise InputError(str(exc)) from None
    return inputs, "OK", rec.to_json(), EXIT_OK, f"{rec.id}: decay {rec.to_json()['decay']}"


def cmd_lo_window(args):
    _params(args.p, args.q)
    inputs: dict[str, Any] = {"p": args.p, "q": args.q, "r": fraction_text(args.r)}
    decay = None
    if args.of is not None:
        inputs["of"] = args.of
        decay = _companion_decay(args, args.of)
    elif args.companion_decay is not None:
        decay = args.companion_decay
        inputs["companion_decay"] = fraction_text(decay)
    verdict = lo_window(args.p, args.q, decay, args.r)
    details = {"lo_window": _window(args.p, args.q), "companion_decay": fraction_text(decay) if decay is not None else None}
    return inputs, verdict.value, details, EXIT_OK, f"r = {inputs['r']}: {verdict.value}"


def cmd_search(args):
    inputs = {"presentation": args.path, "radius": args.radius, "budget": args.budget}
    if args.radius < 1:
        raise InputError("radius must be positive")
    try:
        pres, hint = load_presentation(args.path)
        backend = backend_for(pres, hint)
    except OSError as exc:
        raise InputError(f"cannot read presentation: {exc}") from None
    except (ValueError, KeyError) as exc:
        raise InputError(str(exc)) from None
    inst = enumerate_ball(pres, args.radius, backend)
    result = cone_search(inst, args.budget)
    details = result.to_json(inst)
    details["backend"] = type(backend).__name__
    details["exact"] = inst.exact
    if result.outcome is SearchOutcome.CONTRADICTION:
        details["trace_replayed"] = replay_trace(inst, result.trace, backend)
        torsion = torsion_scan(inst, backend, 2 * args.radius + 2)
        if torsion is not None:
            details["torsion"] = {"element": str(torsion[0]), "order": torsion[1]}
    outcome = result.outcome
    return inputs, outcome.value, details, SEARCH_EXIT[outcome], f"{outcome.value} on {len(inst)} elements"


def cmd_quotient(args):
    params = _params(args.p, args.q)
    inputs: dict[str, Any] = {"p": args.p, "q": args.q, "word": args.word}
    companion = None
    alphabet = ["m", "l", "t"]
    if args.of is not None:
        inputs["of"] = args.of
        try:
            companion = knot_presentation(parse_knot_id(args.of))
        except RegistryError as exc:
            raise InputError(str(exc)) from None
        if companion is None:
            raise InputError(f"no presentation available for {args.of}")
        alphabet += [g for g in companion.generators if g not in alphabet]
    try:
        w = parse_word(args.word, alphabet)
        image = satellite_quotient(w, params, companion)
    except (WordSyntaxError, ValueError) as exc:
        raise InputError(str(exc)) from None
    target = satellite_target(params)
    backend = satellite_target_backend(params)
    hom = cable_abelianization(params)
    details = {
        "target": str(target),
        "image": str(image),
        "normal_form": str(backend.normal_word(image)),
        "homology": abelian_image(image, {"m": hom["m"], "t": hom["t"]}),
    }
    return inputs, "OK", details, EXIT_OK, f"{args.word} -> {image}"


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="decaykit", allow_abbrev=False, description="Decayed knots and cables.")
    parser.add_argument("--version", action="version", version=f"decaykit {__version__}")
    parser.add_argument("--registry", default=None, help="registry JSON (default: $DECAYKIT_REGISTRY or the shipped file)")
    parser.add_argument("--verbose", action="store_true", help="print a one-line summary to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func: Callable, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help, allow_abbrev=False)
        sp.set_defaults(func=func)
        return sp

    sp = add("cable", cmd_cable, "cable a registered companion and report its decay")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--of", required=True, help="companion id, e.g. torus:2,3")

    sp = add("verify-cert", cmd_verify, "check a decay certificate")
    sp.add_argument("path")
    sp.add_argument("--grid", type=int, default=5)

    sp = add("gen-cert", cmd_gen, "emit the builtin cable certificate")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--r", type=_rational, required=True, help="companion decay bound")
    sp.add_argument("--out", default=None)

    sp = add("registry", cmd_registry, "query or extend the decayed-knot registry")
    sp.add_argument("action", choices=("list", "lookup", "add"))
    sp.add_argument("knot", nargs="?")

    sp = add("lo-window", cmd_lo_window, "classify r-surgery on a cable")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--r", type=_rational, required=True)
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--of", default=None, help="companion id from the registry")
    group.add_argument("--companion-decay", type=_rational, default=None)

    sp = add("search", cmd_search, "finite positive-cone search on a presentation")
    sp.add_argument("path")
    sp.add_argument("--radius", type=int, default=3)
    sp.add_argument("--budget", type=int, default=200_000)

    sp = add("quotient", cmd_quotient, "image of a cable-group word after killing the companion longitude")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--word", required=True)
    sp.add_argument("--of", default=None, help="companion id whose generators may appear in the word")
    return parser


def run(argv: Sequence[str] | None = None) -> tuple[Report, int]:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "registry" and args.action != "list" and not args.knot:
        parser.error(f"registry {args.action} needs a knot id")
    start = time.perf_counter()
    try:
        inputs, verdict, details, code, summary = args.func(args)
    except InputError as exc:
        inputs, verdict, details, code, summary = {}, "ERROR", {"error": str(exc)}, EXIT_INPUT, f"error: {exc}"
    report = Report(
        command=args.command,
        inputs=inputs,
        verdict=verdict,
        details=details,
        version=__version__,
        timing={"seconds": f"{time.perf_counter() - start:.3f}"},
    )
    if args.verbose:
        print(summary, file=sys.stderr)
    return report, code


def main(argv: Sequence[str] | None = None) -> int:
    report, code = run(argv)
    print(report.dumps())
    return code


if __name__ == "__main__":
    sys.exit(main())
