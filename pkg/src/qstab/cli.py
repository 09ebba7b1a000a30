"""Command-line interface.

Commands:
  validate   check trace preservation of a channel file
  analyze    decide invariance/GAS of a subspace and print the requested
             decomposition (nfd, did, dual, or all three)
  asympt     asymptotic absorption probabilities onto invariant parts
  example    emit a built-in example channel file

Exit codes: 0 verdict positive, 1 verdict negative or precondition
unmet, 2 input error, 3 internal inconsistency.
"""

import argparse
import json
import sys

import numpy as np

from .asymptotics import analyze_asymptotics, iterate_oracle
from .channel import KrausMap, check_density, is_invariant, validate
from .did import did, is_gas_dual, transition_rates
from .errors import InternalInconsistencyError, NumericalDegeneracyError
from .io import (
    ChannelFormatError,
    axis_aligned_indices,
    channel_document,
    encode_matrix,
    parse_parts_spec,
    parse_subspace_spec,
    read_channel,
    read_state,
)
from .linalg import SubspaceBasis
from .models import EXAMPLES, GammaConstraintError
from .nfd import nfd
from .channel import dual_support_sequence
from .tolerances import SPEC_TOL

REPORT_SCHEMA = "qstab-report/1"

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def _subspace_label(sub: SubspaceBasis) -> str:
    idx = axis_aligned_indices(sub)
    if idx is not None:
        return "{" + ",".join(str(i) for i in idx) + "}"
    return f"<dim {sub.dim}>"


def _subspace_json(sub: SubspaceBasis) -> dict:
    return {
        "dim": sub.dim,
        "indices": axis_aligned_indices(sub),
        "projector": encode_matrix(sub.projector()),
    }


def _symbolic_sigma(sigma: float, gammas, tol: float = 1e-9) -> str | None:
    if gammas is None:
        return None
    if abs(sigma - 1.0) <= tol:
        return "1"
    for i, g in enumerate(gammas, start=1):
        if abs(sigma - (1.0 - g)) <= tol:
            return f"1-g{i}"
    return None


def _load_channel(path, allow_non_tp: bool):
    kmap, meta = read_channel(path)
    report = validate(kmap)
    if not report.is_tp and not allow_non_tp:
        print(
            f"channel is not trace preserving (residual {report.tp_residual:.3e}); "
            "pass --allow-non-tp to analyze anyway",
            file=sys.stderr,
        )
        raise SystemExit(EXIT_NEGATIVE)
    return kmap, meta


def cmd_validate(args) -> int:
    kmap, _ = read_channel(args.file)
    report = validate(kmap)
    if args.json:
        print(
            json.dumps(
                {
                    "schema": REPORT_SCHEMA,
                    "command": "validate",
                    "dim": kmap.dim,
                    "n_kraus": kmap.n_kraus,
                    "is_tp": report.is_tp,
                    "tp_residual": report.tp_residual,
                }
            )
        )
    else:
        verdict = "yes" if report.is_tp else "no"
        print(f"TP: {verdict} (residual {report.tp_residual:.3g}); d={kmap.dim}, K={kmap.n_kraus}")
    if report.is_tp or args.allow_non_tp:
        return EXIT_OK
    return EXIT_NEGATIVE


def _run_nfd(kmap, sub, gammas, tau_spec):
    result = nfd(kmap, sub, tau_spec=tau_spec)
    stages = []
    for i, st in enumerate(result.stages, start=1):
        sym = _symbolic_sigma(st.sigma, gammas)
        stages.append(
            {
                "index": i,
                "subspace": st.subspace,
                "sigma": st.sigma,
                "sigma_symbolic": sym,
            }
        )
    return {
        "gas": result.is_gas,
        "stages": stages,
        "minimal_gas": result.minimal_gas,
    }


def _run_did(kmap, sub):
    result = did(kmap, sub)
    stages = [
        {
            "index": i,
            "subspace": st.subspace,
            "gamma_min": st.gamma_min,
            "gamma_max": st.gamma_max,
        }
        for i, st in enumerate(result.stages, start=1)
    ]
    out = {"gas": result.successful, "stages": stages}
    if result.successful:
        rates = transition_rates(result)
        out["bottleneck"] = rates.bottleneck
    else:
        out["trapped"] = result.trapped
    return out


def _run_dual(kmap, sub):
    seq = dual_support_sequence(kmap, sub)
    full = seq[-1].dim == kmap.dim
    stalled = len(seq) >= 2 and seq[-1].equals(seq[-2]) and not full
    return {"gas": is_gas_dual(kmap, sub), "supports": seq, "stalled": stalled}


def cmd_analyze(args) -> int:
    kmap, meta = _load_channel(args.file, args.allow_non_tp)
    gammas = meta.get("gammas") if isinstance(meta, dict) else None
    sub = parse_subspace_spec(args.subspace, kmap.dim)
    chk = is_invariant(kmap, sub)
    if not chk:
        print(
            f"subspace {_subspace_label(sub)} is not invariant "
            f"(max Kraus Q-block norm {chk.residual:.3e})",
            file=sys.stderr,
        )
        return EXIT_NEGATIVE
    tau_spec = args.tol if args.tol is not None else SPEC_TOL
    methods = ["nfd", "did", "dual"] if args.method == "all" else [args.method]
    results = {}
    for method in methods:
        if method == "nfd":
            results["nfd"] = _run_nfd(kmap, sub, gammas, tau_spec)
        elif method == "did":
            results["did"] = _run_did(kmap, sub)
        else:
            results["dual"] = _run_dual(kmap, sub)
    verdicts = {name: r["gas"] for name, r in results.items()}
    if args.method == "all" and len(set(verdicts.values())) > 1:
        print(f"internal error: GAS deciders disagree: {verdicts}", file=sys.stderr)
        return EXIT_INTERNAL
    gas = next(iter(verdicts.values()))

    if args.json:
        doc = {
            "schema": REPORT_SCHEMA,
            "command": "analyze",
            "subspace": _subspace_json(sub),
            "gas": gas,
            "methods": {},
        }
        for name, r in results.items():
            entry = {"gas": r["gas"]}
            if name == "nfd":
                entry["stages"] = [
                    {
                        "subspace": _subspace_json(s["subspace"]),
                        "sigma": s["sigma"],
                        "sigma_symbolic": s["sigma_symbolic"],
                    }
                    for s in r["stages"]
                ]
                entry["minimal_gas"] = _subspace_json(r["minimal_gas"])
            elif name == "did":
                entry["stages"] = [
                    {
                        "subspace": _subspace_json(s["subspace"]),
                        "gamma_min": s["gamma_min"],
                        "gamma_max": s["gamma_max"],
                    }
                    for s in r["stages"]
                ]
                if r["gas"]:
                    entry["bottleneck"] = r["bottleneck"]
                else:
                    entry["trapped"] = _subspace_json(r["trapped"])
            else:
                entry["supports"] = [_subspace_json(s) for s in r["supports"]]
                entry["stalled"] = r["stalled"]
            doc["methods"][name] = entry
        print(json.dumps(doc))
    else:
        print(f"subspace: {_subspace_label(sub)} (dim {sub.dim})")
        for name, r in results.items():
            print(f"method {name}: GAS: {'yes' if r['gas'] else 'no'}")
            if name == "nfd":
                for s in r["stages"]:
                    sym = f" ({s['sigma_symbolic']})" if s["sigma_symbolic"] else ""
                    print(
                        f"  stage {s['index']}: {_subspace_label(s['subspace'])}"
                        f"  sigma = {s['sigma']:.12g}{sym}"
                    )
                print(f"  minimal GAS extension: {_subspace_label(r['minimal_gas'])}")
            elif name == "did":
                for s in r["stages"]:
                    print(
                        f"  stage {s['index']}: {_subspace_label(s['subspace'])}"
                        f"  gamma in [{s['gamma_min']:.12g}, {s['gamma_max']:.12g}]"
                    )
                if r["gas"] and r["stages"]:
                    print(f"  bottleneck rate: {r['bottleneck']:.12g}")
                if not r["gas"]:
                    print(f"  trapped invariant subspace: {_subspace_label(r['trapped'])}")
            else:
                chain = " -> ".join(_subspace_label(s) for s in r["supports"])
                tail = " (stalled)" if r["stalled"] else ""
                print(f"  supports: {chain}{tail}")
    return EXIT_OK if gas else EXIT_NEGATIVE


def cmd_asympt(args) -> int:
    kmap, _ = _load_channel(args.file, args.allow_non_tp)
    parts = parse_parts_spec(args.parts, kmap.dim)
    if args.state == "maximally-mixed":
        rho = np.eye(kmap.dim, dtype=complex) / kmap.dim
    else:
        rho = read_state(args.state, kmap.dim)
    try:
        check_density(rho, kmap.dim)
    except ValueError as exc:
        print(f"invalid state: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        report = analyze_asymptotics(kmap, parts)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NEGATIVE
    probs = report.probabilities(rho)
    oracle_probs = None
    gap = None
    if args.oracle:
        final = iterate_oracle(kmap, rho, args.oracle)
        oracle_probs = [
            float(np.real(np.trace(p.projector() @ final))) for p in parts
        ]
        gap = float(np.max(np.abs(np.asarray(oracle_probs) - probs)))
    if args.json:
        doc = {
            "schema": REPORT_SCHEMA,
            "command": "asympt",
            "parts": [_subspace_json(p) for p in parts],
            "probabilities": [float(p) for p in probs],
            "limit_duals": [encode_matrix(l) for l in report.limit_duals],
        }
        if oracle_probs is not None:
            doc["oracle"] = {
                "n_steps": args.oracle,
                "probabilities": oracle_probs,
                "max_gap": gap,
            }
        print(json.dumps(doc))
    else:
        labels = ", ".join(_subspace_label(p) for p in parts)
        print(f"parts: {labels}")
        print("p = [" + ", ".join(f"{p:.12g}" for p in probs) + "]")
        if oracle_probs is not None:
            print(
                f"oracle (n={args.oracle}): ["
                + ", ".join(f"{p:.12g}" for p in oracle_probs)
                + f"], max gap {gap:.3g}"
            )
    return EXIT_OK


def cmd_example(args) -> int:
    builder = EXAMPLES[args.name]
    if args.gammas:
        try:
            gammas = [float(tok) for tok in args.gammas.split(",")]
        except ValueError:
            print(f"--gammas: expected comma-separated numbers, got {args.gammas!r}", file=sys.stderr)
            return EXIT_INPUT
        kmap, meta = builder(gammas)
    else:
        kmap, meta = builder()
    doc = channel_document(kmap, meta)
    text = json.dumps(doc, indent=1)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fp:
            fp.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qstab",
        description=(
            "Invariance and stability analysis of iterated Kraus channels: "
            "transient decompositions, convergence-rate bounds, and "
            "asymptotic absorption probabilities."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check trace preservation of a channel file")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.add_argument("--allow-non-tp", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", help="invariance/GAS analysis of a subspace")
    p.add_argument("file")
    p.add_argument("--subspace", required=True, help='e.g. "1,3" or @vectors.json')
    p.add_argument(
        "--method", choices=["nfd", "did", "dual", "all"], default="all"
    )
    p.add_argument("--json", action="store_true")
    p.add_argument("--tol", type=float, default=None, help="override the sigma=1 gap")
    p.add_argument("--allow-non-tp", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("asympt", help="asymptotic absorption probabilities")
    p.add_argument("file")
    p.add_argument("--parts", required=True, help='parts separated by ";", e.g. "1,3;2,4"')
    p.add_argument("--state", default="maximally-mixed", help="state file or 'maximally-mixed'")
    p.add_argument("--oracle", type=int, default=0, help="also iterate n steps and report the gap")
    p.add_argument("--json", action="store_true")
    p.add_argument("--allow-non-tp", action="store_true")
    p.set_defaults(func=cmd_asympt)

    p = sub.add_parser("example", help="emit a built-in example channel")
    p.add_argument("name", choices=sorted(EXAMPLES))
    p.add_argument("--gammas", default=None, help="comma-separated probabilities")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_example)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    except (ChannelFormatError, GammaConstraintError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT if isinstance(exc, ChannelFormatError) else EXIT_NEGATIVE
    except (InternalInconsistencyError, NumericalDegeneracyError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NEGATIVE


if __name__ == "__main__":
    sys.exit(main())
