"""Command-line front end: ``hlie analyze | construct | classify-rank2 | search | examples``.

Exit codes encode verdicts so shell pipelines can branch without parsing:

* analyze: 0 HType/HLike, 2 constant spectrum with abelian factor, 3 not constant
* classify-rank2: 0 star or free, 4 not applicable
* search: 0 verified, 5 unverified
* any command: 1 on I/O or validation errors
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from hlike import _rational as rat
from hlike.algebra import MetricAlgebra
from hlike.construct import (
    central_sum,
    direct_sum,
    submersion_quotient,
    subspace_sum,
    tensor_product,
)
from hlike.fixtures import FIXTURES, fixture
from hlike.io import AlgebraFileError, algebra_to_json, read_algebra, write_algebra
from hlike.multiset import AdmissibleMultiset
from hlike.rank_two import classify_rank_two
from hlike.search import SearchProblem, run_search
from hlike.verify import Verdict, classify, j_unitary_defect

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ABELIAN_FACTOR = 2
EXIT_NOT_CONSTANT = 3
EXIT_NOT_APPLICABLE = 4
EXIT_UNVERIFIED = 5

ANALYZE_EXIT = {
    Verdict.HTYPE: EXIT_OK,
    Verdict.HLIKE: EXIT_OK,
    Verdict.ABELIAN_FACTOR: EXIT_ABELIAN_FACTOR,
    Verdict.NOT_CONSTANT: EXIT_NOT_CONSTANT,
}


class UsageError(ValueError):
    pass


def _emit(doc) -> None:
    print(json.dumps(doc, indent=1, sort_keys=True))


def parse_matrix(text: str) -> np.ndarray:
    """``"1,0;0,2"`` -> 2x2 object array; rows split on ``;``, entries on ``,``."""
    rows = [[rat.parse_number(x) for x in row.split(",")] for row in text.split(";") if row.strip()]
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise UsageError(f"malformed matrix {text!r}")
    return np.array(rows, dtype=object)


def parse_vectors(text: str) -> np.ndarray:
    """``"0,0,1;1,0,0"`` -> rows; the empty string gives no vectors."""
    if not text.strip():
        return np.zeros((0, 0), dtype=object)
    return parse_matrix(text)


# -- analyze --------------------------------------------------------------


def cmd_analyze(args) -> int:
    alg, adjustments = read_algebra(args.path)
    if alg.p == 0:
        raise UsageError("an abelian algebra has no J-spectrum to analyze")
    report = classify(alg, args.mode, args.tol)
    doc = report.to_json()
    doc["label"] = alg.label
    doc["type"] = [alg.p, alg.q]
    if adjustments:
        doc["loader_adjustments"] = adjustments
    if report.spectrum is not None:
        doc["j_unitary_defect"] = j_unitary_defect(alg, report.spectrum)
    if args.json:
        _emit(doc)
    else:
        print(f"algebra     {alg.label or args.path}  type ({alg.p},{alg.q})")
        print(f"verdict     {report.verdict.value}")
        print(f"mode        {report.mode.value}")
        if report.spectrum is not None:
            print(f"spectrum    {report.spectrum}")
            print(f"j_rank      {report.j_rank}")
            print(f"J-unitary   defect {doc['j_unitary_defect']:.3g}")
        if report.witness is not None:
            print(f"witness     {json.dumps(report.witness, sort_keys=True)}")
    return ANALYZE_EXIT[report.verdict]


# -- construct ------------------------------------------------------------


def _phi(text: str, p: int):
    if text in ("identity", "id"):
        return np.eye(p, dtype=int).astype(object)
    return parse_matrix(text)


def cmd_construct(args) -> int:
    kind = args.construction
    if kind == "direct-sum":
        result = direct_sum(read_algebra(args.first)[0], read_algebra(args.second)[0])
    elif kind == "tensor":
        result = tensor_product(read_algebra(args.path)[0], parse_matrix(args.sym))
    elif kind == "central-sum":
        a1, a2 = read_algebra(args.first)[0], read_algebra(args.second)[0]
        result = central_sum(a1, a2, _phi(args.phi, a1.p))
    elif kind == "submersion":
        alg = read_algebra(args.path)[0]
        K = parse_vectors(args.kernel)
        result = submersion_quotient(alg, K if K.size else np.zeros((0, alg.p), dtype=object))
    elif kind == "subspace-sum":
        if len(args.slot) != len(args.spectrum):
            raise UsageError("give one --spectrum per --slot")
        blocks = []
        for path in args.slot:
            alg = read_algebra(path)[0]
            blocks.append(list(alg.exact.generators) if alg.exact is not None and alg.exact.orthonormal
                          else list(alg.j_basis))
        spectra = [AdmissibleMultiset.parse(s) for s in args.spectrum]
        result = subspace_sum(blocks, spectra)
    else:
        raise UsageError(f"unknown construction {kind!r}")

    predicted = result.record.predicted_spectrum
    measured = None
    verdict = None
    if result.p > 0:
        report = classify(result)
        verdict = report.verdict.value
        measured = report.spectrum
    print(f"constructed {result.label}  type ({result.p},{result.q})")
    print(f"predicted   {predicted if predicted is not None else 'none'}")
    print(f"measured    {measured if measured is not None else 'not constant'}  ({verdict})")
    if args.output:
        write_algebra(result, args.output)
        print(f"wrote       {args.output}")
    return EXIT_OK


# -- classify-rank2 ---------------------------------------------------------


def cmd_classify_rank2(args) -> int:
    alg, _ = read_algebra(args.path)
    verdict = classify_rank_two(alg, args.tol)
    _emit(verdict.to_json())
    return EXIT_OK if verdict.applicable else EXIT_NOT_APPLICABLE


# -- search -----------------------------------------------------------------


def cmd_search(args) -> int:
    try:
        target = AdmissibleMultiset.parse(args.spectrum)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"invalid spectrum {args.spectrum!r}: {exc}") from None
    problem = SearchProblem(
        q=args.q,
        p=args.p,
        target=target,
        n_samples=args.samples,
        seed=args.seed,
        max_iters=args.iters,
        tol_objective=args.tol_objective,
        n_starts=args.starts,
    )
    result = run_search(problem)
    doc = {"problem": problem.to_json(), "result": result.to_json()}
    if args.output:
        Path(args.output).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    summary = {
        "verified": result.verified,
        "objective": doc["result"]["objective"],
        "verification": result.verification,
    }
    if result.verified:
        # the frame itself has unit-sphere spectrum equal to the target
        alg = MetricAlgebra(result.basis, args.q, f"search(q={args.q}, p={args.p}, S={target}, seed={args.seed})")
        algebra_path = args.algebra_output or (
            str(Path(args.output).with_suffix("")) + ".algebra.json" if args.output else None
        )
        if algebra_path:
            write_algebra(alg, algebra_path)
            summary["algebra_file"] = algebra_path
        else:
            summary["algebra"] = algebra_to_json(alg)
    _emit(summary)
    return EXIT_OK if result.verified else EXIT_UNVERIFIED


# -- examples ---------------------------------------------------------------


def _param(text: str):
    v = rat.parse_number(text)
    return v if isinstance(v, float) else Fraction(v)


def cmd_examples(args) -> int:
    params = {}
    for key in ("a", "b"):
        if getattr(args, key) is not None:
            params[key] = _param(getattr(args, key))
    if args.variant is not None:
        params["variant"] = args.variant
    if args.m is not None:
        params["m"] = args.m
    alg = fixture(args.name, **params)
    if args.output:
        write_algebra(alg, args.output)
    else:
        print(json.dumps(algebra_to_json(alg), indent=1))
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hlie", description="Analyze and build metric algebras with constant J-spectrum.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="classify an algebra file")
    p.add_argument("path")
    p.add_argument("--mode", choices=["exact", "sampled"], default="exact")
    p.add_argument("--tol", type=float, default=1e-9)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="print the report as JSON")
    fmt.add_argument("--text", dest="json", action="store_false", help="print a text summary (default)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("construct", help="build a new algebra from existing ones")
    csub = p.add_subparsers(dest="construction", required=True)
    c = csub.add_parser("direct-sum")
    c.add_argument("first")
    c.add_argument("second")
    c = csub.add_parser("tensor")
    c.add_argument("path")
    c.add_argument("--sym", required=True, help='symmetric matrix, rows split by ";", e.g. "1,0;0,2"')
    c = csub.add_parser("central-sum")
    c.add_argument("first")
    c.add_argument("second")
    c.add_argument("--phi", default="identity", help='"identity" or an orthogonal matrix "a,b;c,d"')
    c = csub.add_parser("submersion")
    c.add_argument("path")
    c.add_argument("--kernel", default="", help='vectors spanning the kernel, e.g. "0,0,1"')
    c = csub.add_parser("subspace-sum")
    c.add_argument("--slot", action="append", default=[], help="algebra file whose J matrices fill one block slot")
    c.add_argument("--spectrum", action="append", default=[], help='spectrum of that slot, "b:mult,..."')
    for c in csub.choices.values():
        c.add_argument("-o", "--output")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("classify-rank2", help="star vs free classification for J-rank 2")
    p.add_argument("path")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_classify_rank2)

    p = sub.add_parser("search", help="search for subspaces of a cone over a conjugacy class")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--spectrum", required=True, help='target spectrum "b:mult,...", e.g. "1:1,2:1"')
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--starts", type=int, default=20)
    p.add_argument("--iters", type=int, default=2000)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--tol-objective", type=float, default=1e-20)
    p.add_argument("-o", "--output", help="write the SearchResult JSON here")
    p.add_argument("--algebra-output", help="where to write the found algebra when verified")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("examples", help="write a named example algebra")
    p.add_argument("name", choices=sorted(FIXTURES))
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--variant", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_examples)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (AlgebraFileError, UsageError, ValueError, KeyError, TypeError, OSError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
