"""The ``hlie-v1`` JSON algebra file format.

    {"format": "hlie-v1", "p": 2, "q": 4, "label": "...",
     "J": [[["0", "-1", ...], ...], ...], "abelian": false}

Entries are number-strings: integers and ``"a/b"`` are exact rationals,
anything with a decimal point or exponent is a float.  Rational files stay
rational end to end so that exact verification remains available.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from hlike import _rational as rat
from hlike.algebra import MetricAlgebra

FORMAT = "hlie-v1"
DECIMAL_SKEW_TOL = 1e-12


class AlgebraFileError(ValueError):
    """Malformed algebra file; the message names the offending field."""


def _require(cond: bool, field: str, message: str):
    if not cond:
        raise AlgebraFileError(f"{field}: {message}")


def algebra_from_json(doc, source: str = "<document>") -> tuple:
    """Parse a decoded document; returns ``(algebra, adjustments)``.

    ``adjustments`` lists the decimal blocks that were symmetrized and by
    how much.
    """
    _require(isinstance(doc, dict), source, "top level must be a JSON object")
    _require(doc.get("format") == FORMAT, f"{source}: format", f"expected {FORMAT!r}, got {doc.get('format')!r}")
    for key in ("p", "q"):
        _require(key in doc, f"{source}: {key}", "missing")
        _require(isinstance(doc[key], int) and not isinstance(doc[key], bool), f"{source}: {key}", "must be an integer")
    p, q = doc["p"], doc["q"]
    _require(q >= 1, f"{source}: q", "must be at least 1")
    _require(p >= 0, f"{source}: p", "must be nonnegative")
    abelian = doc.get("abelian", False)
    _require(isinstance(abelian, bool), f"{source}: abelian", "must be true or false")
    if p == 0:
        _require(abelian, f"{source}: p", 'p = 0 requires "abelian": true')
    label = doc.get("label", "")
    _require(isinstance(label, str), f"{source}: label", "must be a string")

    J = doc.get("J", [])
    _require(isinstance(J, list) and len(J) == p, f"{source}: J", f"expected {p} matrices")
    values = np.empty((p, q, q), dtype=object)
    for a, block in enumerate(J):
        _require(isinstance(block, list) and len(block) == q, f"{source}: J[{a}]", f"expected {q} rows")
        for i, row in enumerate(block):
            _require(isinstance(row, list) and len(row) == q, f"{source}: J[{a}][{i}]", f"expected {q} entries")
            for j, entry in enumerate(row):
                try:
                    values[a, i, j] = rat.parse_number(entry)
                except (ValueError, ZeroDivisionError):
                    raise AlgebraFileError(f"{source}: J[{a}][{i}][{j}]: not a number-string: {entry!r}") from None

    if p == 0:
        return MetricAlgebra.abelian(q), []
    adjustments = []
    if rat.all_exact(values):
        for a in range(p):
            bad = np.argwhere(values[a] + values[a].T != 0)
            if bad.size:
                i, j = bad[0]
                raise AlgebraFileError(f"{source}: J[{a}]: not skew-symmetric at entry ({i},{j})")
        return MetricAlgebra.from_exact(values, label=label), adjustments

    F = rat.to_float(values)
    if not np.all(np.isfinite(F)):
        a, i, j = np.argwhere(~np.isfinite(F))[0]
        raise AlgebraFileError(f"{source}: J[{a}][{i}][{j}]: not a finite number")
    for a in range(p):
        asym = float(np.max(np.abs(F[a] + F[a].T)))
        scale = max(1.0, float(np.max(np.abs(F[a]))))
        if asym > DECIMAL_SKEW_TOL * scale:
            raise AlgebraFileError(f"{source}: J[{a}]: not skew-symmetric (defect {asym:.3g})")
        if asym > 0:
            adjustments.append({"block": a, "max_asymmetry": asym})
        F[a] = 0.5 * (F[a] - F[a].T)
    return MetricAlgebra(F, q, label), adjustments


def read_algebra(path) -> tuple:
    """Load an algebra file; returns ``(algebra, adjustments)``."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise AlgebraFileError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AlgebraFileError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return algebra_from_json(doc, str(path))


def algebra_to_json(alg: MetricAlgebra) -> dict:
    """Document for ``alg``: rational strings when the orthonormal basis is rational, float reprs otherwise."""
    if alg.exact is not None and alg.exact.orthonormal:
        J = [[[rat.format_number(Fraction(v)) for v in row] for row in M] for M in alg.exact.generators]
    else:
        J = [[[repr(float(v)) for v in row] for row in M] for M in alg.j_basis]
    doc = {"format": FORMAT, "p": alg.p, "q": alg.q, "label": alg.label, "J": J}
    if alg.p == 0:
        doc["abelian"] = True
    return doc


def write_algebra(alg: MetricAlgebra, path) -> None:
    Path(path).write_text(json.dumps(algebra_to_json(alg), indent=1) + "\n")
