"""Lossless JSON instance format (see SCHEMA.md for the field reference).

Clause and cardinality literals use DIMACS-style signed 1-based integers;
parity-constraint and factor-scope entries are 0-based variable ids;
rationals are ``"numerator/denominator"`` strings.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .model import (
    AuxSegment,
    Card,
    Formula,
    SmooProblem,
    UnweightedObjective,
    VariableSpace,
    WeightFactor,
    WeightedObjective,
    Xor,
)

FORMAT_NAME = "paretocount-instance"
FORMAT_VERSION = 1


class InstanceError(ValueError):
    pass


def _frac_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def _parse_frac(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as e:
        raise InstanceError(f"bad rational {s!r}: {e}") from None


def _formula_obj(f: Formula) -> dict[str, Any]:
    return {
        "clauses": [list(c) for c in f.clauses],
        "xors": [{"vars": list(x.vars), "parity": x.parity} for x in f.xors],
        "cards": [{"lits": list(c.lits), "bound": c.bound} for c in f.cards],
    }


def _parse_formula(obj: dict[str, Any], space: VariableSpace) -> Formula:
    try:
        clauses = tuple(tuple(int(l) for l in c) for c in obj.get("clauses", []))
        xors = tuple(
            Xor(tuple(int(v) for v in x["vars"]), int(x["parity"]))
            for x in obj.get("xors", [])
        )
        cards = tuple(
            Card(tuple(int(l) for l in c["lits"]), int(c["bound"]))
            for c in obj.get("cards", [])
        )
        return Formula(space, clauses, xors, cards)
    except (KeyError, TypeError, ValueError) as e:
        raise InstanceError(f"malformed formula: {e}") from None


def problem_to_obj(problem: SmooProblem, meta: dict | None = None) -> dict:
    space = problem.space
    obj: dict[str, Any] = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "space": {
            "decision": space.decision_count,
            "blocks": list(space.latent_blocks),
            "aux": [
                {"start": seg.start, "count": seg.count, "owner": seg.owner}
                for seg in space.aux_segments
            ],
        },
        "kind": "weighted" if problem.is_weighted else "unweighted",
        "objectives": [],
        "decision_constraints": _formula_obj(problem.decision_constraints),
    }
    for o in problem.objectives:
        if isinstance(o, UnweightedObjective):
            obj["objectives"].append({"formula": _formula_obj(o.formula)})
        else:
            obj["objectives"].append(
                {
                    "formula": _formula_obj(o.hard_formula),
                    "weights": {
                        "factors": [
                            {
                                "scope": list(f.scope),
                                "table": [_frac_str(v) for v in f.table],
                            }
                            for f in o.factors
                        ],
                        "lower": _frac_str(o.lower),
                        "upper": _frac_str(o.upper),
                        "scope_limit": o.scope_limit,
                    },
                }
            )
    if meta:
        obj["meta"] = meta
    return obj


def obj_to_problem(obj: dict) -> tuple[SmooProblem, dict]:
    if obj.get("format") != FORMAT_NAME:
        raise InstanceError(f"not a {FORMAT_NAME} file")
    if obj.get("version") != FORMAT_VERSION:
        raise InstanceError(f"unsupported version {obj.get('version')}")
    sp = obj["space"]
    space = VariableSpace(
        int(sp["decision"]),
        tuple(int(b) for b in sp["blocks"]),
        tuple(
            AuxSegment(int(a["start"]), int(a["count"]), str(a["owner"]))
            for a in sp.get("aux", [])
        ),
    )
    kind = obj.get("kind", "unweighted")
    objectives = []
    for i, o in enumerate(obj["objectives"]):
        formula = _parse_formula(o["formula"], space)
        if kind == "unweighted":
            objectives.append(UnweightedObjective(i, formula))
        else:
            w = o["weights"]
            factors = tuple(
                WeightFactor(
                    tuple(int(v) for v in f["scope"]),
                    tuple(_parse_frac(t) for t in f["table"]),
                )
                for f in w["factors"]
            )
            objectives.append(
                WeightedObjective(
                    i,
                    formula,
                    factors,
                    _parse_frac(w["lower"]),
                    _parse_frac(w["upper"]),
                    int(w.get("scope_limit", 16)),
                )
            )
    constraints = _parse_formula(obj.get("decision_constraints", {}), space)
    problem = SmooProblem(space, tuple(objectives), constraints)
    return problem, obj.get("meta", {})


def save_problem(path, problem: SmooProblem, meta: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(problem_to_obj(problem, meta), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_problem(path) -> tuple[SmooProblem, dict]:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as e:
        raise InstanceError(f"invalid JSON: {e}") from None
    return obj_to_problem(obj)
