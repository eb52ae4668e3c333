"""Extended DIMACS CNF interchange.

Clause lines are standard DIMACS; parity constraints are serialized as
lines starting with ``x`` (``x1 2 0`` means ``var1 xor var2 = 1``; a negated
first literal flips the parity to 0).  Cardinality constraints are lowered
to CNF before export.  Round trips of clause/parity formulas are bit-exact.
"""

from __future__ import annotations

from .encodings import lower_cards
from .model import Clause, Formula, VariableSpace, Xor, lit_var


class DimacsError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def to_dimacs(formula: Formula) -> str:
    """Extended DIMACS text; cardinality constraints are lowered first."""
    work = lower_cards(formula)
    nvars = work.space.total
    lines = [f"p cnf {nvars} {len(work.clauses)}"]
    for c in work.clauses:
        lines.append(" ".join(str(l) for l in c) + " 0" if c else "0")
    for x in work.xors:
        if not x.vars:
            if x.parity == 1:
                lines.append("0")  # empty odd parity: contradiction
            continue
        ids = [v + 1 for v in x.vars]
        if x.parity == 0:
            ids[0] = -ids[0]
        lines.append("x" + " ".join(str(i) for i in ids) + " 0")
    return "\n".join(lines) + "\n"


def from_dimacs(text: str) -> Formula:
    """Parse extended DIMACS into a formula over a bare decision space."""
    nvars = None
    clauses: list[Clause] = []
    xors: list[Xor] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("c", "%")):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(line_no, f"malformed header {line!r}")
            try:
                nvars = int(parts[2])
                int(parts[3])
            except ValueError:
                raise DimacsError(line_no, "non-integer header fields") from None
            continue
        is_xor = line.startswith("x")
        body = line[1:] if is_xor else line
        try:
            nums = [int(tok) for tok in body.split()]
        except ValueError:
            raise DimacsError(line_no, f"malformed literal in {line!r}") from None
        if not nums or nums[-1] != 0:
            raise DimacsError(line_no, "missing terminating 0")
        nums = nums[:-1]
        if any(n == 0 for n in nums):
            raise DimacsError(line_no, "literal 0 inside constraint")
        if nvars is None:
            raise DimacsError(line_no, "constraint before header")
        if any(abs(n) > nvars for n in nums):
            raise DimacsError(line_no, "literal outside declared variables")
        if is_xor:
            parity = 1
            if nums and nums[0] < 0:
                parity = 0
                nums[0] = -nums[0]
            if any(n < 0 for n in nums[1:]):
                raise DimacsError(
                    line_no, "only the leading xor literal may be negated"
                )
            xors.append(Xor(tuple(n - 1 for n in nums), parity))
        else:
            clauses.append(tuple(nums))
    if nvars is None:
        raise DimacsError(0, "missing 'p cnf' header")
    space = VariableSpace(nvars)
    return Formula(space, tuple(clauses), tuple(xors))
