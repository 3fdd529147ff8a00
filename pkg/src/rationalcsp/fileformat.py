"""Plain-text instance format.

::

    # comments and blank lines are ignored
    csp 3
    dom 0 0 1 2
    dom 1 0 1 2
    dom 2 5 7
    con 0 1 forbid 2  0 0  1 1
    con 1 2 allow 1  2 7

``dom`` lists a variable's value labels (integers) in index order.  ``con``
lists value pairs by label; ``forbid`` pairs are nogoods, every other pair
is allowed, and ``allow`` is the reverse.
"""

from __future__ import annotations

from typing import Dict, List, Optional

from .csp import BinaryConstraint, Instance, StructureError


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ValidationError(StructureError):
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


def _tokens(raw: str):
    # (token, 1-based column) pairs
    out = []
    col = 0
    for part in raw.split():
        col = raw.index(part, col)
        out.append((part, col + 1))
        col += len(part)
    return out


def _int(token: str, column: int, line: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected integer {what}, got {token!r}", line, column) from None


def parse_instance(text: str) -> Instance:
    num_vars: Optional[int] = None
    domains: Dict[int, List[int]] = {}
    raw_cons = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        raw = raw.split("#", 1)[0]
        toks = _tokens(raw)
        if not toks:
            continue
        head, hcol = toks[0]
        if head == "csp":
            if num_vars is not None:
                raise ParseError("duplicate 'csp' header", lineno, hcol)
            if len(toks) != 2:
                raise ParseError("'csp' takes exactly one argument", lineno, hcol)
            num_vars = _int(*toks[1], lineno, "variable count")
            if num_vars < 0:
                raise ParseError("variable count must be nonnegative", lineno, toks[1][1])
            continue
        if num_vars is None:
            raise ParseError("document must start with a 'csp <num_variables>' header", lineno, hcol)
        if head == "dom":
            if len(toks) < 3:
                raise ParseError("'dom' needs a variable and at least one value", lineno, hcol)
            var = _int(*toks[1], lineno, "variable")
            if not 0 <= var < num_vars:
                raise ValidationError(f"variable {var} out of range 0..{num_vars - 1}", lineno)
            if var in domains:
                raise ValidationError(f"domain of variable {var} given twice", lineno)
            labels = [_int(t, c, lineno, "value") for t, c in toks[2:]]
            if len(set(labels)) != len(labels):
                raise ValidationError(f"duplicate value labels for variable {var}", lineno)
            domains[var] = labels
        elif head == "con":
            if len(toks) < 5:
                raise ParseError("'con' needs: <i> <j> allow|forbid <count> pairs...", lineno, hcol)
            i = _int(*toks[1], lineno, "variable")
            j = _int(*toks[2], lineno, "variable")
            sem, scol = toks[3]
            if sem not in ("allow", "forbid"):
                raise ParseError(f"expected 'allow' or 'forbid', got {sem!r}", lineno, scol)
            count = _int(*toks[4], lineno, "pair count")
            rest = toks[5:]
            if len(rest) != 2 * count:
                col = rest[-1][1] if rest else toks[4][1]
                raise ParseError(f"declared {count} pairs but found {len(rest) / 2:g}", lineno, col)
            pairs = [
                (_int(*rest[k], lineno, "value"), _int(*rest[k + 1], lineno, "value"))
                for k in range(0, len(rest), 2)
            ]
            raw_cons.append((lineno, i, j, sem, pairs))
        else:
            raise ParseError(f"unknown directive {head!r}", lineno, hcol)

    if num_vars is None:
        raise ParseError("empty document: missing 'csp' header", 1)
    missing = [v for v in range(num_vars) if v not in domains]
    if missing:
        raise ValidationError(f"no domain given for variables {missing}")
    doms = [domains[v] for v in range(num_vars)]

    constraints = []
    seen = {}
    for lineno, i, j, sem, pairs in raw_cons:
        where = f"constraint ({i}, {j})"
        if not (0 <= i < num_vars and 0 <= j < num_vars) or i == j:
            raise ValidationError(f"{where}: scope must be two distinct variables in 0..{num_vars - 1}", lineno)
        key = (min(i, j), max(i, j))
        if key in seen:
            raise ValidationError(f"{where}: pair already constrained on line {seen[key]}", lineno)
        seen[key] = lineno
        idx_i = {label: k for k, label in enumerate(doms[i])}
        idx_j = {label: k for k, label in enumerate(doms[j])}
        listed = set()
        for a, b in pairs:
            if a not in idx_i or b not in idx_j:
                raise ValidationError(f"{where}: pair ({a}, {b}) uses a value outside the domains", lineno)
            listed.add((idx_i[a], idx_j[b]))
        want = sem == "allow"
        matrix = tuple(
            tuple(((a, b) in listed) == want for b in range(len(doms[j]))) for a in range(len(doms[i]))
        )
        constraints.append(BinaryConstraint((i, j), matrix))
    return Instance([tuple(d) for d in doms], constraints)


def serialize_instance(instance: Instance) -> str:
    """Canonical text; each constraint lists whichever of nogoods/supports is shorter."""
    lines = [f"csp {instance.num_variables}"]
    for v, labels in enumerate(instance.domains):
        lines.append("dom " + " ".join(map(str, [v, *labels])))
    for c in instance.constraints:
        i, j = c.scope
        forbidden = c.forbidden_pairs()
        allowed = c.allowed_pairs()
        sem, pairs = ("forbid", forbidden) if len(forbidden) <= len(allowed) else ("allow", allowed)
        flat = " ".join(f"{instance.domains[i][a]} {instance.domains[j][b]}" for a, b in pairs)
        lines.append(f"con {i} {j} {sem} {len(pairs)}" + (f" {flat}" if flat else ""))
    return "\n".join(lines) + "\n"


def read_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def write_instance(instance: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_instance(instance))
