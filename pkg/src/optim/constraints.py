"""Parser for the command-line constraint mini-language.

One token per constrained metric, tokens separated by whitespace or ';':

    m1>=0.9   m2<=0.3   m1==0.5   m2in[0.2,0.4]   sl>=0.95   acc>=0.7|acc==0.5

Metrics are named `m<i>` (1-based) or by the problem's metric names. Alternatives
joined by '|' inside a token form a disjunction on that token's metric.
"""

import re
from collections.abc import Sequence

from pydantic import ValidationError

from src.core.exceptions import ConstraintParseError
from src.optim.prior import AtomicCondition, ConditionKind, ConstraintSet

_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_ATOM = re.compile(
    rf"^(?P<name>[A-Za-z_][A-Za-z0-9_]*?)"
    rf"(?:(?P<op>>=|<=|==)(?P<value>{_NUMBER})|in\[(?P<lo>{_NUMBER}),(?P<hi>{_NUMBER})\])$"
)
_INDEXED = re.compile(r"^m(\d+)$")
_OPS = {">=": ConditionKind.GE, "<=": ConditionKind.LE, "==": ConditionKind.EQ}


def split_tokens(text: str) -> list[str]:
    return [token for token in re.split(r"[\s;]+", text.strip()) if token]


def _metric_index(name: str, metric_names: Sequence[str], token: str, position: int) -> int:
    indexed = _INDEXED.match(name)
    if indexed:
        index = int(indexed.group(1)) - 1
    else:
        lowered = [n.lower() for n in metric_names]
        if name.lower() not in lowered:
            raise ConstraintParseError(f"unknown metric {name!r}", token, position)
        index = lowered.index(name.lower())
    if not 0 <= index < len(metric_names):
        raise ConstraintParseError(f"metric {name!r} out of range 1..{len(metric_names)}", token, position)
    return index


def parse_atom(text: str, metric_names: Sequence[str], token: str, position: int) -> AtomicCondition:
    match = _ATOM.match(text)
    if not match:
        raise ConstraintParseError("malformed constraint", token, position)
    index = _metric_index(match["name"], metric_names, token, position)
    try:
        if match["op"]:
            return AtomicCondition(metric_index=index, kind=_OPS[match["op"]], value=float(match["value"]))
        return AtomicCondition(
            metric_index=index,
            kind=ConditionKind.BETWEEN,
            value=float(match["lo"]),
            upper=float(match["hi"]),
        )
    except ValidationError as e:
        raise ConstraintParseError(e.errors()[0]["msg"], token, position) from e


def parse_constraints(text: str | Sequence[str], metric_names: Sequence[str]) -> ConstraintSet:
    """Parse constraint tokens into a ConstraintSet; positions in errors are 1-based."""
    tokens = split_tokens(text) if isinstance(text, str) else list(text)
    if not tokens:
        raise ConstraintParseError("no constraints given", "", 0)
    clauses: dict[int, tuple[AtomicCondition, ...]] = {}
    for position, token in enumerate(tokens, start=1):
        atoms = tuple(parse_atom(part, metric_names, token, position) for part in token.split("|"))
        metrics = {atom.metric_index for atom in atoms}
        if len(metrics) != 1:
            raise ConstraintParseError("alternatives must constrain the same metric", token, position)
        metric = metrics.pop()
        if metric in clauses:
            raise ConstraintParseError(
                "metric constrained twice; use in[lo,hi] or '|' within one token", token, position
            )
        clauses[metric] = atoms
    return ConstraintSet(clauses=dict(sorted(clauses.items())))
