"""
Canonical JSON file formats for problems, keys, solutions and audit reports

Every scalar is a string: a decimal integer or "p/q" with q > 0 and
gcd(|p|, q) = 1. Documents are written with a fixed field order and fixed
indentation so equal values always produce equal bytes.
"""
import json
import re
from fractions import Fraction
from math import gcd
from typing import Any, Dict, List, Optional, Tuple, Union

from .exceptions import FileFormatError, InvalidProblem, LPMaskError
from .models import (
    AuditReport,
    AuditTrial,
    BMode,
    GeneralLP,
    MaskedProblem,
    MaskingKey,
    PeculiarProblem,
    Sign,
    SolveOutcome,
    StandardMaxProblem,
    TrialTag,
    Verdict,
)
from .numerics import RatMatrix, RatVector

FORMAT = "lpmask/1"

_SCALAR = re.compile(r"(-?(?:0|[1-9][0-9]*))(?:/([1-9][0-9]*))?")

Problem = Union[PeculiarProblem, MaskedProblem, GeneralLP, StandardMaxProblem]


def format_scalar(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_scalar(text: Any) -> Fraction:
    if not isinstance(text, str):
        raise FileFormatError(f"scalars must be strings, got {text!r}")
    match = _SCALAR.fullmatch(text)
    if not match or text == "-0":
        raise FileFormatError(f"malformed scalar {text!r}")
    p = int(match.group(1))
    if match.group(2) is None:
        return Fraction(p)
    q = int(match.group(2))
    if q == 1 or gcd(abs(p), q) != 1:
        raise FileFormatError(f"non-canonical fraction {text!r}")
    return Fraction(p, q)


def _vec(v: RatVector) -> List[str]:
    return [format_scalar(a) for a in v]


def _mat(m: Optional[RatMatrix]) -> List[List[str]]:
    if m is None:
        return []
    return [[format_scalar(a) for a in row] for row in m.to_rows()]


def _parse_vec(data: Any, length: int, name: str) -> RatVector:
    if not isinstance(data, list) or len(data) != length:
        raise FileFormatError(f"{name} must be a list of {length} scalars")
    if not data:
        raise FileFormatError(f"{name} must not be empty")
    return RatVector(tuple(parse_scalar(a) for a in data))


def _parse_mat(data: Any, rows: int, cols: int, name: str) -> RatMatrix:
    if not isinstance(data, list) or len(data) != rows:
        raise FileFormatError(f"{name} must have {rows} rows")
    for row in data:
        if not isinstance(row, list) or len(row) != cols:
            raise FileFormatError(f"{name} rows must have {cols} entries")
    return RatMatrix(rows, cols, tuple(parse_scalar(a) for row in data for a in row))


def _field(doc: Dict[str, Any], name: str, kind: type = object) -> Any:
    if name not in doc:
        raise FileFormatError(f"missing field {name!r}")
    value = doc[name]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise FileFormatError(f"field {name!r} must be an integer")
    if kind is not int and kind is not object and not isinstance(value, kind):
        raise FileFormatError(f"field {name!r} must be {kind.__name__}")
    return value


def _dims(doc: Dict[str, Any], *names: str) -> Tuple[int, ...]:
    values = tuple(_field(doc, name, int) for name in names)
    if any(v < 0 for v in values):
        raise FileFormatError(f"dimensions {names} must be nonnegative")
    return values


def _render(doc: Dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _read(text: str, kinds: Tuple[str, ...]) -> Dict[str, Any]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FileFormatError(f"not a JSON document: {e}") from e
    if not isinstance(doc, dict):
        raise FileFormatError("document must be a JSON object")
    if doc.get("format") != FORMAT:
        raise FileFormatError(f"unsupported format {doc.get('format')!r}, expected {FORMAT!r}")
    if doc.get("kind") not in kinds:
        raise FileFormatError(f"expected kind in {kinds}, got {doc.get('kind')!r}")
    return doc


# Problems

def problem_to_doc(problem: Problem) -> Dict[str, Any]:
    if isinstance(problem, PeculiarProblem):
        return {"kind": "peculiar", "m": problem.m, "n": problem.n,
                "A": _mat(problem.A), "b": _vec(problem.b), "B": _mat(problem.B), "c": _vec(problem.c)}
    if isinstance(problem, MaskedProblem):
        return {"kind": "masked", "m": problem.m, "n": problem.n,
                "A": _mat(problem.Ap), "b": _vec(problem.bp), "B": _mat(problem.Bp), "c": _vec(problem.cp)}
    if isinstance(problem, StandardMaxProblem):
        return {"kind": "standard", "m": problem.m, "n": problem.n,
                "A": _mat(problem.A), "b": _vec(problem.b), "c": _vec(problem.c)}
    if isinstance(problem, GeneralLP):
        return {"kind": "general", "n": problem.n, "k": problem.k, "p": problem.p,
                "c": _vec(problem.c), "Aeq": _mat(problem.Aeq),
                "beq": [] if problem.beq is None else _vec(problem.beq),
                "G": _mat(problem.Gineq), "sign": [s.value for s in problem.sign]}
    raise TypeError(f"cannot serialize {type(problem).__name__}")


def problem_from_doc(doc: Dict[str, Any]) -> Problem:
    kind = _field(doc, "kind", str)
    try:
        if kind in ("peculiar", "masked"):
            m, n = _dims(doc, "m", "n")
            fields = (_parse_mat(_field(doc, "A"), m, n, "A"), _parse_vec(_field(doc, "b"), m, "b"),
                      _parse_mat(_field(doc, "B"), n, n, "B"), _parse_vec(_field(doc, "c"), n, "c"))
            if kind == "peculiar":
                A, b, B, c = fields
                return PeculiarProblem(A=A, b=b, B=B, c=c)
            Ap, bp, Bp, cp = fields
            return MaskedProblem(Ap=Ap, Bp=Bp, bp=bp, cp=cp)
        if kind == "standard":
            m, n = _dims(doc, "m", "n")
            return StandardMaxProblem(A=_parse_mat(_field(doc, "A"), m, n, "A"),
                                      b=_parse_vec(_field(doc, "b"), m, "b"),
                                      c=_parse_vec(_field(doc, "c"), n, "c"))
        if kind == "general":
            n, k, p = _dims(doc, "n", "k", "p")
            signs = _field(doc, "sign", list)
            try:
                sign = tuple(Sign(s) for s in signs)
            except ValueError as e:
                raise FileFormatError(f"bad sign flag: {e}") from e
            return GeneralLP(
                c=_parse_vec(_field(doc, "c"), n, "c"),
                Aeq=_parse_mat(_field(doc, "Aeq"), k, n, "Aeq") if k else _empty(doc, "Aeq"),
                beq=_parse_vec(_field(doc, "beq"), k, "beq") if k else _empty(doc, "beq"),
                Gineq=_parse_mat(_field(doc, "G"), p, n, "G") if p else _empty(doc, "G"),
                sign=sign,
            )
    except (FileFormatError, InvalidProblem):
        raise
    except (LPMaskError, ValueError) as e:
        raise FileFormatError(f"invalid {kind} problem: {e}") from e
    raise FileFormatError(f"unknown problem kind {kind!r}")


def _empty(doc: Dict[str, Any], name: str) -> None:
    if _field(doc, name) != []:
        raise FileFormatError(f"{name} must be empty when its dimension is 0")
    return None


def dump_problem(problem: Problem) -> str:
    return _render({"format": FORMAT, **problem_to_doc(problem)})


def load_problem(text: str) -> Problem:
    return problem_from_doc(_read(text, ("peculiar", "masked", "general", "standard")))


# Keys

def key_to_doc(key: MaskingKey) -> Dict[str, Any]:
    return {"m": key.m, "n": key.n, "Q": _mat(key.Q), "M": _mat(key.M), "P": _mat(key.P),
            "r": _vec(key.r), "gamma": format_scalar(key.gamma)}


def key_from_doc(doc: Dict[str, Any]) -> MaskingKey:
    m, n = _dims(doc, "m", "n")
    try:
        return MaskingKey(
            Q=_parse_mat(_field(doc, "Q"), m, m, "Q"),
            M=_parse_mat(_field(doc, "M"), n, n, "M"),
            P=_parse_mat(_field(doc, "P"), n, m, "P"),
            r=_parse_vec(_field(doc, "r"), n, "r"),
            gamma=parse_scalar(_field(doc, "gamma")),
        )
    except FileFormatError:
        raise
    except (LPMaskError, ValueError) as e:
        raise FileFormatError(f"invalid key: {e}") from e


def dump_key(key: MaskingKey, seed: int, problem_fingerprint: str) -> str:
    return _render({"format": FORMAT, "kind": "key", "seed": seed,
                    "problem_fingerprint": problem_fingerprint, **key_to_doc(key)})


def load_key(text: str) -> Tuple[MaskingKey, int, str]:
    """Key, seed and the fingerprint of the problem it was generated for"""
    doc = _read(text, ("key",))
    return key_from_doc(doc), _field(doc, "seed", int), _field(doc, "problem_fingerprint", str)


# Solutions

def outcome_to_doc(outcome: SolveOutcome) -> Dict[str, Any]:
    return {
        "verdict": outcome.verdict.value,
        "x": None if outcome.x_opt is None else _vec(outcome.x_opt),
        "value": None if outcome.value is None else format_scalar(outcome.value),
        "ray": None if outcome.ray is None else _vec(outcome.ray),
        "pivots_used": outcome.pivots_used,
    }


def outcome_from_doc(doc: Dict[str, Any], n: int) -> SolveOutcome:
    try:
        verdict = Verdict(_field(doc, "verdict", str))
    except ValueError as e:
        raise FileFormatError(f"bad verdict: {e}") from e
    x, value, ray = _field(doc, "x"), _field(doc, "value"), _field(doc, "ray")
    try:
        return SolveOutcome(
            verdict=verdict,
            x_opt=None if x is None else _parse_vec(x, n, "x"),
            value=None if value is None else parse_scalar(value),
            ray=None if ray is None else _parse_vec(ray, n, "ray"),
            pivots_used=_field(doc, "pivots_used", int),
        )
    except FileFormatError:
        raise
    except LPMaskError as e:
        raise FileFormatError(f"invalid outcome: {e}") from e


def dump_solution(outcome: SolveOutcome) -> str:
    return _render({"format": FORMAT, "kind": "solution", **outcome_to_doc(outcome)})


def dump_vector(v: RatVector) -> str:
    return _render({"format": FORMAT, "kind": "vector", "values": _vec(v)})


def load_vector(text: str) -> RatVector:
    """The point of an optimal solution file, or the values of a vector file"""
    doc = _read(text, ("solution", "vector"))
    if doc["kind"] == "vector":
        values = _field(doc, "values", list)
        return _parse_vec(values, len(values), "values")
    if doc.get("verdict") != Verdict.OPTIMAL.value:
        raise FileFormatError(f"solution verdict is {doc.get('verdict')!r}, no point to decrypt")
    x = _field(doc, "x", list)
    return _parse_vec(x, len(x), "x")


def dump_recovered(x: RatVector, value: Fraction) -> str:
    return _render({"format": FORMAT, "kind": "recovered", "x": _vec(x), "value": format_scalar(value)})


# Reports

def trial_to_doc(trial: AuditTrial) -> Dict[str, Any]:
    return {
        "index": trial.index,
        "seed": trial.seed,
        "problem": problem_to_doc(trial.problem),
        "key": key_to_doc(trial.key),
        "server_outcome": outcome_to_doc(trial.server_outcome),
        "recovered_x": None if trial.recovered_x is None else _vec(trial.recovered_x),
        "true_outcome": outcome_to_doc(trial.true_outcome),
        "classification": trial.classification.value,
    }


def trial_from_doc(doc: Dict[str, Any]) -> AuditTrial:
    problem = problem_from_doc(_field(doc, "problem", dict))
    if not isinstance(problem, PeculiarProblem):
        raise FileFormatError("trial problem must be peculiar")
    n = problem.n
    recovered = _field(doc, "recovered_x")
    index = _field(doc, "index")
    if index is not None and (isinstance(index, bool) or not isinstance(index, int)):
        raise FileFormatError("trial index must be an integer or null")
    try:
        tag = TrialTag(_field(doc, "classification", str))
    except ValueError as e:
        raise FileFormatError(f"bad classification: {e}") from e
    return AuditTrial(
        seed=_field(doc, "seed", int),
        problem=problem,
        key=key_from_doc(_field(doc, "key", dict)),
        server_outcome=outcome_from_doc(_field(doc, "server_outcome", dict), n),
        recovered_x=None if recovered is None else _parse_vec(recovered, n, "recovered_x"),
        true_outcome=outcome_from_doc(_field(doc, "true_outcome", dict), n),
        classification=tag,
        index=index,
    )


def dump_report(report: AuditReport) -> str:
    return _render({
        "format": FORMAT,
        "kind": "report",
        "master_seed": report.master_seed,
        "m": report.m,
        "n": report.n,
        "b_mode": report.b_mode.value,
        "trials_requested": report.trials_requested,
        "counts": {tag.value: report.counts[tag] for tag in TrialTag},
        "errors": report.errors,
        "fingerprint": report.fingerprint,
        "counterexamples": {tag.value: trial_to_doc(trial)
                            for tag, trial in report.first_counterexamples.items()},
    })


def load_report(text: str) -> AuditReport:
    doc = _read(text, ("report",))
    counts_doc = _field(doc, "counts", dict)
    examples_doc = _field(doc, "counterexamples", dict)
    try:
        counts = {TrialTag(tag): count for tag, count in counts_doc.items()}
        examples = {TrialTag(tag): trial_from_doc(trial) for tag, trial in examples_doc.items()}
        b_mode = BMode(_field(doc, "b_mode", str))
    except ValueError as e:
        if isinstance(e, FileFormatError):
            raise
        raise FileFormatError(f"bad report field: {e}") from e
    if any(isinstance(v, bool) or not isinstance(v, int) for v in counts.values()):
        raise FileFormatError("counts must be integers")
    m, n = _dims(doc, "m", "n")
    return AuditReport(
        master_seed=_field(doc, "master_seed", int),
        m=m,
        n=n,
        b_mode=b_mode,
        trials_requested=_field(doc, "trials_requested", int),
        counts=counts,
        errors=_field(doc, "errors", int),
        first_counterexamples=examples,
        fingerprint=_field(doc, "fingerprint", str),
    )
