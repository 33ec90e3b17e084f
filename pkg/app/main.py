"""
Command-line entry point for the lpmask toolkit

Exit codes: 0 success (any solver verdict), 1 usage or parse error,
2 validation failure, 3 internal invariant violation or resampling exhaustion.
"""
import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

# Load environment variables from .env file (for local development)
from dotenv import load_dotenv

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.audit import (
    AuditHarness,
    builtin_counterexample,
    check_nonneg_preservation,
    explain_counterexample,
    generate_instance,
    summarize,
)
from src.config import Config
from src.exceptions import (
    FileFormatError,
    InvalidProblem,
    InvariantViolation,
    KeyValidationError,
    ReportValidationError,
    ResamplingExhausted,
    SignPreconditionError,
)
from src.masking import decrypt_solution, encrypt, keygen
from src.models import (
    AuditReport,
    BMode,
    GeneralLP,
    MaskedProblem,
    MaskingKey,
    PeculiarProblem,
    StandardMaxProblem,
    TrialTag,
    Verdict,
    augmented_as_general,
    masked_as_general,
    peculiar_as_general,
    standard_as_general,
    to_augmented,
)
from src.serialization import (
    dump_key,
    dump_problem,
    dump_recovered,
    dump_report,
    dump_solution,
    load_key,
    load_problem,
    load_report,
    load_vector,
)
from src.simplex import solve_general, solve_nonneg
from src.validators import KeyValidator, ReportValidator, problem_fingerprint

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    """Bad flags or arguments"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}")
    except UnicodeDecodeError as e:
        raise UsageError(f"{path} is not UTF-8 text: {e.reason} at byte {e.start}")


def _emit(text: str, output: Optional[str]):
    if output is None:
        sys.stdout.write(text)
        return
    with open(output, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info(f"Wrote {output}")


def _fmt(values) -> str:
    return "(" + ", ".join(str(v) for v in values) + ")"


def _load_peculiar(path: str) -> PeculiarProblem:
    problem = load_problem(_read(path))
    if not isinstance(problem, PeculiarProblem):
        raise UsageError(f"{path} is not a peculiar problem")
    return problem


def _load_key_for(problem: PeculiarProblem, path: str, config: Config) -> MaskingKey:
    key, _, fingerprint = load_key(_read(path))
    validator = KeyValidator(config.audit_config())
    is_valid, error = validator.validate_fingerprint(problem, fingerprint)
    if not is_valid:
        raise KeyValidationError(error)
    is_valid, error = validator.validate(problem, key)
    if not is_valid:
        raise KeyValidationError(error)
    return key


def _check_dims(m: int, n: int, config: Config):
    limit = config.audit_config().MAX_DIMENSION
    if not 1 <= m < n <= limit:
        raise UsageError(f"dimensions must satisfy 1 <= m < n <= {limit} (m < n), got m={m}, n={n}")


def cmd_gen(args, config: Config) -> int:
    _check_dims(args.m, args.n, config)
    problem = generate_instance(args.m, args.n, args.seed, BMode(args.b_mode), config.audit_config())
    _emit(dump_problem(problem), args.output)
    return EXIT_OK


def cmd_keygen(args, config: Config) -> int:
    problem = _load_peculiar(args.problem)
    key = keygen(problem, args.seed, config.audit_config())
    _emit(dump_key(key, args.seed, problem_fingerprint(problem)), args.output)
    return EXIT_OK


def cmd_encrypt(args, config: Config) -> int:
    problem = _load_peculiar(args.problem)
    key = _load_key_for(problem, args.key, config)
    _emit(dump_problem(encrypt(problem, key)), args.output)
    return EXIT_OK


def cmd_decrypt(args, config: Config) -> int:
    problem = _load_peculiar(args.problem)
    key = _load_key_for(problem, args.key, config)
    y = load_vector(_read(args.solution))
    if len(y) != problem.n:
        raise UsageError(f"solution has {len(y)} entries, problem has {problem.n} variables")
    x, value = decrypt_solution(y, problem, key)
    print(f"Recovered x = {_fmt(x)}, value {value}")
    if args.output:
        _emit(dump_recovered(x, value), args.output)
    return EXIT_OK


def _as_general(problem, form: str) -> GeneralLP:
    add_nonneg = form == "nonneg"
    if isinstance(problem, PeculiarProblem):
        return peculiar_as_general(problem, add_nonneg)
    if isinstance(problem, MaskedProblem):
        return masked_as_general(problem, add_nonneg)
    if isinstance(problem, StandardMaxProblem):
        return standard_as_general(problem)
    return problem


def cmd_solve(args, config: Config) -> int:
    problem = load_problem(_read(args.path))
    general = _as_general(problem, args.form)
    outcome = solve_nonneg(general) if args.form == "nonneg" else solve_general(general)

    if outcome.verdict is Verdict.OPTIMAL:
        if isinstance(problem, StandardMaxProblem):
            print(f"Maximum value {-outcome.value} at {_fmt(outcome.x_opt.entries[:problem.n])}")
        else:
            print(f"Optimal value {outcome.value} at {_fmt(outcome.x_opt)}")
    elif outcome.verdict is Verdict.UNBOUNDED:
        print(f"Unbounded along {_fmt(outcome.ray)}")
    else:
        print("Infeasible")
    logger.info(f"Solved in {outcome.pivots_used} pivots")

    if args.output:
        _emit(dump_solution(outcome), args.output)
    return EXIT_OK


def _summary_table(report: AuditReport) -> List[str]:
    lines = [
        f"Audit m={report.m} n={report.n} trials={report.trials_requested} "
        f"seed={report.master_seed} B={report.b_mode.value}",
        f"{'TAG':<22}{'COUNT':>8}",
    ]
    lines += [f"{tag.value:<22}{report.counts[tag]:>8}" for tag in TrialTag]
    lines.append(f"{'errors':<22}{report.errors:>8}")
    return lines


def _validate_report(report: AuditReport, config: Config):
    is_valid, error = ReportValidator(config.audit_config()).validate(report)
    if not is_valid:
        raise InvariantViolation(f"report failed re-validation: {error}")


def cmd_audit(args, config: Config) -> int:
    if args.trials < 1:
        raise UsageError(f"--trials must be at least 1, got {args.trials}")
    _check_dims(args.m, args.n, config)
    harness = AuditHarness(config.audit_config())
    report = harness.run_audit(args.m, args.n, args.trials, args.seed, BMode(args.b_mode))
    _validate_report(report, config)
    _emit(dump_report(report), args.output)
    print("\n".join(_summary_table(report)))
    return EXIT_OK


def cmd_counterexample(args, config: Config) -> int:
    trial = builtin_counterexample()
    report = summarize([trial], errors=0, master_seed=0, m=trial.problem.m, n=trial.problem.n,
                       b_mode=BMode.IDENTITY, trials_requested=1, config=config.audit_config())
    _validate_report(report, config)
    _emit(dump_report(report), args.output)

    recovered_value = trial.problem.c.dot(trial.recovered_x)
    lines = explain_counterexample(trial)
    witness = check_nonneg_preservation(trial.key, config.PROBE_SAMPLES, seed=0)
    if witness is not None:
        lines.append(
            f"x = {_fmt(witness.x)} >= 0 maps to y = {_fmt(witness.y)}, "
            f"negative at index {witness.bad_index}"
        )
    lines.append(f"True value {trial.true_outcome.value} vs recovered value {recovered_value}: "
                 f"{trial.classification.value}")
    print("\n".join(lines + [""] + _summary_table(report)))
    return EXIT_OK


def cmd_verify(args, config: Config) -> int:
    problem = load_problem(_read(args.problem))
    print(f"Problem OK ({type(problem).__name__})")
    if args.key:
        if not isinstance(problem, PeculiarProblem):
            raise UsageError("--key requires a peculiar problem")
        _load_key_for(problem, args.key, config)
        print("Key OK")
    if args.report:
        report = load_report(_read(args.report))
        is_valid, error = ReportValidator(config.audit_config()).validate(report)
        if not is_valid:
            raise ReportValidationError(error)
        print("Report OK")
    return EXIT_OK


def cmd_augment(args, config: Config) -> int:
    problem = load_problem(_read(args.problem))
    if not isinstance(problem, StandardMaxProblem):
        raise UsageError(f"{args.problem} is not a standard problem")
    _emit(dump_problem(augmented_as_general(to_augmented(problem))), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lpmask", description="Masked LP outsourcing toolkit and audit harness")
    parser.add_argument("--verbose", "-v", action="store_true", help="Log at DEBUG level")
    sub = parser.add_subparsers(dest="command", required=True)

    modes = [mode.value for mode in BMode]

    p = sub.add_parser("gen", help="Generate a random peculiar problem")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--b-mode", choices=modes, default=BMode.IDENTITY.value)
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("keygen", help="Generate a masking key for a problem")
    p.add_argument("problem")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_keygen)

    p = sub.add_parser("encrypt", help="Mask a problem with a key")
    p.add_argument("problem")
    p.add_argument("key")
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_encrypt)

    p = sub.add_parser("decrypt", help="Map a masked solution back to the client's variables")
    p.add_argument("solution")
    p.add_argument("problem")
    p.add_argument("key")
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_decrypt)

    p = sub.add_parser("solve", help="Solve a problem file exactly")
    p.add_argument("path")
    p.add_argument("--form", choices=["nonneg", "general"], default="nonneg")
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("audit", help="Run seeded trials of the outsourcing pipeline")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--b-mode", choices=modes, default=BMode.IDENTITY.value)
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_audit)

    p = sub.add_parser("counterexample", help="Replay the built-in SUBOPTIMAL trial")
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_counterexample)

    p = sub.add_parser("verify", help="Check problem, key and report invariants")
    p.add_argument("problem")
    p.add_argument("--key")
    p.add_argument("--report")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("augment", help="Convert a standard max problem to its augmented form")
    p.add_argument("problem")
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_augment)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    try:
        config = Config.from_env()
    except ValueError as e:
        print(f"Config error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"Usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    # Configure logging
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else getattr(logging, config.LOG_LEVEL),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )

    try:
        return args.handler(args, config)
    except (UsageError, FileFormatError, SignPreconditionError) as e:
        logger.error(f"{args.command}: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (KeyValidationError, ReportValidationError, InvalidProblem) as e:
        logger.error(f"{args.command}: validation failed: {e}")
        print(f"Validation failed: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ResamplingExhausted, InvariantViolation) as e:
        logger.error(f"{args.command}: {e}", exc_info=True)
        print(f"Internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == '__main__':
    sys.exit(main())
