"""Batch front end: run construction scripts, print tables and verdicts.

``simploc run <script>`` executes the script's commands in order and prints
human-readable tables; ``--format=records`` prints one JSON record per table
row instead (the form regression suites diff).  ``simploc check <script>``
only validates and classifies the declared trees.  Exit codes: 0 success,
1 validation error, 2 underdetermined computation.

User coefficient tables are declarative files, one record per degree::

    # degree  free_rank  [invariant factors ...]  [Q]
    0 1
    1 1 Q
    3 0 2 4

The trailing Q flag marks a rationalized degree (torsion is dropped).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Union

from .coeff import CoefficientTable, FgAbGroup, builtin_table, parse_table_file
from .dsl import MembershipClass, Tree, classify, validate
from .engine import (
    EngineError,
    FiberTable,
    HypothesisError,
    InconsistentDataError,
    NoVerdict,
    UnderdeterminedError,
    UnsupportedError,
    Verdict,
    ZERO_FIBER,
    compute_graded,
    decompose_positive_k,
    formal_value_of_table,
    parshin_check,
    positive_split_verdict,
    refute_membership_b,
    verify_comparison,
)
from .group_rep import GroupDatum
from .script import (
    ClassifyCmd,
    ComputeCmd,
    ReportCmd,
    Script,
    ScriptError,
    VerdictCmd,
    parse,
)

RECORD_SCHEMA = "simploc.records/1"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_UNDERDETERMINED = 2


# ---------------------------------------------------------------------------
# verdict presets

PRESET_IDS = ("cyclotomic_Fp", "goodwillie_jones_Q", "parshin_Fq", "ktop_C")

_DEGREE_ZERO_FIBER = FiberTable(
    known=((0, FgAbGroup(0)), (-1, FgAbGroup(0))), complete=False
)


def preset_verdict(
    preset: str,
    tree: Tree,
    group: GroupDatum,
    tree_class: Optional[MembershipClass] = None,
    fiber_override: Optional[FiberTable] = None,
    point_table_override: Optional[CoefficientTable] = None,
) -> Union[Verdict, NoVerdict]:
    """Run a named comparison preset on a tree.

    Each preset bundles the fiber-vanishing facts of its trace theorem;
    overrides exist so property suites can probe the refusal paths.
    """
    cls = tree_class if tree_class is not None else classify(tree)
    if preset == "cyclotomic_Fp":
        fiber = fiber_override if fiber_override is not None else ZERO_FIBER
        return verify_comparison(fiber, cls)
    if preset == "goodwillie_jones_Q":
        fiber = fiber_override if fiber_override is not None else _DEGREE_ZERO_FIBER
        return verify_comparison(fiber, cls, target_degree=0)
    if preset == "ktop_C":
        fiber = fiber_override if fiber_override is not None else _DEGREE_ZERO_FIBER
        return verify_comparison(fiber, cls, target_degree=0)
    if preset == "parshin_Fq":
        if fiber_override is not None and point_table_override is None:
            # a fiber probe with support off degree zero withdraws the
            # concentration hypothesis
            off_zero = [
                d for d, g in fiber_override.known if d != 0 and not g.is_zero
            ]
            if off_zero:
                return NoVerdict(
                    "rationalized point values are not concentrated in degree zero"
                )
        return parshin_check(tree, group, point_table_override)
    raise LookupError(f"unknown preset {preset!r} (choose from {PRESET_IDS})")


_VERDICT_LABELS = {
    "equivalence_all_degrees": "EquivalenceAllDegrees",
    "iso_in_degree": "IsoInDegree",
    "split_decomposition": "SplitDecomposition",
    "vanishing": "Vanishing",
    "not_in_b": "NotInB",
}


def _verdict_label(verdict: Verdict) -> str:
    label = _VERDICT_LABELS[verdict.kind]
    if verdict.degree is not None:
        label += f"({verdict.degree})"
    if verdict.kind == "vanishing":
        label += "(i != 0)"
    return label


# ---------------------------------------------------------------------------
# the runner


class _Output:
    def __init__(self, fmt: str):
        self.fmt = fmt
        self.lines: list[str] = []

    def text(self, line: str) -> None:
        if self.fmt == "text":
            self.lines.append(line)

    def record(self, **fields) -> None:
        if self.fmt == "records":
            fields["schema"] = RECORD_SCHEMA
            self.lines.append(json.dumps(fields, sort_keys=True))

    def render(self) -> str:
        return "\n".join(self.lines) + ("\n" if self.lines else "")


def _group_fields(g: FgAbGroup) -> dict:
    return {
        "free_rank": g.free_rank,
        "invariant_factors": list(g.invariant_factors),
        "rational": g.rational,
    }


def _load_tables(script: Script, base_dir: Path) -> dict[str, CoefficientTable]:
    tables: dict[str, CoefficientTable] = {}
    for name, path in script.tables.items():
        full = Path(path)
        if not full.is_absolute():
            full = base_dir / full
        tables[name] = parse_table_file(name, full.read_text())
    return tables


def _resolve_table(
    name: str, user_tables: dict[str, CoefficientTable]
) -> CoefficientTable:
    if name in user_tables:
        return user_tables[name]
    return builtin_table(name)


def run_script(script: Script, base_dir: Path, fmt: str = "text") -> tuple[str, int]:
    """Execute a parsed script; returns (output, exit code)."""
    out = _Output(fmt)
    try:
        user_tables = _load_tables(script, base_dir)
    except (OSError, ValueError) as exc:
        return f"table error: {exc}\n", EXIT_VALIDATION

    trees = script.trees
    for name, tree in trees.items():
        violations = validate(tree, script.group)
        if violations:
            for v in violations:
                out.text(f"invalid {name}: {v!r}")
                out.record(command="validate", target=name, violation=repr(v))
            return out.render(), EXIT_VALIDATION

    try:
        for cmd in script.commands:
            if isinstance(cmd, ClassifyCmd):
                _run_classify(out, cmd, trees, script.group)
            elif isinstance(cmd, ComputeCmd):
                _run_compute(out, cmd, trees, script.group, user_tables)
            elif isinstance(cmd, VerdictCmd):
                _run_verdict(out, cmd, trees, script.group)
            elif isinstance(cmd, ReportCmd):
                _run_report(out, cmd, trees, script.group, user_tables)
    except UnderdeterminedError as exc:
        out.text(f"underdetermined: {exc}")
        out.record(command="error", kind="underdetermined", message=str(exc))
        return out.render(), EXIT_UNDERDETERMINED
    except (HypothesisError, UnsupportedError, InconsistentDataError, LookupError, ValueError) as exc:
        out.text(f"error: {exc}")
        out.record(command="error", kind="validation", message=str(exc))
        return out.render(), EXIT_VALIDATION
    return out.render(), EXIT_OK


def _run_classify(
    out: _Output, cmd: ClassifyCmd, trees: dict[str, Tree], group: GroupDatum
) -> None:
    tree = trees[cmd.target]
    cls = classify(tree)
    out.text(f"{cmd.target}: class {cls.describe()}")
    for path in cls.assumed_oracles:
        out.text(f"  assumed oracle at {path}")
    evidence = None
    if cls.tag == "C" and group.is_trivial:
        # a nonzero negative-degree value certifies that no splitting exists
        try:
            evidence = refute_membership_b(tree, group)
        except EngineError:
            evidence = None
        if evidence is not None:
            out.text(f"  not in class B: {evidence.describe()}")
    out.record(
        command="classify",
        target=cmd.target,
        tag=cls.tag,
        prime=cls.prime,
        assumed_oracles=list(cls.assumed_oracles),
        b_refuted=(
            None
            if evidence is None
            else {"degree": evidence.degree, **_group_fields(evidence.value)}
        ),
    )


def _run_compute(
    out: _Output,
    cmd: ComputeCmd,
    trees: dict[str, Tree],
    group: GroupDatum,
    user_tables: dict[str, CoefficientTable],
) -> None:
    tree = trees[cmd.target]
    table = _resolve_table(cmd.table, user_tables)
    cls = classify(tree)
    value = compute_graded(tree, group, table, degrees=(cmd.lo, cmd.hi))
    flags = list(value.provenance) + [f"oracle:{p}" for p in value.assumed_oracles]
    out.text(f"{cmd.target} [class {cls.describe()}; table {table.name}]")
    for degree in range(cmd.lo, cmd.hi + 1):
        g = value.value_at(degree)
        out.text(f"  degree {degree}: {g.describe()}")
        out.record(
            command="compute",
            target=cmd.target,
            table=table.name,
            degree=degree,
            flags=sorted(flags),
            **_group_fields(g),
        )
    for flag in flags:
        out.text(f"  provenance: {flag}")


def _run_verdict(
    out: _Output, cmd: VerdictCmd, trees: dict[str, Tree], group: GroupDatum
) -> None:
    tree = trees[cmd.target]
    verdict = preset_verdict(cmd.preset, tree, group)
    if isinstance(verdict, NoVerdict):
        out.text(f"{cmd.target} [{cmd.preset}]: {verdict.conclusion_text}")
        out.record(
            command="verdict",
            target=cmd.target,
            preset=cmd.preset,
            verdict=None,
            failed_hypothesis=verdict.failed_hypothesis,
        )
        return
    out.text(f"{cmd.target} [{cmd.preset}]: {_verdict_label(verdict)} -- {verdict.conclusion_text}")
    for h in verdict.hypotheses:
        out.text(f"  hypothesis: {h}")
    out.record(
        command="verdict",
        target=cmd.target,
        preset=cmd.preset,
        verdict=verdict.kind,
        degree=verdict.degree,
        hypotheses=list(verdict.hypotheses),
        conclusion=verdict.conclusion_text,
    )


def _run_report(
    out: _Output,
    cmd: ReportCmd,
    trees: dict[str, Tree],
    group: GroupDatum,
    user_tables: dict[str, CoefficientTable],
) -> None:
    """Combined K / KH / HC^- table.

    Positive degrees decompose as KH + HC^-; degree zero is the trace
    isomorphism onto KH; negative degrees vanish by class-B formality.
    """
    tree = trees[cmd.target]
    cls = classify(tree)
    if cls.tag != "B":
        raise HypothesisError(
            f"report needs class B; {cmd.target} is {cls.describe()}"
        )
    kh_table = _resolve_table(cmd.kh, user_tables)
    hcm_table = _resolve_table(cmd.hcminus, user_tables)
    kh_value = compute_graded(tree, group, kh_table)
    hcm_value = formal_value_of_table(hcm_table, group)
    split = positive_split_verdict(cls, cmd.hi) if cmd.hi >= 1 else None
    out.text(
        f"{cmd.target} report [class B; kh={kh_table.name}; hcminus={hcm_table.name}]"
    )
    out.text("  degree | K | KH | HC^-")
    for degree in range(cmd.lo, cmd.hi + 1):
        kh_g = kh_value.value_at(degree)
        hcm_g = hcm_table.group_at(degree)
        if degree >= 1:
            k_g = decompose_positive_k(kh_value, hcm_value, cls, degree)
            rule = "split decomposition"
        elif degree == 0:
            k_g = kh_g
            rule = "degree-zero trace isomorphism"
        else:
            k_g = FgAbGroup(0)
            rule = "class-B vanishing below degree zero"
        out.text(
            f"  {degree} | {k_g.describe()} | {kh_g.describe()} | {hcm_g.describe()}"
        )
        out.record(
            command="report",
            target=cmd.target,
            degree=degree,
            k=_group_fields(k_g),
            kh=_group_fields(kh_g),
            hcminus=_group_fields(hcm_g),
            rule=rule,
        )
    if isinstance(split, Verdict):
        for h in split.hypotheses:
            out.text(f"  hypothesis: {h}")
    for p in kh_value.assumed_oracles:
        out.text(f"  assumed oracle at {p}")


def check_script(script: Script, fmt: str = "text") -> tuple[str, int]:
    """Validate and classify every declared tree; no computation."""
    out = _Output(fmt)
    code = EXIT_OK
    for name, tree in script.trees.items():
        violations = validate(tree, script.group)
        if violations:
            code = EXIT_VALIDATION
            for v in violations:
                out.text(f"invalid {name}: {v!r}")
                out.record(command="validate", target=name, violation=repr(v))
            continue
        cls = classify(tree)
        out.text(f"{name}: class {cls.describe()}")
        for path in cls.assumed_oracles:
            out.text(f"  assumed oracle at {path}")
        out.record(
            command="classify",
            target=name,
            tag=cls.tag,
            prime=cls.prime,
            assumed_oracles=list(cls.assumed_oracles),
        )
    return out.render(), code


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="simploc")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "check"):
        p = sub.add_parser(name)
        p.add_argument("script", help="construction script file")
        p.add_argument(
            "--format", choices=("text", "records"), default="text", dest="fmt"
        )
        p.add_argument(
            "--normalize-j",
            action="store_true",
            help="tighten Schubert j-sequences to the equivalent normal form",
        )
    args = parser.parse_args(argv)

    path = Path(args.script)
    try:
        text = path.read_text()
    except OSError as exc:
        print(f"cannot read script: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        script = parse(text, normalize_j_sequences=args.normalize_j)
    except (ScriptError, ValueError, EngineError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    if args.command == "check":
        output, code = check_script(script, args.fmt)
    else:
        output, code = run_script(script, path.parent, args.fmt)
    sys.stdout.write(output)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
