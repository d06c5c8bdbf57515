import json

from functools import lru_cache, wraps
from importlib import resources
from pathlib import Path
from time import perf_counter
from typing import Callable, Dict, List, Optional, Tuple

from flask import current_app as app
from flask.cli import with_appcontext
from jsonschema import validate as jsonschema_validate

# noinspection PyPackageRequirements
from click import command, option, echo, get_current_context, style as click_style, Choice, Path as ClickPath

from rimforge.components import Mark, Word, abelianization
from rimforge.components.alexander import alexander_polynomial, cover_homology_order, fs_distinguish
from rimforge.components.enumeration import element_order, enumerate_cosets, group_order
from rimforge.components.surgery import (
    CertificationTier,
    SurfaceKnotGroup,
    SurgeryError,
    branched_cover_group,
    iterated_surgery,
)
from rimforge.components.symplectic import (
    SW_PAIR_NOTE,
    KdStatus,
    KdWitness,
    build_symplectic_pipeline,
    check_kd,
    find_commutator_witnesses,
    verify_commutator_witnesses,
)
from rimforge.utils import (
    GrammarError,
    parse_knot_list,
    parse_knot_spec,
    parse_presentation,
    parse_steps,
    parse_witnesses,
    parse_word,
)

STATUS_OK = "OK"
STATUS_INDETERMINATE = "INDETERMINATE"
STATUS_ERROR = "ERROR"

EXIT_CODES = {STATUS_OK: 0, STATUS_INDETERMINATE: 2, STATUS_ERROR: 1}


# Utils


class _Outcome:
    """
    Results of a command and whether anything in them is indeterminate.
    """

    def __init__(self, inputs: Dict):
        self.inputs = inputs
        self.results: Dict = {}
        self.status = STATUS_OK

    def indeterminate(self) -> None:
        if self.status == STATUS_OK:
            self.status = STATUS_INDETERMINATE

    def failed(self) -> None:
        self.status = STATUS_ERROR


@lru_cache(maxsize=None)
def _load_report_schema() -> Dict:
    return json.loads(resources.files("rimforge.resources.json_schemas").joinpath("report-schema.json").read_text())


def _format_text(value, indent: int = 0) -> List[str]:
    prefix = "  " * indent
    lines = []
    if isinstance(value, dict):
        for key in sorted(value):
            item = value[key]
            if isinstance(item, (dict, list)) and item:
                lines.append(f"{prefix}{key}:")
                lines.extend(_format_text(item, indent + 1))
            else:
                lines.append(f"{prefix}{key}: {_scalar_text(item)}")
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, (dict, list)) and item:
                lines.append(f"{prefix}-")
                lines.extend(_format_text(item, indent + 1))
            else:
                lines.append(f"{prefix}- {_scalar_text(item)}")
    else:
        lines.append(f"{prefix}{_scalar_text(value)}")
    return lines


def _scalar_text(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (dict, list)):
        return "{}" if isinstance(value, dict) else "[]"
    return str(value)


def _emit(report: Dict, output_format: str, output_path: Optional[str]) -> None:
    """
    Validates a report against its JSON schema and writes it to stdout, or to a file when given

    Reports are deterministic: keys are sorted and timings are only included on request.
    """
    jsonschema_validate(instance=report, schema=_load_report_schema())
    if output_format == "json":
        _report = json.dumps(report, indent=2, sort_keys=True)
    else:
        status_colour = {STATUS_OK: "green", STATUS_INDETERMINATE: "yellow", STATUS_ERROR: "red"}[report["status"]]
        _report = "\n".join(
            [f"command: {report['command']}", f"status: {click_style(report['status'], fg=status_colour)}"]
            + ["inputs:"]
            + _format_text(report["inputs"], 1)
            + ["results:"]
            + _format_text(report["results"], 1)
        )
    if output_path is not None:
        Path(output_path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        app.logger.info(f"Report written to {output_path}")
    echo(_report)


def _report_command(name: str) -> Callable:
    """
    Shared options and error handling for commands that produce a report

    The wrapped function receives an outcome to fill in plus the budgets; ValueErrors become ERROR reports and the exit
    status encodes the report status (0 OK, 2 INDETERMINATE, 1 ERROR).
    """

    def decorator(function: Callable) -> Callable:
        @option("--max-cosets", type=int, default=None, help="Coset enumeration budget [env RIMFORGE_MAX_COSETS]")
        @option("--tietze-budget", type=int, default=None, help="Tietze move budget [env RIMFORGE_TIETZE_BUDGET]")
        @option(
            "-f", "--format", "output_format", type=Choice(["text", "json"]), default="text", show_default=True
        )
        @option("-o", "--output", "output_path", type=ClickPath(dir_okay=False), default=None, help="Report file")
        @option("--timings/--no-timings", default=False, show_default=True, help="Include timings (not deterministic)")
        @with_appcontext
        @wraps(function)
        def wrapper(
            max_cosets: Optional[int],
            tietze_budget: Optional[int],
            output_format: str,
            output_path: Optional[str],
            timings: bool,
            **kwargs,
        ):
            budgets = {
                "max_cosets": max_cosets if max_cosets is not None else app.config["RIMFORGE_MAX_COSETS"],
                "tietze_budget": tietze_budget if tietze_budget is not None else app.config["RIMFORGE_TIETZE_BUDGET"],
            }
            outcome = _Outcome(_raw_inputs(kwargs))
            started = perf_counter()
            try:
                function(outcome, budgets, **kwargs)
            except GrammarError as e:
                app.logger.error(f"Invalid input: {e}")
                outcome.failed()
                outcome.results = {"error": str(e), "position": e.position}
            except ValueError as e:
                app.logger.error(f"{name} failed: {e}")
                outcome.failed()
                outcome.results = {"error": str(e)}
            if timings:
                outcome.results["timings"] = {"total_seconds": round(perf_counter() - started, 3)}

            report = {
                "command": name,
                "inputs": outcome.inputs,
                "results": outcome.results,
                "status": outcome.status,
            }
            _emit(report, output_format, output_path)
            get_current_context().exit(EXIT_CODES[outcome.status])

        return wrapper

    return decorator


def _raw_inputs(options: Dict) -> Dict:
    inputs = {}
    for key, value in options.items():
        if value is None:
            continue
        name = key[: -len("_text")] if key.endswith("_text") else key
        inputs[name] = list(value) if isinstance(value, tuple) else value
    return inputs


def _order_result(outcome: _Outcome, order: Optional[int]):
    if order is None:
        outcome.indeterminate()
        return "INDETERMINATE"
    return order


def _certification_result(outcome: _Outcome, certification, strict: bool = False) -> Optional[Dict]:
    """
    :param strict: treat asserted (uncertified) results as indeterminate
    """
    if certification is None:
        return None
    if certification.tier == CertificationTier.FAILED:
        outcome.failed()
    elif certification.tier == CertificationTier.INDETERMINATE or (
        strict and certification.tier == CertificationTier.ASSERTED
    ):
        outcome.indeterminate()
    return certification.to_dict()


def _parse_group_and_gamma(group_text: str, gamma_text: str):
    group = parse_presentation(group_text)
    gamma = parse_word(gamma_text, group.generators)
    return group, gamma


def _kd_witnesses(
    outcome: _Outcome, group, gamma, witnesses_text: Optional[str], max_cosets: int
) -> Tuple[Optional[int], Optional[List[Tuple[Word, Word]]], bool]:
    """
    Shared check of the normal generation condition and the commutator witnesses

    :return: d, witnesses (None when unavailable) and whether they were certified
    """
    kd_result = check_kd(group, gamma, max_cosets)
    outcome.results["kd"] = kd_result.to_dict()
    if kd_result.status == KdStatus.INDETERMINATE:
        outcome.indeterminate()
    if kd_result.status != KdStatus.HOLDS:
        return kd_result.d, None, False

    if witnesses_text is not None:
        witnesses = parse_witnesses(witnesses_text, group.generators)
        outcome.inputs["witnesses"] = [[group.word_to_text(v), group.word_to_text(w)] for v, w in witnesses]
        outcome.results["witness_source"] = "given"
    else:
        witnesses = find_commutator_witnesses(
            group, gamma, kd_result.d, app.config["RIMFORGE_WITNESS_BUDGET"], max_cosets
        )
        outcome.results["witness_source"] = "search"
        if witnesses is None:
            outcome.indeterminate()
            outcome.results["witnesses"] = "INDETERMINATE"
            return kd_result.d, None, False

    certified = verify_commutator_witnesses(group, gamma, kd_result.d, witnesses, max_cosets)
    outcome.results["witnesses"] = [[group.word_to_text(v), group.word_to_text(w)] for v, w in witnesses]
    outcome.results["witnesses_certified"] = certified
    return kd_result.d, witnesses, certified


# Commands


@command()
@with_appcontext
def version():
    """returns application version"""
    echo(f"Version: {app.config['VERSION']}")


@command()
@option("-k", "--knot", "knot_text", required=True, help="Knot, e.g. 'twobridge(3,1)' or 'torus(2,5)'")
@option("-d", "--d", "d", type=int, required=True, help="Cover degree, at least 2")
@_report_command("branched-cover")
def branched_cover(outcome: _Outcome, budgets: Dict, knot_text: str, d: int):
    """Fundamental group of a cyclic branched cover of a knot"""
    knot = parse_knot_spec(knot_text)
    outcome.inputs["knot"] = knot.to_text()
    cover = branched_cover_group(knot, d, budgets["tietze_budget"])

    homology_order = cover_homology_order(alexander_polynomial(knot), d)
    outcome.results.update(
        {
            "order": _order_result(outcome, group_order(cover.presentation, budgets["max_cosets"])),
            "abelianization": abelianization(cover.presentation).to_dict(),
            "homology_order": homology_order if homology_order is not None else "INFINITE",
            "presentation": cover.presentation.to_dict(),
            "deck_action": cover.to_dict()["deck_action"],
        }
    )


@command()
@option("-b", "--base", "base_text", required=True, help="Base group presentation, e.g. '<u | u^2>'")
@option("-m", "--meridian", "meridian_text", required=True, help="Surface meridian as a word in the base generators")
@option("-s", "--steps", "steps_text", default="[]", show_default=True, help="Steps, e.g. '[(twobridge(5,3),2)]'")
@_report_command("rim-surgery")
def rim_surgery(outcome: _Outcome, budgets: Dict, base_text: str, meridian_text: str, steps_text: str):
    """Rim surgeries along knots on a surface with trivial pushoff"""
    base_presentation = parse_presentation(base_text)
    meridian = parse_word(meridian_text, base_presentation.generators)
    steps = parse_steps(steps_text)
    outcome.inputs.update(
        {
            "base": base_presentation.to_text(),
            "meridian": base_presentation.word_to_text(meridian),
            "steps": [[knot.to_text(), m] for knot, m in steps],
        }
    )

    d = abelianization(base_presentation).cyclic_order
    if d is None:
        raise SurgeryError(f"H1 of the base is {abelianization(base_presentation).to_text()}, not finite cyclic")
    base = SurfaceKnotGroup(base_presentation.with_marks({Mark.MERIDIAN: meridian, Mark.PUSHOFF: Word()}), d)
    result = iterated_surgery(base, steps, budgets["max_cosets"], budgets["tietze_budget"])

    table = enumerate_cosets(result.presentation, (), budgets["max_cosets"])
    outcome.results.update(
        {
            "d": result.d,
            "order": _order_result(outcome, table.coset_count if table.complete else None),
            "meridian_order": element_order(table, result.meridian) if table.complete else "INDETERMINATE",
            "abelianization": abelianization(result.presentation).to_dict(),
            "presentation": result.presentation.to_dict(),
            "trace": result.provenance,
            "certification": _certification_result(outcome, result.certification),
        }
    )


@command()
@option("-k", "--knot", "knot_text", required=True, help="Knot, e.g. 'torus(3,5)'")
@option("-d", "--d", "degrees", type=int, multiple=True, help="Branched cover degrees for H1 orders")
@_report_command("alexander")
def alexander(outcome: _Outcome, budgets: Dict, knot_text: str, degrees: Tuple[int, ...]):
    """Alexander polynomial, determinant and cyclic cover homology orders"""
    knot = parse_knot_spec(knot_text)
    outcome.inputs["knot"] = knot.to_text()
    outcome.inputs["degrees"] = list(degrees)
    polynomial = alexander_polynomial(knot)

    cover_orders = {}
    for d in degrees:
        order = cover_homology_order(polynomial, d)
        cover_orders[str(d)] = order if order is not None else "INFINITE"
    outcome.results.update(
        {
            "alexander": polynomial.to_dict(),
            "determinant": polynomial.determinant,
            "cover_homology_orders": cover_orders,
        }
    )


@command()
@option("-k", "--knots", "knots_text", required=True, help="Knots separated by ';'")
@_report_command("distinguish")
def distinguish(outcome: _Outcome, budgets: Dict, knots_text: str):
    """Groups knots by the coefficient multisets of their Alexander polynomials"""
    knots = parse_knot_list(knots_text)
    outcome.inputs["knots"] = [knot.to_text() for knot in knots]
    polynomials = [alexander_polynomial(knot) for knot in knots]
    classes = fs_distinguish(polynomials)
    outcome.results.update(
        {
            "polynomials": [polynomial.to_text() for polynomial in polynomials],
            "classes": [[knots[position].to_text() for position in positions] for positions in classes],
            "class_count": len(classes),
            "assumption": SW_PAIR_NOTE,
        }
    )


@command()
@option("-g", "--group", "group_text", required=True, help="Group presentation, e.g. '<x | x^2>'")
@option("--gamma", "gamma_text", required=True, help="Candidate normal generator")
@option("-w", "--witnesses", "witnesses_text", default=None, help="Commutator witnesses, e.g. '[(a,b)]'")
@_report_command("kd")
def kd(outcome: _Outcome, budgets: Dict, group_text: str, gamma_text: str, witnesses_text: Optional[str]):
    """Checks that H1 is cyclic and the group is normally generated by gamma, with commutator witnesses"""
    group, gamma = _parse_group_and_gamma(group_text, gamma_text)
    outcome.inputs.update({"group": group.to_text(), "gamma": group.word_to_text(gamma)})
    _kd_witnesses(outcome, group, gamma, witnesses_text, budgets["max_cosets"])


@command()
@option("-g", "--group", "group_text", required=True, help="Group presentation, e.g. '<x | x^2>'")
@option("--gamma", "gamma_text", required=True, help="Normal generator")
@option("-w", "--witnesses", "witnesses_text", default=None, help="Commutator witnesses, e.g. '[(a,b)]'")
@option("--word", "word_text", default=None, help="Word identified with gamma_1, gamma by default")
@_report_command("symplectic")
def symplectic(
    outcome: _Outcome,
    budgets: Dict,
    group_text: str,
    gamma_text: str,
    witnesses_text: Optional[str],
    word_text: Optional[str],
):
    """Fundamental groups of the symplectic construction realising a group"""
    group, gamma = _parse_group_and_gamma(group_text, gamma_text)
    outcome.inputs.update({"group": group.to_text(), "gamma": group.word_to_text(gamma)})
    w = parse_word(word_text, group.generators) if word_text is not None else None

    d, witnesses, _ = _kd_witnesses(outcome, group, gamma, witnesses_text, budgets["max_cosets"])
    if witnesses is None:
        if outcome.status == STATUS_OK:
            outcome.failed()
            outcome.results["error"] = "the group does not satisfy the normal generation condition"
        return

    kd_witness = KdWitness(group, gamma, d, witnesses, budgets["max_cosets"])
    pipeline = build_symplectic_pipeline(kd_witness, w, budgets["max_cosets"], budgets["tietze_budget"])
    outcome.results.update(pipeline.to_dict())
    outcome.results["tier"] = pipeline.certification_tier.value
    for certification in (pipeline.md_certification, pipeline.m_certification):
        _certification_result(outcome, certification, strict=True)
