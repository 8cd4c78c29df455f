"""Command line: ``riskchoice analyze | simulate | audit-dominance``.

Exit codes: 0 success, 1 validation error, 2 internal assertion failure.
"""

from __future__ import annotations

import sys
from fractions import Fraction
from pathlib import Path

import click

from .analysis import ConsistencyError
from .audit import run_dominance_audit
from .axioms import DeferralPolicy, FosdMode
from .choices import ChoiceDataError
from .design import DesignError, Taxonomy
from .hm import HmMode, HmPolicy
from .report import (
    RunConfig,
    SimulationRun,
    ValidationError,
    dumps,
    render_report,
    resolve_design,
    run_analysis,
    run_simulation,
)

EXIT_VALIDATION = 1
EXIT_INTERNAL = 2


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _guard(fn):
    """Map failures onto the documented exit codes."""
    try:
        fn()
    except (ValidationError, ChoiceDataError, DesignError, FileNotFoundError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    except (ConsistencyError, AssertionError) as exc:
        click.echo(f"internal error: {exc}", err=True)
        sys.exit(EXIT_INTERNAL)


def _fraction(ctx, param, value):
    try:
        f = Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise click.BadParameter(str(exc)) from exc
    if not 0 <= f <= 1:
        raise click.BadParameter("must lie in [0, 1]")
    return f


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Rationality tests for repeated choice under risk."""


@main.command()
@click.option("--choices", required=True, type=click.Path(dir_okay=False))
@click.option("--design", type=click.Path(file_okay=False), help="Design directory (default: built-in).")
@click.option("--attributes", type=click.Path(dir_okay=False), help="Optional subject attribute CSV.")
@click.option("--policy", type=click.Choice([p.value for p in DeferralPolicy]), default="strict")
@click.option("--fosd-mode", type=click.Choice([m.value for m in FosdMode]), default="dominated-choice")
@click.option("--taxonomy", type=click.Choice([t.value for t in Taxonomy]), default="declared")
@click.option("--merge-threshold", default="0", callback=_fraction,
              help="Minimum choice frequency to enter the merged set.")
@click.option("--renormalize", is_flag=True, help="Active-only binary probabilities in stochastic transitivity.")
@click.option("--seed", type=int, default=0, help="Echoed into the report.")
@click.option("--jobs", type=int, default=1)
@click.option("--out", type=click.Path(dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
def analyze(choices, design, attributes, policy, fosd_mode, taxonomy, merge_threshold, renormalize,
            seed, jobs, out, fmt):
    """Per-subject and aggregate analysis of a choices file."""
    cfg = RunConfig(
        choices=choices, design=design, attributes=attributes,
        policy=DeferralPolicy(policy), fosd_mode=FosdMode(fosd_mode), taxonomy=Taxonomy(taxonomy),
        merge_threshold=merge_threshold, renormalize_stochastic=renormalize,
        out=out, format=fmt, seed=seed, jobs=jobs,
    )
    _guard(lambda: _emit(render_report(run_analysis(cfg), fmt), out))


@main.command()
@click.option("--population", default="uniform:100",
              help='Comma list of kind:count, e.g. "uniform:100,eu-concave:50,noisy-eu:58".')
@click.option("--design", type=click.Path(file_okay=False))
@click.option("--rounds", type=int, default=5)
@click.option("--seed", type=int, default=0)
@click.option("--noise", type=float, default=0.05, help="Logit scale for noisy-eu agents (utilities run 0..1).")
@click.option("--out", type=click.Path(dir_okay=False), default="choices.csv", show_default=True)
@click.option("--summary", type=click.Path(dir_okay=False), help="Write the JSON summary here.")
@click.option("--hm-mode", type=click.Choice([m.value for m in HmMode]), default="strict")
@click.option("--hm-policy", type=click.Choice([p.value for p in HmPolicy]), default="penalize")
def simulate(population, design, rounds, seed, noise, out, summary, hm_mode, hm_policy):
    """Simulate agents, write choices.csv and summarise HM scores."""
    run = SimulationRun(
        population=population, design=design, rounds=rounds, seed=seed, noise=noise,
        out=out, summary=summary, hm_mode=HmMode(hm_mode), hm_policy=HmPolicy(hm_policy),
    )

    def go():
        doc = run_simulation(run)
        if not summary:
            click.echo(dumps(doc), nl=False)

    _guard(go)


@main.command("audit-dominance")
@click.option("--design", type=click.Path(file_okay=False))
@click.option("--out", type=click.Path(dir_okay=False))
def audit_dominance(design, out):
    """Exact FOSD/SOSD audit of the design and its reference tables."""
    _guard(lambda: _emit(dumps(run_dominance_audit(resolve_design(design))), out))


if __name__ == "__main__":  # pragma: no cover
    main()
