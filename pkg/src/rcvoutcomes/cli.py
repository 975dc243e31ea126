"""Command-line interface.

Subcommands: ``count``, ``outcomes``, ``minbound``, ``viz``, ``bench``.
Set ``RCV_LOG=debug|info|warning|error`` to control log verbosity.

Exit status is 0 on success, including searches that hit the timeout and
return partial results (those are flagged in the JSON and on stderr);
validation and parse failures exit nonzero.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import sys
import time

import click

from . import _kernel, dagviz
from .core import count_ranked_votes
from .errors import RcvError
from .ingest import read_profile
from .minbound import min_bound_ballots
from .oracle import random_profile
from .search import (
    SearchOptions,
    brute_force_outcomes,
    enumerate_outcomes,
    prune_candidates,
    report_to_json,
)

log = logging.getLogger("rcvoutcomes")


def _configure_logging() -> None:
    level = os.environ.get("RCV_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))


def _profile_options(fn):
    fn = click.option("--sidecar", default=None, help="Sidecar JSON for CSV profiles.")(fn)
    fn = click.option(
        "--candidates", default=None, help="Comma-separated candidate names (CSV profiles)."
    )(fn)
    fn = click.option("--max-rankings", type=int, default=None, help="Ranking capacity (CSV profiles).")(fn)
    fn = click.option("--unbound-count", type=int, default=None, help="Outstanding-ballot count (CSV profiles).")(fn)
    return fn


def _search_options(fn):
    fn = click.option("--timeout-secs", type=float, default=7200.0, show_default=True)(fn)
    fn = click.option("--prune-threshold", type=float, default=0.0, show_default=True)(fn)
    fn = click.option("--no-memoize", is_flag=True, help="Replay full prefixes instead of reusing states.")(fn)
    fn = click.option("--parallel", is_flag=True, help="Search root subtrees in worker processes.")(fn)
    return fn


def _load(path, sidecar, candidates, max_rankings, unbound_count):
    names = [c.strip() for c in candidates.split(",")] if candidates else None
    return read_profile(
        path,
        sidecar=sidecar,
        candidates=names,
        max_rankings=max_rankings,
        unbound_count=unbound_count,
    )


def _write_out(payload: str, out: str | None) -> None:
    if out and out != "-":
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        click.echo(payload, nl=False)


@click.group()
def main() -> None:
    """Possible-winner analysis for ranked-choice elections."""
    _configure_logging()


@main.command()
@click.argument("profile_path")
@_profile_options
def count(profile_path, sidecar, candidates, max_rankings, unbound_count):
    """Standard round-by-round count (requires zero unbound ballots)."""
    try:
        profile = _load(profile_path, sidecar, candidates, max_rankings, unbound_count)
        if profile.unbound_count > 0:
            raise click.ClickException("unbound ballots present; use `outcomes`")
        result = count_ranked_votes(profile)
    except RcvError as exc:
        raise click.ClickException(str(exc)) from exc
    for rnd in result.rounds:
        cells = "  ".join(
            f"{profile.candidates[c]}={v}" for c, v in sorted(rnd.tallies.items())
        )
        click.echo(
            f"round {rnd.number}: {cells}  (exhausted={rnd.exhausted})"
            f"  -> eliminated {profile.candidates[rnd.eliminated]}"
        )
    click.echo("order: " + ", ".join(profile.names(result.order)))
    click.echo(f"winner: {profile.candidates[result.winner]}")


def _run_search(profile, opts):
    pruned = ()
    if opts.prune_threshold > 0:
        profile, pruned = prune_candidates(profile, opts.prune_threshold)
    report = enumerate_outcomes(profile, opts, pruned_candidates=pruned)
    return profile, report


@main.command()
@click.argument("profile_path")
@_profile_options
@_search_options
@click.option("--out", default=None, help="Report JSON destination (default stdout).")
def outcomes(profile_path, sidecar, candidates, max_rankings, unbound_count,
             timeout_secs, prune_threshold, no_memoize, parallel, out):
    """Enumerate feasible elimination orders and possible winners."""
    try:
        profile = _load(profile_path, sidecar, candidates, max_rankings, unbound_count)
        opts = SearchOptions(
            timeout_secs=timeout_secs,
            prune_threshold=prune_threshold,
            memoize=not no_memoize,
            parallel=parallel,
        )
        profile, report = _run_search(profile, opts)
    except RcvError as exc:
        raise click.ClickException(str(exc)) from exc
    winners = sorted(profile.candidates[c] for c in report.possible_winners)
    summary = f"{len(winners)} possible winner{'s' if len(winners) != 1 else ''}: " + ", ".join(winners)
    if report.timed_out:
        click.echo("warning: search timed out; results are partial", err=True)
    payload = json.dumps(report_to_json(report, profile), indent=2) + "\n"
    if out:
        click.echo(summary)
        _write_out(payload, out)
    else:
        click.echo(summary, err=True)
        _write_out(payload, None)


@main.command()
@click.argument("profile_path")
@_profile_options
@_search_options
@click.option("--out", default=None, help="Min-bound JSON destination (default stdout).")
def minbound(profile_path, sidecar, candidates, max_rankings, unbound_count,
             timeout_secs, prune_threshold, no_memoize, parallel, out):
    """Per-winner minimum count of outstanding ballots naming them."""
    try:
        profile = _load(profile_path, sidecar, candidates, max_rankings, unbound_count)
        opts = SearchOptions(
            timeout_secs=timeout_secs,
            prune_threshold=prune_threshold,
            memoize=not no_memoize,
            parallel=parallel,
        )
        profile, report = _run_search(profile, opts)
        bounds = min_bound_ballots(profile, report)
    except RcvError as exc:
        raise click.ClickException(str(exc)) from exc
    if report.timed_out:
        click.echo("warning: search timed out; bounds cover only the orders found", err=True)
    payload = json.dumps(bounds.to_json(profile), indent=2) + "\n"
    _write_out(payload, out)


@main.command()
@click.argument("report_path")
@click.option("--format", "fmt", type=click.Choice(["dot", "json"]), default="dot", show_default=True)
@click.option("--compress/--no-compress", default=True, show_default=True,
              help="Merge identical subtrees before emitting.")
@click.option("--out", default=None, help="Output destination (default stdout).")
def viz(report_path, fmt, compress, out):
    """Render a search report's outcome tree as DOT or node/edge JSON."""
    try:
        with open(report_path, encoding="utf-8") as fh:
            data = json.load(fh)
        orders = [tuple(o) for o in data.get("orders", [])]
        tree = dagviz.build_tree(orders)
        dag = dagviz.compress(tree) if compress else dagviz.expand_tree(tree)
        payload = dagviz.emit(dag, fmt)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.ClickException(str(exc)) from exc
    except RcvError as exc:
        raise click.ClickException(str(exc)) from exc
    if out and out != "-":
        with open(out, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)


def _bench_rows(profile, opts, kernel_name):
    rows = []
    runs = [
        ("brute_force", lambda: brute_force_outcomes(profile, opts)),
        ("branch_and_bound", lambda: enumerate_outcomes(profile, opts)),
        (
            "branch_and_bound_nomemo",
            lambda: enumerate_outcomes(
                profile,
                SearchOptions(
                    timeout_secs=opts.timeout_secs,
                    memoize=False,
                    kernel=opts.kernel,
                ),
            ),
        ),
    ]
    results = {}
    for name, run in runs:
        start = time.perf_counter()
        report = run()
        elapsed = time.perf_counter() - start
        results[name] = report
        rows.append(
            {
                "algorithm": name,
                "kernel": kernel_name,
                "candidates": profile.num_candidates,
                "bound_ballots": len(profile.bound_ballots),
                "unbound_ballots": profile.unbound_count,
                "seconds": f"{opts.timeout_secs:.6f}" if report.timed_out else f"{elapsed:.6f}",
                "nodes_expanded": report.nodes_expanded,
                "verify_calls": report.verify_calls,
                "timed_out": str(report.timed_out).lower(),
            }
        )
    finished = [r for r in results.values() if not r.timed_out]
    if len(finished) > 1:
        first = finished[0].orders
        if any(r.orders != first for r in finished[1:]):
            raise click.ClickException("algorithms disagree on the outcome set")
    return rows


@main.command()
@click.argument("profile_path", required=False)
@_profile_options
@click.option("--num-candidates", "-n", type=int, default=5, show_default=True,
              help="Synthetic profile size when no profile is given.")
@click.option("--ballots", type=int, default=1000, show_default=True)
@click.option("--unbound", type=int, default=200, show_default=True)
@click.option("--rankings", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--timeout-secs", type=float, default=7200.0, show_default=True)
@click.option("--compare-kernels", is_flag=True,
              help="Repeat every run with the pure-Python tally kernel.")
@click.option("--out", default=None, help="CSV destination (default stdout).")
def bench(profile_path, sidecar, candidates, max_rankings, unbound_count,
          num_candidates, ballots, unbound, rankings, seed, timeout_secs,
          compare_kernels, out):
    """Time brute force against branch and bound on one profile.

    With a profile path the file is used as-is; otherwise a synthetic
    profile is generated from the size flags and --seed.
    """
    try:
        if profile_path:
            profile = _load(profile_path, sidecar, candidates, max_rankings, unbound_count)
        else:
            profile = random_profile(num_candidates, ballots, unbound, rankings, seed)
        kernels = [("auto", _kernel.BACKEND)]
        if compare_kernels and _kernel.BACKEND != "python":
            kernels.append(("python", "python"))
        rows = []
        for kernel_opt, kernel_name in kernels:
            opts = SearchOptions(timeout_secs=timeout_secs, kernel=kernel_opt)
            rows.extend(_bench_rows(profile, opts, kernel_name))
    except RcvError as exc:
        raise click.ClickException(str(exc)) from exc
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    writer.writerows(rows)
    _write_out(buf.getvalue(), out)


if __name__ == "__main__":
    main()
