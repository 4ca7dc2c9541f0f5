"""Command-line surface tying the analysis and storage modules together.

Every subcommand is a thin adapter over library calls; all numeric output
is deterministic, rationals print as p/q with a 12-significant-digit
decimal, and tables go to stdout unless --out names a file.
"""

from __future__ import annotations

import csv
import io
import json
import re
import sys
from fractions import Fraction

import click

from . import comparison, cubic_code, flow_analysis, repair_sim
from .cubic_code import ClusterParams
from .errors import (
    CorruptionError,
    InfeasibleError,
    InsufficientDataError,
    ParameterError,
    StructuralError,
)
from .flow_analysis import format_decimal

__all__ = ["dispatch", "main", "write_tables"]

_ADDRESS_RE = re.compile(r"^c(\d+)s(\d+)$")


def _parse_address(text: str) -> tuple[int, int]:
    """Turn a 1-based c<cluster>s<server> spelling into internal indices."""
    match = _ADDRESS_RE.fullmatch(text.strip())
    if match is None:
        raise ParameterError(
            f"bad server address {text!r}; expected c<cluster>s<server>, 1-based"
        )
    cluster, server = int(match.group(1)), int(match.group(2))
    if cluster < 1 or server < 1:
        raise ParameterError(f"server address {text!r} must use 1-based numbers")
    return cluster, server - 1


def _format_address(address: tuple[int, int]) -> str:
    return f"c{address[0]}s{address[1] + 1}"


def _parse_rational(text: str, name: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"{name} must be a rational number, got {text!r}") from exc


def _rational_text(value) -> str:
    frac = Fraction(value)
    return f"{frac.numerator}/{frac.denominator} ({format_decimal(frac)})"


def write_tables(
    table: tuple[tuple[str, ...], list[tuple[str, ...]]],
    fmt: str = "csv",
    destination: str | None = None,
) -> None:
    """Serialize a (header, rows) table as CSV or JSON, byte-stably.

    destination None streams to stdout; an empty row set still yields the
    header (CSV) or an empty list (JSON).
    """
    header, rows = table
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        text = buffer.getvalue()
    elif fmt == "json":
        text = json.dumps([dict(zip(header, row)) for row in rows], indent=2) + "\n"
    else:
        raise ParameterError(f"format must be 'csv' or 'json', got {fmt!r}")
    if destination is None:
        click.echo(text, nl=False)
    else:
        with open(destination, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        click.echo(f"wrote {len(rows)} rows to {destination}")


@click.group(name="fcrs")
def cli() -> None:
    """Storage-bandwidth analysis and repair tools for clustered layouts."""


@cli.command()
@click.option("--n", type=int, required=True, help="Total number of servers.")
@click.option("--k", type=int, required=True, help="Servers needed to recover.")
@click.option("--s", type=int, required=True, help="Number of complete clusters.")
def mbr(n: int, k: int, s: int) -> None:
    """Print minimum-bandwidth operating points and baseline ratios."""
    params = ClusterParams(n=n, k=k, s=s)
    point = flow_analysis.mbr_point(params)
    gamma_cubic = cubic_code.gamma_cubic(params)
    gamma_baseline = comparison.baseline_mbr(comparison.BaselineParams(n=n, k=k, s=s))
    click.echo(f"gamma_fcrs={_rational_text(point.gamma)}")
    click.echo(f"gamma_cubic={_rational_text(gamma_cubic)}")
    click.echo(f"gamma_baseline={_rational_text(gamma_baseline)}")
    click.echo(f"ratio_functional={format_decimal(point.gamma / gamma_baseline)}")
    click.echo(f"ratio_cubic={format_decimal(gamma_cubic / gamma_baseline)}")
    try:
        _, functional_bound = comparison.functional_ratio(n, k, s)
        _, cubic_bound = comparison.cubic_ratio(n, k, s)
    except ParameterError:
        return  # bounds only apply when complete clusters hold exactly k servers
    click.echo(f"bound_functional={format_decimal(functional_bound)}")
    click.echo(f"bound_cubic={format_decimal(cubic_bound)}")


@cli.command()
@click.option("--n", type=int, required=True, help="Total number of servers.")
@click.option("--k", type=int, required=True, help="Servers needed to recover.")
@click.option("--s", type=int, required=True, help="Number of complete clusters.")
@click.option("--points", type=int, default=100, show_default=True,
              help="Number of grid rows.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True, help="Output format.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write to this file instead of stdout.")
def tradeoff(n: int, k: int, s: int, points: int, fmt: str, out: str | None) -> None:
    """Tabulate storage-per-server against repair bandwidth for both systems."""
    write_tables(comparison.emit_fig4_table(n, k, s, points), fmt, out)


@cli.command()
@click.option("--n", type=int, required=True, help="Total number of servers.")
@click.option("--k", type=int, required=True, help="Servers needed to recover.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True, help="Output format.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write to this file instead of stdout.")
def compare(n: int, k: int, fmt: str, out: str | None) -> None:
    """Tabulate minimum bandwidth against availability for every cluster count."""
    write_tables(comparison.emit_fig6_table(n, k), fmt, out)


@cli.command()
@click.option("--file", "path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="File to store.")
@click.option("--n", type=int, required=True, help="Total number of servers.")
@click.option("--k", type=int, required=True, help="Servers needed to recover.")
@click.option("--s", type=int, required=True, help="Number of complete clusters.")
@click.option("--dir", "directory", type=click.Path(file_okay=False), required=True,
              help="State directory to create or overwrite.")
def encode(path: str, n: int, k: int, s: int, directory: str) -> None:
    """Encode a file across n servers and persist the state directory."""
    params = ClusterParams(n=n, k=k, s=s)
    with open(path, "rb") as handle:
        data = handle.read()
    state = cubic_code.encode_file(data, params)
    cubic_code.save_state(state, directory)
    click.echo(
        f"encoded {state.file_length} bytes into {n} servers "
        f"({state.stripe_count} stripes x {state.plan.alpha_symbols} symbols each); "
        f"state in {directory}"
    )


@cli.command()
@click.option("--dir", "directory", type=click.Path(exists=True, file_okay=False),
              required=True, help="State directory.")
@click.option("--failed", required=True, help="Failed server address, e.g. c1s2.")
@click.option("--helper", "helper_cluster", type=int, required=True,
              help="Helper cluster number (1-based).")
def repair(directory: str, failed: str, helper_cluster: int) -> None:
    """Repair one server from a helper cluster and save the state back."""
    state = cubic_code.load_state(directory)
    address = _parse_address(failed)
    transcript = cubic_code.repair(state, address, helper_cluster)
    cubic_code.save_state(state, directory)
    click.echo(
        f"repaired {_format_address(address)} from cluster {helper_cluster}; "
        f"moved {transcript.symbols_moved} symbols "
        f"({len(transcript.per_helper)} helpers)"
    )


@cli.command()
@click.option("--dir", "directory", type=click.Path(exists=True, file_okay=False),
              required=True, help="State directory.")
@click.option("--servers", required=True,
              help="Comma-separated k server addresses, e.g. c1s1,c1s2,c2s1,c3s1.")
@click.option("--out", type=click.Path(dir_okay=False), required=True,
              help="Where to write the recovered file.")
def recover(directory: str, servers: str, out: str) -> None:
    """Rebuild the stored file from exactly k servers."""
    state = cubic_code.load_state(directory)
    addresses = [_parse_address(part) for part in servers.split(",")]
    data = cubic_code.recover_file(state, addresses)
    with open(out, "wb") as handle:
        handle.write(data)
    click.echo(f"recovered {len(data)} bytes to {out}; digest verified")


@cli.command()
@click.option("--dir", "directory", type=click.Path(exists=True, file_okay=False),
              required=True, help="State directory.")
@click.option("--sample", "sample_count", type=int, default=None,
              help="Check this many random k-subsets instead of all of them.")
@click.option("--seed", type=int, default=None, help="Seed for --sample draws.")
def verify(directory: str, sample_count: int | None, seed: int | None) -> int:
    """Check that k-subsets of servers reproduce the stored file."""
    state = cubic_code.load_state(directory)
    if sample_count is None:
        report = repair_sim.verify_recovery(state, mode="all")
    else:
        report = repair_sim.verify_recovery(
            state, mode="sample", count=sample_count, seed=seed
        )
    if report.ok:
        click.echo(f"checked {report.checked} subsets: all recovered the file")
        return 0
    for subset, reason in report.failures:
        spelled = ",".join(_format_address(a) for a in subset)
        click.echo(f"FAIL {spelled}: {reason}", err=True)
    click.echo(
        f"checked {report.checked} subsets: {len(report.failures)} failed", err=True
    )
    return 2


@cli.command()
@click.option("--n", type=int, required=True, help="Total number of servers.")
@click.option("--k", type=int, required=True, help="Servers needed to recover.")
@click.option("--s", type=int, required=True, help="Number of complete clusters.")
@click.option("--k1", type=int, default=None,
              help="Failures in the first cluster of the two-cluster pattern "
                   "(default: the minimizing choice).")
@click.option("--alpha", required=True, help="Per-server storage (rational).")
@click.option("--beta", required=True, help="Per-helper-server transfer (rational).")
@click.option("--exhaustive", is_flag=True,
              help="Also minimize over every failure pattern and collector.")
@click.option("--max-len", type=int, default=None,
              help="Failure-sequence length cap for --exhaustive (default k).")
def mincut(n: int, k: int, s: int, k1: int | None, alpha: str, beta: str,
           exhaustive: bool, max_len: int | None) -> int:
    """Cross-check flow-graph min-cuts against the closed-form bandwidth bound."""
    params = ClusterParams(n=n, k=k, s=s)
    alpha_value = _parse_rational(alpha, "alpha")
    beta_value = _parse_rational(beta, "beta")
    d = params.d
    closed = flow_analysis.fstar_closed(alpha_value, beta_value, d, k)
    if k1 is None:
        low, high = (k + 1) // 2, min(k, d)
        k1 = min(
            range(low, high + 1),
            key=lambda c: flow_analysis.fstar_sequence(
                [1] * c + [2] * (k - c), alpha_value, beta_value, d, s
            ),
        )
    labels = [1] * k1 + [2] * (k - k1)
    formula = flow_analysis.fstar_sequence(labels, alpha_value, beta_value, d, s)
    instance = flow_analysis.twin_sequence(
        params, k1, alpha=alpha_value, beta=beta_value
    )
    graph_value = flow_analysis.min_cut(flow_analysis.build_flow_graph(instance))
    click.echo(f"k1={k1}")
    click.echo(f"twin_graph_min_cut={_rational_text(graph_value)}")
    click.echo(f"twin_sequence_value={_rational_text(formula)}")
    click.echo(f"closed_form={_rational_text(closed)}")
    status = 0
    if graph_value != formula:
        click.echo("MISMATCH: graph min-cut differs from the sequence formula",
                   err=True)
        status = 2
    if exhaustive:
        point = flow_analysis.sweep_min_cut(
            params, [(alpha_value, beta_value)], max_len=max_len
        )[0]
        click.echo(f"exhaustive_min_cut={_rational_text(point.minimum)}")
        click.echo(f"instance_classes={point.class_count}")
        if point.minimum != closed:
            click.echo("MISMATCH: exhaustive minimum differs from the closed form",
                       err=True)
            status = 2
    return status


@cli.command()
@click.option("--dir", "directory", type=click.Path(exists=True, file_okay=False),
              required=True, help="State directory.")
@click.option("--policy", type=click.Choice(list(repair_sim.POLICIES)),
              default="random", show_default=True, help="Failure pattern.")
@click.option("--length", type=int, required=True, help="Number of repair rounds.")
@click.option("--seed", type=int, default=None, help="Seed for the random policy.")
@click.option("--k1", type=int, default=None, help="First-cluster failures "
              "(twin policy only).")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the bandwidth ledger CSV here instead of stdout.")
def simulate(directory: str, policy: str, length: int, seed: int | None,
             k1: int | None, out: str | None) -> None:
    """Run a failure/repair schedule and report the bandwidth ledger."""
    state = cubic_code.load_state(directory)
    schedule = repair_sim.generate_schedule(
        state.params, policy, length, seed=seed, k1=k1
    )
    _, ledger = repair_sim.run_simulation(state, schedule)
    click.echo(
        f"applied {len(schedule.events)} repairs ({policy}); "
        f"total_symbols={ledger.total_symbols}", err=out is None
    )
    write_tables(ledger.csv_rows(), "csv", out)


def dispatch(argv: list[str] | None = None) -> int:
    """Run the CLI without exiting the interpreter; returns the exit code.

    0 success, 1 usage or parameter errors, 2 integrity or verification
    failures.
    """
    try:
        result = cli.main(args=argv, prog_name="fcrs", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except (ParameterError, InsufficientDataError, InfeasibleError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except (CorruptionError, StructuralError) as exc:
        click.echo(f"integrity error: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return int(result) if isinstance(result, int) else 0


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
