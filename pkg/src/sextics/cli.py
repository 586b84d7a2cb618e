"""Command-line entry point: ``sextics classify|enumerate|verify|graph``."""
from __future__ import annotations

import csv
import io
import json
import sys

import click

from . import classify as cl
from . import mm
from .lattices import SpecError, parse_set

SCHEMA = 1
EXIT_MISMATCH = 1
EXIT_UNSUPPORTED = 3

FAMILY_NAMES = {
    "ns": "ns",
    "torus": "3",
    "special5": "5",
    "special7": "7",
    "special3-3": "3-3",
    "special3-3-3": "3-3-3",
}
CLI_NAMES = {v: k for k, v in FAMILY_NAMES.items()}
FORMATS = click.Choice(["text", "json", "csv", "dot"])


def _emit_json(obj) -> None:
    click.echo(json.dumps({"schema": SCHEMA, **obj}, indent=2, sort_keys=True))


def _rows_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: ";".join(v) if isinstance(v, list) else v for k, v in r.items()})
    return buf.getvalue()


def _text_line(d: dict) -> str:
    fam = CLI_NAMES.get(d["family"], d["family"])
    if not d["realized"]:
        return f"{d['set']}\t{fam}\tnot realized"
    counted = (d["r"], d["c"]) != (0, 0)
    parts = [d["set"], fam, f"({d['r']},{d['c']})" if counted else "realized"]
    if d.get("monodromy"):
        parts.append(d["monodromy"])
    if d.get("real_curve"):
        parts.append("real_curve=" + "/".join(d["real_curve"]))
    parts += d.get("notes", [])
    return "\t".join(parts)


class _Group(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except mm.UnsupportedCase as exc:
            click.echo(f"unsupported case: {exc}", err=True)
            ctx.exit(EXIT_UNSUPPORTED)


@click.group(cls=_Group)
@click.option("--data-dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="Directory with reference tables (defaults to the packaged copies).")
def main(data_dir):
    """Deformation classification of irreducible plane sextics with simple singularities."""
    if data_dir:
        cl.set_data_dir(data_dir)


def _parse_or_fail(spec: str):
    try:
        return parse_set(spec)
    except SpecError as exc:
        raise click.BadParameter(str(exc), param_hint="SPEC") from None


@main.command("classify")
@click.argument("spec")
@click.option("--family", type=click.Choice(sorted(FAMILY_NAMES)), default=None,
              help="Restrict to one family (default: all).")
@click.option("--format", "fmt", type=FORMATS, default="text")
def classify_cmd(spec, family, fmt):
    """Classify one set of singularities, e.g. "2A9" or "(A17)+A2"."""
    S = _parse_or_fail(spec)
    fams = [family] if family else list(FAMILY_NAMES)
    reports = [cl.classify(S, FAMILY_NAMES[f]).as_dict() for f in fams]
    if fmt == "json":
        _emit_json({"command": "classify", "spec": spec, "reports": reports})
    elif fmt == "csv":
        click.echo(_rows_csv(reports), nl=False)
    elif fmt == "dot":
        raise click.UsageError("dot output is available for the graph command only")
    else:
        for d in reports:
            click.echo(_text_line(d))


@main.command("enumerate")
@click.argument("family", type=click.Choice(sorted(FAMILY_NAMES)))
@click.argument("mu_max", type=click.IntRange(0, 19), required=False)
@click.option("--mu-max", "mu_opt", type=click.IntRange(0, 19), default=None)
@click.option("--count", is_flag=True, help="Print the number of realized sets only.")
@click.option("--jobs", type=click.IntRange(1), default=1)
@click.option("--format", "fmt", type=FORMATS, default="text")
def enumerate_cmd(family, mu_max, mu_opt, count, jobs, fmt):
    """List the realized sets of a family with total Milnor number at most MU_MAX."""
    bound = mu_opt if mu_opt is not None else mu_max
    if bound is None:
        raise click.UsageError("missing the bound MU_MAX")
    fam = FAMILY_NAMES[family]
    # the empty set (smooth sextics) is counted among the non-special sets
    reports = list(cl.enumerate_all(bound, fam, include_empty=(fam == "ns"), jobs=jobs))
    if count:
        if fmt == "json":
            _emit_json({"command": "enumerate", "family": family, "mu_max": bound, "count": len(reports)})
        else:
            click.echo(len(reports))
        return
    rows = [r.as_dict() for r in reports]
    if fmt == "json":
        _emit_json({"command": "enumerate", "family": family, "mu_max": bound,
                    "count": len(rows), "reports": rows})
    elif fmt == "csv":
        click.echo(_rows_csv(rows), nl=False)
    elif fmt == "dot":
        raise click.UsageError("dot output is available for the graph command only")
    else:
        for d in rows:
            click.echo(_text_line(d))
        click.echo(f"# {len(rows)} sets")


@main.command("verify")
@click.option("--table", "tables", multiple=True, type=click.Choice(["disconnected", "group", "nonreal"]),
              help="Tables to check (default: all).")
@click.option("--jobs", type=click.IntRange(1), default=1)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def verify_cmd(tables, jobs, fmt):
    """Recompute the reference tables and report differences."""
    from .verify import TABLES, verify_tables
    try:
        diffs = verify_tables(tables or TABLES, jobs)
    except (OSError, KeyError, ValueError) as exc:
        raise click.ClickException(f"cannot read reference data: {exc}") from None
    if fmt == "json":
        _emit_json({"command": "verify", "tables": [d.as_dict() for d in diffs],
                    "ok": all(d.ok for d in diffs)})
    else:
        for d in diffs:
            status = "pass" if d.ok else "FAIL"
            click.echo(f"{d.table}: {d.matched} rows matched, {len(d.mismatches)} mismatches: {status}")
            for s, e, c in d.mismatches:
                click.echo(f"  {s}: expected {e}, computed {c}")
    if not all(d.ok for d in diffs):
        sys.exit(EXIT_MISMATCH)


@main.command("graph")
@click.argument("p", type=click.Choice(["2", "3", "7"]))
@click.option("--format", "fmt", type=click.Choice(["dot", "csv", "json"]), default="dot")
def graph_cmd(p, fmt):
    """Emit the cluster graph of non-real strata for the prime P."""
    from .degen import build_cluster_graph
    cg = build_cluster_graph(int(p))
    if fmt == "dot":
        click.echo(cg.to_dot(), nl=False)
    elif fmt == "csv":
        click.echo(cg.to_csv(), nl=False)
    else:
        _emit_json({"command": "graph", "p": int(p), "vertices": cg.vertices,
                    "edges": sorted(map(list, cg.graph.edges)),
                    "connected": cg.is_connected(), "cycle_rank": cg.cycle_rank(),
                    "minimal": cg.minimal_vertices()})


if __name__ == "__main__":  # pragma: no cover
    main()
