"""Command-line front end.

Exit codes: 0 when a verdict is decided, 2 when only a lower bound is known,
1 on errors (including failed verification).
"""

from __future__ import annotations

import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import click

from . import certificates as certs
from .corpus import CORPORA, Case
from .delta import delta1, delta_n_rep
from .polyring import Grading, PolyError, PolyRing, SparsePoly, serialize
from .qfs_ci import (
    EXACT,
    INFINITE_BY_CHECK,
    CIInput,
    ci_height,
    monomial_ideal_intersection,
    nonsplit_checks,
    verify_fixed_point,
)
from .qfs_cy import FINITE, INFINITE, cy_height

EXIT_DECIDED = 0
EXIT_ERROR = 1
EXIT_LOWER_BOUND = 2

SCAN_GUARD = 12


@dataclass
class JobSpec:
    p: int
    vars: list[str]
    gens: list[str]
    weights: list | None = None
    mode: str = "auto"
    degree_cap: int | None = None
    max_iter: int | None = None
    output: str = "text"
    trace_degrees: bool = False
    projective: bool = False

    @classmethod
    def from_dict(cls, d: dict) -> "JobSpec":
        known = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        missing = {"p", "vars", "gens"} - set(known)
        if missing:
            raise PolyError(f"job is missing {sorted(missing)}")
        return cls(**known)


@dataclass
class Prepared:
    ring: PolyRing
    gens: list[SparsePoly]
    grading: Grading
    engine: str
    mode: str
    notes: list[str] = field(default_factory=list)


def _grading(job: JobSpec, n: int) -> Grading:
    if job.weights is None:
        return Grading.standard(n)
    if len(job.weights) != n:
        raise PolyError(f"{len(job.weights)} weights for {n} variables")
    return Grading.from_weights(job.weights)


def prepare(job: JobSpec) -> Prepared:
    ring = PolyRing.make(job.vars, job.p)
    gens = [ring.parse(g) for g in job.gens]
    if not gens:
        raise PolyError("no generators")
    grading = _grading(job, ring.nvars)
    homog = all(isinstance(grading.degree(g), tuple) for g in gens)
    mode = job.mode
    if mode == "auto":
        if len(gens) == 1 and homog and grading.degree(gens[0]) == grading.mu:
            mode = "cy"
        elif homog:
            mode = "graded"
        else:
            mode = "local"
    if mode == "cy" and len(gens) != 1:
        raise PolyError("cy mode takes a single generator")
    engine = "cy" if mode == "cy" else "ci"
    return Prepared(ring, gens, grading, engine, mode)


def run_job(job: JobSpec) -> tuple[dict, int]:
    """Run one job; returns the JSON document and the exit code."""
    prep = prepare(job)
    doc = certs.job_header(job.p, job.vars, job.weights, prep.gens, prep.mode)
    t0 = time.perf_counter()
    if prep.engine == "cy":
        res = cy_height(prep.gens[0], prep.grading, max_iter=job.max_iter)
        body = certs.cy_to_json(res)
        code = EXIT_DECIDED if res.verdict in (FINITE, INFINITE) else EXIT_LOWER_BOUND
    else:
        kwargs = {"degree_cap": job.degree_cap} if job.degree_cap is not None else {}
        inp = CIInput.build(prep.gens, prep.grading, mode=prep.mode, **kwargs)
        res = nonsplit_checks(inp)
        if res is None:
            res = ci_height(inp, max_level=job.max_iter or 40, trace=job.trace_degrees)
        body = certs.ci_to_json(res)
        code = EXIT_DECIDED if res.verdict in (EXACT, INFINITE_BY_CHECK) else EXIT_LOWER_BOUND
        if not inp.regular_hint:
            body["notes"].append("formula-level: generators may not form a regular sequence")
    body["scope"] = _scope(prep, job)
    doc["result"] = body
    doc["timings"] = {"seconds": round(time.perf_counter() - t0, 4)}
    return doc, code


def _scope(prep: Prepared, job: JobSpec) -> str:
    if job.projective and prep.mode in ("cy", "graded"):
        return "projective variety (homogeneous regular sequence asserted by the user)"
    return "local ring" if prep.mode == "local" else "graded ring"


def _render(doc: dict) -> str:
    r = doc["result"]
    line = f"{r['label']}  [{r['engine']}, {doc['mode']}; height of the {r['scope']}]"
    extra = []
    if r["engine"] == "ci":
        if r["verdict"] == EXACT and not r["lower_bound_certified"]:
            extra.append("lower bound holds up to the degree cap only")
        extra.extend(r.get("notes", []))
        if "trace" in r:
            for t in r["trace"]:
                dims = ", ".join(f"{k}:{v}" for k, v in t["dims"].items())
                extra.append(f"I_{t['level']} dims {{{dims}}}")
    chain = r.get("certificate", {}).get("chain")
    if chain and r["engine"] == "ci":
        extra.append("chain h_2..h_n: " + "; ".join(l["h"] for l in chain))
    return "\n".join([line] + [f"  {e}" for e in extra])


def _emit(doc: dict, as_json: bool) -> None:
    if as_json:
        click.echo(json.dumps(doc, indent=2, sort_keys=True))
    else:
        click.echo(_render(doc))


def _split_list(s: str | None) -> list[str] | None:
    if s is None:
        return None
    return [x.strip() for x in s.replace(",", " ").split() if x.strip()]


def _parse_weights(s: str | None):
    if s is None:
        return None
    out = []
    for part in s.split(";" if ";" in s else ","):
        part = part.strip()
        out.append([int(x) for x in part.split(":")] if ":" in part else [int(part)])
    return out


@click.group()
def main() -> None:
    """Quasi-F-split heights of hypersurfaces and complete intersections."""


@main.command()
@click.argument("polys", nargs=-1)
@click.option("--job", "job_file", type=click.Path(exists=True, dir_okay=False), help="JobSpec JSON file.")
@click.option("--p", "p", type=int)
@click.option("--vars", "vars_", help="Variable names, comma separated.")
@click.option("--weights", help="Per-variable weights, e.g. 1,1,2 or 1:0;1:0;0:1 for multidegrees.")
@click.option("--mode", type=click.Choice(["auto", "cy", "graded", "local"]), default=None)
@click.option("--cap", type=int, default=None, help="Degree cap for the ideal engine.")
@click.option("--max-iter", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
@click.option("--trace-degrees", is_flag=True, help="Dump per-degree dimensions of each I_n.")
@click.option("--projective", is_flag=True, help="Assert the generators form a homogeneous regular sequence.")
def height(polys, job_file, p, vars_, weights, mode, cap, max_iter, as_json, trace_degrees, projective):
    """Compute the height of S/(POLYS)."""
    try:
        if job_file:
            with open(job_file) as fh:
                job = JobSpec.from_dict(json.load(fh))
        else:
            if p is None or vars_ is None or not polys:
                raise PolyError("need --p, --vars and at least one polynomial (or --job)")
            job = JobSpec(p=p, vars=_split_list(vars_), gens=list(polys))
        if weights is not None:
            job.weights = _parse_weights(weights)
        if mode is not None:
            job.mode = mode
        if cap is not None:
            job.degree_cap = cap
        if max_iter is not None:
            job.max_iter = max_iter
        job.trace_degrees = job.trace_degrees or trace_degrees
        job.projective = job.projective or projective
        as_json = as_json or job.output == "json"
        doc, code = run_job(job)
    except (PolyError, ValueError, json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_ERROR)
    _emit(doc, as_json)
    sys.exit(code)


# -- corpus ---------------------------------------------------------------


def run_case(case: Case) -> dict:
    t0 = time.perf_counter()
    ring = PolyRing.make(case.vars, case.p)
    gens = [ring.parse(g) for g in case.gens]
    grading = Grading.from_weights(case.weights) if case.weights else None
    if "J" in case.extra or "J_intersect" in case.extra:
        if "J" in case.extra:
            J = [ring.parse(j) for j in case.extra["J"]]
        else:
            parts = [[ring.parse(m) for m in part] for part in case.extra["J_intersect"]]
            J = monomial_ideal_intersection(*parts) + gens
        res = verify_fixed_point(CIInput.build(gens, grading, mode=case.mode), J, cap=20)
        got, label = (None if res else "refuted"), res.label()
    elif case.mode == "cy":
        r = cy_height(gens[0], grading)
        got, label = r.height, r.label()
    else:
        inp = CIInput.build(gens, grading, mode=case.mode)
        r = nonsplit_checks(inp) or ci_height(inp)
        got = r.height if r.verdict == EXACT else (None if r.verdict == INFINITE_BY_CHECK else "lower-bound")
        label = r.label()
    return {
        "name": case.name,
        "expected": case.expected,
        "got": got,
        "label": label,
        "ok": got == case.expected,
        "source": case.source,
        "seconds": round(time.perf_counter() - t0, 3),
    }


@main.command()
@click.argument("name", type=click.Choice(sorted(CORPORA)))
@click.option("--jobs", type=int, default=1)
@click.option("--json", "as_json", is_flag=True)
def corpus(name, jobs, as_json):
    """Run a bundled corpus and compare with the recorded values."""
    cases = CORPORA[name]()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(run_case, cases))
    else:
        rows = [run_case(c) for c in cases]
    ok = sum(r["ok"] for r in rows)
    if as_json:
        click.echo(json.dumps({"schema": certs.SCHEMA, "corpus": name, "rows": rows, "matched": ok, "total": len(rows)}, indent=2))
        return
    for r in rows:
        exp = "inf" if r["expected"] is None else r["expected"]
        status = "ok  " if r["ok"] else "DIFF"
        line = f"{status} {r['name']:<40} expected {exp!s:<5} got {r['label']}"
        if not r["ok"]:
            line += f"   (source: {r['source']})"
        click.echo(line)
    click.echo(f"{ok}/{len(rows)} match")


# -- scan -----------------------------------------------------------------


def specialize(template: SparsePoly, nvars: int, values: Sequence[int]) -> dict:
    p = template.ring.p
    out: dict = {}
    for k, c in template.terms.items():
        coef = c
        for e, v in zip(k[nvars:], values):
            coef = coef * pow(v, e, p) % p
        if coef:
            key = k[:nvars]
            out[key] = (out.get(key, 0) + coef) % p
    return {k: v for k, v in out.items() if v}


@main.command()
@click.argument("template")
@click.option("--p", "p", type=int, required=True)
@click.option("--vars", "vars_", required=True)
@click.option("--params", required=True, help="Placeholder coefficient names.")
@click.option("--target", default=None, help="Only report these heights (use inf for infinity).")
@click.option("--start", type=int, default=0, help="Resume from this assignment index.")
@click.option("--limit", type=int, default=None)
@click.option("--weights", default=None)
@click.option("--json", "as_json", is_flag=True)
def scan(template, p, vars_, params, target, start, limit, weights, as_json):
    """Enumerate F_p values of the placeholders and compute each height."""
    names = _split_list(vars_)
    pnames = _split_list(params)
    if len(pnames) > SCAN_GUARD:
        click.echo(f"error: {len(pnames)} placeholders exceed the guard of {SCAN_GUARD}", err=True)
        sys.exit(EXIT_ERROR)
    try:
        big = PolyRing.make(names + pnames, p)
        tmpl = big.parse(template)
        ring = PolyRing.make(names, p)
        grading = Grading.from_weights(_parse_weights(weights)) if weights else Grading.standard(len(names))
    except PolyError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_ERROR)
    wanted = None
    if target is not None:
        wanted = {None if t == "inf" else int(t) for t in _split_list(target)}
    count = 0
    for idx, values in enumerate(product(range(p), repeat=len(pnames))):
        if idx < start:
            continue
        if limit is not None and count >= limit:
            break
        count += 1
        f = SparsePoly(ring, specialize(tmpl, len(names), values))
        assign = dict(zip(pnames, values))
        if f.is_zero():
            row = {"index": idx, "assignment": assign, "height": None, "label": "rejected: zero polynomial"}
        else:
            try:
                r = cy_height(f, grading)
            except PolyError as exc:
                row = {"index": idx, "assignment": assign, "height": None, "label": f"rejected: {exc}"}
            else:
                row = {"index": idx, "assignment": assign, "height": r.height, "label": r.label()}
                if wanted is not None and r.height not in wanted:
                    continue
        if wanted is not None and row["label"].startswith("rejected"):
            continue
        if as_json:
            click.echo(json.dumps(row, sort_keys=True))
        else:
            a = " ".join(f"{k}={v}" for k, v in assign.items())
            click.echo(f"{idx}\t{a}\t{row['label']}")


# -- verify, delta1, witt -------------------------------------------------


@main.command()
@click.argument("result_file", type=click.Path(exists=True, dir_okay=False))
def verify(result_file):
    """Replay the certificate in RESULT_FILE from raw polynomial arithmetic."""
    try:
        with open(result_file) as fh:
            doc = json.load(fh)
        ok = certs.verify_document(doc)
    except (PolyError, json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_ERROR)
    click.echo("true" if ok else "false")
    sys.exit(EXIT_DECIDED if ok else EXIT_ERROR)


@main.command(name="delta1")
@click.argument("poly")
@click.option("--p", "p", type=int, required=True)
@click.option("--vars", "vars_", required=True)
@click.option("--n", "n", type=int, default=1, help="Print f^(p^n - p) * Delta_1(f) instead.")
def delta1_cmd(poly, p, vars_, n):
    """Print Delta_1 of POLY over F_p."""
    try:
        ring = PolyRing.make(_split_list(vars_), p)
        f = ring.parse(poly)
        out = delta1(f).value if n == 1 else delta_n_rep(f, n).value
    except PolyError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_ERROR)
    click.echo(serialize(out))


@main.command()
@click.argument("op", type=click.Choice(["add", "mul", "ghost", "teichmuller", "delta"]))
@click.option("--p", "p", type=int, required=True)
@click.option("--vars", "vars_", required=True)
@click.option("--x", "x", required=True, help="Components separated by ';' (or one polynomial).")
@click.option("--y", "y", default=None)
@click.option("--n", "n", type=int, default=2, help="Length for teichmuller and delta.")
def witt(op, p, vars_, x, y, n):
    """Truncated Witt vector arithmetic over F_p[vars]."""
    from . import wittlab

    try:
        ring = PolyRing.make(_split_list(vars_), p)
        xs = [ring.parse(c) for c in x.split(";")]
        if op == "add" or op == "mul":
            if y is None:
                raise PolyError("--y is required")
            ys = [ring.parse(c) for c in y.split(";")]
            a, b = wittlab.WittVector(xs), wittlab.WittVector(ys)
            res = (wittlab.witt_add if op == "add" else wittlab.witt_mul)(a, b).entries
        elif op == "ghost":
            res = wittlab.ghost(wittlab.WittVector(xs))
        elif op == "teichmuller":
            res = wittlab.teichmuller(xs[0], n).entries
        else:
            res = wittlab.small_deltas(xs[0], max(1, n - 1))
    except (PolyError, ArithmeticError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_ERROR)
    for i, c in enumerate(res):
        click.echo(f"[{i}] {serialize(c)}")


if __name__ == "__main__":
    main()
