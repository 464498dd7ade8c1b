"""JSON results and independent certificate replay.

Replay never touches slice data or the engines. theta is recomputed from
scratch as -f^(p-2) * u(Delta_1(f) * h) with plain multiplication, and every
chain relation is checked by polynomial arithmetic.
"""

from __future__ import annotations

from functools import reduce
from typing import Any

from .delta import delta1
from .frobenius import u_top
from .polyring import Grading, PolyError, PolyRing, SparsePoly, power, serialize
from .qfs_ci import CIHeightResult, CICertificate
from .qfs_cy import CYHeightResult

SCHEMA = 1


class CertificateError(PolyError):
    """Malformed certificate JSON."""


def _theta_raw(f: SparsePoly, h: SparsePoly) -> SparsePoly:
    p = f.ring.p
    inner = u_top(delta1(f).value * h)
    return -(power(f, p - 2) * inner) if inner else inner


def _escapes(a: SparsePoly) -> bool:
    p = a.ring.p
    return any(max(k, default=0) < p for k in a.terms)


# -- encoding -------------------------------------------------------------


def cy_to_json(res: CYHeightResult) -> dict:
    cert: dict[str, Any] = {"chain": [serialize(g) for g in res.chain]}
    if res.verdict == "finite":
        cert["kind"] = "finite"
    elif res.relation is not None:
        cert["kind"] = "relation"
        cert["relation"] = {str(k): v for k, v in sorted(res.relation.items())}
    elif res.cycle_start is not None:
        cert["kind"] = "cycle"
        cert["start"] = res.cycle_start
        cert["length"] = res.cycle_len
    else:
        cert["kind"] = "partial"
    return {
        "engine": "cy",
        "verdict": res.verdict,
        "height": res.height,
        "label": res.label(),
        "max_iter": res.max_iter,
        "certificate": cert,
    }


def ci_to_json(res: CIHeightResult) -> dict:
    out: dict[str, Any] = {
        "engine": "ci",
        "mode": res.mode,
        "verdict": res.verdict,
        "height": res.height,
        "lower_bound": res.lower_bound,
        "lower_bound_certified": res.lower_bound_certified,
        "cap": res.cap,
        "check": res.check,
        "label": res.label(),
        "notes": list(res.notes),
    }
    if res.certificate is not None:
        c = res.certificate
        out["certificate"] = {
            "kind": "chain",
            "escape": serialize(c.escape),
            "escape_cofactors": [serialize(x) for x in c.escape_cofactors],
            "chain": [{"h": serialize(l.h), "cofactors": [serialize(x) for x in l.cofactors]} for l in c.chain],
        }
    if res.trace:
        out["trace"] = res.trace
    return out


def job_header(p: int, names, weights, gens, mode: str) -> dict:
    return {
        "schema": SCHEMA,
        "p": p,
        "vars": list(names),
        "weights": [list(w) for w in weights] if weights is not None else None,
        "gens": [serialize(g) if isinstance(g, SparsePoly) else g for g in gens],
        "mode": mode,
    }


# -- replay ---------------------------------------------------------------


def _ring_from(doc: dict) -> tuple[PolyRing, list[SparsePoly], Grading]:
    try:
        if doc.get("schema") != SCHEMA:
            raise CertificateError(f"unsupported schema {doc.get('schema')!r}")
        ring = PolyRing.make(doc["vars"], int(doc["p"]))
        gens = [ring.parse(g) for g in doc["gens"]]
        w = doc.get("weights")
        grading = Grading.from_weights([tuple(x) for x in w]) if w else Grading.standard(ring.nvars)
    except (KeyError, TypeError) as exc:
        raise CertificateError(f"missing or malformed field: {exc}") from exc
    return ring, gens, grading


def replay_cy(f: SparsePoly, cert: dict) -> bool:
    ring = f.ring
    p = ring.p
    chain = [ring.parse(g) for g in cert["chain"]]
    kind = cert["kind"]
    g = power(f, p - 1)
    recomputed = [g]
    for _ in range(len(chain) - 1):
        g = _theta_raw(f, g)
        recomputed.append(g)
    if recomputed != chain:
        return False
    us = [bool(u_top(x)) for x in chain]
    if kind == "finite":
        return us[-1] and not any(us[:-1])
    if any(us):
        return False
    if kind == "cycle":
        start, length = int(cert["start"]), int(cert["length"])
        if length == 1 and chain[-1].is_zero():
            return True
        return chain[start - 1] == chain[start - 1 + length]
    if kind == "relation":
        rel = {int(k): int(v) for k, v in cert["relation"].items()}
        combo = ring.zero()
        for i, c in rel.items():
            combo = combo + chain[i - 1].scale(c)
        return combo == chain[-1] and all(i < len(chain) for i in rel)
    return False


def replay_ci(gens: list[SparsePoly], cert: dict) -> bool:
    ring = gens[0].ring
    p = ring.p
    f = reduce(lambda a, b: a * b, gens)
    i1 = [power(f, p - 1)] + [power(g, p) for g in gens]

    def combo(cofs: list[str]) -> SparsePoly:
        if len(cofs) != len(i1):
            raise CertificateError("cofactor list has the wrong length")
        acc = ring.zero()
        for c, gen in zip(cofs, i1):
            acc = acc + ring.parse(c) * gen
        return acc

    escape = ring.parse(cert["escape"])
    if not _escapes(escape):
        return False
    links = cert["chain"]
    hs = [ring.parse(l["h"]) for l in links]
    if not hs:
        return escape == combo(cert["escape_cofactors"])
    if escape - _theta_raw(f, hs[0]) != combo(cert["escape_cofactors"]):
        return False
    for k, (h, link) in enumerate(zip(hs, links)):
        if u_top(h):
            return False
        nxt = _theta_raw(f, hs[k + 1]) if k + 1 < len(hs) else ring.zero()
        if h - nxt != combo(link["cofactors"]):
            return False
    return True


def verify_document(doc: dict) -> bool:
    """Replay whatever certificate a result document carries."""
    ring, gens, _ = _ring_from(doc)
    result = doc.get("result", doc)
    cert = result.get("certificate")
    try:
        if result.get("engine") == "cy":
            if cert is None:
                return False
            return replay_cy(gens[0], cert)
        if result.get("engine") == "ci":
            if result.get("verdict") == "infinite_by_check":
                from .qfs_ci import CIInput, nonsplit_checks

                again = nonsplit_checks(CIInput.build(gens, mode=doc.get("mode") if doc.get("mode") in ("graded", "local") else "auto"))
                return again is not None and again.check == result.get("check")
            if cert is None:
                return False
            return replay_ci(gens, cert)
    except (KeyError, TypeError, ValueError) as exc:
        raise CertificateError(f"malformed certificate: {exc}") from exc
    raise CertificateError("unknown engine")


def certificate_from_json(ring: PolyRing, cert: dict) -> CICertificate:
    from .qfs_ci import ChainLink

    return CICertificate(
        ring.parse(cert["escape"]),
        [ring.parse(c) for c in cert["escape_cofactors"]],
        [ChainLink(ring.parse(l["h"]), [ring.parse(c) for c in l["cofactors"]]) for l in cert["chain"]],
    )
