"""Bundled reference cases with known heights."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, log2

INF = None  # height infinity


@dataclass(frozen=True)
class Case:
    name: str
    p: int
    vars: tuple[str, ...]
    gens: tuple[str, ...]
    expected: int | None
    source: str
    mode: str = "auto"
    weights: tuple | None = None
    extra: dict = field(default_factory=dict)


def _ceil_log2(n: int) -> int:
    return ceil(log2(n)) if n > 1 else 0


def _d_even(n: int, r: int) -> Case:
    f = f"z^2+x^2*y+x*y^{n}" + (f"+x*y^{n - r}*z" if r else "")
    m = n - r
    return Case(f"D{2 * n}^{r}", 2, ("x", "y", "z"), (f,), _ceil_log2(m) + 1, f"RDP table, D_{{2n}}^{r}, n={n}", "local")


def _d_odd(n: int, r: int) -> Case:
    f = f"z^2+x^2*y+y^{n}*z" + (f"+x*y^{n - r}*z" if r else "")
    m = n - r
    return Case(f"D{2 * n + 1}^{r}", 2, ("x", "y", "z"), (f,), _ceil_log2(m) + 1, f"RDP table, D_{{2n+1}}^{r}, n={n}", "local")


RDP_E = [
    (2, "E6^0", "z^2+x^3+y^2*z", 2),
    (2, "E6^1", "z^2+x^3+y^2*z+x*y*z", 1),
    (2, "E7^0", "z^2+x^3+x*y^3", 4),
    (2, "E7^1", "z^2+x^3+x*y^3+x^2*y*z", 3),
    (2, "E7^2", "z^2+x^3+x*y^3+y^3*z", 2),
    (2, "E7^3", "z^2+x^3+x*y^3+x*y*z", 1),
    (2, "E8^0", "z^2+x^3+y^5", 4),
    (2, "E8^1", "z^2+x^3+y^5+x*y^3*z", 4),
    (2, "E8^2", "z^2+x^3+y^5+x*y^2*z", 3),
    (2, "E8^3", "z^2+x^3+y^5+y^3*z", 2),
    (2, "E8^4", "z^2+x^3+y^5+x*y*z", 1),
    (3, "E6^0", "z^2+x^3+y^4", 2),
    (3, "E6^1", "z^2+x^3+y^4+x^2*y^2", 1),
    (3, "E7^0", "z^2+x^3+x*y^3", 2),
    (3, "E7^1", "z^2+x^3+x*y^3+x^2*y^2", 1),
    (3, "E8^0", "z^2+x^3+y^5", 3),
    (3, "E8^1", "z^2+x^3+y^5+x^2*y^3", 2),
    (3, "E8^2", "z^2+x^3+y^5+x^2*y^2", 1),
    (5, "E8^0", "z^2+x^3+y^5", 2),
    (5, "E8^1", "z^2+x^3+y^5+x*y^4", 1),
]


def rdp_cases(n_max: int = 8) -> list[Case]:
    out = []
    for n in range(2, n_max + 1):
        out.append(_d_even(n, 0))
        out.append(_d_odd(n, 0))
        for r in sorted({1, n - 1}):
            out.append(_d_even(n, r))
            out.append(_d_odd(n, r))
    for p, name, f, h in RDP_E:
        out.append(Case(f"{name} p={p}", p, ("x", "y", "z"), (f,), h, f"RDP table, {name}, p={p}", "local"))
    return out


K3_F3 = [
    (1, "x^4+y^4+z^4+2*w^4+x^2*y*w+y*z^2*w"),
    (2, "x^4+2*y^4+2*z^4+2*w^4+x*y*z^2"),
    (3, "x^4+y^4+z^4+w^4+x^2*z^2+x*y*z^2+z^3*w"),
    (4, "x^4+y^4+z^4+w^4+x^2*z^2+x*y*z^2"),
    (5, "x^4+y^4+z^4+w^4+x^3*z+z^3*w+y*z^2*w+y*z*w^2"),
    (6, "x^4+y^4+z^4+w^4+x^2*z^2+x^2*y*z"),
    (7, "x^4+y^4+z^4+w^4+x*y^2*z+x*z^2*w+y*z*w^2+y^2*z*w"),
    (8, "x^4+x^2*y*z+x^2*y*w+2*x^2*z^2+x*y*w^2+2*y^4+y^3*w+z^4+w^4"),
    (9, "x^4+y^4+z^4+w^4+x*y^3+y^3*w+z^2*w^2+2*x*y*z^2+y*z*w^2"),
    (
        10,
        "x^4+2*x^2*y*z+x^2*y*w+x*y^2*w+y^4+y^3*w+y^2*z^2"
        "+2*y^2*z*w+y^2*w^2+y*z^3+y*z^2*w+y*z*w^2+z^4+z*w^3",
    ),
    (INF, "x^4+y^4+z^4+w^4"),
]


def k3_cases() -> list[Case]:
    return [
        Case(f"K3 row {'inf' if h is None else h}", 3, ("x", "y", "z", "w"), (f,), h, "K3 surfaces over F_3 table", "cy")
        for h, f in K3_F3
    ]


QUINTIC60 = "x^5+y^5+z^5+w^5+u^5+x*z^3*w+y*z*w^3+x^2*z*u^2+y^2*z^2*w+x*y^2*w*u+y*z*w*u^2"


def quintic_cases() -> list[Case]:
    return [Case("quintic height 60", 2, ("x", "y", "z", "w", "u"), (QUINTIC60,), 60, "quintic threefold over F_2", "cy")]


def fermat_cases(Ns=(4, 5, 6, 7), ps=(2, 3, 5, 7, 11, 13)) -> list[Case]:
    out = []
    for N in Ns:
        names = tuple(f"x{i}" for i in range(N))
        f = "+".join(f"{v}^{N}" for v in names)
        for p in ps:
            out.append(Case(f"Fermat N={N} p={p}", p, names, (f,), 1 if p % N == 1 else INF, "Fermat rule p = 1 mod N", "cy"))
    return out


G_HEIGHT_INF = "x^3+y^3+z^3+x*y*z*w^2"
J_HEIGHT_INF = (("x*y", "y*z", "x*z", "x^4*w", "y^4*w", "z^4*w"), ("x^2", "y^2", "z^2"))
G_INVERSION = "x*y*s^2+z*w*u^2+y^3*w+x^3*z"
J_INVERSION = ("y*s^2+x^2*z", "z*u^2+y^3")
INVERSION_VARS = ("x", "y", "z", "w", "u", "s")


def fixed_point_cases() -> list[Case]:
    return [
        Case(
            "fixed point x^3+y^3+z^3+xyzw^2",
            2,
            ("x", "y", "z", "w"),
            (G_HEIGHT_INF,),
            INF,
            "height-infinity fixed point example",
            "local",
            extra={"J_intersect": J_HEIGHT_INF},
        ),
        Case(
            "fixed point inversion counterexample",
            2,
            INVERSION_VARS,
            (G_INVERSION,),
            INF,
            "counterexample to inversion of adjunction",
            "graded",
            extra={"J": J_INVERSION},
        ),
        Case(
            "(s, g) inversion counterexample",
            2,
            INVERSION_VARS,
            ("s", G_INVERSION),
            2,
            "counterexample to inversion of adjunction",
            "graded",
        ),
    ]


def unbounded_cases(hs=(1, 2, 3)) -> list[Case]:
    from .qfs_cy import unbounded_family_p2

    out = []
    for h in hs:
        f = unbounded_family_p2(h)
        out.append(Case(f"unbounded h={h}", 2, f.ring.names, (str(f),), 2 * h, "unbounded heights in p=2", "cy"))
    return out


CORPORA = {
    "rdp": rdp_cases,
    "k3-f3": k3_cases,
    "quintic60": quintic_cases,
    "fermat": fermat_cases,
    "fixed-points": fixed_point_cases,
    "unbounded": unbounded_cases,
}
