"""Registry of the built-in groups and algebras the CLI can construct."""

from __future__ import annotations

from dataclasses import dataclass

from . import groups


@dataclass(frozen=True)
class BuiltinSpec:
    name: str
    description: str
    params: tuple            # of (param name, type name, constraint text, default or None)
    build: callable
    construction_kind: str | None = None   # first-construction kind, if any
    three_dim: bool = False                # guaranteed 3-dimensional for the foliation scan


BUILTINS = (
    BuiltinSpec(
        "N",
        "upper-triangular unipotent n x n matrices (nilpotent), trace metric",
        (("n", "int", "n >= 2", None),),
        lambda n: groups.build_N(int(n)),
        construction_kind="N",
    ),
    BuiltinSpec(
        "H",
        "Heisenberg group of dimension 2n+1, trace metric",
        (("n", "int", "n >= 1", None),),
        lambda n: groups.build_H(int(n)),
        construction_kind="H",
    ),
    BuiltinSpec(
        "K",
        "nilpotent group of dimension n+1 with a single filiform-type generator, trace metric",
        (("n", "int", "n >= 2", None),),
        lambda n: groups.build_K(int(n)),
        construction_kind="K",
    ),
    BuiltinSpec(
        "S",
        "upper-triangular n x n matrices with positive diagonal (solvable), trace metric",
        (("n", "int", "n >= 2", None),),
        lambda n: groups.build_S(int(n)),
        construction_kind="S",
    ),
    BuiltinSpec(
        "G3",
        "solvable 3-d group, generator acting on the plane by alpha*I + beta*rotation; "
        "orthonormal declared basis",
        (("alpha", "float", "(alpha, beta) != (0, 0)", None),
         ("beta", "float", "", 0.0)),
        lambda alpha, beta=0.0: groups.build_G3(float(alpha), float(beta)),
        three_dim=True,
    ),
    BuiltinSpec(
        "G_alpha",
        "solvable 3-d group, generator acting on the plane with eigenvalues alpha and -1; "
        "orthonormal declared basis",
        (("alpha", "float", "", None),),
        lambda alpha: groups.build_Galpha(float(alpha)),
        three_dim=True,
    ),
    BuiltinSpec(
        "damek_ricci",
        "solvable algebra v + z + a with Heisenberg-type nilradical; algebra only",
        (("dim_v", "int", "dim_v >= 1", None),
         ("dim_z", "int", "dim_z >= 1", None)),
        lambda dim_v, dim_z: groups.build_damek_ricci(int(dim_v), int(dim_z)),
    ),
)

BY_NAME = {spec.name: spec for spec in BUILTINS}


def list_builtins() -> list[dict]:
    """Catalog rows for reports and the --list flag."""
    out = []
    for spec in BUILTINS:
        out.append({
            "name": spec.name,
            "description": spec.description,
            "params": [{"name": p[0], "type": p[1], "constraint": p[2],
                        **({"default": p[3]} if p[3] is not None else {})}
                       for p in spec.params],
            "construction_kind": spec.construction_kind,
            "three_dim": spec.three_dim,
        })
    return out


def build(name: str, params: dict):
    """(algebra, realization or None) for a catalog entry."""
    if name not in BY_NAME:
        raise KeyError(f"unknown builtin {name!r}; available: {sorted(BY_NAME)}")
    spec = BY_NAME[name]
    expected = {p[0] for p in spec.params}
    unknown = set(params) - expected
    if unknown:
        raise ValueError(f"builtin {name}: unknown parameters {sorted(unknown)}")
    missing = [p[0] for p in spec.params if p[3] is None and p[0] not in params]
    if missing:
        raise ValueError(f"builtin {name}: missing parameters {missing}")
    return spec.build(**params)
