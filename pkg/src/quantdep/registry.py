"""Named copula families and their parameter schemas."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .core import Copula, DomainError, convex_mix
from . import families as fam
from .regression import make_regression_model


@dataclass(frozen=True)
class FamilyInfo:
    name: str
    params: tuple  # (key, type) pairs, all required
    build: Callable[..., Copula]


def _mix(omega, left, right):
    C1, C2 = make_family(left), make_family(right)
    return convex_mix(C1, C2, omega)


FAMILIES = {
    f.name: f
    for f in [
        FamilyInfo("independence", (), fam.make_product),
        FamilyInfo("frechet-upper", (), fam.make_frechet_upper),
        FamilyInfo("frechet-lower", (), fam.make_frechet_lower),
        FamilyInfo("gaussian", (("rho", float),), fam.make_gaussian),
        FamilyInfo("student-t", (("rho", float), ("nu", int)), fam.make_student_t),
        FamilyInfo("cuadras-auge", (("theta", float),), fam.make_cuadras_auge),
        FamilyInfo("ev-flat", (("theta", float),), fam.make_ev_flat),
        FamilyInfo("archimedean-ex8", (("theta", float),), fam.make_archimedean_ex8),
        FamilyInfo("clayton", (("alpha", float),), fam.make_clayton),
        FamilyInfo("gumbel", (("alpha", float),), fam.make_gumbel),
        FamilyInfo("shuffle3", (), fam.make_shuffle),
        FamilyInfo("regression", (("beta0", float), ("beta1", float)), make_regression_model),
        FamilyInfo("mix", (("omega", float), ("left", str), ("right", str)), _mix),
    ]
}

# families whose name alone identifies the copula; valid mix components
PARAMETER_FREE = tuple(n for n, f in FAMILIES.items() if not f.params)


def parse_params(text: str) -> dict:
    """Parse ``"k=v,k=v"`` into a dict of strings."""
    out = {}
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, val = item.partition("=")
        if not sep or not key.strip():
            raise DomainError(f"--params: expected key=value, got {item!r}")
        key = key.strip()
        if key in out:
            raise DomainError(f"--params: duplicate key {key!r}")
        out[key] = val.strip()
    return out


def _coerce(name, key, typ, raw):
    try:
        if typ is int:
            x = float(raw)
            if x != int(x):
                raise ValueError
            return int(x)
        if typ is float:
            return float(raw)
    except (TypeError, ValueError):
        raise DomainError(f"{name}: parameter {key} must be {typ.__name__}, got {raw!r}") from None
    if name == "mix" and raw not in PARAMETER_FREE:
        raise DomainError(f"mix: {key} must be one of {', '.join(PARAMETER_FREE)}, got {raw!r}")
    return raw


def make_family(name: str, params=None) -> Copula:
    """Build a registered family from a name and a parameter mapping.

    Parameter values may be strings (as read from the command line).
    """
    if name not in FAMILIES:
        raise DomainError(f"unknown family {name!r}; known: {', '.join(FAMILIES)}")
    info = FAMILIES[name]
    params = dict(params or {})
    expected = [k for k, _ in info.params]
    unknown = sorted(set(params) - set(expected))
    if unknown:
        raise DomainError(f"{name}: unknown parameter(s) {', '.join(unknown)}")
    missing = [k for k in expected if k not in params]
    if missing:
        raise DomainError(f"{name}: missing parameter(s) {', '.join(missing)}")
    args = [_coerce(name, k, typ, params[k]) for k, typ in info.params]
    return info.build(*args)
