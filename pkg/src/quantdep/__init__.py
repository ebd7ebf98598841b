"""Quantile dependence coefficients of bivariate copulas."""

from .core import (
    Copula,
    CopulaError,
    DomainError,
    QuantilePoint,
    Rectangle,
    c_volume,
    clamp_interval,
    convex_mix,
    reflect_u,
    reflect_v,
    survival,
)
from .dependence import (
    Direction,
    LimitSchedule,
    QdcEstimate,
    dual_direction,
    ev_qdc,
    qdc,
    qdc_closed_form,
    qdc_conditional,
    qdc_volume,
    tail_coefficients,
    archimedean_tails,
)
from .registry import FAMILIES, make_family

__all__ = [
    "Copula", "CopulaError", "DomainError", "QuantilePoint", "Rectangle", "c_volume",
    "clamp_interval", "convex_mix", "reflect_u", "reflect_v", "survival", "Direction",
    "LimitSchedule", "QdcEstimate", "dual_direction", "ev_qdc", "qdc", "qdc_closed_form",
    "qdc_conditional", "qdc_volume", "tail_coefficients", "archimedean_tails", "FAMILIES",
    "make_family",
]
