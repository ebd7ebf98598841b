import math

import pytest

from quantdep.core import DomainError, QuantilePoint, convex_mix
from quantdep.dependence import (
    BoundaryPoint,
    Direction,
    LimitSchedule,
    MissingConditional,
    NotConverged,
    QdcEstimate,
    archimedean_tails,
    dual_direction,
    ev_qdc,
    numeric_limit,
    qdc,
    qdc_closed_form,
    qdc_conditional,
    qdc_grid,
    qdc_volume,
    tail_coefficients,
    volume_ratio,
)
from quantdep.families import (
    make_archimedean_ex8,
    make_cuadras_auge,
    make_ev_flat,
    make_frechet_lower,
    make_frechet_upper,
    make_product,
    make_shuffle,
    make_student_t,
)
from quantdep.registry import make_family

import oracles

P = QuantilePoint
M, W, PI, S = make_frechet_upper(), make_frechet_lower(), make_product(), make_shuffle()
YX, XY = Direction.Y_GIVEN_X, Direction.X_GIVEN_Y


# --- schedule and limit machinery -----------------------------------------

def test_schedule_defaults():
    s = LimitSchedule()
    assert (s.t0, s.ratio, s.max_steps, s.abs_tol, s.extrapolate) == (2.0 ** -4, 0.5, 24, 1e-4, True)
    assert s.ts()[-1] == 2.0 ** -27


@pytest.mark.parametrize("kw", [{"t0": 0.0}, {"t0": 0.6}, {"ratio": 1.0}, {"ratio": 0.0},
                                {"max_steps": 2}, {"max_steps": 3.5}, {"abs_tol": 0.0}])
def test_schedule_rejects(kw):
    with pytest.raises(DomainError):
        LimitSchedule(**kw)


def test_limit_richardson_exact_for_linear():
    value, conv, trace = numeric_limit(lambda t: 0.3 + 5.0 * t, LimitSchedule())
    assert conv and value == pytest.approx(0.3, abs=1e-12) and len(trace) == 4


def test_limit_needs_two_passing_steps():
    # exactly linear for three steps, then flat at zero
    vals = iter([0.4, 0.3, 0.25, 0.0, 0.0, 0.0, 0.0])
    value, conv, trace = numeric_limit(lambda t: next(vals), LimitSchedule(max_steps=7))
    assert conv and value == 0.0 and len(trace) == 6


def test_limit_oscillation_not_converged():
    value, conv, trace = numeric_limit(lambda t: 0.5 + 0.1 * math.sin(1.0 / t), LimitSchedule())
    assert not conv and len(trace) == 24 and 0.0 <= value <= 1.0


def test_estimate_require():
    with pytest.raises(NotConverged):
        QdcEstimate(0.2, False, "volume", ((0.1, 0.2),)).require()
    assert QdcEstimate(0.2, True, "volume").require().value == 0.2


def test_direction_parse():
    assert Direction.parse("Y|X") is YX and Direction.parse("x_given_y") is XY
    with pytest.raises(DomainError):
        Direction.parse("sideways")


# --- volume route ---------------------------------------------------------

@pytest.mark.parametrize("C,pt,expected", [
    (M, (0.5, 0.5), 1.0), (PI, (0.5, 0.5), 0.0), (S, (0.2, 0.6), 1 / 3), (W, (0.0, 1.0), 1.0),
])
def test_volume_examples(C, pt, expected):
    est = qdc_volume(C, P(*pt))
    assert est.converged and est.method == "volume" and est.trace
    assert est.value == pytest.approx(expected, abs=1e-9)


def test_volume_ratio_exact_for_m():
    for t in (0.1, 1e-3, 1e-7):
        assert volume_ratio(M, P(0.5, 0.5), t) == pytest.approx(1.0, abs=1e-9)


def test_x_given_y_uses_q_width():
    C = make_archimedean_ex8(0.5)
    pt = P(0.25, 1.0)
    yx = qdc_volume(C, pt, YX).value
    xy = qdc_volume(C, pt, XY).value
    assert yx == pytest.approx(0.5 * (1 - 1 / 3), abs=1e-9)
    assert xy == pytest.approx(dual_direction(yx, pt), abs=1e-9)


# --- conditional route ----------------------------------------------------

def test_conditional_examples():
    assert qdc_conditional(M, P(0.3, 0.3)).value == pytest.approx(1.0, abs=1e-9)
    assert qdc_conditional(PI, P(0.0, 0.5)).value == pytest.approx(0.0, abs=1e-9)
    same, _ = oracles.T_CORNER[(0.5, 3)]
    assert qdc_conditional(make_student_t(0.5, 3), P(0.0, 0.0)).value == pytest.approx(same, abs=2e-3)


@pytest.mark.parametrize("pt", [(0.3, 0.3), (0.3, 0.7), (0.0, 0.5), (0.4, 1.0), (1.0, 0.2), (0.0, 0.0),
                                (1.0, 1.0), (0.0, 1.0), (0.6, 0.0)])
@pytest.mark.parametrize("C", [M, W, make_cuadras_auge(0.5), make_archimedean_ex8(0.5), S],
                         ids=lambda c: c.describe())
def test_conditional_matches_volume_all_boundary_classes(C, pt):
    a = qdc_conditional(C, P(*pt)).value
    b = qdc_volume(C, P(*pt)).value
    assert a == pytest.approx(b, abs=1e-3)


def test_conditional_sign_corrected_q1_branch():
    # p interior, q = 1: (2t - C(p+t, 1-t) + C(p-t, 1-t)) / 2t tends to the mass near (p, 1)
    C = make_archimedean_ex8(0.5)
    assert qdc_conditional(C, P(0.25, 1.0)).value == pytest.approx(1 / 3, abs=1e-6)


def test_conditional_requires_fd_permission():
    with pytest.raises(MissingConditional):
        qdc_conditional(make_archimedean_ex8(0.5), P(0.3, 0.3), allow_fd=False)


# --- closed forms and EV --------------------------------------------------

def test_closed_form_examples():
    assert qdc_closed_form(make_cuadras_auge(0.5), P(0.25, 0.25)).value == pytest.approx(0.25)
    A = convex_mix(M, W, 2 / 3)
    assert qdc_closed_form(A, P(0.4, 0.6)).value == pytest.approx(1 / 3)
    assert qdc_closed_form(make_archimedean_ex8(0.5), P(0.25, 0.25)).value == pytest.approx(1 / 3)
    assert qdc_closed_form(make_family("gaussian", {"rho": 0.9}), P(0.3, 0.8)).value == 0.0
    assert qdc_closed_form(make_family("clayton", {"alpha": 2}), P(0.3, 0.8)) is None


def test_closed_form_x_given_y_is_dual():
    C = make_archimedean_ex8(0.5)
    assert qdc_closed_form(C, P(0.25, 1.0), XY).value == pytest.approx(2 / 3)


def test_cuadras_auge_volume_cross_check():
    C = make_cuadras_auge(0.5)
    assert qdc_volume(C, P(0.25, 0.25)).value == pytest.approx(0.25, abs=1e-3)


def test_ev_qdc_examples():
    A = make_cuadras_auge(0.5).pickands
    assert ev_qdc(A, P(0.3, 0.3)).value == pytest.approx(0.5 * math.sqrt(0.3), abs=1e-14)
    F = make_ev_flat(0.7).pickands
    p = 0.45
    assert ev_qdc(F, P(p, p ** (0.3 / 0.7))).value == pytest.approx(0.3, abs=1e-12)
    assert ev_qdc(A, P(0.3, 0.6)).value == 0.0


def test_ev_qdc_rejects_boundary():
    with pytest.raises(BoundaryPoint):
        ev_qdc(make_cuadras_auge(0.5).pickands, P(0.0, 0.4))


def test_remark_diagonal_display_is_twice_ev_formula():
    # p^(2A(1/2) - 1) [A'(1/2+) - A'(1/2-)] = 2 theta p^(1 - theta) for Cuadras-Auge
    theta, p = 0.4, 0.3
    A = make_cuadras_auge(theta).pickands
    display = p ** (2 * float(A.eval(0.5)) - 1) * float(A.d_right(0.5) - A.d_left(0.5))
    assert display == pytest.approx(2 * ev_qdc(A, P(p, p)).value, rel=1e-12)


# --- tails ----------------------------------------------------------------

def test_tail_examples():
    lo, hi = tail_coefficients(M)
    assert (lo.value, hi.value) == (pytest.approx(1.0), pytest.approx(1.0))
    lo, hi = tail_coefficients(PI)
    assert lo.value == pytest.approx(0.0, abs=1e-9) and hi.value == pytest.approx(0.0, abs=1e-9)
    for theta in (0.25, 0.5, 0.75):
        lo, hi = tail_coefficients(make_archimedean_ex8(theta))
        assert lo.value == pytest.approx(0.0, abs=1e-12) and hi.value == pytest.approx(0.0, abs=1e-12)


def test_cuadras_auge_tails():
    lo, hi = tail_coefficients(make_cuadras_auge(0.4))
    assert lo.value == pytest.approx(0.0, abs=1e-3) and hi.value == pytest.approx(0.4, abs=1e-3)


def test_archimedean_tail_examples():
    lo, hi = archimedean_tails(make_family("clayton", {"alpha": 2}).generator)
    assert lo.value == pytest.approx(2 ** -0.5, abs=1e-4) and hi.value == 0.0
    lo, hi = archimedean_tails(make_archimedean_ex8(0.5).generator)
    assert (lo.value, hi.value) == (0.0, 0.0)
    lo, hi = archimedean_tails(make_family("gumbel", {"alpha": 2}).generator)
    assert hi.value == pytest.approx(2 - 2 ** 0.5, abs=1e-4) and lo.value == pytest.approx(0.0, abs=1e-3)


@pytest.mark.parametrize("name,params", [("clayton", {"alpha": 2}), ("clayton", {"alpha": 0.7}),
                                         ("gumbel", {"alpha": 2}), ("gumbel", {"alpha": 1.3}),
                                         ("archimedean-ex8", {"theta": 0.6})])
def test_tail_consistency_with_generator(name, params):
    C = make_family(name, params)
    sched = LimitSchedule(abs_tol=1e-10)
    a = tail_coefficients(C, sched)
    b = archimedean_tails(C.generator, sched)
    for x, y in zip(a, b):
        assert x.value == pytest.approx(y.value, abs=1e-6)


@pytest.mark.parametrize("C", [M, W, make_cuadras_auge(0.6), make_archimedean_ex8(0.5),
                               make_family("clayton", {"alpha": 1.0})], ids=lambda c: c.describe())
def test_tails_agree_with_corner_coefficients(C):
    lo, hi = tail_coefficients(C)
    assert lo.value == pytest.approx(qdc_volume(C, P(0.0, 0.0)).value, abs=1e-3)
    assert hi.value == pytest.approx(qdc_volume(C, P(1.0, 1.0)).value, abs=1e-3)


# --- direction conversion -------------------------------------------------

def test_dual_direction_examples():
    assert dual_direction(0.4, P(0.3, 0.7)) == 0.4
    assert dual_direction(0.2, P(0.3, 1.0)) == 0.4
    assert dual_direction(0.4, P(0.0, 0.5)) == 0.2
    assert dual_direction(0.4, P(0.0, 1.0)) == 0.4


def test_dual_direction_clamps_with_warning():
    with pytest.warns(RuntimeWarning):
        assert dual_direction(0.7, P(0.3, 0.0)) == 1.0


# --- facade ---------------------------------------------------------------

def test_facade_examples():
    est = qdc(M, P(0.5, 0.5))
    assert est.value == 1.0 and est.method == "closed_form"
    est = qdc(make_family("gaussian", {"rho": 0.3}), P(0.2, 0.8))
    assert est.value == 0.0 and est.method == "closed_form"


def test_facade_prefers_conditional_then_volume():
    C = make_family("clayton", {"alpha": 1.0})
    assert qdc(C, P(0.4, 0.4)).method == "volume"
    from dataclasses import replace
    assert qdc(replace(make_cuadras_auge(0.5), closed_form_qdc=None), P(0.4, 0.4)).method == "conditional"


def test_facade_unknown_method():
    with pytest.raises(DomainError):
        qdc(M, P(0.5, 0.5), method="magic")
    with pytest.raises(MissingConditional):
        qdc(make_family("clayton", {"alpha": 1.0}), P(0.5, 0.5), method="closed-form")


def test_grid_order_and_size():
    rows = qdc_grid(M, 4)
    assert len(rows) == 25
    assert [(p, q) for p, q, _ in rows[:6]] == [(0, 0), (0, 0.25), (0, 0.5), (0, 0.75), (0, 1), (0.25, 0)]


# --- method agreement -----------------------------------------------------

AGREEMENT = [
    M, W, PI, S, make_cuadras_auge(0.5), make_ev_flat(0.7), make_archimedean_ex8(0.5),
    convex_mix(M, W, 2 / 3), convex_mix(S, PI, 0.5),
]


def _agreement_points(C):
    pts = [(i / 8, j / 8) for i in range(1, 8) for j in range(1, 8)]
    for p in (0.15, 0.3, 0.45, 0.6, 0.85):
        pts += [(p, p), (p, 1 - p), (p / 3 + 0.0, p), (p, (2 - 3 * p) if 1 / 3 <= p < 2 / 3 else p)]
    if C.pickands is not None:
        for k in C.pickands.kinks:
            for p in (0.2, 0.5, 0.8):
                pts.append((p, p ** (k / (1 - k))))
    return [pt for pt in pts if 0 < pt[0] < 1 and 0 < pt[1] < 1]


@pytest.mark.parametrize("C", AGREEMENT, ids=lambda c: c.describe())
def test_volume_agrees_with_closed_form(C):
    for pt in _agreement_points(C):
        exact = qdc_closed_form(C, P(*pt)).value
        assert qdc_volume(C, P(*pt)).value == pytest.approx(exact, abs=1e-3), pt


@pytest.mark.parametrize("C", [c for c in AGREEMENT if c.has_conditionals], ids=lambda c: c.describe())
def test_conditional_agrees_with_closed_form(C):
    for pt in _agreement_points(C):
        exact = qdc_closed_form(C, P(*pt)).value
        assert qdc_conditional(C, P(*pt)).value == pytest.approx(exact, abs=1e-3), pt


@pytest.mark.parametrize("name,params", [("gaussian", {"rho": 0.6}), ("student-t", {"rho": -0.3, "nu": 2})])
def test_elliptical_interior_numeric_is_zero(name, params):
    C = make_family(name, params)
    for pt in [(0.3, 0.3), (0.5, 0.8), (0.9, 0.1)]:
        assert qdc_volume(C, P(*pt)).value == pytest.approx(0.0, abs=1e-3)
        assert qdc_conditional(C, P(*pt)).value == pytest.approx(0.0, abs=1e-3)


@pytest.mark.parametrize("theta", [0.6, 0.7, 0.85])
def test_ev_steep_correction_matches_numeric(theta):
    F = make_ev_flat(theta)
    for k in F.pickands.kinks:
        for p in (0.05, 0.3, 0.6, 0.9):
            pt = P(p, p ** (k / (1 - k)))
            corrected = ev_qdc(F.pickands, pt, steep_correction=True).value
            assert corrected == pytest.approx(F.closed_form_qdc(pt.p, pt.q), abs=1e-12)
            assert qdc_volume(F, pt).value == pytest.approx(corrected, abs=1e-3)
            assert ev_qdc(F.pickands, pt).value >= corrected - 1e-15


def test_ev_steep_points_differ_from_uncorrected_formula():
    # on q = p^(3/7) the curve is steeper than the diagonal for p < 0.21
    F = make_ev_flat(0.7)
    pt = P(0.1, 0.1 ** (3 / 7))
    assert ev_qdc(F.pickands, pt).value == pytest.approx(0.3, abs=1e-12)
    assert qdc_volume(F, pt).value == pytest.approx(0.3 / (3 / 7 * 0.1 ** (-4 / 7)), abs=1e-3)
