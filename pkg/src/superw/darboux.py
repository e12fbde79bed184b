"""Formal Darboux charts for Poisson superalgebras around a point.

Starting from the linear normal form of the constant part of the bracket,
each chart pair is corrected order by order until its bracket relations are
exactly the flat ones through the requested order, and the remaining
directions are projected onto the centralizer of the chart.  Intermediate
work runs at a slightly higher cap (``order + guard``); the final
certificates are recomputed with exact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .poisson import linear_split
from .supercore import EVEN, ODD, Series, inv_sqrt_series


class DarbouxError(Exception):
    pass


def clean_mod(s, level):
    """True when s has no terms of completion order <= level."""
    d = s.eff_deg()
    return d is None or d > level


def _exact(s):
    return Series(s.alg, s.terms, None)


# -- even pairs --------------------------------------------------------


def even_correct(P, f, g, cap, certify):
    """Correct g so that {f, g} = 1 through the certification order.

    f is even and untouched; g must already satisfy {f,g} = 1 + (higher).
    Each pass subtracts sum_i (-1)^i/i! g^i ad_f^(i-1)(t) for the current
    defect t, which kills t exactly and leaves a remainder of at least
    twice its order.
    """
    f = f.truncate(cap)
    g = g.truncate(cap)
    t = P.bracket(f, g, order=cap) - 1
    if t.constant_term():
        raise DarbouxError("even pair is not normalized at the point")
    prev = -1
    while not clean_mod(t, certify):
        d = t.eff_deg()
        if d <= prev:
            raise DarbouxError(f"even correction stalled at order {d}")
        prev = d
        delta = P.alg.zero(cap)
        u = t
        gp = P.alg.one(cap)
        coef = Fraction(1)
        for i in range(1, cap + 1):
            gp = gp * g
            if gp.is_zero():
                break
            coef *= Fraction(-1, i)
            delta = delta + gp * u * coef
            u = P.bracket(f, u, order=cap)
        g = g + delta
        t = P.bracket(f, g, order=cap) - 1
    return g


def even_project(P, f, g, a, cap, certify, max_passes=10):
    """Part of ``a`` Poisson-commuting with an even chart pair.

    One pass applies sum (-1)^j/(i!j!) f^i g^j ad_g^i ad_f^j; with exact
    flat relations this is a projector, so a few passes push the residual
    brackets beyond the certification order.
    """
    a = a.truncate(cap)
    prev = -1
    for attempt in range(max_passes):
        rf, rg = P.bracket(f, a, order=cap), P.bracket(g, a, order=cap)
        if clean_mod(rf, certify) and clean_mod(rg, certify):
            return a
        if attempt == max_passes - 1:
            break
        d = min(x for x in (rf.eff_deg(), rg.eff_deg()) if x is not None)
        if d <= prev:
            raise DarbouxError(f"even projection stalled at order {d}")
        prev = d
        out = P.alg.zero(cap)
        u = a
        gj = P.alg.one(cap)
        for j in range(cap + 1):
            if j:
                gj = gj * g
                if gj.is_zero():
                    break
                u = P.bracket(f, u, order=cap)
            v = u
            fi_gj = gj
            for i in range(cap + 1 - j):
                if i:
                    fi_gj = fi_gj * f
                    if fi_gj.is_zero():
                        break
                    v = P.bracket(g, v, order=cap)
                c = Fraction((-1) ** j, _fact(i) * _fact(j))
                out = out + fi_gj * v * c
        a = out
    raise DarbouxError("even projection did not converge")


_FACT = [1]


def _fact(n):
    while len(_FACT) <= n:
        _FACT.append(_FACT[-1] * len(_FACT))
    return _FACT[n]


# -- odd self-paired directions ---------------------------------------


def odd_self_normalize(P, th, cap, certify):
    """Scale an odd element with {th, th} = 1 + (higher) to {th, th} = 1.

    The defect t commutes with th (a consequence of the graded Jacobi
    identity), so multiplying by (1+t)^(-1/2) works in one step.
    """
    th = th.truncate(cap)
    t = P.bracket(th, th, order=cap) - 1
    if t.constant_term():
        raise DarbouxError("odd direction is not unit-paired at the point")
    if t.is_zero():
        return th
    out = inv_sqrt_series(t, cap) * th
    r = P.bracket(out, out, order=cap) - 1
    if not clean_mod(r, certify):
        raise DarbouxError("odd self-normalization failed")
    return out


def odd_self_project(P, th, a, cap, certify):
    """Split a = b0 + th*b1 with both parts commuting with th."""
    a = a.truncate(cap)
    b1 = P.bracket(th, a, order=cap)
    b0 = a - th * b1
    for r in (P.bracket(th, b0, order=cap), P.bracket(th, b1, order=cap)):
        if not clean_mod(r, certify):
            raise DarbouxError("odd projection residual too large")
    return b0, b1


# -- odd flat pairs ----------------------------------------------------


def odd_pair_flatten(P, f, g, cap, certify, max_passes=30):
    """Normalize an odd pair to {f,f} = {g,g} = 0, {f,g} = 1.

    Alternates self-bracket corrections (f -= g{f,f}/2 and the mirror move)
    with a joint rescale by (1 + ({f,g}-1))^(-1/2), which is central once
    the self-brackets vanish.
    """
    f = f.truncate(cap)
    g = g.truncate(cap)
    prev = -1
    for _ in range(max_passes):
        aa = P.bracket(f, f, order=cap)
        bb = P.bracket(g, g, order=cap)
        q = P.bracket(f, g, order=cap) - 1
        if q.constant_term():
            raise DarbouxError("odd pair is not normalized at the point")
        degs = [x for x in (aa.eff_deg(), bb.eff_deg(), q.eff_deg()) if x is not None]
        if not degs or min(degs) > certify:
            return f, g
        d = min(degs)
        if d <= prev:
            raise DarbouxError(f"odd pair normalization stalled at order {d}")
        prev = d
        if not clean_mod(aa, certify):
            f = f - g * aa * Fraction(1, 2)
        bb = P.bracket(g, g, order=cap)
        if not clean_mod(bb, certify):
            g = g - f * bb * Fraction(1, 2)
        q = P.bracket(f, g, order=cap) - 1
        if not clean_mod(q, certify):
            s = inv_sqrt_series(q, cap)
            f = s * f
            g = s * g
    raise DarbouxError("odd pair normalization did not converge")


def odd_pair_project(P, f, g, a, cap, certify):
    """Split a over a flat odd pair: a = b00 + f b10 + g b01 + fg b11."""
    a = a.truncate(cap)
    adf = P.bracket(f, a, order=cap)
    b11 = -P.bracket(g, adf, order=cap)
    b01 = adf + f * b11
    b10 = P.bracket(g, a, order=cap) - g * b11
    b00 = a - f * b10 - g * b01 - f * g * b11
    for x, b in ((f, b00), (g, b00), (f, b11), (g, b11)):
        if not clean_mod(P.bracket(x, b, order=cap), certify):
            raise DarbouxError("odd pair projection residual too large")
    return b00, b10, b01, b11


# -- the full chart ----------------------------------------------------


@dataclass
class ChartEntry:
    kind: str          # "even", "odd" (flat pair) or "self"
    a: Series
    b: Series = None

    def variables(self):
        return (self.a,) if self.b is None else (self.a, self.b)


@dataclass
class Chart:
    poisson: object
    order: int
    cap: int
    entries: list = field(default_factory=list)
    center_gens: list = field(default_factory=list)

    def chart_vars(self):
        out = []
        for e in self.entries:
            out.extend(e.variables())
        return out

    def project(self, a):
        """Project onto the Poisson centralizer of all chart variables."""
        P = self.poisson
        for e in self.entries:
            if e.kind == "even":
                a = even_project(P, e.a, e.b, a, self.cap, self.order)
            elif e.kind == "odd":
                a = odd_pair_project(P, e.a, e.b, a, self.cap, self.order)[0]
            else:
                a = odd_self_project(P, e.a, a, self.cap, self.order)[0]
        return a

    def expected_bracket(self, i, j):
        """The flat-model bracket of chart variables number i and j."""
        vs = []
        for k, e in enumerate(self.entries):
            for pos, v in enumerate(e.variables()):
                vs.append((k, e.kind, pos, v))
        ki, kindi, pi, _ = vs[i]
        kj, kindj, pj, _ = vs[j]
        if ki != kj:
            return self.poisson.alg.zero()
        if kindi == "self":
            one = i == j
        else:
            one = pi != pj
        return self.poisson.alg.one() if one else self.poisson.alg.zero()

    def verify(self):
        """Exact residual certificates through the report order."""
        P = self.poisson
        vs = [_exact(v) for v in self.chart_vars()]
        failures = []
        worst = None
        for i in range(len(vs)):
            for j in range(i, len(vs)):
                r = P.bracket(vs[i], vs[j]) - self.expected_bracket(i, j)
                d = r.eff_deg()
                if d is not None:
                    worst = d if worst is None else min(worst, d)
                if not clean_mod(r, self.order):
                    failures.append(("chart", i, j, d))
        for k, c in enumerate(self.center_gens):
            ce = _exact(c)
            for i, v in enumerate(vs):
                r = P.bracket(v, ce)
                d = r.eff_deg()
                if d is not None:
                    worst = d if worst is None else min(worst, d)
                if not clean_mod(r, self.order):
                    failures.append(("center", i, k, d))
        homogeneous = all(
            v.is_weight_homogeneous() for v in vs + list(self.center_gens)
        )
        return {
            "order": self.order,
            "chart_variables": len(vs),
            "center_generators": len(self.center_gens),
            "residual_floor": worst,
            "weight_homogeneous": homogeneous,
            "failures": failures,
            "ok": not failures,
        }


def equivariant_darboux(P, order, seeds=None, vectors=None, alt=False, guard=4,
                        subspace=None):
    """Build a Darboux chart: even pairs, then odd pairs, then odd square
    roots; everything left over is projected into the centralizer.

    With ``seeds`` the chart is built only around those directions and the
    rest of the space becomes centralizer generators; without seeds the
    whole constant symplectic part is flattened.  A precomputed
    ``subspace`` (see :func:`superw.poisson.find_symplectic_subspace`)
    bypasses the internal linear splitting.
    """
    cap = order + guard
    if subspace is not None:
        plan = subspace.split
    else:
        if vectors is None:
            vectors = [P.alg.gen(v.name) for v in P.alg.variables if not v.hbar]
        plan = linear_split(P, vectors, seeds=seeds, alt=alt)
    chart = Chart(P, order, cap)

    for u, v in plan.even_pairs:
        f = chart.project(u.truncate(cap))
        g = chart.project(v.truncate(cap))
        g = even_correct(P, f, g, cap, order)
        chart.entries.append(ChartEntry("even", f, g))
    for u, v in plan.odd_pairs:
        f = chart.project(u.truncate(cap))
        g = chart.project(v.truncate(cap))
        f, g = odd_pair_flatten(P, f, g, cap, order)
        chart.entries.append(ChartEntry("odd", f, g))
    for u in plan.selfs:
        th = chart.project(u.truncate(cap))
        th = odd_self_normalize(P, th, cap, order)
        chart.entries.append(ChartEntry("self", th))
    chart.center_gens = [chart.project(w.truncate(cap)) for w in plan.radical]

    report = chart.verify()
    if not report["ok"]:
        raise DarbouxError(f"chart failed certification: {report['failures']}")
    return chart


# -- convenience wrappers around the machinery above --------------------


def even_split_project(P, a, f, g, order, guard=4):
    """Project a into the joint kernel of {f, .} and {g, .} for a flat even
    pair ({f, g} = 1)."""
    return even_project(P, f, g, a, order + guard, order)


def even_decompose(P, a, f, g, order, guard=4):
    """Coefficients of a over the flat even pair: a = sum g^i f^j b_ij with
    every b_ij killed by ad f and ad g.

    The (i, j) coefficient is extracted by i applications of ad f (which
    peels a factor g each time), j applications of ad g (which peels an f at
    the cost of a sign), and a final projection.
    """
    cap = order + guard
    out = {}
    adg = a.truncate(cap)
    j = 0
    while not adg.is_zero() and j <= cap:
        u = adg
        i = 0
        while not u.is_zero() and i <= cap:
            b = even_project(P, f, g, u, cap, order)
            b = b * Fraction((-1) ** j, _fact(i) * _fact(j))
            if not b.is_zero():
                out[(i, j)] = b
            u = P.bracket(f, u, order=cap)
            i += 1
        adg = P.bracket(g, adg, order=cap)
        j += 1
    return out


def odd_normalize(P, f, order, g=None, guard=4):
    """Produce a single odd direction with constant self-bracket.

    Case 1 (no ``g``): rescale f so that {f, f} = 1 exactly.  Case 2: f, g
    is an odd pair with isotropic self-brackets; the pair is flattened and
    the diagonal f + g is returned, with self-bracket 2 (kept rational
    rather than normalized through sqrt(2)).
    """
    cap = order + guard
    if g is None:
        return odd_self_normalize(P, f, cap, order)
    f2, g2 = odd_pair_flatten(P, f, g, cap, order)
    return f2 + g2


def odd_split_project(P, a, h, order, guard=4):
    """Split a = b0 + h*b1 along a normalized odd direction ({h,h} = 1)."""
    return odd_self_project(P, h, a, order + guard, order)
