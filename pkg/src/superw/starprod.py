"""Star products from bracket tables, and their normal-form charts.

The product is defined by normal ordering: whenever two generators appear
out of order they are swapped at the cost of the sign rule plus ``hbar^2``
times the table entry ("h2" mode), or plus the entry alone ("unit" mode,
i.e. the enveloping-algebra product with hbar set to 1).  In h2 mode every
rewrite conserves or raises the completion order, so truncated arithmetic
never loses low-order terms.

The second half of the module repeats the Darboux normalization at the
quantum level: commutator defects are removed hbar-level by hbar-level, and
the flat-pair projectors reappear with commutators divided by hbar^2 in
place of the Poisson bracket.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .darboux import DarbouxError, clean_mod, equivariant_darboux, _fact
from .supercore import EVEN, ODD, Series


class StarAlgebra:
    def __init__(self, alg, table, hbar_mode="h2"):
        if hbar_mode not in ("h2", "unit"):
            raise ValueError("hbar_mode must be 'h2' or 'unit'")
        if hbar_mode == "h2" and alg.hbar_id is None:
            raise ValueError("h2 mode needs an hbar variable")
        self.alg = alg
        self.table = table
        self.hbar_mode = hbar_mode
        self._insert_memo = {}
        self._word_memo = {}

    # -- normal ordering ----------------------------------------------

    def _entry_term(self, i, j):
        """hbar^2 c_ij (or c_ij in unit mode) as an exact Series."""
        c = self.table.entry(i, j)
        if self.hbar_mode == "h2" and not c.is_zero():
            c = c.mul_hbar(2)
        return c

    def _insert(self, m, x):
        """Normal form of (normal monomial m) * (generator x), exact."""
        memo = self._insert_memo
        out = memo.get((m, x))
        if out is not None:
            return out
        alg = self.alg
        if not m:
            out = alg.series({((x, 1),): Fraction(1)})
        else:
            j, e = m[-1]
            if j < x:
                out = alg.series({m + ((x, 1),): Fraction(1)})
            elif j == x:
                if alg.by_id[x].parity == EVEN:
                    out = alg.series({m[:-1] + ((j, e + 1),): Fraction(1)})
                else:
                    rest = m[:-1]
                    out = self._word_mul(rest, self._entry_term(x, x)) * Fraction(1, 2)
            else:
                rest = m[:-1] if e == 1 else m[:-1] + ((j, e - 1),)
                swapped = self.alg.zero()
                for n, c in self._insert(rest, x).terms.items():
                    swapped = swapped + self._insert(n, j) * c
                if alg.by_id[j].parity and alg.by_id[x].parity:
                    swapped = -swapped
                out = swapped + self._word_mul(rest, self._entry_term(j, x))
        memo[(m, x)] = out
        return out

    def _word_mul(self, m, s):
        """Normal form of (normal monomial m) * (polynomial s), exact."""
        if s.is_zero():
            return s
        acc = {}
        for mono, c in s.terms.items():
            w = self._word(m, mono)
            for n, v in w.terms.items():
                acc[n] = acc.get(n, Fraction(0)) + c * v
        return Series(self.alg, acc)

    def _word(self, ma, mb):
        """Normal form of ma * mb for normal monomials, exact (memoized)."""
        if not mb:
            return self.alg.series({ma: Fraction(1)})
        if not ma:
            return self.alg.series({mb: Fraction(1)})
        memo = self._word_memo
        out = memo.get((ma, mb))
        if out is not None:
            return out
        cur = self.alg.series({ma: Fraction(1)})
        for i, e in mb:
            for _ in range(e):
                acc = {}
                for n, c in cur.terms.items():
                    for n2, v in self._insert(n, i).terms.items():
                        acc[n2] = acc.get(n2, Fraction(0)) + c * v
                cur = Series(self.alg, acc)
        memo[(ma, mb)] = cur
        return cur

    # -- products and commutators -------------------------------------

    def star(self, f, g, order="auto"):
        if f.alg is not self.alg or g.alg is not self.alg:
            raise ValueError("series from a different universe")
        if order == "auto":
            if f.order is None:
                order = g.order
            elif g.order is None:
                order = f.order
            else:
                order = min(f.order, g.order)
        if self.hbar_mode == "unit" and order is not None:
            raise ValueError("unit mode is exact; truncated input makes no sense")
        alg = self.alg
        eff = alg.mono_eff
        acc = {}
        for ma, ca in f.terms.items():
            ea = eff(ma)
            for mb, cb in g.terms.items():
                if order is not None and ea + eff(mb) > order:
                    continue
                w = self._word(ma, mb)
                c = ca * cb
                for m, v in w.terms.items():
                    t = acc.get(m)
                    if t is None:
                        acc[m] = c * v
                    else:
                        t += c * v
                        if t:
                            acc[m] = t
                        else:
                            del acc[m]
        return Series(alg, acc, order)

    def commutator(self, f, g, order="auto"):
        """Graded commutator f*g -+ g*f, split over parity components."""
        out = None
        for pf, fc in _parity_parts(f):
            for pg, gc in _parity_parts(g):
                t = self.star(fc, gc, order)
                u = self.star(gc, fc, order)
                t = t + u if (pf and pg) else t - u
                out = t if out is None else out + t
        return self.alg.zero() if out is None else out

    def dop(self, x, a, order="auto"):
        """Commutator with x divided by hbar^2 (h2 mode only)."""
        return self.commutator(x, a, order).divide_hbar(2)

    def check_associativity(self):
        """(x*y)*z == x*(y*z) on all generator triples; returns violations."""
        gens = [self.alg.gen(v.name) for v in self.alg.variables if not v.hbar]
        bad = []
        n = len(gens)
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    lhs = self.star(self.star(gens[i], gens[j]), gens[k])
                    rhs = self.star(gens[i], self.star(gens[j], gens[k]))
                    if lhs != rhs:
                        bad.append((i, j, k, lhs - rhs))
        return bad


def _parity_parts(s):
    p = s.parity()
    if p != "mixed":
        return [] if p is None else [(p, s)]
    alg = s.alg
    ev, od = {}, {}
    for m, c in s.terms.items():
        (od if alg.mono_parity(m) else ev)[m] = c
    return [(EVEN, Series(alg, ev, s.order)), (ODD, Series(alg, od, s.order))]


def star_inv_sqrt(S, rho, cap):
    """(1 + rho)^(-1/2) with star powers; rho must be even, order >= 1."""
    if rho.parity() not in (None, EVEN):
        raise ValueError("star_inv_sqrt needs an even argument")
    out = S.alg.one(cap)
    power = S.alg.one(cap)
    coef = Fraction(1)
    if rho.is_zero():
        return out
    d = rho.eff_deg()
    if d < 1:
        raise ValueError("star_inv_sqrt needs deg >= 1")
    k = 0
    while (k + 1) * d <= cap:
        k += 1
        power = S.star(power, rho, order=cap)
        if power.is_zero():
            break
        coef = coef * Fraction(-(2 * k - 1), 2 * k)
        out = out + power * coef
    return out


def _hbar2(alg):
    return alg.one().mul_hbar(2)


# -- quantum normalization --------------------------------------------


def quantum_even_correct(S, P, f, g, cap, certify):
    """Correct g so the star commutator [f, g] is exactly hbar^2.

    The defect is removed hbar-level by hbar-level; each level reduces to a
    classical equation {f0, X} = -r solved by the telescoping primitive
    X = -sum (-1)^k/(k+1)! g0^(k+1) ad_f0^k(r).
    """
    f = f.truncate(cap)
    g = g.truncate(cap)
    h2 = _hbar2(S.alg)
    f0 = f.hbar_levels().get(0, S.alg.zero(cap))
    g0 = g.hbar_levels().get(0, S.alg.zero(cap))
    r = S.commutator(f, g, order=cap) - h2
    prev = None
    while not clean_mod(r, certify):
        levels = r.hbar_levels()
        s = min(lv for lv, comp in levels.items() if not comp.is_zero())
        if s < 2:
            raise DarbouxError("commutator defect below hbar^2")
        rs = levels[s]
        key = (s, rs.eff_deg())
        if prev is not None and key <= prev:
            raise DarbouxError(f"quantum even correction stalled at {key}")
        prev = key
        x = S.alg.zero(cap)
        u = rs
        gp = S.alg.one(cap)
        coef = Fraction(-1)
        for k in range(cap + 1):
            gp = gp * g0
            if gp.is_zero():
                break
            x = x + gp * u * coef
            u = P.bracket(f0, u, order=cap)
            coef *= Fraction(-1, k + 2)
        g = g + x.mul_hbar(s - 2).truncate(cap)
        r = S.commutator(f, g, order=cap) - h2
    return g


def quantum_odd_self_correct(S, th, cap, certify):
    """Scale an odd element so that [th, th] = 2 th*th is exactly hbar^2."""
    th = th.truncate(cap)
    h2 = _hbar2(S.alg)
    prev = -1
    while True:
        r = S.commutator(th, th, order=cap) - h2
        if clean_mod(r, certify):
            return th
        d = r.eff_deg()
        if d <= prev:
            raise DarbouxError(f"quantum odd normalization stalled at order {d}")
        prev = d
        rho = r.divide_hbar(2)
        th = th - S.star(th, rho, order=cap) * Fraction(1, 2)


def quantum_odd_pair_flatten(S, f, g, cap, certify, max_passes=30):
    """Normalize an odd pair to [f,f] = [g,g] = 0 and [f,g] = hbar^2."""
    f = f.truncate(cap)
    g = g.truncate(cap)
    h2 = _hbar2(S.alg)
    prev = -1
    for _ in range(max_passes):
        raa = S.commutator(f, f, order=cap)
        rbb = S.commutator(g, g, order=cap)
        rq = S.commutator(f, g, order=cap) - h2
        degs = [x for x in (raa.eff_deg(), rbb.eff_deg(), rq.eff_deg())
                if x is not None]
        if not degs or min(degs) > certify:
            return f, g
        d = min(degs)
        if d <= prev:
            raise DarbouxError(f"quantum odd pair stalled at order {d}")
        prev = d
        if not clean_mod(raa, certify):
            f = f - S.star(g, raa.divide_hbar(2), order=cap) * Fraction(1, 2)
        rbb = S.commutator(g, g, order=cap)
        if not clean_mod(rbb, certify):
            g = g - S.star(f, rbb.divide_hbar(2), order=cap) * Fraction(1, 2)
        rq = S.commutator(f, g, order=cap) - h2
        if not clean_mod(rq, certify):
            u = star_inv_sqrt(S, rq.divide_hbar(2), cap)
            f = S.star(f, u, order=cap)
            g = S.star(g, u, order=cap)
    raise DarbouxError("quantum odd pair normalization did not converge")


def quantum_even_project(S, f, g, a, cap, certify, max_passes=10):
    """Star analogue of the even-pair projector, with [.,.]/hbar^2 as the
    derivation."""
    a = a.truncate(cap)
    prev = -1
    for attempt in range(max_passes):
        rf = S.commutator(f, a, order=cap)
        rg = S.commutator(g, a, order=cap)
        if clean_mod(rf, certify) and clean_mod(rg, certify):
            return a
        if attempt == max_passes - 1:
            break
        d = min(x for x in (rf.eff_deg(), rg.eff_deg()) if x is not None)
        if d <= prev:
            raise DarbouxError(f"quantum even projection stalled at order {d}")
        prev = d
        out = S.alg.zero(cap)
        u = a
        gj = S.alg.one(cap)
        for j in range(cap + 1):
            if j:
                gj = S.star(gj, g, order=cap)
                if gj.is_zero():
                    break
                u = S.dop(f, u, order=cap)
            v = u
            fi_gj = gj
            for i in range(cap + 1 - j):
                if i:
                    fi_gj = S.star(f, fi_gj, order=cap)
                    if fi_gj.is_zero():
                        break
                    v = S.dop(g, v, order=cap)
                c = Fraction((-1) ** j, _fact(i) * _fact(j))
                out = out + S.star(fi_gj, v, order=cap) * c
        a = out
    raise DarbouxError("quantum even projection did not converge")


def quantum_odd_self_project(S, th, a, cap, certify):
    a = a.truncate(cap)
    b1 = S.dop(th, a, order=cap)
    b0 = a - S.star(th, b1, order=cap)
    for r in (S.commutator(th, b0, order=cap), S.commutator(th, b1, order=cap)):
        if not clean_mod(r, certify):
            raise DarbouxError("quantum odd projection residual too large")
    return b0, b1


def quantum_odd_pair_project(S, f, g, a, cap, certify):
    a = a.truncate(cap)
    adf = S.dop(f, a, order=cap)
    b11 = -S.dop(g, adf, order=cap)
    b01 = adf + S.star(f, b11, order=cap)
    b10 = S.dop(g, a, order=cap) - S.star(g, b11, order=cap)
    fg = S.star(f, g, order=cap)
    b00 = (a - S.star(f, b10, order=cap) - S.star(g, b01, order=cap)
           - S.star(fg, b11, order=cap))
    for x, b in ((f, b00), (g, b00), (f, b11), (g, b11)):
        if not clean_mod(S.commutator(x, b, order=cap), certify):
            raise DarbouxError("quantum odd pair projection residual too large")
    return b00, b10, b01, b11


@dataclass
class QuantumChart:
    star: object
    order: int
    cap: int
    entries: list = field(default_factory=list)
    center_gens: list = field(default_factory=list)
    classical: object = None

    def chart_vars(self):
        out = []
        for e in self.entries:
            out.extend(e.variables())
        return out

    def project(self, a):
        S = self.star
        for e in self.entries:
            if e.kind == "even":
                a = quantum_even_project(S, e.a, e.b, a, self.cap, self.order)
            elif e.kind == "odd":
                a = quantum_odd_pair_project(S, e.a, e.b, a, self.cap, self.order)[0]
            else:
                a = quantum_odd_self_project(S, e.a, a, self.cap, self.order)[0]
        return a

    def expected_commutator(self, i, j):
        vs = []
        for k, e in enumerate(self.entries):
            for pos, v in enumerate(e.variables()):
                vs.append((k, e.kind, pos))
        ki, kindi, pi = vs[i]
        kj, kindj, pj = vs[j]
        if ki != kj:
            return self.star.alg.zero()
        if kindi == "self":
            hit = i == j
        else:
            hit = pi != pj
        return _hbar2(self.star.alg) if hit else self.star.alg.zero()

    def verify(self):
        S = self.star
        vs = [Series(v.alg, v.terms, None) for v in self.chart_vars()]
        failures = []
        worst = None
        for i in range(len(vs)):
            for j in range(i, len(vs)):
                r = S.commutator(vs[i], vs[j]) - self.expected_commutator(i, j)
                d = r.eff_deg()
                if d is not None:
                    worst = d if worst is None else min(worst, d)
                if not clean_mod(r, self.order):
                    failures.append(("chart", i, j, d))
        for k, c in enumerate(self.center_gens):
            ce = Series(c.alg, c.terms, None)
            for i, v in enumerate(vs):
                r = S.commutator(v, ce)
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


def quantum_darboux(S, P, order, seeds=None, vectors=None, alt=False, guard=4,
                    classical=None):
    """Quantum Darboux chart: the classical chart is built first, then each
    entry is reprojected and renormalized at the star level in the same
    order, and the leftover directions become quantum centralizer
    generators."""
    cap = order + guard
    if classical is None:
        classical = equivariant_darboux(P, order, seeds=seeds, vectors=vectors,
                                        alt=alt, guard=guard)
    qc = QuantumChart(S, order, cap, classical=classical)
    from .darboux import ChartEntry

    for e in classical.entries:
        if e.kind == "even":
            f = qc.project(e.a.truncate(cap))
            g = qc.project(e.b.truncate(cap))
            g = quantum_even_correct(S, P, f, g, cap, order)
            qc.entries.append(ChartEntry("even", f, g))
        elif e.kind == "odd":
            f = qc.project(e.a.truncate(cap))
            g = qc.project(e.b.truncate(cap))
            f, g = quantum_odd_pair_flatten(S, f, g, cap, order)
            qc.entries.append(ChartEntry("odd", f, g))
        else:
            th = qc.project(e.a.truncate(cap))
            th = quantum_odd_self_correct(S, th, cap, order)
            qc.entries.append(ChartEntry("self", th))
    qc.center_gens = [qc.project(w.truncate(cap)) for w in classical.center_gens]

    # Quantum corrections must never drift the classical linear seed: the
    # difference from the classical chart stays inside (variables)^2 + hbar
    # times (variables), with no constant or bare-linear terms.
    alg = S.alg
    for ce, qe in zip(classical.entries, qc.entries):
        for c, q in zip(ce.variables(), qe.variables()):
            d = q - c.truncate(cap)
            for m in d.terms:
                adeg = sum(e for i, e in m if not alg.by_id[i].hbar)
                if adeg == 0 or (adeg == 1 and not any(
                        alg.by_id[i].hbar for i, _ in m)):
                    raise DarbouxError(
                        "quantum correction drifted the linear part: "
                        f"{alg.mono_str(m)}")

    report = qc.verify()
    if not report["ok"]:
        raise DarbouxError(f"quantum chart failed certification: {report['failures']}")
    return qc


# -- filtration utilities ---------------------------------------------


def homogenize(s, level):
    """Lift a polynomial without hbar to the hbar-graded world at a given
    filtration level: each monomial picks up hbar^(level - weight)."""
    alg = s.alg
    h = alg.hbar_id
    if h is None:
        raise ValueError("universe has no hbar variable")
    out = {}
    for m, c in s.terms.items():
        if any(i == h for i, _ in m):
            raise ValueError("argument already contains hbar")
        d = level - alg.mono_weight(m)
        if d < 0:
            raise ValueError(f"monomial {alg.mono_str(m)} exceeds level {level}")
        if d:
            mono = dict(m)
            mono[h] = d
            mono = tuple(sorted(mono.items()))
        else:
            mono = m
        out[mono] = c
    return Series(alg, out)


def dehomogenize(s):
    """Set hbar to 1 (the inverse of homogenize, up to filtration level)."""
    return s.set_hbar(1)


def graded_leading(s):
    """Set hbar to 0: the top-weight part of the dehomogenized element."""
    return s.set_hbar(0)


def filtration_dims(even_weights, odd_weights, n_max):
    """Cumulative dimensions of the span of ordered monomials in generators
    of the given weights, filtered by total weight.

    All weights must be positive, otherwise the count is infinite.
    """
    if any(w <= 0 for w in list(even_weights) + list(odd_weights)):
        raise ValueError("filtration_dims needs strictly positive weights")
    graded = [0] * (n_max + 1)
    graded[0] = 1
    for w in even_weights:
        for n in range(w, n_max + 1):
            graded[n] += graded[n - w]
    for w in odd_weights:
        for n in range(n_max, w - 1, -1):
            graded[n] += graded[n - w]
    out = []
    tot = 0
    for n in range(n_max + 1):
        tot += graded[n]
        out.append(tot)
    return out


def rees_map(s):
    """Tag every monomial with hbar to the power of its variable weight.

    A weight-w monomial carrying hbar^j goes to the same monomial carrying
    hbar^(w+j), where w counts only the non-hbar factors.  The map is a
    section of :func:`rees_inverse` and multiplies weights against the
    supercommutative product; against the star product it is only an
    isomorphism on top-weight symbols (the star corrections change the
    hbar-tag, which is exactly what the filtered story predicts).
    """
    alg = s.alg
    h = alg.hbar_id
    if h is None:
        raise ValueError("universe has no hbar variable")
    out = {}
    for m, c in s.terms.items():
        w = sum(alg.by_id[i].weight * e for i, e in m if i != h)
        if w < 0:
            raise ValueError("negative-weight monomial has no Rees image")
        if w:
            mono = dict(m)
            mono[h] = mono.get(h, 0) + w
            mono = tuple(sorted(mono.items()))
        else:
            mono = m
        out[mono] = out.get(mono, Fraction(0)) + c
    return Series(alg, out, s.order)


def rees_inverse(s):
    """Strip the weight-tag hbar powers put on by :func:`rees_map`."""
    alg = s.alg
    h = alg.hbar_id
    if h is None:
        raise ValueError("universe has no hbar variable")
    out = {}
    for m, c in s.terms.items():
        w = sum(alg.by_id[i].weight * e for i, e in m if i != h)
        k = dict(m).get(h, 0)
        if k < w:
            raise ValueError(
                f"{alg.mono_str(m)} is not in the Rees image (needs hbar^{w})")
        mono = dict(m)
        if k == w:
            mono.pop(h, None)
        else:
            mono[h] = k - w
        mono = tuple(sorted(mono.items()))
        out[mono] = out.get(mono, Fraction(0)) + c
    return Series(alg, out, s.order)


def specialize_hbar(s, value):
    """Evaluate hbar at 0 (top-weight symbol) or 1 (forget the filtration)."""
    if value not in (0, 1):
        raise ValueError("hbar can only be specialized to 0 or 1")
    return s.set_hbar(value)


def cx_finite_part(s, bound):
    """Keep the weight components of weight <= bound.

    Meaningful only when every variable present has positive weight (then
    bounded weight means a finite-dimensional space); a variable of weight
    <= 0 in the support is reported as an error instead of silently keeping
    an infinite-dimensional slab.
    """
    alg = s.alg
    seen = {i for m in s.terms for i, _ in m}
    for i in sorted(seen):
        v = alg.by_id[i]
        if v.weight <= 0:
            raise ValueError(
                f"variable {v.name} has nonpositive weight {v.weight}; "
                "the bounded-weight part is not finite over it")
    out = {m: c for m, c in s.terms.items() if alg.mono_weight(m) <= bound}
    return Series(alg, out, s.order)


def hbar_saturate(S, gens, weight_bound):
    """Saturate a two-sided graded ideal at hbar, degreewise up to a bound.

    ``gens`` are weight-homogeneous exact elements of the star algebra; the
    weight-w piece of the ideal is spanned by monomial * generator * monomial
    products.  Whenever some y outside the ideal has hbar*y inside, y is
    adjoined; this repeats until stable through ``weight_bound``.  Returns
    the enlarged generating list (input generators first, adjoined quotients
    after, in discovery order).

    All non-hbar variables must have positive weight so that each graded
    piece is finite-dimensional.
    """
    from .linalg import rref, solve

    alg = S.alg
    h = alg.hbar_id
    if h is None:
        raise ValueError("universe has no hbar variable")
    for v in alg.variables:
        if not v.hbar and v.weight <= 0:
            raise ValueError("hbar_saturate needs positive variable weights")
    for g in gens:
        if g.order is not None:
            raise ValueError("ideal generators must be exact")
        if not g.is_weight_homogeneous():
            raise ValueError("ideal generators must be weight-homogeneous")

    monos = _weighted_monomials(alg, weight_bound)

    def ideal_piece(pool, weight):
        seen = []
        for g in pool:
            wg = g.weights()
            if wg is None:
                continue
            for ml in monos:
                wl = alg.mono_weight(ml)
                if wl + wg[0] > weight:
                    continue
                for mr in monos:
                    if wl + wg[0] + alg.mono_weight(mr) != weight:
                        continue
                    s = S.star(S._word_mul(ml, g), alg.series({mr: Fraction(1)}))
                    if not s.is_zero():
                        seen.append(s)
        return seen

    def in_span(pool, y):
        if not pool:
            return y.is_zero()
        basis = sorted({m for s in pool for m in s.terms} | set(y.terms))
        cols = [[s.coeff(m) for s in pool] for m in basis]
        return solve(cols, [y.coeff(m) for m in basis]) is not None

    out = list(gens)
    changed = True
    while changed:
        changed = False
        for w in range(weight_bound):
            span = ideal_piece(out, w + 1)
            if not span:
                continue
            # hbar is central, so hbar*y just raises the hbar exponent; the
            # quotient candidates are the span elements supported entirely on
            # hbar-divisible monomials.  Order the coordinates so that the
            # non-divisible ones come first and read off the tail rows.
            basis = sorted({m for s in span for m in s.terms},
                           key=lambda m: (any(i == h for i, _ in m), m))
            rows = []
            for s in span:
                rows.append([s.coeff(m) for m in basis])
            reduced, _ = rref(rows)
            plain = sum(1 for m in basis if not any(i == h for i, _ in m))
            for r in reduced:
                if not any(r) or any(r[:plain]):
                    continue
                z = Series(alg, {m: c for m, c in zip(basis, r) if c})
                y = z.divide_hbar(1)
                if not in_span(ideal_piece(out, w), y):
                    out.append(y)
                    changed = True
            if changed:
                break
    return out


def _weighted_monomials(alg, weight_bound):
    """Normal monomials (hbar included) of total weight <= weight_bound."""
    monos = [()]
    for v in alg.variables:
        if v.weight <= 0 and not v.hbar:
            continue
        ext = []
        for m in monos:
            base = alg.mono_weight(m)
            e = 1
            while True:
                if v.parity == ODD and e > 1:
                    break
                if base + v.weight * e > weight_bound:
                    break
                mono = dict(m)
                mono[v.ident] = e
                ext.append(tuple(sorted(mono.items())))
                e += 1
        monos.extend(ext)
    return sorted(monos)


# -- convenience entry points -------------------------------------------


def star_mul(S, a, b, order="auto"):
    """Normal-ordered product in the star algebra."""
    return S.star(a, b, order)


def star_commutator(S, a, b, order="auto"):
    """Graded star commutator a*b -+ b*a."""
    return S.commutator(a, b, order)


def quantum_split_project(S, a, f, g, order, guard=4):
    """Project a into the joint star-commutant of a flat even pair."""
    return quantum_even_project(S, f, g, a, order + guard, order)


def quantum_odd_correct(S, th, order, guard=4):
    """Normalize a single odd direction so that [th, th] = hbar^2."""
    return quantum_odd_self_correct(S, th, order + guard, order)


def quantum_odd_flatten(S, f, g, order, guard=4):
    """Normalize an odd pair to [f,f] = [g,g] = 0, [f,g] = hbar^2."""
    return quantum_odd_pair_flatten(S, f, g, order + guard, order)
