"""Isolation and refinement of all real roots of a univariate polynomial on (0, inf).

Pipeline: Sturm-chain sign-variation counting isolates the distinct
positive roots below the Cauchy bound B = 1 + max|c_k|/|c_lead|, each
isolating interval is narrowed by bisection to width 1e-13*B (ordinary
sign bisection when the bracket straddles a sign change, Sturm-count
bisection otherwise, which covers even-multiplicity roots), and at most
five Newton steps polish the result without ever leaving the bracket.

Sturm remainders are renormalized by their max-abs coefficient and an
evaluated value counts as zero below 1e-12 of the member's own scale;
naive float remainder chains drift out of range very quickly otherwise.
Everything here is a pure function of the coefficient vector, so
identical inputs give bitwise-identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ZeroPolynomialError

REFINE_WIDTH_FACTOR = 1e-13   # target bracket width, relative to the root bound
_SIGN_EPS = 1e-12             # evaluated value treated as zero below this x scale
_REMAINDER_EPS = 1e-12        # chain terminates when a remainder is this small
_LEAD_TRIM_EPS = 1e-13        # drop denormal leading coefficients inside remainders
_MULTIPLE_EPS = 1e-8          # |q'(root)| below this x derivative scale => suspected multiple
_NEWTON_STEPS = 5


class UniPoly:
    """Dense univariate polynomial; coeffs[k] is the coefficient of t^k.

    Trailing zero coefficients are tolerated: the stored degree is the
    index of the last nonzero coefficient (-1 for the zero polynomial).
    """

    __slots__ = ("coeffs", "degree")

    def __init__(self, coeffs):
        self.coeffs = tuple(float(c) for c in coeffs)
        if any(not math.isfinite(c) for c in self.coeffs):
            raise ValueError(f"coefficients must be finite, got {self.coeffs}")
        self.degree = -1
        for k in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[k] != 0.0:
                self.degree = k
                break

    def is_zero(self) -> bool:
        return self.degree < 0

    def eval(self, t: float) -> float:
        acc = 0.0
        for k in range(self.degree, -1, -1):
            acc = acc * t + self.coeffs[k]
        return acc

    def abs_eval(self, t: float) -> float:
        """Sum of |c_k| * |t|^k; the natural residual scale at t."""
        s = abs(t)
        acc = 0.0
        for k in range(self.degree, -1, -1):
            acc = acc * s + abs(self.coeffs[k])
        return acc

    def deriv(self) -> "UniPoly":
        if self.degree < 1:
            return UniPoly((0.0,))
        return UniPoly(tuple(k * self.coeffs[k] for k in range(1, self.degree + 1)))

    def __repr__(self) -> str:
        return f"UniPoly({list(self.coeffs[:self.degree + 1])})"


@dataclass(frozen=True)
class RootList:
    """Sorted positive roots with per-root suspected-multiple flags."""

    roots: tuple[float, ...]
    suspected_multiple: tuple[bool, ...]
    bound: float  # Cauchy bound used during isolation

    def __len__(self) -> int:
        return len(self.roots)


# -- low-level coefficient-list helpers (ascending order, trimmed) ----------

def _trim(c: list[float]) -> list[float]:
    while c and c[-1] == 0.0:
        c.pop()
    return c


def _eval_list(c: list[float], t: float) -> float:
    acc = 0.0
    for k in range(len(c) - 1, -1, -1):
        acc = acc * t + c[k]
    return acc


def _abs_eval_list(c: list[float], t: float) -> float:
    s = abs(t)
    acc = 0.0
    for k in range(len(c) - 1, -1, -1):
        acc = acc * s + abs(c[k])
    return acc


def _deriv_list(c: list[float]) -> list[float]:
    return [k * c[k] for k in range(1, len(c))]


def _normalize(c: list[float]) -> list[float]:
    m = max(abs(v) for v in c)
    return [v / m for v in c]


def _neg_rem(a: list[float], b: list[float]) -> list[float]:
    """-(a mod b) by float long division; caller trims/normalizes."""
    rem = list(a)
    db = len(b) - 1
    lead = b[-1]
    for k in range(len(rem) - 1, db - 1, -1):
        q = rem[k] / lead
        rem[k] = 0.0
        if q != 0.0:
            lo = k - db
            for j in range(db):
                rem[lo + j] -= q * b[j]
    return [-v for v in _trim(rem)]


def _sturm_chain(coeffs: list[float]) -> list[list[float]]:
    chain = [_normalize(coeffs)]
    d = _trim(_deriv_list(coeffs))
    if not d:
        return chain
    chain.append(_normalize(d))
    while len(chain[-1]) > 1:
        r = _neg_rem(chain[-2], chain[-1])
        if not r:
            break
        m = max(abs(v) for v in r)
        if m <= _REMAINDER_EPS:
            break
        # drop denormal leading coefficients before the next division step
        while len(r) > 1 and abs(r[-1]) <= _LEAD_TRIM_EPS * m:
            r.pop()
        chain.append([v / m for v in r])
    return chain


def _sign_variations(chain: list[list[float]], t: float) -> int:
    prev = 0
    count = 0
    for member in chain:
        v = _eval_list(member, t)
        scale = _abs_eval_list(member, t)
        if abs(v) <= _SIGN_EPS * scale:
            continue
        s = 1 if v > 0.0 else -1
        if prev != 0 and s != prev:
            count += 1
        prev = s
    return count


def _nudge_off_root(c: list[float], t: float) -> float:
    """Shift t upward by ulp-scale steps until its sign is unambiguous.

    Values inside the sign-threshold band would be skipped by the
    variation count, which makes near-root endpoints miscount; stepping
    decisively past the root keeps (a, b] semantics consistent.
    """
    step = (abs(t) + 1.0) * 2.220446049250313e-16
    while abs(_eval_list(c, t)) <= _SIGN_EPS * _abs_eval_list(c, t):
        t += step
        step *= 2.0
    return t


def _count(chain: list[list[float]], coeffs: list[float], a: float, b: float) -> int:
    a = _nudge_off_root(coeffs, a)
    b = _nudge_off_root(coeffs, b)
    return max(_sign_variations(chain, a) - _sign_variations(chain, b), 0)


def sturm_count(q: UniPoly, a: float, b: float) -> int:
    """Number of distinct real roots of q in (a, b].

    Endpoints that happen to be exact roots are nudged upward by an
    ulp-scale step, which keeps a root at `a` excluded and a root at `b`
    included.
    """
    if q.is_zero():
        raise ZeroPolynomialError("Sturm count of the zero polynomial")
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    coeffs = list(q.coeffs[:q.degree + 1])
    if len(coeffs) == 1:
        return 0
    chain = _sturm_chain(coeffs)
    return _count(chain, coeffs, a, b)


def _refine(coeffs: list[float], chain: list[list[float]], lo: float, hi: float, width: float) -> float:
    """Narrow an isolating interval (lo, hi] to `width`, then Newton-polish."""
    fhi = _eval_list(coeffs, hi)
    if fhi == 0.0:
        # hi is an exact root and the interval holds exactly one root
        return hi
    if _eval_list(coeffs, lo) == 0.0:
        # lo is a root but lies outside (lo, hi]; step off it to read a sign
        lo = _nudge_off_root(coeffs, lo)
    flo = _eval_list(coeffs, lo)
    dcoeffs = _deriv_list(coeffs)
    if (flo < 0.0) != (fhi < 0.0):
        neg_lo = flo < 0.0
        while hi - lo > width:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            fm = _eval_list(coeffs, mid)
            if fm == 0.0:
                lo = hi = mid
                break
            if (fm < 0.0) == neg_lo:
                lo = mid
            else:
                hi = mid
    else:
        # No sign change across the bracket: an even-multiplicity root.
        # Counts degrade once |q(mid)| sinks into the sign-threshold band,
        # so bisect on counts only down to that band and finish on the
        # derivative's sign change (exact, and present for even orders).
        while hi - lo > width:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if abs(_eval_list(coeffs, mid)) <= _SIGN_EPS * _abs_eval_list(coeffs, mid):
                break
            if _count(chain, coeffs, lo, mid) >= 1:
                hi = mid
            else:
                lo = mid
        dlo = _eval_list(dcoeffs, lo)
        dhi = _eval_list(dcoeffs, hi)
        if dlo != 0.0 and dhi != 0.0 and (dlo < 0.0) != (dhi < 0.0):
            dneg_lo = dlo < 0.0
            while hi - lo > width:
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break
                dm = _eval_list(dcoeffs, mid)
                if dm == 0.0:
                    lo = hi = mid
                    break
                if (dm < 0.0) == dneg_lo:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)
    root = 0.5 * (lo + hi)
    for _ in range(_NEWTON_STEPS):
        fr = _eval_list(coeffs, root)
        if fr == 0.0:
            break
        dfr = _eval_list(dcoeffs, root)
        if dfr == 0.0:
            break
        cand = root - fr / dfr
        if cand < lo or cand > hi or cand == root:
            break  # Newton left the bracket; the bisection value stands
        root = cand
    return root


def positive_roots(q: UniPoly, abs_tol: float = 1e-12, rel_tol: float = 1e-12) -> RootList:
    """All distinct roots of q in (0, inf), sorted ascending.

    Every returned root r satisfies |q(r)| <= abs_tol + rel_tol * S(r)
    with S(r) = sum_k |c_k| r^k.  A root whose derivative value is tiny
    against its own scale is flagged suspected-multiple rather than split;
    unresolvably close root pairs (closer than the refinement width) are
    merged into one flagged root.  Degree-0 input with a nonzero constant
    yields an empty list.
    """
    if q.is_zero():
        raise ZeroPolynomialError("root isolation of the zero polynomial")
    coeffs = list(q.coeffs[:q.degree + 1])
    # factor out t^m: roots at zero are not positive and do not matter here
    m = 0
    while coeffs[m] == 0.0:
        m += 1
    coeffs = coeffs[m:]
    d = len(coeffs) - 1
    if d == 0:
        return RootList((), (), bound=1.0)
    bound = 1.0 + max(abs(c) for c in coeffs[:-1]) / abs(coeffs[-1])
    width = REFINE_WIDTH_FACTOR * bound
    chain = _sturm_chain(coeffs)

    total = _count(chain, coeffs, 0.0, bound)
    intervals: list[tuple[float, float, bool]] = []  # (lo, hi, cluster_flag)
    stack = [(0.0, bound, total)] if total > 0 else []
    while stack:
        lo, hi, k = stack.pop()
        if k == 0:
            continue
        if k == 1:
            intervals.append((lo, hi, False))
            continue
        if hi - lo <= width:
            # k roots closer than the refinement width: report one, flagged
            intervals.append((lo, hi, True))
            continue
        mid = 0.5 * (lo + hi)
        kl = _count(chain, coeffs, lo, mid)
        stack.append((mid, hi, k - kl))
        stack.append((lo, mid, kl))

    dcoeffs = _deriv_list(coeffs)
    found: list[tuple[float, bool]] = []
    for lo, hi, clustered in intervals:
        r = _refine(coeffs, chain, lo, hi, width)
        dscale = _abs_eval_list(dcoeffs, r) if dcoeffs else 0.0
        flat = abs(_eval_list(dcoeffs, r)) <= _MULTIPLE_EPS * dscale if dcoeffs else True
        found.append((r, clustered or flat))
    found.sort(key=lambda rf: rf[0])

    roots = tuple(r for r, _ in found)
    flags = tuple(f for _, f in found)
    return RootList(roots, flags, bound=bound)
