"""Effective non-triviality verdicts for Heegner points on Eisenstein
quotients: prime level with odd q or q = 2, the Neumann-Setzer corollary,
level p^2, and the general rational-cuspidal-divisor criterion.

Verdicts are one-directional: "inconclusive" never means torsion, only
that the criterion does not apply."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional

from . import classgroup, etacusp
from .arith import factor, is_prime, jacobi, valuation
from .errors import ValidationError

NONTORSION = "nontorsion"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class TraceEntry:
    name: str
    value: str
    passed: bool
    assumed: bool = False  # cited facts used as-is, not recomputed here


@dataclass(frozen=True)
class Verdict:
    criterion_tag: str
    conclusion: str
    trace: tuple[TraceEntry, ...]

    def __post_init__(self):
        ok = all(t.passed for t in self.trace)
        if (self.conclusion == NONTORSION) != ok:
            raise ValidationError("conclusion must match the hypothesis trace")

    def reevaluate(self) -> str:
        return NONTORSION if all(t.passed for t in self.trace) else INCONCLUSIVE


def roots_of_unity(k_disc: int) -> int:
    if k_disc == -3:
        return 6
    if k_disc == -4:
        return 4
    return 2


def _check_fundamental(k_disc: int):
    if k_disc >= 0 or k_disc % 4 not in (0, 1):
        raise ValidationError(f"not a negative discriminant: {k_disc}")
    if k_disc % 4 == 1:
        if not factor(k_disc).is_squarefree():
            raise ValidationError(f"discriminant {k_disc} is not fundamental")
    else:
        m = k_disc // 4
        if m % 4 not in (2, 3) or not factor(m).is_squarefree():
            raise ValidationError(f"discriminant {k_disc} is not fundamental")


def splits_in(k_disc: int, q: int) -> bool:
    """Whether an odd prime q not dividing the discriminant splits in K."""
    if q == 2 or not is_prime(q) or k_disc % q == 0:
        raise ValidationError(f"need an odd prime not dividing {k_disc}, got {q}")
    return jacobi(k_disc, q) == 1


@dataclass(frozen=True)
class HeegnerSetup:
    level: int
    k_disc: int
    h_k: int
    w_k: int
    split_ok: bool  # every prime of the level splits in K
    prime_order: Optional[int]  # order of the class of the prime above the level prime


def heegner_setup(level: int, k_disc: int) -> HeegnerSetup:
    _check_fundamental(k_disc)
    p0 = etacusp._level_prime(level)[0]
    h = classgroup.class_number_of_disc(k_disc)
    split_ok = k_disc % p0 != 0 and splits_in(k_disc, p0)
    o_p = classgroup.class_order(classgroup.prime_form(k_disc, p0)) if split_ok else None
    return HeegnerSetup(level, k_disc, h, roots_of_unity(k_disc), split_ok, o_p)


def eisenstein_order_prime_level(p: int) -> int:
    """Order of the difference of cusps on X0(p): (p-1)/gcd(12, p-1)."""
    if not is_prime(p) or p < 5:
        raise ValidationError(f"need a prime p >= 5, got {p}")
    return (p - 1) // math.gcd(12, p - 1)


def verdict_prime_level_odd_q(p: int, k_disc: int, q: int) -> Verdict:
    """Prime level, odd q dividing the cuspidal order n: the Heegner point
    projects to a point of infinite order on the q-Eisenstein quotient
    when p splits in K and v_q(h_K) < v_q(n)."""
    n = eisenstein_order_prime_level(p)
    if math.gcd(q, 6) != 1 or not is_prime(q):
        raise ValidationError(f"q must be a prime coprime to 6, got {q}")
    if n % q:
        raise ValidationError(f"q = {q} does not divide the cuspidal order n = {n}")
    setup = heegner_setup(p, k_disc)
    # w_K is 2, 4 or 6, so gcd(q, w_K) = 1 is automatic here; recorded anyway
    assert math.gcd(q, setup.w_k) == 1
    vq_h = valuation(setup.h_k, q) if setup.h_k else 0
    vq_n = valuation(n, q)
    trace = (
        TraceEntry("q divides n", f"q={q}, n={n}", True),
        TraceEntry("gcd(q, 6w_K) = 1", f"w_K={setup.w_k}", True),
        TraceEntry(f"{p} splits in K", str(setup.split_ok), setup.split_ok),
        TraceEntry(
            "v_q(h_K) < v_q(n)",
            f"v_{q}({setup.h_k}) = {vq_h} vs v_{q}({n}) = {vq_n}, o(p-class) = {setup.prime_order}",
            vq_h < vq_n,
        ),
        TraceEntry("J[m_q](K)^- = 0", "Z/q + mu_q torsion structure (cited)", True, assumed=True),
    )
    ok = all(t.passed for t in trace)
    return Verdict("prime_level_odd_q", NONTORSION if ok else INCONCLUSIVE, trace)


def verdict_prime_level_2(p: int, k_disc: int) -> Verdict:
    """Prime level, q = 2: infinite order on the 2-Eisenstein quotient when
    2 | n, p splits in K and h_K is odd."""
    n = eisenstein_order_prime_level(p)
    if n % 2:
        raise ValidationError(f"2 does not divide the cuspidal order n = {n}")
    setup = heegner_setup(p, k_disc)
    odd = setup.h_k % 2 == 1
    trace = (
        TraceEntry("2 divides n", f"n={n}", True),
        TraceEntry(f"{p} splits in K", str(setup.split_ok), setup.split_ok),
        TraceEntry("h_K is odd", f"h_K={setup.h_k}", odd),
    )
    ok = all(t.passed for t in trace)
    return Verdict("prime_level_2", NONTORSION if ok else INCONCLUSIVE, trace)


@dataclass(frozen=True)
class NeumannSetzerReport:
    p: int
    is_ns_prime: bool  # p = u^2 + 64 with u odd
    u: Optional[int]
    u_mod_8: Optional[int]
    two_eisenstein_simple: bool  # u = +-3 (mod 8)


def neumann_setzer(p: int) -> NeumannSetzerReport:
    """Detect p = u^2 + 64 (u odd, taken positive); u = +-3 (mod 8) makes
    the 2-Eisenstein quotient simple, hence a Neumann-Setzer curve."""
    if not is_prime(p):
        raise ValidationError(f"p must be prime, got {p}")
    if p > 64:
        u = math.isqrt(p - 64)
        if u * u + 64 == p and u % 2 == 1:
            return NeumannSetzerReport(p, True, u, u % 8, u % 8 in (3, 5))
    return NeumannSetzerReport(p, False, None, None, False)


def verdict_ns_curve(p: int, k_disc: int) -> Verdict:
    """Neumann-Setzer corollary: for p = u^2 + 64 with u = +-3 (mod 8) and
    K imaginary quadratic with odd class number in which p splits, the
    curve has rank 1 over K and finite Tate-Shafarevich group."""
    ns = neumann_setzer(p)
    setup = heegner_setup(p, k_disc) if ns.is_ns_prime else None
    trace = [
        TraceEntry("p = u^2 + 64", f"u={ns.u}" if ns.is_ns_prime else "no", ns.is_ns_prime),
        TraceEntry(
            "u = +-3 (mod 8), so the 2-Eisenstein quotient is simple",
            f"u mod 8 = {ns.u_mod_8}",
            ns.two_eisenstein_simple,
        ),
    ]
    if setup is not None:
        trace.append(TraceEntry(f"{p} splits in K", str(setup.split_ok), setup.split_ok))
        trace.append(TraceEntry("h_K is odd", f"h_K={setup.h_k}", setup.h_k % 2 == 1))
    else:
        trace.append(TraceEntry(f"{p} splits in K", "not evaluated", False))
    ok = all(t.passed for t in trace)
    return Verdict("ns_corollary", NONTORSION if ok else INCONCLUSIVE, tuple(trace))


def verdict_p2_level(p: int, k_disc: int, q: int) -> Verdict:
    """Level p^2, odd q with q | (p+1): non-torsion projection when p
    splits in K and v_q(h_K / o(p-class)) < v_q(n), n = (p^2-1)/24."""
    if not is_prime(p) or p < 5:
        raise ValidationError(f"need a prime p >= 5, got {p}")
    n = (p * p - 1) // 24
    if math.gcd(q, 6) != 1 or not is_prime(q):
        raise ValidationError(f"q must be a prime coprime to 6, got {q}")
    if (p + 1) % q:
        raise ValidationError(f"q = {q} does not divide p + 1 = {p + 1}")
    if n % q:
        raise ValidationError(f"q = {q} does not divide n = {n}")
    setup = heegner_setup(p * p, k_disc)
    if setup.split_ok:
        o_p = setup.prime_order
        h = setup.h_k // o_p
        vq_h, vq_n = valuation(h, q) if h else 0, valuation(n, q)
        val_ok = vq_h < vq_n
        val_text = f"v_{q}({h}) = {vq_h} vs v_{q}({n}) = {vq_n}, o = {o_p}"
    else:
        val_ok, val_text = False, "not evaluated"
    trace = (
        TraceEntry("q | (p+1) and q | n", f"q={q}, n={n}", True),
        TraceEntry(f"{p} splits in K", str(setup.split_ok), setup.split_ok),
        TraceEntry("v_q(h_K/o) < v_q(n)", val_text, val_ok),
        TraceEntry(
            "J[m_q](K)^- = 0", "nonsplit Z/q by mu_q extension (cited)", True, assumed=True
        ),
    )
    ok = all(t.passed for t in trace)
    return Verdict("p2_level", NONTORSION if ok else INCONCLUSIVE, trace)


def verdict_rational_divisor(
    level: int,
    r: Mapping[int, int],
    div: etacusp.CuspDivisor,
    k_disc: int,
    q: int,
) -> Verdict:
    """General criterion for a rational cuspidal divisor class of order n
    presented by an eta-product with divisor n*D.

    The descent value is a unit times alpha^(h_K/o(a_r)) where a_r is the
    square root of the inverted eta-ideal product; for odd q that value
    survives in the q-part exactly when v_q(h_K/o(a_r)) < v_q(n), provided
    the root ideal is nontrivial."""
    if all(v == 0 for v in r.values()):
        raise ValidationError("zero exponent vector has no associated order")
    if math.gcd(q, 6) != 1 or not is_prime(q):
        raise ValidationError(f"q must be a prime coprime to 6, got {q}")
    n = etacusp.cuspidal_class_order(level, div)
    image = etacusp.eta_divisor(level, r)
    if image != div.scale(n):
        raise ValidationError(
            f"eta-product divisor {image} is not n*D = {div.scale(n)} with n = {n}"
        )
    if n % q:
        raise ValidationError(f"q = {q} does not divide the class order n = {n}")
    setup = heegner_setup(level, k_disc)
    p0 = etacusp._level_prime(level)[0]
    exponent = sum(rd * valuation(d, p0) for d, rd in r.items() if d > 1)
    if setup.split_ok:
        _, o_r, h_r = classgroup.ideal_class_of_eta_datum(k_disc, level, r)
        nontrivial = exponent != 0
        vq_h, vq_n = valuation(h_r, q) if h_r else 0, valuation(n, q)
        val_ok = vq_h < vq_n
        val_text = f"v_{q}({h_r}) = {vq_h} vs v_{q}({n}) = {vq_n}, o(a_r) = {o_r}"
    else:
        nontrivial, val_ok, val_text = False, False, "not evaluated"
    special = _is_special_eta(level, r)
    trace = (
        TraceEntry("n*D = div(eta-product)", f"n = {n}", True),
        TraceEntry("Heegner hypothesis", str(setup.split_ok), setup.split_ok),
        TraceEntry(
            "root ideal a_r is nontrivial",
            f"prime exponent {-exponent // 2 if exponent % 2 == 0 else '?'}",
            nontrivial,
        ),
        TraceEntry("v_q(h_r) < v_q(n)", val_text, val_ok),
        TraceEntry("J[m_q](K)^- = 0", "cited", True, assumed=True),
        TraceEntry(
            "descent is Hecke-equivariant",
            "canonical eta-product" if special else "assumed for this eta-product",
            True,
            assumed=not special,
        ),
    )
    ok = all(t.passed for t in trace)
    return Verdict("rational_divisor", NONTORSION if ok else INCONCLUSIVE, trace)


def _is_special_eta(level: int, r: Mapping[int, int]) -> bool:
    p0, k = etacusp._level_prime(level)
    kind = etacusp.PRIME_LEVEL if k == 1 else etacusp.P2_LEVEL
    try:
        canonical = etacusp.special_function(kind, p0)
    except ValidationError:
        return False
    trimmed = {d: v for d, v in r.items() if v}
    return trimmed == {d: v for d, v in canonical.items() if v}
