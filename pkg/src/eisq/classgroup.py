"""Class groups of imaginary quadratic orders via binary quadratic forms.

Forms (A, B, C) of negative discriminant are composed by the classical
united-forms (Gauss/Dirichlet) procedure and fully reduced afterwards;
class numbers come from direct enumeration of reduced forms, which is the
independent oracle the rest of the package leans on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .arith import factor, is_prime, jacobi, sqrt_mod, valuation
from .errors import InternalCheckError, ValidationError


@dataclass(frozen=True)
class BQForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __repr__(self) -> str:
        return f"({self.a},{self.b},{self.c})"


def _check_disc(disc: int):
    if disc >= 0 or disc % 4 not in (0, 1):
        raise ValidationError(f"need a negative discriminant = 0,1 mod 4, got {disc}")


def principal_form(disc: int) -> BQForm:
    _check_disc(disc)
    k = disc % 2
    return BQForm(1, k, (k * k - disc) // 4)


def normalize(f: BQForm) -> BQForm:
    a, b, c = f.a, f.b, f.c
    if -a < b <= a:
        return f
    r = (a - b) // (2 * a)
    b, c = b + 2 * r * a, a * r * r + b * r + c
    return BQForm(a, b, c)


def reduce_form(f: BQForm) -> BQForm:
    """Unique reduced representative: |B| <= A <= C, B >= 0 if |B| = A or A = C."""
    if f.a <= 0:
        raise ValidationError(f"positive definite forms only, got {f}")
    g = normalize(f)
    a, b, c = g.a, g.b, g.c
    while a > c or (a == c and b < 0):
        s = (c + b) // (2 * c)
        a, b, c = c, -b + 2 * s * c, c * s * s - b * s + a
    assert -a < b <= a <= c and (b >= 0 or (a != -b and a != c))
    return BQForm(a, b, c)


def inverse(f: BQForm) -> BQForm:
    return reduce_form(BQForm(f.a, -f.b, f.c))


def _transform(f: BQForm, alpha: int, beta: int, gamma: int, delta: int) -> BQForm:
    # action of the SL2(Z) matrix [[alpha, beta], [gamma, delta]]
    assert alpha * delta - beta * gamma == 1
    a, b, c = f.a, f.b, f.c
    a2 = a * alpha * alpha + b * alpha * gamma + c * gamma * gamma
    b2 = 2 * a * alpha * beta + b * (alpha * delta + beta * gamma) + 2 * c * gamma * delta
    c2 = a * beta * beta + b * beta * delta + c * delta * delta
    return BQForm(a2, b2, c2)


def _coprime_representative(f: BQForm, m: int) -> BQForm:
    """An SL2(Z)-equivalent form whose leading coefficient is coprime to m."""
    if math.gcd(f.a, m) == 1:
        return f
    # CRT a primitive vector (x, y) with f(x, y) nonzero mod every prime of m
    x, y, modulus = 0, 1, 1
    for ell, _ in factor(m).factors:
        for xe, ye in ((1, 0), (0, 1), (1, 1), (1, 2), (2, 1)):
            if (f.a * xe * xe + f.b * xe * ye + f.c * ye * ye) % ell:
                break
        else:  # primitive forms are nonzero mod every prime
            raise InternalCheckError(f"{f} vanishes identically mod {ell}")
        if modulus == 1:
            x, y, modulus = xe, ye, ell
        else:
            inv_m, inv_e = pow(modulus, -1, ell), pow(ell, -1, modulus)
            x = (x * ell * inv_e + xe * modulus * inv_m) % (modulus * ell)
            y = (y * ell * inv_e + ye * modulus * inv_m) % (modulus * ell)
            modulus *= ell
    if x == 0:
        x = modulus
    k = 0
    while math.gcd(x, y + k * modulus) != 1:
        k += 1
    y += k * modulus
    g, u, v = _xgcd(x, y)
    assert g == 1
    out = _transform(f, x, -v, y, u)
    assert math.gcd(out.a, m) == 1 and out.disc == f.disc
    return out


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def compose(f1: BQForm, f2: BQForm) -> BQForm:
    """Reduced Gauss composite of two forms of equal discriminant.

    Dirichlet composition on united representatives: replace f2 by an
    equivalent form with leading coefficient coprime to a1, pick the
    common middle coefficient B = b1 (mod 2a1), B = b2 (mod 2a2), and
    compose to (a1*a2, B, (B^2-D)/(4*a1*a2)); then reduce.
    """
    if f1.disc != f2.disc:
        raise ValidationError(f"discriminant mismatch: {f1.disc} vs {f2.disc}")
    disc = f1.disc
    g1 = reduce_form(f1)
    g2 = _coprime_representative(reduce_form(f2), g1.a)
    a1, b1 = g1.a, g1.b
    a2, b2 = g2.a, g2.b
    assert math.gcd(a1, a2) == 1 and (b1 - b2) % 2 == 0
    k = (b2 - b1) // 2 * pow(a1, -1, a2) % a2
    bb = b1 + 2 * a1 * k
    assert (bb - b1) % (2 * a1) == 0 and (bb - b2) % (2 * a2) == 0
    a3 = a1 * a2
    assert (bb * bb - disc) % (4 * a3) == 0
    out = reduce_form(BQForm(a3, bb, (bb * bb - disc) // (4 * a3)))
    assert out.disc == disc
    return out


def form_pow(f: BQForm, n: int) -> BQForm:
    result = principal_form(f.disc)
    if n < 0:
        f, n = inverse(f), -n
    base = reduce_form(f)
    while n:
        if n & 1:
            result = compose(result, base)
        base = compose(base, base)
        n >>= 1
    return result


def reduced_forms(disc: int) -> list[BQForm]:
    """All reduced forms of a negative discriminant, by direct enumeration."""
    _check_disc(disc)
    forms = []
    bmax = math.isqrt(-disc // 3)
    for b in range(disc % 2, bmax + 1, 2):
        m4 = b * b - disc
        assert m4 % 4 == 0
        m = m4 // 4
        a = max(b, 1)
        while a * a <= m:
            if m % a == 0:
                c = m // a
                forms.append(BQForm(a, b, c))
                if b and b != a and a != c:
                    forms.append(BQForm(a, -b, c))
            a += 1
    return sorted(forms, key=lambda f: (f.a, f.b, f.c))


def class_number_of_disc(disc: int) -> int:
    return len(reduced_forms(disc))


def class_number(p: int) -> int:
    """h of Q(sqrt(-p)) for a prime p = 3 (mod 4), p > 3."""
    if p <= 3 or p % 4 != 3 or not is_prime(p):
        raise ValidationError(f"class_number requires a prime p > 3, p = 3 mod 4, got {p}")
    return class_number_of_disc(-p)


def class_order(f: BQForm) -> int:
    """Order of the class of f in the class group of its discriminant."""
    one = principal_form(f.disc)
    acc = reduce_form(f)
    k = 1
    h = class_number_of_disc(f.disc)
    while acc != one:
        acc = compose(acc, f)
        k += 1
        if k > h:
            raise InternalCheckError(f"order of {f} exceeds class number {h}")
    assert h % k == 0
    return k


def prime_form(disc: int, q: int) -> BQForm:
    """Reduced class of a prime ideal of norm q (q odd; split or ramified)."""
    _check_disc(disc)
    if q == 2 or not is_prime(q):
        raise ValidationError(f"prime_form requires an odd prime, got {q}")
    if disc % q == 0:
        # ramified prime: left unreduced, e.g. (p, p, (p+1)/4) for disc -p
        for b in range(0, 2 * q):
            if (b - disc) % 2 == 0 and (b * b - disc) % (4 * q) == 0:
                return BQForm(q, b, (b * b - disc) // (4 * q))
        raise InternalCheckError(f"no ramified form above {q} for disc {disc}")
    if jacobi(disc, q) != 1:
        raise ValidationError(f"{q} is inert for discriminant {disc}")
    b = sqrt_mod(disc % q, q)
    assert b is not None
    if (b - disc) % 2:
        b = q - b
    assert (b * b - disc) % (4 * q) == 0
    return reduce_form(BQForm(q, b, (b * b - disc) // (4 * q)))


def ideal_class_of_eta_datum(
    k_disc: int, level: int, r: Mapping[int, int]
) -> tuple[BQForm, int, int]:
    """Class data of the square root of the inverted eta-ideal product.

    For level p or p^2 with p split in the field of discriminant k_disc,
    the divisor ideals are powers of one prime above p, so the product
    over r collapses to an exponent e; r is a square ideal exactly when e
    is even.  Returns (class of the root ideal, its order o, h_K / o).
    """
    p0 = _level_prime(level)
    if jacobi(k_disc, p0) != 1:
        raise ValidationError(
            f"Heegner hypothesis fails: {p0} does not split for discriminant {k_disc}"
        )
    e = 0
    for d, rd in r.items():
        if level % d:
            raise ValidationError(f"{d} does not divide the level {level}")
        e += rd * valuation(d, p0) if d > 1 else 0
    if e % 2:
        raise ValidationError("not a square ideal: odd prime exponent in the product")
    cls = form_pow(prime_form(k_disc, p0), -e // 2)
    o = class_order(cls)
    h = class_number_of_disc(k_disc)
    assert h % o == 0
    return cls, o, h // o


def _level_prime(level: int) -> int:
    if is_prime(level):
        return level
    root = math.isqrt(level)
    if root * root == level and is_prime(root):
        return root
    raise ValidationError(f"supported levels are p and p^2, got {level}")
