"""Exact integer primitives: Jacobi symbols, primality, factoring, modular
square roots and the norm equation s^2 + p*t^2 = 4m."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import FactorizationIncomplete, ValidationError

# Deterministic Miller-Rabin base set: correct for all n < 3.3 * 10^24
# (Sorenson-Webster), in particular for all n < 2^64.
MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
    71, 73, 79, 83, 89, 97,
)

DEFAULT_RHO_BUDGET = 10**6


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValidationError(f"jacobi requires odd positive n, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def is_prime(n: int, extra_rounds: int = 12) -> bool:
    """Primality test, deterministic for |n| < 2^64 (fixed Miller-Rabin bases).

    Beyond 2^64 the fixed bases are supplemented with `extra_rounds` further
    prime bases; still deterministic output, probabilistically correct.
    """
    if n < 2:
        return False
    for sp in _SMALL_PRIMES:
        if n == sp:
            return True
        if n % sp == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    bases = list(MR_BASES)
    if n >= 1 << 64:
        extra = []
        cand = 41
        while len(extra) < extra_rounds:
            if all(cand % b for b in MR_BASES if b * b <= cand):
                extra.append(cand)
            cand += 2
        bases += extra
    for a in bases:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Factorization:
    """Complete factorization: value = sign * prod(prime^exp)."""

    value: int
    sign: int
    factors: tuple[tuple[int, int], ...]

    def recompose(self) -> int:
        out = self.sign
        for q, e in self.factors:
            out *= q**e
        return out

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def primes(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.factors)


def _pollard_rho(n: int, budget: int) -> Optional[int]:
    # Floyd cycle finding with deterministic polynomial constants
    if n % 2 == 0:
        return 2
    spent = 0
    for c in range(1, 64):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
            spent += 1
            if spent > budget:
                return None
        if d != n:
            return d
    return None


def factor(n: int, rho_budget: int = DEFAULT_RHO_BUDGET) -> Factorization:
    """Factor a nonzero integer by trial division then Pollard rho.

    Raises FactorizationIncomplete when the rho budget runs out; never
    returns a wrong factorization.
    """
    if n == 0:
        raise ValidationError("cannot factor 0")
    sign = 1 if n > 0 else -1
    m = abs(n)
    found: dict[int, int] = {}
    for sp in _SMALL_PRIMES:
        while m % sp == 0:
            found[sp] = found.get(sp, 0) + 1
            m //= sp
    # trial division a bit beyond the hard-coded primes
    d = _SMALL_PRIMES[-1] + 2
    while d * d <= m and d < 10**4:
        while m % d == 0:
            found[d] = found.get(d, 0) + 1
            m //= d
        d += 2
    stack = [m] if m > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            found[m] = found.get(m, 0) + 1
            continue
        root = math.isqrt(m)
        if root * root == m:
            stack += [root, root]
            continue
        split = _pollard_rho(m, rho_budget)
        if split is None or split == m:
            raise FactorizationIncomplete(
                f"factorization incomplete for {n}: rho budget {rho_budget} exhausted"
            )
        stack += [split, m // split]
    factors = tuple(sorted(found.items()))
    result = Factorization(value=n, sign=sign, factors=factors)
    assert result.recompose() == n
    return result


def valuation(n: int, q: int) -> int:
    """Largest e with q^e dividing n; n must be nonzero."""
    if n == 0:
        raise ValidationError("valuation of 0 is undefined")
    n = abs(n)
    e = 0
    while n % q == 0:
        n //= q
        e += 1
    return e


def sqrt_mod(a: int, q: int) -> Optional[int]:
    """Square root of a modulo an odd prime q, or None.

    Returns the smaller of the two roots (in [0, q-1]) for determinism.
    Tonelli-Shanks, with the q = 3 (mod 4) shortcut.
    """
    if q < 3 or not is_prime(q):
        raise ValidationError(f"sqrt_mod requires an odd prime, got {q}")
    a %= q
    if a == 0:
        return 0
    if jacobi(a, q) != 1:
        return None
    if q % 4 == 3:
        x = pow(a, (q + 1) // 4, q)
        return min(x, q - x)
    # write q-1 = d * 2^s with d odd
    d, s = q - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    z = 2
    while jacobi(z, q) != -1:
        z += 1
    c = pow(z, d, q)
    x = pow(a, (d + 1) // 2, q)
    t = pow(a, d, q)
    m = s
    while t != 1:
        i, tt = 0, t
        while tt != 1:
            tt = tt * tt % q
            i += 1
        b = pow(c, 1 << (m - i - 1), q)
        x = x * b % q
        t = t * b % q * b % q
        c = b * b % q
        m = i
    assert x * x % q == a
    return min(x, q - x)


def _sqrt_mod_prime_power(a: int, q: int, e: int) -> list[int]:
    # All roots of x^2 = a mod q^e, for odd prime q with q not dividing a.
    r = sqrt_mod(a % q, q)
    if r is None:
        return []
    qk = q
    for _ in range(e - 1):
        # Hensel: lift r from mod qk to mod qk*q
        f = (r * r - a) // qk
        inv = pow(2 * r, -1, q)
        r = (r - f * inv % q * qk) % (qk * q)
        qk *= q
    r %= q**e
    return sorted({r, q**e - r})


def _roots_minus_p(p: int, m: int) -> list[int]:
    # All solutions of x^2 = -p (mod m) for odd m coprime to p.
    if m == 1:
        return [0]
    roots: Optional[list[int]] = None
    modulus = 1
    for q, e in factor(m).factors:
        qe = q**e
        part = _sqrt_mod_prime_power(-p % qe, q, e)
        if not part:
            return []
        if roots is None:
            roots, modulus = part, qe
        else:
            inv_qe = pow(qe, -1, modulus)
            inv_mod = pow(modulus, -1, qe)
            roots = [
                (a * qe * inv_qe + b * modulus * inv_mod) % (modulus * qe)
                for a in roots
                for b in part
            ]
            modulus *= qe
    return sorted(set(roots))


DEFAULT_CORNACCHIA_SWEEP = 4 * 10**8


def _cornacchia_solutions(p: int, m: int, sweep: bool) -> Iterator[tuple[int, int]]:
    # Verified solutions of s^2 + p*t^2 = 4m, nonnegative s and t.
    # Modified Cornacchia on every square-root class of -p mod m (m odd),
    # scanning the full Euclid remainder chain; optional exhaustive t-sweep.
    seen = set()
    target = 4 * m
    bound = math.isqrt(target)
    if m % 2 == 1:
        for r in _roots_minus_p(p, m):
            if r % 2 == 1:
                x0 = r
            elif r:
                x0 = 2 * m - r
            else:
                continue
            a, b = 2 * m, x0 % (2 * m)
            while b:
                if b <= bound:
                    rem = target - b * b
                    if rem % p == 0:
                        t = math.isqrt(rem // p)
                        if t * t * p == rem and (b, t) not in seen:
                            seen.add((b, t))
                            yield (b, t)
                a, b = b, a % b
    if sweep:
        # smallest t first; covers imprimitive and even-m cases
        for t in range(math.isqrt(target // p) + 1):
            rem = target - p * t * t
            s = math.isqrt(rem)
            if s * s == rem and (s, t) not in seen:
                seen.add((s, t))
                yield (s, t)


def all_norm_equation_solutions(
    p: int, m: int, exhaustive_threshold: int = DEFAULT_CORNACCHIA_SWEEP
) -> Iterator[tuple[int, int]]:
    """All nonnegative (s, t) with s^2 + p*t^2 = 4m, deduplicated."""
    if p % 4 != 3 or not is_prime(p):
        raise ValidationError(f"norm equation requires prime p = 3 mod 4, got {p}")
    if m < 1 or math.gcd(m, p) != 1:
        raise ValidationError(f"m must be positive and coprime to p, got m={m}")
    sweep = m <= exhaustive_threshold or m % 2 == 0
    for sol in _cornacchia_solutions(p, m, sweep):
        assert sol[0] ** 2 + p * sol[1] ** 2 == 4 * m
        yield sol


def cornacchia_4m(
    p: int, m: int, exhaustive_threshold: int = DEFAULT_CORNACCHIA_SWEEP
) -> Optional[tuple[int, int]]:
    """First nonnegative solution (s, t) of s^2 + p*t^2 = 4m, or None.

    p must be a prime = 3 (mod 4) coprime to m.  Primary path is the
    modified Cornacchia reduction over all square-root classes of -p mod m;
    below `exhaustive_threshold` a bounded t-sweep cross-checks "no solution"
    and picks up imprimitive representations.
    """
    for sol in all_norm_equation_solutions(p, m, exhaustive_threshold):
        return sol
    return None
