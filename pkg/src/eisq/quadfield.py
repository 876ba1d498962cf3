"""Exact arithmetic in K = Q(sqrt(-p)) for a prime p = 3 (mod 4), p > 3.

Elements live in the maximal order Z[w] with w = (1 + sqrt(-p))/2, so
w^2 = w - (1+p)/4 and sqrt(-p) = 2w - 1.  Provides split/inert prime
classification, normalized generators of split prime powers, quadratic
residue symbols in residue fields, and local square tests at finite
places of odd residue characteristic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .arith import all_norm_equation_solutions, factor, is_prime, jacobi, sqrt_mod, valuation
from .errors import InternalCheckError, ValidationError

SPLIT_FACTOR = "split_factor"
SPLIT_CONJUGATE = "split_conjugate"
INERT = "inert"
RAMIFIED = "ramified"


@dataclass(frozen=True)
class FieldCtx:
    """The field Q(sqrt(-p)); validated at construction."""

    p: int

    def __post_init__(self):
        if self.p <= 3 or self.p % 4 != 3 or not is_prime(self.p):
            raise ValidationError(
                f"field context requires a prime p > 3 with p = 3 mod 4, got {self.p}"
            )

    @property
    def omega_norm(self) -> int:
        # norm of w, i.e. the constant term of z^2 - z + (1+p)/4
        return (1 + self.p) // 4

    def quad(self, a: int, b: int) -> "QuadInt":
        return QuadInt(a, b, self)

    def pi(self) -> "QuadInt":
        """sqrt(-p) as an element of Z[w]."""
        return QuadInt(-1, 2, self)

    def one(self) -> "QuadInt":
        return QuadInt(1, 0, self)


@dataclass(frozen=True)
class QuadInt:
    """a + b*w in the maximal order of Q(sqrt(-p))."""

    a: int
    b: int
    ctx: FieldCtx

    def _same(self, other: "QuadInt"):
        if self.ctx.p != other.ctx.p:
            raise ValidationError("mixed field contexts")

    def __add__(self, other: "QuadInt") -> "QuadInt":
        self._same(other)
        return QuadInt(self.a + other.a, self.b + other.b, self.ctx)

    def __sub__(self, other: "QuadInt") -> "QuadInt":
        self._same(other)
        return QuadInt(self.a - other.a, self.b - other.b, self.ctx)

    def __neg__(self) -> "QuadInt":
        return QuadInt(-self.a, -self.b, self.ctx)

    def __mul__(self, other: Union["QuadInt", int]) -> "QuadInt":
        if isinstance(other, int):
            return QuadInt(self.a * other, self.b * other, self.ctx)
        self._same(other)
        a, b, c, d = self.a, self.b, other.a, other.b
        return QuadInt(
            a * c - b * d * self.ctx.omega_norm, a * d + b * c + b * d, self.ctx
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadInt":
        return QuadInt(self.a + self.b, -self.b, self.ctx)

    def norm(self) -> int:
        n = self.a * self.a + self.a * self.b + self.b * self.b * self.ctx.omega_norm
        assert n >= 0
        return n

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def divide_exact(self, other: "QuadInt") -> "QuadInt":
        """Exact division in Z[w]; raises when not divisible."""
        self._same(other)
        n = other.norm()
        if n == 0:
            raise ValidationError("division by zero")
        num = self * other.conjugate()
        if num.a % n or num.b % n:
            raise ValidationError(f"{self} is not divisible by {other}")
        return QuadInt(num.a // n, num.b // n, self.ctx)

    def content_at(self, q: int) -> int:
        """Largest e with q^e dividing both coordinates."""
        if self.is_zero():
            raise ValidationError("content of 0 is undefined")
        if self.a == 0:
            return valuation(self.b, q)
        if self.b == 0:
            return valuation(self.a, q)
        return min(valuation(self.a, q), valuation(self.b, q))

    def __repr__(self) -> str:
        return f"({self.a}{self.b:+d}w; p={self.ctx.p})"


def conjugate(x: QuadInt) -> QuadInt:
    return x.conjugate()


def norm(x: QuadInt) -> int:
    return x.norm()


@dataclass(frozen=True)
class PlaceK:
    """A finite place of K of odd residue characteristic.

    For split places `omega_residue` is the root of z^2 - z + (1+p)/4 mod q
    that w reduces to; for the ramified place it is the double root
    (p+1)/2 mod p; for inert places it is None (the residue field is
    F_q[z] modulo that polynomial, and symbols go through the norm).
    """

    kind: str
    q: int
    omega_residue: Optional[int]
    p: int

    @property
    def residue_degree(self) -> int:
        return 2 if self.kind == INERT else 1

    @property
    def local_uniformizer(self) -> Union["QuadInt", int]:
        """sqrt(-p) at the ramified place; the rational prime q otherwise
        (q stays prime in the completion for both split and inert kinds)."""
        if self.kind == RAMIFIED:
            return FieldCtx(self.p).pi()
        return self.q

    def label(self) -> str:
        if self.kind == RAMIFIED:
            return "pi"
        if self.kind == INERT:
            return f"inert({self.q})"
        tag = "" if self.kind == SPLIT_FACTOR else "'"
        return f"split({self.q}){tag}"

    def __repr__(self) -> str:
        return f"PlaceK[{self.label()}; p={self.p}]"


def classify_prime(ctx: FieldCtx, q: int) -> str:
    """'split' or 'inert' for an odd prime q distinct from p."""
    if q == 2 or q == ctx.p or not is_prime(q):
        raise ValidationError(f"classify_prime requires an odd prime != p, got {q}")
    return "split" if jacobi(-ctx.p, q) == 1 else "inert"


def places_above(ctx: FieldCtx, q: int) -> list[PlaceK]:
    """All places of K above the rational prime q (odd residue char only)."""
    if q == 2:
        raise ValidationError("places above 2 are unsupported")
    if q == ctx.p:
        return [PlaceK(RAMIFIED, ctx.p, (ctx.p + 1) // 2, ctx.p)]
    if classify_prime(ctx, q) == INERT:
        return [PlaceK(INERT, q, None, ctx.p)]
    disc_root = _omega_roots(ctx, q)
    return [
        PlaceK(SPLIT_FACTOR, q, disc_root[0], ctx.p),
        PlaceK(SPLIT_CONJUGATE, q, disc_root[1], ctx.p),
    ]


def _omega_roots(ctx: FieldCtx, q: int) -> tuple[int, int]:
    # The two roots of z^2 - z + (1+p)/4 mod a split prime q, smaller first.
    s = sqrt_mod(-ctx.p % q, q)
    assert s is not None
    inv2 = pow(2, -1, q)
    r1, r2 = (1 + s) * inv2 % q, (1 - s) * inv2 % q
    assert (r1 + r2) % q == 1 and r1 != r2
    return (min(r1, r2), max(r1, r2))


def place_of_prime_element(ctx: FieldCtx, x: QuadInt) -> PlaceK:
    """The unique place where a generator of a prime power has positive valuation.

    Requires norm(x) to be a power of a single rational prime and x to be
    primitive (not divisible by that prime) unless the prime is p.
    """
    n = x.norm()
    if n <= 1:
        raise ValidationError(f"{x} is a unit or zero")
    q = _single_prime_base(n)
    if q == ctx.p:
        return places_above(ctx, q)[0]
    if q == 2:
        raise ValidationError("places above 2 are unsupported")
    if classify_prime(ctx, q) == INERT:
        raise ValidationError(f"{x} has inert norm base {q}, not a split generator")
    if x.content_at(q) > 0:
        raise ValidationError(f"{x} is divisible by {q}; no single place above it")
    for v in places_above(ctx, q):
        if (x.a + x.b * v.omega_residue) % q == 0:
            return v
    raise InternalCheckError(f"no place above {q} contains {x}")


def _single_prime_base(n: int) -> int:
    factors = factor(n).factors
    if len(factors) != 1:
        raise ValidationError(f"norm {n} is not a prime power")
    return factors[0][0]


# --- formal products -------------------------------------------------------

Gen = Union[QuadInt, int]
FormalProduct = tuple[tuple[Gen, int], ...]


def as_formal_product(x) -> FormalProduct:
    if isinstance(x, (QuadInt, int)):
        return ((x, 1),)
    return tuple((g, int(e)) for g, e in x)


def _local_data(ctx: FieldCtx, g: Gen, v: PlaceK) -> tuple[int, int]:
    """(valuation, symbol of the unit part) of a single generator at v.

    The unit part is taken w.r.t. the uniformizer q for split and inert
    places and sqrt(-p) for the ramified place, consistently for every
    generator, so products of unit parts stay multiplicative.
    """
    q = v.q
    if isinstance(g, int):
        if g == 0:
            raise ValidationError("zero has no valuation")
        e = valuation(g, q)
        u = g // q**e
        if v.kind == INERT:
            # v(q) = 1; rational units have square norms, so symbol +1
            return (e, 1)
        if v.kind == RAMIFIED:
            # v(p) = 2 with uniformizer pi and p = -pi^2: unit part (-1)^e * u
            return (2 * e, jacobi((-1) ** e * u % q, q))
        return (e, jacobi(u % q, q))
    if g.is_zero():
        raise ValidationError("zero has no valuation")
    n = g.norm()
    if v.kind == INERT:
        vn = valuation(n, q)
        assert vn % 2 == 0, "inert valuations of norms are even"
        return (vn // 2, jacobi((n // q**vn) % q, q))
    if v.kind == RAMIFIED:
        val = valuation(n, q)
        unit = g
        pi = ctx.pi()
        for _ in range(val):
            unit = unit.divide_exact(pi)
        res = (unit.a + unit.b * v.omega_residue) % q
        assert res != 0
        return (val, jacobi(res, q))
    # split place: reduce through the q-adic embedding w -> lifted root
    bound = valuation(n, q) + 1
    root = _lift_omega_root(ctx, v, bound)
    qk = q**bound
    image = (g.a + g.b * root) % qk
    val = 0
    while image % q == 0 and val < bound:
        image //= q
        val += 1
    if val >= bound:
        raise InternalCheckError("valuation exceeded norm bound at split place")
    return (val, jacobi(image % q, q))


def _lift_omega_root(ctx: FieldCtx, v: PlaceK, precision: int) -> int:
    # Hensel-lift the residue of w at a split place to a root mod q^precision.
    q, r = v.q, v.omega_residue
    c = ctx.omega_norm
    qk = q
    while qk < q**precision:
        step = min(qk * qk, q**precision)
        f = (r * r - r + c) % step
        df_inv = pow((2 * r - 1) % step, -1, step)
        r = (r - f * df_inv) % step
        qk = step
    assert (r * r - r + c) % q**precision == 0
    return r % q**precision


def residue_symbol(ctx: FieldCtx, x: Gen, y: Union[PlaceK, QuadInt]) -> int:
    """Quadratic residue symbol of x in the residue field at y (+1 or -1).

    x must be a unit at y; y is a place or a generator of a prime power.
    """
    v = y if isinstance(y, PlaceK) else place_of_prime_element(ctx, y)
    if v.q == 2:
        raise ValidationError("residue characteristic 2 is unsupported")
    val, sym = _local_data(ctx, x, v)
    if val != 0:
        raise ValidationError(f"{x} is not a unit at {v}")
    return sym


def is_local_square(ctx: FieldCtx, x, v: PlaceK) -> bool:
    """Whether a nonzero formal product lies in (K_v^x)^2.

    Odd-valuation products are non-squares; otherwise the product of the
    unit-part symbols decides (Hensel lifting is automatic away from 2).
    """
    if v.q == 2:
        raise ValidationError("local square test at residue characteristic 2")
    total_val = 0
    sign = 1
    for g, e in as_formal_product(x):
        val, sym = _local_data(ctx, g, v)
        total_val += val * e
        if e % 2 and sym == -1:
            sign = -sign
    if total_val % 2:
        return False
    return sign == 1


# --- normalized generators of split prime powers ---------------------------


def split_generator(
    ctx: FieldCtx, q: int, h: int, conjugate_choice: bool = False
) -> QuadInt:
    """Generator f = a + b*w of the h-th power of a prime above a split q.

    Normalization: norm(f) = q^h, a = 1 (mod 4); the 2-adic valuation of b
    is 1 for q = 3 (mod 4) and at least 2 for q = 1 (mod 4) (automatic,
    asserted).  Of the residual conjugate pair the representative with
    b > 0 is preferred, then the larger a; `conjugate_choice` flips to the
    other one (all downstream results are conjugation-symmetric).
    """
    if classify_prime(ctx, q) != "split":
        raise ValidationError(f"{q} does not split in Q(sqrt(-{ctx.p}))")
    if h < 1 or h % 2 == 0:
        raise ValidationError(f"class number must be odd and positive, got {h}")
    m = q**h
    candidates = []
    for s, t in all_norm_equation_solutions(ctx.p, m):
        if t == 0 or (s % q == 0 and t % q == 0):
            continue  # rational or imprimitive: not a generator of a single prime
        for b in (t, -t):
            for ssign in (s, -s):
                if (ssign - b) % 2:
                    continue
                a = (ssign - b) // 2
                if a % 4 == 1:
                    candidates.append(ctx.quad(a, b))
        if candidates:
            break
    if len(candidates) != 2:
        raise InternalCheckError(
            f"expected one conjugate pair of normalized generators for {q}^{h}, "
            f"got {candidates}"
        )
    candidates.sort(key=lambda f: (f.b > 0, f.a), reverse=True)
    f = candidates[0] if not conjugate_choice else candidates[1]
    assert f.norm() == m and f.a % 4 == 1
    v2b = valuation(f.b, 2)
    if q % 4 == 3:
        assert v2b == 1, f"expected 2-adic valuation 1 of b, got {v2b}"
    else:
        assert v2b >= 2, f"expected 2-adic valuation >= 2 of b, got {v2b}"
    return f
