"""2-Selmer groups of quadratic twists of the CM curves attached to
Q(sqrt(-p)) for p = 7 (mod 8): candidate pairs cut out by local square
conditions at the places over p*d, the residue-symbol graph, and the
even-partition rank formula, with an exhaustive local-conditions oracle."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Optional, Union

from . import quadfield
from .arith import factor, is_prime
from .classgroup import class_number
from .errors import InternalCheckError, ResourceCapError, ValidationError
from .quadfield import FieldCtx, PlaceK, QuadInt

DEFAULT_PAIR_CAP = 2**24
PARTITION_VERTEX_CAP = 24

Gen = Union[QuadInt, int]


def oracle_cap() -> int:
    env = os.environ.get("EISQ_ORACLE_CAP")
    return int(env) if env else DEFAULT_PAIR_CAP


@dataclass
class TwistDatum:
    """A twist parameter d = prod(-q_i) * prod(q'_j) * prod(Q*_k) over Q(sqrt(-p)).

    Generator lists follow the two coordinate shapes: the first coordinate
    ranges over products of {-pi, f_i, -fbar_i, g_j, gbar_j, Q*_k}, the
    second over {pi, -f_i, fbar_i, g_j, gbar_j, Q*_k}."""

    ctx: FieldCtx
    d: int
    h: int
    split3: list[tuple[int, QuadInt]]  # q = 3 (4) split, normalized generator
    split1: list[tuple[int, QuadInt]]  # q = 1 (4) split, normalized generator
    inert: list[int]  # inert primes Q; Q* = (-1)^((Q-1)/2) Q
    places: list[PlaceK]
    alpha_gens: list[tuple[str, Gen]]
    beta_gens: list[tuple[str, Gen]]
    _local_cache: dict = field(default_factory=dict, repr=False)

    @property
    def width(self) -> int:
        return len(self.alpha_gens)

    def q_star(self, q: int) -> int:
        return q if q % 4 == 1 else -q


def build_twist(p: int, d: int, conjugate_choice: bool = False) -> TwistDatum:
    """Validate and factor a twist parameter, then build places and generators.

    Requires p = 7 (mod 8) (so 2 splits and the graph machinery applies),
    and d squarefree, = 1 (mod 4), coprime to 2p."""
    if not is_prime(p) or p % 8 != 7:
        raise ValidationError(
            f"p = {p} is not a prime congruent to 7 mod 8; the rank criterion "
            "needs 2 split in Q(sqrt(-p))"
        )
    ctx = FieldCtx(p)
    if d % 4 != 1:
        raise ValidationError(f"twist parameter must be 1 mod 4, got {d}")
    if math.gcd(d, 2 * p) != 1:
        raise ValidationError(f"twist parameter must be coprime to 2p, got {d}")
    fac = factor(d)
    if not fac.is_squarefree():
        raise ValidationError(f"twist parameter must be squarefree, got {d}")
    h = class_number(p)
    split3: list[tuple[int, QuadInt]] = []
    split1: list[tuple[int, QuadInt]] = []
    inert: list[int] = []
    for q in fac.primes():
        if quadfield.classify_prime(ctx, q) == "split":
            gen = quadfield.split_generator(ctx, q, h, conjugate_choice)
            (split3 if q % 4 == 3 else split1).append((q, gen))
        else:
            inert.append(q)
    recomposed = 1
    for q, _ in split3:
        recomposed *= -q
    for q, _ in split1:
        recomposed *= q
    for q in inert:
        recomposed *= q if q % 4 == 1 else -q
    if recomposed != d:
        raise InternalCheckError(f"sign decomposition failed: {recomposed} != {d}")
    places = quadfield.places_above(ctx, p)
    for q in fac.primes():
        places += quadfield.places_above(ctx, q)
    pi = ctx.pi()
    alpha_gens: list[tuple[str, Gen]] = [("-pi", -pi)]
    beta_gens: list[tuple[str, Gen]] = [("pi", pi)]
    for q, f in split3:
        alpha_gens.append((f"f({q})", f))
        beta_gens.append((f"-f({q})", -f))
    for q, f in split3:
        alpha_gens.append((f"-fbar({q})", -f.conjugate()))
        beta_gens.append((f"fbar({q})", f.conjugate()))
    for q, g in split1:
        alpha_gens.append((f"g({q})", g))
        beta_gens.append((f"g({q})", g))
    for q, g in split1:
        alpha_gens.append((f"gbar({q})", g.conjugate()))
        beta_gens.append((f"gbar({q})", g.conjugate()))
    for q in inert:
        qs = q if q % 4 == 1 else -q
        alpha_gens.append((str(qs), qs))
        beta_gens.append((str(qs), qs))
    return TwistDatum(
        ctx=ctx,
        d=d,
        h=h,
        split3=split3,
        split1=split1,
        inert=inert,
        places=places,
        alpha_gens=alpha_gens,
        beta_gens=beta_gens,
    )


@dataclass(frozen=True)
class SelmerCandidate:
    """Exponent bit vectors over the two generator shapes (bit i = generator i)."""

    alpha_bits: int
    beta_bits: int

    def times(self, other: "SelmerCandidate") -> "SelmerCandidate":
        return SelmerCandidate(
            self.alpha_bits ^ other.alpha_bits, self.beta_bits ^ other.beta_bits
        )

    def exponents(self, width: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return (
            tuple((self.alpha_bits >> i) & 1 for i in range(width)),
            tuple((self.beta_bits >> i) & 1 for i in range(width)),
        )


def torsion_image(td: TwistDatum) -> tuple[SelmerCandidate, ...]:
    """Image of the rational 2-torsion: {(1,1), (-pi d,1), (1,pi d), (-pi d,pi d)}.

    Modulo squares -pi*d is the full product of the first-shape generators
    and pi*d the full product of the second shape, so these are the zero
    and all-ones exponent vectors."""
    ones = (1 << td.width) - 1
    return (
        SelmerCandidate(0, 0),
        SelmerCandidate(ones, 0),
        SelmerCandidate(0, ones),
        SelmerCandidate(ones, ones),
    )


def _coordinate_product(td: TwistDatum, side: str, bits: int, twist: bool):
    gens = td.alpha_gens if side == "alpha" else td.beta_gens
    product: list[tuple[Gen, int]] = [
        (g, 1) for i, (_, g) in enumerate(gens) if (bits >> i) & 1
    ]
    if twist:
        # multiply by the torsion coordinate -pi*d (first shape) or pi*d (second)
        pi = td.ctx.pi()
        product.append((-pi if side == "alpha" else pi, 1))
        product.append((td.d, 1))
    return product


def _coordinate_ok_at(td: TwistDatum, side: str, bits: int, place_idx: int) -> bool:
    # whether the coordinate, possibly multiplied by its torsion partner,
    # is a local square at the given place
    key = (side, bits, place_idx)
    cached = td._local_cache.get(key)
    if cached is not None:
        return cached
    v = td.places[place_idx]
    ok = False
    for twist in (False, True):
        x = _coordinate_product(td, side, bits, twist)
        if not x:
            ok = True
            break
        if quadfield.is_local_square(td.ctx, x, v):
            ok = True
            break
    td._local_cache[key] = ok
    return ok


def member_local(td: TwistDatum, cand: SelmerCandidate) -> bool:
    """The local membership test: at every place over p*d some 2-torsion
    image pair (x, y) makes both alpha*x and beta*y local squares.

    The four torsion pairs are the independent choices of x in {1, -pi d}
    and y in {1, pi d}, so the two coordinates are tested separately."""
    for idx in range(len(td.places)):
        if not _coordinate_ok_at(td, "alpha", cand.alpha_bits, idx):
            return False
        if not _coordinate_ok_at(td, "beta", cand.beta_bits, idx):
            return False
    return True


@dataclass(frozen=True)
class BruteForceResult:
    dim_f2: int
    basis: tuple[SelmerCandidate, ...]
    alpha_survivors: tuple[int, ...]
    beta_survivors: tuple[int, ...]


def selmer_group_bruteforce(td: TwistDatum, cap: Optional[int] = None) -> BruteForceResult:
    """Exhaustive oracle over the candidate pairs.

    The per-place condition quantifies over a product set of torsion
    pairs, so it splits exactly into independent coordinate conditions;
    every coordinate value is tested against the honest local-square
    predicate and the pair survivors are the product of the two survivor
    sets.  Verifies the survivors form a group containing the torsion
    image and returns the F2-dimension with a basis."""
    cap = oracle_cap() if cap is None else cap
    width = td.width
    if 4**width > cap:
        raise ResourceCapError(
            f"instance too large for oracle: 4^{width} pairs exceed cap {cap}"
        )
    side_survivors = {}
    for side in ("alpha", "beta"):
        keep = []
        for bits in range(1 << width):
            if all(
                _coordinate_ok_at(td, side, bits, idx) for idx in range(len(td.places))
            ):
                keep.append(bits)
        side_survivors[side] = keep
    alpha, beta = side_survivors["alpha"], side_survivors["beta"]
    # subgroup check: closed under multiplication, i.e. XOR of exponent vectors
    for keep in (alpha, beta):
        kset = set(keep)
        if 0 not in kset:
            raise InternalCheckError("survivor set misses the identity")
        for x in keep:
            for y in keep:
                if x ^ y not in kset:
                    raise InternalCheckError("survivor set is not a subgroup")
    ones = (1 << width) - 1
    if ones not in set(alpha) or ones not in set(beta):
        raise InternalCheckError("torsion image escapes the survivor set")
    for cand in torsion_image(td):
        if not member_local(td, cand):
            raise InternalCheckError(f"torsion image fails the local test: {cand}")
    dim_a, basis_a = _f2_dimension(alpha)
    dim_b, basis_b = _f2_dimension(beta)
    if (1 << dim_a) != len(alpha) or (1 << dim_b) != len(beta):
        raise InternalCheckError("survivor count is not a power of two")
    basis = tuple(
        [SelmerCandidate(a, 0) for a in basis_a] + [SelmerCandidate(0, b) for b in basis_b]
    )
    return BruteForceResult(
        dim_f2=dim_a + dim_b,
        basis=basis,
        alpha_survivors=tuple(alpha),
        beta_survivors=tuple(beta),
    )


def _f2_dimension(vectors) -> tuple[int, list[int]]:
    # Gaussian elimination over F2 on bitmask integers; lowest set bit pivots
    basis: list[int] = []
    for v in sorted(vectors):
        x = v
        for b in basis:
            x = min(x, x ^ b)
        if x:
            basis.append(x)
            basis.sort()
    return len(basis), basis


# --- the residue-symbol graph ----------------------------------------------


@dataclass(frozen=True)
class SelmerGraph:
    labels: tuple[str, ...]
    arrows: tuple[tuple[bool, ...], ...]  # arrows[i][j]: arrow from i to j

    @property
    def size(self) -> int:
        return len(self.labels)

    def arrow_count(self) -> int:
        return sum(sum(row) for row in self.arrows)


def _graph_from_gens(td: TwistDatum, gens: list[tuple[str, Gen]]) -> SelmerGraph:
    ctx = td.ctx
    places = []
    for label, g in gens:
        if isinstance(g, int):
            places.append(quadfield.places_above(ctx, abs(g))[0])
        else:
            places.append(quadfield.place_of_prime_element(ctx, g))
    n = len(gens)
    arrows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append(False)
            else:
                sym = quadfield.residue_symbol(ctx, gens[i][1], places[j])
                row.append(sym == -1)
        arrows.append(tuple(row))
    return SelmerGraph(tuple(label for label, _ in gens), tuple(arrows))


def build_graph(td: TwistDatum) -> SelmerGraph:
    """Graph on {-pi, f_i, -fbar_i, g_j, gbar_j, Q*_k}: an arrow x -> y
    whenever the residue symbol of x at the prime of y is -1."""
    return _graph_from_gens(td, td.alpha_gens)


def build_conjugate_graph(td: TwistDatum) -> SelmerGraph:
    """Companion graph on {pi, -f_i, fbar_i, g_j, gbar_j, Q*_k}."""
    return _graph_from_gens(td, td.beta_gens)


def verify_conjugation_isomorphism(td: TwistDatum) -> bool:
    """The coordinate swap -pi -> pi, f -> fbar, -fbar -> -f, g -> gbar,
    gbar -> g, Q* -> Q* must carry arrows of the first graph exactly onto
    arrows of the second."""
    g1 = build_graph(td)
    g2 = build_conjugate_graph(td)
    n3, n1 = len(td.split3), len(td.split1)
    perm = [0]
    perm += list(range(1 + n3, 1 + 2 * n3))  # f_i -> fbar_i slot
    perm += list(range(1, 1 + n3))  # -fbar_i -> -f_i slot
    base = 1 + 2 * n3
    perm += list(range(base + n1, base + 2 * n1))  # g_j -> gbar_j slot
    perm += list(range(base, base + n1))  # gbar_j -> g_j slot
    base2 = base + 2 * n1
    perm += list(range(base2, base2 + len(td.inert)))
    for i in range(g1.size):
        for j in range(g1.size):
            if i == j:
                continue
            if g1.arrows[i][j] != g2.arrows[perm[i]][perm[j]]:
                return False
    return True


def count_even_partitions(graph: SelmerGraph, vertex_cap: int = PARTITION_VERTEX_CAP):
    """Even-partition data of the graph.

    A bipartition {V1, V2} is even when every vertex receives an even
    number of arrows from the opposite part.  Even vertex subsets form an
    F2-subspace closed under complement; the rank formula consumes its
    partition dimension t (so the number of even partitions, including the
    trivial one, is 2^t).  Returns (t, number of nontrivial even partitions).
    """
    n = graph.size
    if n > vertex_cap:
        raise ResourceCapError(f"{n} vertices exceed the partition cap {vertex_cap}")
    in_masks = []
    for j in range(n):
        mask = 0
        for i in range(n):
            if graph.arrows[i][j]:
                mask |= 1 << i
        in_masks.append(mask)
    full = (1 << n) - 1
    even_sets = []
    for s in range(1 << n):
        ok = True
        for y in range(n):
            opposite = (full ^ s) if (s >> y) & 1 else s
            if bin(in_masks[y] & opposite).count("1") % 2:
                ok = False
                break
        if ok:
            even_sets.append(s)
    count = len(even_sets)
    if count & (count - 1):
        raise InternalCheckError("even subsets do not form a subspace")
    sset = set(even_sets)
    if 0 not in sset or full not in sset:
        raise InternalCheckError("trivial partition is not even")
    t = count.bit_length() - 2  # log2(count) - 1 partitions dimension
    nontrivial = count // 2 - 1
    return t, nontrivial


@dataclass(frozen=True)
class GraphRankResult:
    d: int
    p: int
    t: int
    nontrivial_even_partitions: int
    rank: int  # 1 + 2t, the rank over O/2O
    dim_f2: int  # 2 + 2t, dictionary: dim = rank + 1
    graph: SelmerGraph
    conjugate_graph: SelmerGraph


def selmer_rank_graph(td: TwistDatum) -> GraphRankResult:
    """Rank of the 2-Selmer group by the graph criterion: 1 + 2t.

    Also recomputes t on the companion graph and asserts agreement (the
    coordinate swap is an isomorphism, verified rather than trusted)."""
    g1 = build_graph(td)
    g2 = build_conjugate_graph(td)
    if not verify_conjugation_isomorphism(td):
        raise InternalCheckError("conjugation map is not a graph isomorphism")
    t1, nontrivial = count_even_partitions(g1)
    t2, _ = count_even_partitions(g2)
    if t1 != t2:
        raise InternalCheckError(f"partition counts disagree: {t1} vs {t2}")
    return GraphRankResult(
        d=td.d,
        p=td.ctx.p,
        t=t1,
        nontrivial_even_partitions=nontrivial,
        rank=1 + 2 * t1,
        dim_f2=2 + 2 * t1,
        graph=g1,
        conjugate_graph=g2,
    )


@dataclass(frozen=True)
class MinimalityReport:
    d: int
    p: int
    inert_primes: tuple[int, ...]
    all_one_mod4: bool  # iff minimal: twist group equals the 2-torsion
    lower_bound: int  # 1 + #(Q = 3 mod 4)
    graph_rank: int
    consistent: bool


def thmm_verdict(td: TwistDatum) -> MinimalityReport:
    """Minimality test for twists by inert primes only: the group collapses
    to the 2-torsion exactly when every Q_i = 1 (mod 4); in general the
    rank is at least 1 + #(Q_i = 3 mod 4)."""
    if td.split3 or td.split1:
        raise ValidationError("minimality criterion needs d with inert factors only")
    ks = [q for q in td.inert if q % 4 == 3]
    minimal = not ks
    bound = 1 + len(ks)
    rank = selmer_rank_graph(td).rank
    consistent = rank >= bound and (rank == 1) == minimal
    if not consistent:
        raise InternalCheckError(
            f"minimality cross-check failed for d={td.d}: rank {rank}, bound {bound}"
        )
    return MinimalityReport(
        d=td.d,
        p=td.ctx.p,
        inert_primes=tuple(td.inert),
        all_one_mod4=minimal,
        lower_bound=bound,
        graph_rank=rank,
        consistent=consistent,
    )


def admissible_twists(p: int, limit: int):
    """All squarefree d = 1 (mod 4) with |d| <= limit and gcd(d, 2p) = 1."""
    out = []
    for absd in range(1, limit + 1, 2):
        for d in (absd, -absd):
            if d % 4 != 1 or math.gcd(d, 2 * p) != 1:
                continue
            if factor(d).is_squarefree():
                out.append(d)
    return sorted(out, key=abs)
