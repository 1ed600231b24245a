"""Finite Abelian groups, their characters and Fourier transform, and finite fields.

Groups are direct products of cyclic factors Z_d1 x ... x Z_dr.  Elements are
reduced residue tuples; a flat mixed-radix codec (C-order: the *last* coordinate
varies fastest) addresses dense tables indexed by group elements.  Characters
are indexed by the same tuples, chi_k(a) = prod_j exp(2*pi*i*k_j*a_j/d_j).

GF(p^r) elements are coefficient tuples of polynomials of degree < r over Z_p
(constant term first); arithmetic reduces modulo a monic irreducible polynomial
chosen deterministically at construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, Iterator, Sequence, Tuple

import numpy as np

from .errors import ValidationError

Coords = Tuple[int, ...]


@dataclass(frozen=True)
class AbelianGroup:
    """Direct product of cyclic groups with the given factor orders."""

    orders: Tuple[int, ...]

    def __post_init__(self):
        orders = tuple(int(d) for d in self.orders)
        if not orders or any(d < 2 for d in orders):
            raise ValidationError(f"cyclic factor orders must all be >= 2, got {self.orders}")
        object.__setattr__(self, "orders", orders)

    @property
    def size(self) -> int:
        return reduce(lambda a, b: a * b, self.orders, 1)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def identity(self) -> Coords:
        return (0,) * len(self.orders)

    def element(self, coords: Sequence[int]) -> Coords:
        """Validate and reduce a coordinate tuple into this group."""
        if len(coords) != len(self.orders):
            raise ValidationError(
                f"element has {len(coords)} coordinates, group has {len(self.orders)} factors"
            )
        return tuple(int(c) % d for c, d in zip(coords, self.orders))

    def elements(self) -> Iterator[Coords]:
        """All elements in flat-index order."""
        return (self.element_from_index(i) for i in range(self.size))

    def element_index(self, coords: Sequence[int]) -> int:
        """Flat mixed-radix index (C-order, last coordinate fastest)."""
        coords = self.element(coords)
        idx = 0
        for c, d in zip(coords, self.orders):
            idx = idx * d + c
        return idx

    def element_from_index(self, idx: int) -> Coords:
        if not 0 <= idx < self.size:
            raise ValidationError(f"flat index {idx} out of range for group of size {self.size}")
        out = []
        for d in reversed(self.orders):
            out.append(idx % d)
            idx //= d
        return tuple(reversed(out))


def cyclic(d: int) -> AbelianGroup:
    """The cyclic group Z_d."""
    return AbelianGroup((d,))


def group_add(group: AbelianGroup, a: Sequence[int], b: Sequence[int]) -> Coords:
    """Componentwise sum modulo each factor order."""
    a = group.element(a)
    b = group.element(b)
    return tuple((x + y) % d for x, y, d in zip(a, b, group.orders))


def group_neg(group: AbelianGroup, a: Sequence[int]) -> Coords:
    """Inverse element: group_add(a, group_neg(a)) is the identity."""
    a = group.element(a)
    return tuple((-x) % d for x, d in zip(a, group.orders))


def group_sub(group: AbelianGroup, a: Sequence[int], b: Sequence[int]) -> Coords:
    return group_add(group, a, group_neg(group, b))


def character_eval(group: AbelianGroup, k: Sequence[int], a: Sequence[int]) -> complex:
    """chi_k(a) = prod_j exp(2*pi*i*k_j*a_j/d_j); always unit modulus."""
    k = group.element(k)
    a = group.element(a)
    phase = sum(kj * aj / d for kj, aj, d in zip(k, a, group.orders))
    return complex(np.exp(2j * np.pi * phase))


def character_table(group: AbelianGroup) -> np.ndarray:
    """Dense |G| x |G| table chi[k_index, a_index]; rows are orthogonal."""
    n = group.size
    coords = np.array([group.element_from_index(i) for i in range(n)])
    table = np.ones((n, n), dtype=complex)
    for axis, d in enumerate(group.orders):
        root = np.exp(2j * np.pi / d)
        table *= root ** np.outer(coords[:, axis], coords[:, axis])
    return table


def fourier_forward(group: AbelianGroup, values: Dict[Coords, complex] | np.ndarray) -> np.ndarray:
    """Fourier transform fhat(chi_k) = sum_a conj(chi_k(a)) f(a).

    ``values`` is either a dense array in flat-index order or a mapping that
    must cover every element of the group.
    """
    table = _as_flat_table(group, values)
    chars = character_table(group)
    return np.conj(chars) @ table


def fourier_inverse(group: AbelianGroup, fhat: np.ndarray) -> np.ndarray:
    """Inverse transform f(a) = (1/|G|) sum_k chi_k(a) fhat(chi_k)."""
    fhat = np.asarray(fhat, dtype=complex)
    if fhat.shape != (group.size,):
        raise ValidationError(f"expected {group.size} Fourier coefficients, got {fhat.shape}")
    chars = character_table(group)
    return (chars.T @ fhat) / group.size


def _as_flat_table(group: AbelianGroup, values) -> np.ndarray:
    if isinstance(values, dict):
        flat = np.zeros(group.size, dtype=complex)
        seen = 0
        for coords, v in values.items():
            flat[group.element_index(coords)] = v
            seen += 1
        if seen != group.size:
            raise ValidationError(
                f"function table covers {seen} of {group.size} group elements"
            )
        return flat
    flat = np.asarray(values, dtype=complex)
    if flat.shape != (group.size,):
        raise ValidationError(f"expected table of length {group.size}, got shape {flat.shape}")
    return flat


# ---------------------------------------------------------------------------
# finite fields
# ---------------------------------------------------------------------------


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    for q in range(2, int(math.isqrt(p)) + 1):
        if p % q == 0:
            return False
    return True


@dataclass(frozen=True)
class FiniteField:
    """GF(p^r) with a fixed monic irreducible modulus.

    ``modulus`` holds the r low-order coefficients (constant term first) of the
    degree-r modulus; it is unused for prime fields (r = 1).
    """

    p: int
    r: int
    modulus: Tuple[int, ...] = field(default=())

    @property
    def size(self) -> int:
        return self.p ** self.r

    @property
    def zero(self) -> Coords:
        return (0,) * self.r

    @property
    def one(self) -> Coords:
        return (1,) + (0,) * (self.r - 1)

    def additive_group(self) -> AbelianGroup:
        """(F_d, +) = Z_p^r; element coordinates are the polynomial coefficients."""
        return AbelianGroup((self.p,) * self.r)

    def element(self, coeffs: Sequence[int]) -> Coords:
        if len(coeffs) != self.r:
            raise ValidationError(f"field element needs {self.r} coefficients, got {len(coeffs)}")
        return tuple(int(c) % self.p for c in coeffs)

    def element_index(self, coeffs: Sequence[int]) -> int:
        return self.additive_group().element_index(self.element(coeffs))

    def element_from_index(self, idx: int) -> Coords:
        return self.additive_group().element_from_index(idx)

    def elements(self) -> Iterator[Coords]:
        return self.additive_group().elements()


def _poly_mod(coeffs, modulus_low, p, r):
    # reduce a coefficient list of length <= 2r-1 using X^r = -modulus_low
    work = list(coeffs) + [0] * max(0, 2 * r - 1 - len(coeffs))
    for k in range(len(work) - 1, r - 1, -1):
        c = work[k] % p
        work[k] = 0
        if c:
            for i in range(r):
                work[k - r + i] = (work[k - r + i] - c * modulus_low[i]) % p
    return tuple(v % p for v in work[:r])


def _poly_is_irreducible(modulus_low: Sequence[int], p: int, r: int) -> bool:
    """Exhaustive check: monic degree-r poly has no monic factor of degree <= r//2."""
    if modulus_low[0] == 0:  # divisible by X
        return False
    # feasible at p^r <= 1e4: try every monic divisor candidate of degree 1..r//2
    for deg in range(1, r // 2 + 1):
        for idx in range(p ** deg):
            cand = []
            t = idx
            for _ in range(deg):
                cand.append(t % p)
                t //= p
            cand.append(1)  # monic degree-deg candidate
            if _poly_divides(cand, list(modulus_low) + [1], p):
                return False
    return True


def _poly_divides(div, target, p):
    # synthetic long division of target by monic div over Z_p
    rem = [c % p for c in target]
    dd = len(div) - 1
    for shift in range(len(rem) - 1 - dd, -1, -1):
        lead = rem[shift + dd]
        if lead:
            for i, c in enumerate(div):
                rem[shift + i] = (rem[shift + i] - lead * c) % p
    return all(c == 0 for c in rem[:dd])


def field_make(p: int, r: int = 1) -> FiniteField:
    """Construct GF(p^r) with the deterministic smallest irreducible modulus.

    Candidate moduli X^r + sum_i c_i X^i are scanned in base-p counting order of
    the low coefficient tuple (c_0 least significant digit), so e.g. GF(8) gets
    X^3 + X + 1 and GF(4) gets X^2 + X + 1.
    """
    p = int(p)
    r = int(r)
    if not is_prime(p):
        raise ValidationError(f"field characteristic must be prime, got {p}")
    if r < 1:
        raise ValidationError(f"extension degree must be >= 1, got {r}")
    if p ** r > 10_000:
        raise ValidationError(f"field size {p}^{r} exceeds the supported 10^4")
    if r == 1:
        return FiniteField(p, 1, ())
    for idx in range(p ** r):
        low = []
        t = idx
        for _ in range(r):
            low.append(t % p)
            t //= p
        if _poly_is_irreducible(low, p, r):
            return FiniteField(p, r, tuple(low))
    raise ValidationError(f"no irreducible polynomial found for GF({p}^{r})")  # unreachable


def field_add(f: FiniteField, a: Sequence[int], b: Sequence[int]) -> Coords:
    a = f.element(a)
    b = f.element(b)
    return tuple((x + y) % f.p for x, y in zip(a, b))


def field_neg(f: FiniteField, a: Sequence[int]) -> Coords:
    return tuple((-x) % f.p for x in f.element(a))


def field_mul(f: FiniteField, a: Sequence[int], b: Sequence[int]) -> Coords:
    a = f.element(a)
    b = f.element(b)
    if f.r == 1:
        return ((a[0] * b[0]) % f.p,)
    prod = [0] * (2 * f.r - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % f.p
    return _poly_mod(prod, f.modulus, f.p, f.r)


def field_inv(f: FiniteField, a: Sequence[int]) -> Coords:
    """Multiplicative inverse; raises on the zero element."""
    a = f.element(a)
    if all(c == 0 for c in a):
        raise ZeroDivisionError("field_inv(0) is undefined")
    # |F*| = p^r - 1, so a^(p^r - 2) = a^-1; exponentiate by squaring
    result = f.one
    base = a
    e = f.size - 2
    while e:
        if e & 1:
            result = field_mul(f, result, base)
        base = field_mul(f, base, base)
        e >>= 1
    return result
