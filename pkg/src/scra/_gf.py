"""Finite-field internals: GF(p^k) arithmetic, primitive moduli, discrete logs.

Only the integer-set construction layer uses this module. Elements of
GF(p^k) are little-endian coefficient tuples over GF(p); the modulus is the
lexicographically least monic degree-k polynomial making x a generator of
the multiplicative group, so every derived object is deterministic.

Discrete logs are computed by Pohlig-Hellman over the factorization of
p^k - 1, with a shared-table baby-step/giant-step solver that batches all
targets through numpy (multiplication by a fixed element is GF(p)-linear,
so giant steps for every target are one integer matrix product).
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import CapabilityError

# Deterministic Miller-Rabin base set: exact for n < 3.317e24, which covers
# every multiplicative group order admitted by the 2**127 size guard's
# practical use; larger inputs fall back to a strong probable-prime test.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_FACTOR_GUARD = 400_000  # Brent iterations per split attempt


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent_rho(n: int) -> int:
    """One nontrivial factor of composite odd n, deterministic parameters."""
    if n % 2 == 0:
        return 2
    for c in range(1, 64):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        count = 0
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
            count += r
            if count > _FACTOR_GUARD:
                break
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    raise CapabilityError(f"cannot factor {n}: beyond the desk-scale factoring guard")


def factorize(n: int) -> dict[int, int]:
    """Prime factorization as {prime: exponent}; guarded for desk scale."""
    out: dict[int, int] = {}
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        for p in (2, 3, 5, 7, 11, 13):
            if m % p == 0:
                out[p] = out.get(p, 0) + 1
                stack.append(m // p)
                break
        else:
            d = _brent_rho(m)
            stack.extend((d, m // d))
    return out


class ExtField:
    """GF(p^k), k >= 2, with x primitive. Elements are length-k int tuples."""

    def __init__(self, p: int, k: int, modulus_tail: tuple[int, ...]):
        self.p = p
        self.k = k
        self.modulus_tail = modulus_tail  # (c0..c_{k-1}) of f = x^k + sum c_j x^j
        self.order = p**k - 1
        self.one = (1,) + (0,) * (k - 1)
        self.zero = (0,) * k
        self.gen = (0, 1) + (0,) * (k - 2)  # the element x
        red0 = tuple((-c) % p for c in modulus_tail)
        rows = [red0]
        for _ in range(k - 2):
            prev = rows[-1]
            carry = prev[-1]
            rows.append(
                tuple(((prev[t - 1] if t else 0) + carry * red0[t]) % p for t in range(k))
            )
        self._red = rows  # rows[j] = x^(k+j) reduced
        self._red_np = np.array(rows, dtype=np.int64)

    # -- scalar arithmetic -------------------------------------------------

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def mul(self, a, b):
        p, k = self.p, self.k
        prod = [0] * (2 * k - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        red = self._red
        for j in range(2 * k - 2, k - 1, -1):
            c = prod[j] % p
            if c:
                rj = red[j - k]
                for t in range(k):
                    prod[t] += c * rj[t]
        return tuple(v % p for v in prod[:k])

    def pow(self, a, e: int):
        e %= self.order
        r = self.one
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def shifted_gen(self, c: int):
        """The element x + c."""
        return (c % self.p, 1) + (0,) * (self.k - 2)

    def mul_matrix(self, b) -> np.ndarray:
        """Rows j = coefficients of b * x^j, so that (A @ M) % p multiplies
        every row of A by the constant b."""
        rows = []
        cur = b
        for _ in range(self.k):
            rows.append(cur)
            cur = self.mul(cur, self.gen)
        return np.array(rows, dtype=np.int64)

    # -- batched arithmetic (rows of an (n, k) int64 array) -----------------

    def batch_mul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        p, k = self.p, self.k
        n = A.shape[0]
        acc = np.zeros((n, 2 * k - 1), dtype=np.int64)
        for i in range(k):
            acc[:, i : i + k] += A[:, i : i + 1] * B
        for j in range(2 * k - 2, k - 1, -1):
            c = acc[:, j] % p
            acc[:, :k] += c[:, None] * self._red_np[j - k]
        return acc[:, :k] % p

    def batch_mul_const(self, A: np.ndarray, b) -> np.ndarray:
        return (A @ self.mul_matrix(b)) % self.p

    def batch_pow(self, A: np.ndarray, e: int) -> np.ndarray:
        e %= self.order
        out = np.zeros_like(A)
        out[:, 0] = 1
        cur = A % self.p
        while e:
            if e & 1:
                out = self.batch_mul(out, cur)
            e >>= 1
            if e:
                cur = self.batch_mul(cur, cur)
        return out

    def power_chain(self, g, count: int) -> np.ndarray:
        """(count, k) array of g^0 .. g^(count-1), block-accelerated."""
        k = self.k
        block = min(2048, count)
        first = np.empty((block, k), dtype=np.int64)
        cur = self.one
        for i in range(block):
            first[i] = cur
            cur = self.mul(cur, g)
        chunks = [first]
        step_mat = self.mul_matrix(self.pow(g, block))
        total = block
        prev = first
        while total < count:
            nxt = (prev @ step_mat) % self.p
            chunks.append(nxt)
            total += len(nxt)
            prev = nxt
        return np.concatenate(chunks)[:count]

    def pack_rows(self, A: np.ndarray) -> list[int]:
        """Pack coefficient rows into single ints usable as dict keys."""
        bits = max(self.p - 1, 1).bit_length()
        lanes = A.astype(object)
        key = lanes[:, 0].copy()
        for j in range(1, self.k):
            key += lanes[:, j] << (bits * j)
        return key.tolist()


@lru_cache(maxsize=None)
def extension_field(p: int, k: int) -> ExtField:
    """GF(p^k) with the lexicographically least primitive modulus.

    Candidate tails (c0..c_{k-1}) are enumerated as base-p digits of an
    ascending counter; the first modulus under which x has full
    multiplicative order is kept (full order implies irreducibility).
    """
    if k < 2:
        raise CapabilityError("extension fields need k >= 2")
    order = p**k - 1
    if order >= 1 << 127:
        raise CapabilityError(f"field GF({p}^{k}) exceeds the 2**127 size guard")
    cofactors = [order // rho for rho in factorize(order)]
    for a in range(p**k):
        tail = []
        t = a
        for _ in range(k):
            tail.append(t % p)
            t //= p
        field = ExtField(p, k, tuple(tail))
        x = field.gen
        if field.pow(x, order) != field.one:
            continue
        if any(field.pow(x, cof) == field.one for cof in cofactors):
            continue
        return field
    raise CapabilityError(f"no primitive modulus found for GF({p}^{k})")


# -- discrete logarithms -------------------------------------------------


def _crt(residues: list[tuple[int, int]]) -> int:
    x, mod = 0, 1
    for r, m in residues:
        g = pow(mod, -1, m)
        x += mod * ((g * (r - x)) % m)
        mod *= m
    return x % mod


def _order_rho_dlogs(field: ExtField, gamma, Z: np.ndarray, rho: int) -> list[int]:
    """Dlogs base gamma (order rho, prime) of every row of Z, shared-table BSGS."""
    n = len(Z)
    m = min(rho, math.isqrt(rho * n) + 1, 1 << 22)
    baby = field.power_chain(gamma, m)
    table = {key: j for j, key in enumerate(field.pack_rows(baby))}
    giant_mat = field.mul_matrix(field.pow(gamma, rho - (m % rho)))
    out = [-1] * n
    cur = Z % field.p
    alive = np.arange(n)
    steps = (rho + m - 1) // m
    for i in range(steps + 1):
        keys = field.pack_rows(cur)
        hit = []
        for idx, key in enumerate(keys):
            j = table.get(key)
            if j is not None:
                out[alive[idx]] = (i * m + j) % rho
                hit.append(idx)
        if hit:
            keep = np.ones(len(alive), dtype=bool)
            keep[hit] = False
            alive = alive[keep]
            cur = cur[keep]
            if not len(alive):
                return out
        cur = (cur @ giant_mat) % field.p
    raise CapabilityError("giant-step search exhausted; generator order mismatch")


def batched_dlogs(field: ExtField, targets: list[tuple[int, ...]]) -> list[int]:
    """Discrete logs of `targets` to base x via Pohlig-Hellman, batched."""
    N = field.order
    n = len(targets)
    T = np.array(targets, dtype=np.int64)
    residues_per_target: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for rho, e in sorted(factorize(N).items()):
        pe = rho**e
        cof = N // pe
        g_sub = field.pow(field.gen, cof)
        gamma = field.pow(g_sub, rho ** (e - 1))  # order rho
        Y = field.batch_pow(T, cof)
        xs = [0] * n
        for t in range(e):
            # peel digit t: z_i = (y_i * g_sub^{-xs[i]}) ^ (rho^{e-1-t})
            if t == 0:
                Z = Y
            else:
                shift = np.array(
                    [field.pow(g_sub, pe - (x % pe)) for x in xs], dtype=np.int64
                )
                Z = field.batch_mul(Y, shift)
            Z = field.batch_pow(Z, rho ** (e - 1 - t))
            digits = _order_rho_dlogs(field, gamma, Z, rho)
            step = rho**t
            for i, d in enumerate(digits):
                xs[i] += d * step
        for i in range(n):
            residues_per_target[i].append((xs[i] % pe, pe))
    return [_crt(res) for res in residues_per_target]


def linear_shift_dlogs(field: ExtField, count: int) -> list[int]:
    """dlog base x of (x + c) for c = 0 .. count-1.

    Small groups are enumerated directly; larger ones go through the
    batched Pohlig-Hellman solver.
    """
    targets = [field.shifted_gen(c) for c in range(count)]
    if field.order <= 1 << 20:
        want = {t: c for c, t in enumerate(targets)}
        out = [-1] * count
        cur = field.one
        found = 0
        for a in range(1, field.order + 1):
            cur = field.mul(cur, field.gen)
            c = want.get(cur)
            if c is not None and out[c] < 0:
                out[c] = a
                found += 1
                if found == count:
                    break
        if found != count:
            raise CapabilityError("x is not primitive: enumeration missed targets")
        return out
    return batched_dlogs(field, targets)
