"""Number-theoretic kernels: CRT, modular square roots, Jacobi symbols,
Cornacchia, primality, powersmooth sampling and smooth-order discrete logs.

All randomized routines take an explicit seed (or a random.Random) and are
deterministic given it.  Big integers are plain Python ints throughout.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from math import gcd, isqrt, prod


class SearchBudgetExceeded(RuntimeError):
    """A randomized search ran out of its configured retry budget."""


# ---------------------------------------------------------------------------
# primality


_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61)

# Miller-Rabin with these bases is deterministic for n < 3.3 * 10^24.
_MR_DETERMINISTIC_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_DETERMINISTIC_LIMIT = 3317044064679887385961981
_MR_ROUNDS_LARGE = 40  # error < 4^-40 = 2^-80


def _miller_rabin(n: int, base: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(base % n, d, n)
    if x in (0, 1, n - 1):
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_probable_prime(n: int) -> bool:
    """Primality test: deterministic below 2^64, error < 2^-80 above."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n < _MR_DETERMINISTIC_LIMIT:
        bases = _MR_DETERMINISTIC_BASES
    else:
        # bases derived deterministically from n itself
        rng = random.Random(n)
        bases = tuple(rng.randrange(2, n - 1) for _ in range(_MR_ROUNDS_LARGE))
    return all(_miller_rabin(n, b) for b in bases)


_prime_cache: list[int] = []
_prime_cache_limit = 0


def primes_upto(limit: int) -> list[int]:
    """All primes <= limit, cached (shared sieve, grown geometrically)."""
    global _prime_cache, _prime_cache_limit
    if limit > _prime_cache_limit:
        new_limit = max(limit, 2 * _prime_cache_limit, 1 << 10)
        sieve = bytearray([1]) * (new_limit + 1)
        sieve[0:2] = b"\x00\x00"
        for p in range(2, isqrt(new_limit) + 1):
            if sieve[p]:
                sieve[p * p :: p] = bytearray(len(range(p * p, new_limit + 1, p)))
        _prime_cache = [i for i in range(new_limit + 1) if sieve[i]]
        _prime_cache_limit = new_limit
    if limit == _prime_cache_limit:
        return list(_prime_cache)
    import bisect

    return _prime_cache[: bisect.bisect_right(_prime_cache, limit)]


# ---------------------------------------------------------------------------
# factorizations


@dataclass(frozen=True)
class Factorization:
    """A fully factored positive integer, stored as ((prime, exponent), ...).

    Primes are strictly increasing and each passes is_probable_prime; the
    represented integer is the product of the prime powers.
    """

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        last = 1
        for p, e in self.pairs:
            if p <= last:
                raise ValueError("primes must be strictly increasing")
            if e < 1:
                raise ValueError("exponents must be positive")
            if not is_probable_prime(p):
                raise ValueError(f"{p} is not prime")
            last = p

    @property
    def value(self) -> int:
        return prod(p**e for p, e in self.pairs)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def valuation(self, p: int) -> int:
        for q, e in self.pairs:
            if q == p:
                return e
        return 0

    @classmethod
    def of(cls, n: int, hint_primes=()) -> "Factorization":
        """Factor n by trial division (plus optional hint primes).

        Intended for smooth or small n; raises if a cofactor cannot be
        resolved (general-purpose factoring is out of scope).
        """
        if n < 1:
            raise ValueError("need n >= 1")
        pairs = {}
        for p in sorted(set(hint_primes)):
            while n % p == 0:
                pairs[p] = pairs.get(p, 0) + 1
                n //= p
        for p in primes_upto(1 << 16):
            if p * p > n:
                break
            while n % p == 0:
                pairs[p] = pairs.get(p, 0) + 1
                n //= p
        if n > 1:
            if not is_probable_prime(n):
                raise ValueError(f"cofactor {n} is not prime; cannot factor")
            pairs[n] = pairs.get(n, 0) + 1
        return cls(tuple(sorted(pairs.items())))

    def to_json(self) -> list[list[str]]:
        return [[str(p), str(e)] for p, e in self.pairs]

    @classmethod
    def from_json(cls, data) -> "Factorization":
        return cls(tuple((int(p), int(e)) for p, e in data))

    def __str__(self):
        return " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.pairs) or "1"


@dataclass(frozen=True)
class PowersmoothCert:
    """Certificate that `value` is powersmooth for `bound`: every prime power
    l^e in the factorization satisfies l^e <= bound."""

    value: int
    bound: int
    factorization: Factorization

    def __post_init__(self):
        if self.factorization.value != self.value:
            raise ValueError("factorization does not multiply out to value")
        for p, e in self.factorization:
            if p**e > self.bound:
                raise ValueError(f"prime power {p}^{e} exceeds bound {self.bound}")

    def to_json(self):
        return {
            "value": str(self.value),
            "bound": str(self.bound),
            "factors": self.factorization.to_json(),
        }

    @classmethod
    def from_json(cls, data):
        return cls(int(data["value"]), int(data["bound"]), Factorization.from_json(data["factors"]))


def merge_certs(a: PowersmoothCert, b: PowersmoothCert) -> PowersmoothCert:
    """Certificate for a.value * b.value (bound = max of the two bounds)."""
    pairs = dict(a.factorization.pairs)
    for p, e in b.factorization:
        pairs[p] = pairs.get(p, 0) + e
    bound = max(a.bound, b.bound)
    return PowersmoothCert(a.value * b.value, bound, Factorization(tuple(sorted(pairs.items()))))


# ---------------------------------------------------------------------------
# CRT / Jacobi / square roots


def crt_combine(residues) -> int:
    """Combine residues [(value, modulus), ...] with pairwise coprime moduli."""
    if not residues:
        raise ValueError("need at least one residue")
    x, m = residues[0]
    x %= m
    for v, n in residues[1:]:
        if gcd(m, n) != 1:
            raise ValueError(f"moduli {m} and {n} are not coprime")
        # x + m*t = v mod n
        t = (v - x) * pow(m, -1, n) % n
        x += m * t
        m *= n
    return x % m


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n (Legendre symbol for prime n)."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("n must be odd and positive")
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


def sqrt_mod_prime(a: int, p: int) -> int | None:
    """Tonelli-Shanks: r with r^2 = a mod p, or None. p prime."""
    a %= p
    if a == 0:
        return 0
    if p == 2:
        return a
    if jacobi(a, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # find a quadratic non-residue
    z = 2
    while jacobi(z, p) != -1:
        z += 1
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        r, c, t, m = r * b % p, b * b % p, t * b * b % p, i
    return r


def _hensel_sqrt(a: int, p: int, e: int) -> int | None:
    """Square root of a unit a modulo odd p^e, lifted from mod p."""
    r = sqrt_mod_prime(a, p)
    if r is None:
        return None
    pk = p
    while pk < p**e:
        pk_next = min(pk * pk, p**e)
        # Newton step: r <- (r + a/r) / 2 mod pk_next
        r = (r + a * pow(r, -1, pk_next)) * pow(2, -1, pk_next) % pk_next
        pk = pk_next
    return r % p**e


def sqrt_mod_prime_power(a: int, p: int, e: int) -> int | None:
    """Square root mod odd p^e, allowing p | a (valuation must be even)."""
    pe = p**e
    a %= pe
    if a == 0:
        return 0
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    if v % 2:
        return None
    r = _hensel_sqrt(a, p, e - v)
    if r is None:
        return None
    return r * p ** (v // 2) % pe


def mod_sqrt(a: int, m: Factorization) -> int | None:
    """r with r^2 = a mod m for odd m with gcd(a, m) = 1, or None.

    Per-prime Tonelli-Shanks, Hensel lifting to prime powers, CRT.
    """
    n = m.value
    if n % 2 == 0:
        raise ValueError("modulus must be odd")
    if gcd(a, n) != 1:
        raise ValueError("a must be a unit modulo m")
    parts = []
    for p, e in m:
        r = _hensel_sqrt(a % p**e, p, e)
        if r is None:
            return None
        parts.append((r, p**e))
    return crt_combine(parts)


def is_square_mod(a: int, m: Factorization) -> bool:
    """Is a a square modulo odd m?  Valuation-aware at primes dividing a."""
    for p, e in m:
        if p == 2:
            raise ValueError("even modulus not supported")
        pe = p**e
        r = a % pe
        if r == 0:
            continue  # 0 = (p^ceil(e/2))^2
        v = 0
        while r % p == 0:
            r //= p
            v += 1
        if v % 2 or jacobi(r, p) != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# Cornacchia


def cornacchia(q: int, m: int) -> tuple[int, int] | None:
    """Solve x^2 + q*y^2 = m, or None.

    The no-solution answer is authoritative only for prime m, which is what
    every caller passes; for composite m a None may be a false negative.
    """
    if m <= 0 or q <= 0:
        raise ValueError("need positive form and target")
    if m == 1:
        return (1, 0)
    if q >= m:
        # only y = 0 (and y=1 when q == m) can work
        x = isqrt(m)
        if x * x == m:
            return (x, 0)
        if q == m:
            return (0, 1)
        return None
    a = m % q
    # r0^2 = -q mod m
    r = sqrt_mod_prime(-q % m, m) if is_probable_prime(m) else _sqrt_mod_any(-q % m, m)
    if r is None:
        return None
    for r0 in {r, m - r}:
        a, b = m, r0
        while b * b >= m:
            a, b = b, a % b
        rem = m - b * b
        if rem % q == 0:
            y = isqrt(rem // q)
            if y * y * q == rem:
                return (b, y)
    return None


def _sqrt_mod_any(a: int, m: int) -> int | None:
    """Best-effort sqrt mod possibly-composite m (for non-prime Cornacchia targets)."""
    try:
        f = Factorization.of(m)
    except ValueError:
        return None
    if m % 2:
        try:
            return mod_sqrt(a, f) if gcd(a, m) == 1 else None
        except ValueError:
            return None
    return next((r for r in range(m) if r * r % m == a % m), None) if m < (1 << 20) else None


# ---------------------------------------------------------------------------
# powersmooth sampling


def _powersmooth_pool(bound: int, coprime_to, square: bool) -> list[tuple[int, int]]:
    """Candidate (prime, max_exponent) pairs for the sampler."""
    pool = []
    top = isqrt(bound) if square else bound
    for p in primes_upto(top):
        if any(c % p == 0 for c in coprime_to if c):
            continue
        e = 1
        while p ** (e + 1) <= top:
            e += 1
        pool.append((p, e))
    return pool


def sample_powersmooth(
    bound: int,
    lower: int,
    coprime_to=(),
    qr_targets=(),
    square: bool = False,
    seed=0,
    budget: int = 10_000,
) -> PowersmoothCert:
    """Random B-powersmooth integer >= lower under the given constraints.

    Constraints: coprime to everything in `coprime_to`; jacobi(value, l) = eps
    for each (l, eps) in qr_targets; all exponents even when `square` is set
    (prime powers of the squared value still respect `bound`).  Deterministic
    given `seed`; raises SearchBudgetExceeded when the pool cannot satisfy
    the constraints within `budget` attempts.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    coprime_to = [abs(c) for c in coprime_to]
    pool = _powersmooth_pool(bound, coprime_to, square)
    cap = prod(p**e for p, e in pool) ** (2 if square else 1)
    if not pool or cap < lower:
        raise SearchBudgetExceeded(
            f"not enough primes <= {bound} outside the coprimality set to reach {lower}"
        )
    for _ in range(budget):
        value, pairs = 1, {}
        order = rng.sample(range(len(pool)), len(pool))
        for idx in order:
            if value >= lower:
                break
            p, emax = pool[idx]
            e = rng.randint(1, emax)
            step = 2 * e if square else e
            pairs[p] = step
            value *= p**step
        if value < lower:
            continue
        if any(jacobi(value, l) != eps for l, eps in qr_targets):
            continue
        cert = PowersmoothCert(value, bound, Factorization(tuple(sorted(pairs.items()))))
        return cert
    raise SearchBudgetExceeded(
        f"no {bound}-powersmooth value >= {lower} found in {budget} attempts"
    )


# ---------------------------------------------------------------------------
# discrete logs (Pohlig-Hellman + BSGS)


def _bsgs(g: int, h: int, m: int, order: int) -> int | None:
    """x in [0, order) with g^x = h mod m, for g of the given order."""
    if order <= 64:
        x, acc = 0, 1
        while x < order:
            if acc == h:
                return x
            acc = acc * g % m
            x += 1
        return None
    step = isqrt(order) + 1
    table = {}
    acc = 1
    for j in range(step):
        table.setdefault(acc, j)
        acc = acc * g % m
    giant = pow(g, -step, m)
    acc = h
    for i in range(step + 1):
        if acc in table:
            return (i * step + table[acc]) % order
        acc = acc * giant % m
    return None


def element_order(g: int, m: int, order_mult: Factorization) -> int:
    """Exact multiplicative order of g mod m, given a factored multiple."""
    order = order_mult.value
    if pow(g, order, m) != 1:
        raise ValueError("order_mult is not a multiple of ord(g)")
    for p, e in order_mult:
        for _ in range(e):
            if pow(g, order // p, m) == 1:
                order //= p
            else:
                break
    return order


def dlog_smooth(g: int, h: int, m: int, order_mult: Factorization) -> int | None:
    """e with g^e = h mod m, or None when h is outside <g>.

    Pohlig-Hellman over the factored (multiple of the) order of g, with
    baby-step giant-step inside each prime-order subgroup.
    """
    g, h = g % m, h % m
    if h == 1:
        return 0
    order = element_order(g, m, order_mult)
    if pow(h, order, m) != 1:
        return None
    residues = []
    for p, _ in Factorization.of(order):
        pe = 1
        while order % (pe * p) == 0:
            pe *= p
        gp = pow(g, order // pe, m)
        hp = pow(h, order // pe, m)
        # digits of x mod p^e, base p
        x, gamma = 0, pow(gp, pe // p, m)  # gamma has order p
        for k in range(pe.bit_length()):  # at most e digits
            if p**k >= pe:
                break
            exp = pe // p ** (k + 1)
            target = pow(hp * pow(gp, -x, m) % m, exp, m)
            d = _bsgs(gamma, target, m, p)
            if d is None:
                return None
            x += d * p**k
        residues.append((x, pe))
    e = crt_combine(residues)
    return e if pow(g, e, m) == h else None


# ---------------------------------------------------------------------------
# misc helpers used across modules


def inverse_mod(a: int, m: int) -> int:
    return pow(a, -1, m)


def centered(a: int, m: int) -> int:
    """Representative of a mod m in (-m/2, m/2]."""
    a %= m
    return a - m if 2 * a > m else a


if __name__ == "__main__":  # pragma: no cover
    print(json.dumps(sample_powersmooth(16, 100, coprime_to=[11], seed=1).to_json()))
