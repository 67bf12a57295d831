"""Matrix group machinery behind the algebraic periodicity criterion.

The three generator matrices are

    T = [[0,-1],[1,0]],   A = [[1,4],[0,1]],   B = [[5,-8],[2,-3]],

written T here (Theta).  Words over {T, A, B} evaluate to SL(2,Z) matrices;
the homology representation sends T to the identity, A to [[1,1],[0,1]] and
B to [[3,-1],[4,-1]], all modulo global sign.  A word lies in the
periodicity group exactly when its image under the representation is upper
unipotent modulo sign, and a primitive direction (p, q) is periodic exactly
when some such word has first column +-(p, q).

Continued fractions whose partial quotients are multiples of four live here
as well: convergents, the explicit witness words for their slopes, the
sharpened Hurwitz bound with rigorous rational tail enclosures, and the
recurrence trichotomy for eventually periodic coefficient sequences.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Optional, Sequence

Mat2 = tuple[int, int, int, int]  # row-major (a, b, c, d)

IDENTITY: Mat2 = (1, 0, 0, 1)
THETA: Mat2 = (0, -1, 1, 0)
A_MAT: Mat2 = (1, 4, 0, 1)
B_MAT: Mat2 = (5, -8, 2, -3)

RHO = {"T": IDENTITY, "A": (1, 1, 0, 1), "B": (3, -1, 4, -1)}
GENS = {"T": THETA, "A": A_MAT, "B": B_MAT}


def mat_mul(m: Mat2, n: Mat2) -> Mat2:
    a, b, c, d = m
    e, f, g, h = n
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def mat_inv(m: Mat2) -> Mat2:
    a, b, c, d = m
    if a * d - b * c != 1:
        raise ValueError("only determinant-one matrices are invertible here")
    return (d, -b, -c, a)


def mat_pow(m: Mat2, n: int) -> Mat2:
    if n < 0:
        return mat_pow(mat_inv(m), -n)
    out = IDENTITY
    base = m
    while n:
        if n & 1:
            out = mat_mul(out, base)
        base = mat_mul(base, base)
        n >>= 1
    return out


def mat_neg(m: Mat2) -> Mat2:
    return tuple(-v for v in m)  # type: ignore[return-value]


def proj_canonical(m: Mat2) -> Mat2:
    """Representative of {m, -m} with positive first nonzero entry."""
    for v in m:
        if v > 0:
            return m
        if v < 0:
            return mat_neg(m)
    raise ValueError("zero matrix")


def proj_equal(m: Mat2, n: Mat2) -> bool:
    return m == n or m == mat_neg(n)


@dataclass(frozen=True)
class GroupWord:
    """A freely reduced word over {T, A, B} with integer exponents."""

    letters: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        for letter, exp in self.letters:
            if letter not in GENS:
                raise ValueError(f"unknown letter {letter!r}")
            if exp == 0:
                raise ValueError("zero exponents are not reduced")
        for (l1, _), (l2, _) in zip(self.letters, self.letters[1:]):
            if l1 == l2:
                raise ValueError("adjacent equal letters are not reduced")

    @classmethod
    def of(cls, *parts: tuple[str, int]) -> "GroupWord":
        return cls(_reduce(parts))

    @classmethod
    def from_gens(cls, gens: Iterable[str]) -> "GroupWord":
        parts = []
        for g in gens:
            exp = -1 if g.islower() else 1
            parts.append((g.upper(), exp))
        return cls(_reduce(parts))

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        return GroupWord(_reduce(self.letters + other.letters))

    def inverse(self) -> "GroupWord":
        return GroupWord(tuple((l, -e) for l, e in reversed(self.letters)))

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        out = []
        for letter, exp in self.letters:
            out.append(letter if exp == 1 else f"{letter}^{exp}")
        return " ".join(out)

    @classmethod
    def parse(cls, text: str) -> "GroupWord":
        text = text.strip()
        if text in ("", "e", "1"):
            return cls()
        parts = []
        for tok in text.split():
            if "^" in tok:
                letter, exp = tok.split("^")
                parts.append((letter, int(exp)))
            else:
                parts.append((tok, 1))
        return cls(_reduce(parts))


def _reduce(parts: Sequence[tuple[str, int]]) -> tuple[tuple[str, int], ...]:
    out: list[tuple[str, int]] = []
    for letter, exp in parts:
        if exp == 0:
            continue
        if out and out[-1][0] == letter:
            merged = out[-1][1] + exp
            out.pop()
            if merged:
                out.append((letter, merged))
        else:
            out.append((letter, exp))
    return tuple(out)


def eval_word(w: GroupWord) -> Mat2:
    m = IDENTITY
    for letter, exp in w.letters:
        m = mat_mul(m, mat_pow(GENS[letter], exp))
    return m


def rho(w: GroupWord) -> Mat2:
    """Homology representation of a word, reduced modulo global sign."""
    m = IDENTITY
    for letter, exp in w.letters:
        m = mat_mul(m, mat_pow(RHO[letter], exp))
    return proj_canonical(m)


def is_upper_unipotent(m: Mat2) -> bool:
    a, b, c, d = m
    return c == 0 and abs(a) == 1 and a == d


def is_in_gamma(w: GroupWord) -> bool:
    """Membership in the periodicity group: the representation image must be
    upper unipotent modulo sign."""
    return is_upper_unipotent(rho(w))


# ---------------------------------------------------------------------------
# Witness search
# ---------------------------------------------------------------------------

_BFS_GENS: tuple[tuple[str, int, Mat2, Mat2], ...] = tuple(
    (letter, exp, mat_pow(GENS[letter], exp), mat_pow(RHO[letter], exp))
    for letter in ("A", "T", "B")
    for exp in (1, -1)
)


def _column_matches(m: Mat2, p: int, q: int) -> bool:
    return (m[0], m[2]) in ((p, q), (-p, -q))


def find_witness(d, max_depth: int = 14, entry_cap: Optional[int] = None) -> Optional[GroupWord]:
    """Breadth-first search for a periodicity witness word for (p, q).

    Searches right multiplications by the six generator letters, deduplicating
    on the matrix modulo sign and aborting branches whose entries exceed the
    cap (default 16 * max(|p|, |q|)).  Returns the witness word, whose matrix
    has first column +-(p, q) and whose representation image is upper
    unipotent, or None when no word exists within the depth (inconclusive).
    """
    p, q = (d.p, d.q) if hasattr(d, "p") else d
    if gcd(abs(p), abs(q)) != 1:
        raise ValueError("direction must be primitive")
    cap = entry_cap if entry_cap is not None else 16 * max(abs(p), abs(q), 1)

    start = proj_canonical(IDENTITY)
    if _column_matches(start, p, q):
        return GroupWord()
    visited: dict[Mat2, tuple[Optional[Mat2], int, Mat2]] = {
        start: (None, -1, IDENTITY)
    }
    frontier = deque([(start, IDENTITY, 0)])
    while frontier:
        m_canon, rho_m, depth = frontier.popleft()
        if depth >= max_depth:
            continue
        for gidx, (letter, exp, gmat, grho) in enumerate(_BFS_GENS):
            nxt = mat_mul(m_canon, gmat)
            if max(abs(v) for v in nxt) > cap:
                continue
            nxt_c = proj_canonical(nxt)
            if nxt_c in visited:
                continue
            nrho = mat_mul(rho_m, grho)
            visited[nxt_c] = (m_canon, gidx, nrho)
            if _column_matches(nxt_c, p, q) and is_upper_unipotent(proj_canonical(nrho)):
                return _reconstruct(visited, nxt_c)
            frontier.append((nxt_c, nrho, depth + 1))
    return None


def _reconstruct(visited, key) -> GroupWord:
    parts = []
    while True:
        parent, gidx, _ = visited[key]
        if parent is None:
            break
        letter, exp, _, _ = _BFS_GENS[gidx]
        parts.append((letter, exp))
        key = parent
    return GroupWord(_reduce(tuple(reversed(parts))))


def witness_table(max_norm: int, max_depth: int, entry_cap: Optional[int] = None):
    """One shared BFS answering all witness queries with max(|p|,|q|) bounded.

    Returns a dict mapping the sign-normalized first column (p, q) of every
    reachable word with upper-unipotent representation image to a shortest
    witness word.
    """
    cap = entry_cap if entry_cap is not None else 16 * max_norm
    start = proj_canonical(IDENTITY)
    visited: dict[Mat2, tuple[Optional[Mat2], int, Mat2]] = {
        start: (None, -1, IDENTITY)
    }
    table: dict[tuple[int, int], GroupWord] = {}

    def try_record(m: Mat2, rho_m: Mat2):
        if not is_upper_unipotent(proj_canonical(rho_m)):
            return
        col = (m[0], m[2])
        if col[0] < 0 or (col[0] == 0 and col[1] < 0):
            col = (-col[0], -col[1])
        if max(abs(col[0]), abs(col[1])) <= max_norm and col not in table:
            table[col] = _reconstruct(visited, m)

    try_record(start, IDENTITY)
    frontier = deque([(start, IDENTITY, 0)])
    while frontier:
        m_canon, rho_m, depth = frontier.popleft()
        if depth >= max_depth:
            continue
        for gidx, (letter, exp, gmat, grho) in enumerate(_BFS_GENS):
            nxt = mat_mul(m_canon, gmat)
            if max(abs(v) for v in nxt) > cap:
                continue
            nxt_c = proj_canonical(nxt)
            if nxt_c in visited:
                continue
            nrho = mat_mul(rho_m, grho)
            visited[nxt_c] = (m_canon, gidx, nrho)
            try_record(nxt_c, nrho)
            frontier.append((nxt_c, nrho, depth + 1))
    return table


# ---------------------------------------------------------------------------
# Continued fractions with partial quotients in 4Z
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContinuedFraction:
    """[a0; a1, a2, ...] with an optional eventually repeating block.

    ``quotients(n)`` yields the first n+1 partial quotients; for a finite
    fraction the period is empty.
    """

    a0: int
    tail: tuple[int, ...] = ()
    period: tuple[int, ...] = ()

    def __post_init__(self):
        if any(v == 0 for v in self.tail) or any(v == 0 for v in self.period):
            raise ValueError("partial quotients beyond a0 must be nonzero")

    @classmethod
    def fourey(cls, coeffs: Sequence[int], period: Sequence[int] = ()) -> "ContinuedFraction":
        coeffs = list(coeffs)
        return cls(4 * coeffs[0], tuple(4 * c for c in coeffs[1:]),
                   tuple(4 * c for c in period))

    @property
    def finite(self) -> bool:
        return not self.period

    def quotients(self, n: int) -> list[int]:
        out = [self.a0] + list(self.tail)
        while len(out) <= n:
            if not self.period:
                break
            need = n + 1 - len(out)
            out.extend(self.period[:need])
        return out[: n + 1]

    def depth(self) -> int:
        if not self.finite:
            raise ValueError("infinite continued fraction")
        return len(self.tail)

    def value(self) -> Fraction:
        if not self.finite:
            raise ValueError("infinite continued fraction")
        val = Fraction(self.quotients(self.depth())[-1])
        for a in reversed(self.quotients(self.depth())[:-1]):
            val = a + 1 / val
        return val

    def fourey_coefficients(self) -> tuple[list[int], list[int]]:
        """The (prefix, period) with the factor four divided out."""
        for v in (self.a0, *self.tail, *self.period):
            if v % 4:
                raise ValueError("not a continued fraction over multiples of four")
        return (
            [self.a0 // 4] + [v // 4 for v in self.tail],
            [v // 4 for v in self.period],
        )


def convergents(cf: ContinuedFraction, depth: int) -> list[tuple[int, int]]:
    """(p_n, q_n) for n = 0..depth, checking the alternating identity
    p_{n-1} q_n - p_n q_{n-1} = (-1)^n at every step."""
    qs = cf.quotients(depth)
    if len(qs) <= depth and cf.finite:
        raise ValueError("depth exceeds the available partial quotients")
    p_prev, q_prev = 1, 0
    p_cur, q_cur = qs[0], 1
    out = [(p_cur, q_cur)]
    for n in range(1, len(qs)):
        a = qs[n]
        p_nxt = a * p_cur + p_prev
        q_nxt = a * q_cur + q_prev
        p_prev, q_prev, p_cur, q_cur = p_cur, q_cur, p_nxt, q_nxt
        if p_prev * q_cur - p_cur * q_prev != (-1) ** n:
            raise ArithmeticError("convergent identity failed")
        out.append((p_cur, q_cur))
    return out


def fourey_word(coeffs: Sequence[int]) -> GroupWord:
    """The explicit witness word for the slope [4a0; 4a1, ..., 4an].

    Its matrix has the slope's denominator and numerator as first column up
    to sign, and its representation image is upper unipotent.
    """
    coeffs = list(coeffs)
    if any(c == 0 for c in coeffs[1:]):
        raise ValueError("coefficients beyond the first must be nonzero")
    parts: list[tuple[str, int]] = [("T", 1)]
    for i, a in enumerate(coeffs):
        exp = -a if i % 2 == 0 else a
        parts.append(("A", exp))
        parts.append(("T", 1))
    return GroupWord(_reduce(parts))


def fourey_direction(coeffs: Sequence[int]) -> tuple[int, int]:
    """The primitive direction whose slope is the given finite fraction."""
    cf = ContinuedFraction.fourey(coeffs)
    value = cf.value()
    return (value.denominator, value.numerator)


# ---------------------------------------------------------------------------
# Sharpened Hurwitz bound with rigorous tail enclosures
# ---------------------------------------------------------------------------

def _cf_interval(quotients: Sequence[int]) -> tuple[Fraction, Fraction]:
    """Rational enclosure of [0; c1, c2, ...] given finitely many quotients
    |c_i| >= 4; the unknown tail contributes an interval within [-1/3, 1/3]."""
    lo, hi = Fraction(-1, 3), Fraction(1, 3)
    for c in reversed(quotients):
        d_lo, d_hi = c + lo, c + hi
        if d_lo <= 0 <= d_hi:
            raise ArithmeticError("tail interval crossed zero")
        lo, hi = sorted((1 / d_lo, 1 / d_hi))
    return lo, hi


def hurwitz_check(coeffs: Sequence[int], k: int, depth: int) -> bool:
    """Verify |q_n xi - p_n| < 1 / (2 sqrt(4k^2-1) |q_n|) for all n <= depth.

    ``coeffs`` are the a_i of xi = [0; 4a_1, 4a_2, ...] with |a_i| >= k; at
    least depth + 40 of them must be supplied so the tail enclosure of xi is
    tight.  Entirely rational arithmetic: the bound is squared and compared
    exactly against the enclosure's worst case.
    """
    coeffs = list(coeffs)
    if k < 1:
        raise ValueError("k must be at least 1")
    if any(abs(a) < k or a == 0 for a in coeffs):
        raise ValueError("all coefficients must satisfy |a_i| >= k >= 1")
    if len(coeffs) < depth + 40:
        raise ValueError("need at least depth + 40 coefficients for the tail")

    quotients = [4 * a for a in coeffs]
    lo, hi = _cf_interval(quotients)

    p_prev, q_prev = 1, 0
    p_cur, q_cur = 0, 1  # [0; ...]
    bound_factor = 4 * (4 * k * k - 1)  # (2 sqrt(4k^2-1))^2
    for n in range(1, depth + 1):
        a = quotients[n - 1]
        p_prev, q_prev, p_cur, q_cur = (
            p_cur, q_cur, a * p_cur + p_prev, a * q_cur + q_prev,
        )
        err_lo = q_cur * lo - p_cur
        err_hi = q_cur * hi - p_cur
        worst = max(abs(err_lo), abs(err_hi))
        if worst * worst * bound_factor * q_cur * q_cur >= 1:
            return False
    return True


# ---------------------------------------------------------------------------
# Recurrence classification for eventually periodic coefficient sequences
# ---------------------------------------------------------------------------

PERIODIC_SLOPE = "periodic_slope"
RECURRENT_FROM_CONE_POINTS = "recurrent_from_cone_points"
RECURRENT_ALL = "recurrent_all"
INCONCLUSIVE = "inconclusive"


def recurrence_classify(cf: ContinuedFraction) -> str:
    """Classify the slope of a fraction over multiples of four.

    Finite fractions are periodic slopes.  For an eventually periodic
    sequence (a_n): if liminf a_n > 0 and limsup a_n > 1, or liminf |a_n| > 1
    and lim a_n a_{n+1} != -4, every trajectory of that slope is recurrent;
    otherwise if lim a_n a_{n+1} != -1 the trajectories from cone points are
    recurrent; otherwise nothing is concluded here.
    """
    if cf.finite:
        return PERIODIC_SLOPE
    prefix, period = cf.fourey_coefficients()
    cycle = list(period)
    # Consecutive products over the eventual cycle, including the wrap.
    products = [cycle[i] * cycle[(i + 1) % len(cycle)] for i in range(len(cycle))]
    lim_inf = min(cycle)
    lim_sup = max(cycle)
    lim_inf_abs = min(abs(v) for v in cycle)

    def lim_products_is(value: int) -> bool:
        return all(pr == value for pr in products)

    if (lim_inf > 0 and lim_sup > 1) or (lim_inf_abs > 1 and not lim_products_is(-4)):
        return RECURRENT_ALL
    if not lim_products_is(-1):
        return RECURRENT_FROM_CONE_POINTS
    return INCONCLUSIVE
