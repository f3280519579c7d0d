"""Exact rational arithmetic helpers.

gmpy2.mpq is used when available (roughly an order of magnitude faster than
fractions.Fraction on the dense scans this library runs); both types compare,
hash, and mix arithmetically as equal numbers, so callers never need to care
which one they get.
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as _mpq

    def rat(numerator: int | str = 0, denominator: int = 1):
        return _mpq(numerator, denominator)

except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    def rat(numerator: int | str = 0, denominator: int = 1):
        return Fraction(numerator, denominator)

#: exact zero/one in the active rational type
ZERO = rat(0)
ONE = rat(1)

Rational = object  # duck-typed: anything with .numerator/.denominator


def as_fraction(x) -> Fraction:
    """Normalize any exact rational (mpq, Fraction, int) to Fraction."""
    if isinstance(x, Fraction):
        return x
    return Fraction(int(x.numerator), int(x.denominator)) if not isinstance(x, int) else Fraction(x)


def parse_rational(text: str):
    """Parse "p/q" or a bare integer. Decimal notation is rejected."""
    text = text.strip()
    if "/" in text:
        num, _, den = text.partition("/")
        num, den = num.strip(), den.strip()
        if not _is_int(num) or not _is_int(den):
            raise ValueError(f"malformed rational {text!r}: expected p/q with integer p, q")
        if int(den) == 0:
            raise ValueError(f"malformed rational {text!r}: zero denominator")
        return rat(int(num), int(den))
    if not _is_int(text):
        raise ValueError(f"malformed rational {text!r}: expected p/q or an integer")
    return rat(int(text))


def format_rational(x) -> str:
    """Canonical "p/q" form; integers printed without a denominator."""
    num, den = int(x.numerator), int(x.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def _is_int(s: str) -> bool:
    if s.startswith(("-", "+")):
        s = s[1:]
    return s.isdigit() and s != ""
