"""Sign / log-magnitude numbers for quantities like tau**(R n (5/2)**R).

Values are stored as a sign and a magnitude exponent in base tau, so
products and powers are exact additions and multiplications of exponents.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class LogScaled:
    sign: int
    log_tau: float
    tau: float = math.e

    def __post_init__(self):
        if self.tau <= 1:
            raise ValueError("base tau must exceed 1")
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or 1")
        if self.sign == 0 and self.log_tau != -math.inf:
            object.__setattr__(self, "log_tau", -math.inf)

    # construction
    @classmethod
    def from_value(cls, value: float, tau: float = math.e) -> "LogScaled":
        if isinstance(value, LogScaled):
            return value.rebase(tau)
        if value == 0:
            return cls(0, -math.inf, tau)
        return cls(1 if value > 0 else -1, math.log(abs(value)) / math.log(tau), tau)

    @classmethod
    def from_ln(cls, ln_mag: float, tau: float = math.e, sign: int = 1) -> "LogScaled":
        return cls(sign, ln_mag / math.log(tau), tau)

    @classmethod
    def power(cls, exponent: float, tau: float) -> "LogScaled":
        """tau ** exponent."""
        return cls(1, float(exponent), tau)

    # views
    @property
    def ln(self) -> float:
        return self.log_tau * math.log(self.tau)

    @property
    def log2(self) -> float:
        return self.ln / math.log(2)

    @property
    def log10(self) -> float:
        return self.ln / math.log(10)

    def rebase(self, tau: float) -> "LogScaled":
        if tau == self.tau:
            return self
        return LogScaled.from_ln(self.ln, tau, self.sign) if self.sign else LogScaled(0, -math.inf, tau)

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.ln)
        except OverflowError:
            return self.sign * math.inf

    def __float__(self):
        return self.to_float()

    # arithmetic
    def _coerce(self, other) -> "LogScaled":
        if isinstance(other, LogScaled):
            return other.rebase(self.tau)
        return LogScaled.from_value(other, self.tau)

    def __mul__(self, other):
        o = self._coerce(other)
        if self.sign == 0 or o.sign == 0:
            return LogScaled(0, -math.inf, self.tau)
        return LogScaled(self.sign * o.sign, self.log_tau + o.log_tau, self.tau)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.sign == 0:
            raise ZeroDivisionError("LogScaled division by zero")
        if self.sign == 0:
            return self
        return LogScaled(self.sign * o.sign, self.log_tau - o.log_tau, self.tau)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: float):
        if self.sign == 0:
            return self
        if self.sign < 0 and float(k) != int(k):
            raise ValueError("fractional power of a negative number")
        sign = 1 if self.sign > 0 or int(k) % 2 == 0 else -1
        return LogScaled(sign, self.log_tau * k, self.tau)

    def __neg__(self):
        return LogScaled(-self.sign, self.log_tau, self.tau)

    def __abs__(self):
        return LogScaled(abs(self.sign), self.log_tau, self.tau)

    def __add__(self, other):
        o = self._coerce(other)
        if o.sign == 0:
            return self
        if self.sign == 0:
            return o
        big, small = (self, o) if self.log_tau >= o.log_tau else (o, self)
        # work in natural units so log1p keeps full precision
        d = (small.log_tau - big.log_tau) * math.log(self.tau)
        if big.sign == small.sign:
            return LogScaled.from_ln(big.ln + math.log1p(math.exp(d)), self.tau, big.sign)
        if d == 0:
            return LogScaled(0, -math.inf, self.tau)
        return LogScaled.from_ln(big.ln + math.log1p(-math.exp(d)), self.tau, big.sign)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if self.sign != o.sign:
            return (self.sign > o.sign) - (self.sign < o.sign)
        if self.sign == 0:
            return 0
        # same nonzero sign: compare magnitudes, flipped for negatives
        mag = (self.ln > o.ln) - (self.ln < o.ln)
        return mag * self.sign

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def to_dict(self) -> dict:
        return {"sign": self.sign, "log_tau": self.log_tau, "ln": self.ln if self.sign else None,
                "tau": self.tau}

    def __repr__(self):
        if self.sign == 0:
            return "LogScaled(0)"
        s = "-" if self.sign < 0 else ""
        return f"LogScaled({s}{self.tau:g}**{self.log_tau:.6g})"


def as_logscaled(value, tau: float = math.e) -> LogScaled:
    return LogScaled.from_value(value, tau)
