"""Weight sequences in the log domain and their convex regularization.

A weight sequence (M_n) with M_0 = 1 is stored as L_n = log M_n.  All
arithmetic stays in the log domain: the catalog families grow like n^n and
would overflow doubles near n = 140 if materialized.  The convex
regularization is the lower convex hull of the points (n, L_n), computed by a
single monotone-chain scan; the principal index set is every n where the hull
touches the input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ValidationError

# Log-domain tolerance for convexity checks.
TOL_CONVEX = 1e-9

# Relative tolerance used to decide hull/input equality (principal indices).
_EQ_RTOL = 1e-12

FAMILIES = ("explicit", "factorial", "power_nn", "gevrey", "denjoy1", "denjoy2")


@dataclass(frozen=True)
class LogSequence:
    """A finite positive weight sequence, stored as log values.

    ``logs[n]`` is log M_n.  The normalization M_0 = 1 is enforced, so
    ``logs[0] == 0``.  ``filled`` lists indices below a catalog family's
    validity threshold whose entries were padded with the normalization 0.
    """

    logs: tuple[float, ...]
    generator: str = "explicit"
    filled: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.logs) < 1:
            raise ValidationError("LogSequence needs at least one entry")
        if self.logs[0] != 0.0:
            raise ValidationError(
                f"normalization requires logs[0] == 0, got {self.logs[0]!r}"
            )
        for n, value in enumerate(self.logs):
            if not math.isfinite(value):
                raise ValidationError(f"logs[{n}] = {value!r} is not finite")

    @property
    def length(self) -> int:
        return len(self.logs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.logs, dtype=float)


@dataclass(frozen=True)
class RegularizedSequence:
    """Largest convex minorant of a LogSequence, with its principal indices.

    ``logs_c[n] <= logs[n]`` everywhere, with equality exactly on
    ``principal``; between consecutive hull vertices the minorant is affine.
    """

    logs_c: tuple[float, ...]
    principal: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.logs_c)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.logs_c, dtype=float)

    def to_json(self) -> dict:
        return {"logs_c": list(self.logs_c), "principal": list(self.principal)}


@dataclass(frozen=True)
class SequenceSpec:
    """Recipe for a catalog weight sequence (or an explicit log vector)."""

    family: str
    horizon: int = 0
    params: Mapping[str, float] = field(default_factory=dict)
    logs: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(
                f"unknown family {self.family!r}; expected one of {FAMILIES}"
            )
        if self.family == "explicit":
            if self.logs is None:
                raise ValidationError("explicit family requires 'logs'")
            object.__setattr__(self, "logs", tuple(float(v) for v in self.logs))
            object.__setattr__(self, "horizon", len(self.logs))
        if self.horizon < 3:
            raise ValidationError(f"horizon must be >= 3, got {self.horizon}")
        if self.family == "gevrey":
            s = self.params.get("s")
            if s is None or not (s > 0):
                raise ValidationError("gevrey requires parameter s > 0")
        if self.family in ("denjoy1", "denjoy2"):
            c = self.params.get("C")
            if c is None or not (c > 0):
                raise ValidationError(f"{self.family} requires parameter C > 0")

    @classmethod
    def from_json(cls, doc: Mapping) -> "SequenceSpec":
        if not isinstance(doc, Mapping) or "family" not in doc:
            raise ValidationError("sequence spec JSON needs a 'family' field")
        family = doc["family"]
        if family == "explicit":
            return cls(family="explicit", logs=tuple(doc.get("logs", ())))
        return cls(
            family=family,
            horizon=int(doc.get("horizon", 0)),
            params=dict(doc.get("params", {})),
        )

    def to_json(self) -> dict:
        if self.family == "explicit":
            return {"family": "explicit", "logs": list(self.logs or ())}
        return {
            "family": self.family,
            "params": dict(self.params),
            "horizon": self.horizon,
        }


def make_sequence(spec: SequenceSpec, horizon: int | None = None) -> LogSequence:
    """Build the log-domain sequence for ``spec``, closed form per family.

    ``horizon`` overrides the recipe's horizon (catalog families only).
    Entries below a family's validity threshold are set to the
    normalization value 0 and reported through ``filled``.
    """
    n_total = spec.horizon if horizon is None else int(horizon)
    if spec.family != "explicit" and horizon is not None and n_total < 3:
        raise ValidationError(f"horizon must be >= 3, got {n_total}")

    filled: list[int] = []
    if spec.family == "explicit":
        logs = list(spec.logs or ())
        logs[0] = 0.0
        return LogSequence(logs=tuple(logs), generator="explicit")

    logs = [0.0] * n_total
    if spec.family == "factorial":
        for n in range(n_total):
            logs[n] = math.lgamma(n + 1)
        tag = "factorial"
    elif spec.family == "power_nn":
        for n in range(2, n_total):
            logs[n] = n * math.log(n)
        tag = "power_nn"
    elif spec.family == "gevrey":
        s = float(spec.params["s"])
        for n in range(n_total):
            logs[n] = s * math.lgamma(n + 1)
        tag = f"gevrey(s={s:g})"
    elif spec.family == "denjoy1":
        c = float(spec.params["C"])
        for n in range(n_total):
            if n >= 2:
                logs[n] = n * math.log(c * n * math.log(n))
            else:
                filled.append(n)
        tag = f"denjoy1(C={c:g})"
    elif spec.family == "denjoy2":
        c = float(spec.params["C"])
        for n in range(n_total):
            if n >= 3:  # validity requires n > e
                logs[n] = n * math.log(c * n * math.log(n) * math.log(math.log(n)))
            else:
                filled.append(n)
        tag = f"denjoy2(C={c:g})"
    else:  # pragma: no cover - guarded by SequenceSpec
        raise ValidationError(f"unknown family {spec.family!r}")

    logs[0] = 0.0
    return LogSequence(logs=tuple(logs), generator=tag, filled=tuple(filled))


def _lower_hull_vertices(logs: Sequence[float]) -> list[int]:
    """Indices of the lower convex hull vertices of the points (n, logs[n]).

    Left-to-right monotone chain; a slope tie pops the middle point, so
    collinear interior points never enter the vertex stack.
    """
    stack: list[int] = []
    for n, y in enumerate(logs):
        while len(stack) >= 2:
            i, j = stack[-2], stack[-1]
            # cross > 0 iff j lies strictly below the chord i -> n
            cross = (j - i) * (y - logs[i]) - (n - i) * (logs[j] - logs[i])
            if cross <= 0.0:
                stack.pop()
            else:
                break
        stack.append(n)
    return stack


def convex_regularize(seq: LogSequence) -> RegularizedSequence:
    """Lower convex hull of (n, L_n), n = 0..N-1, in the log domain.

    Hull endpoints are forced at 0 and N-1; equality indices near N-1 can be
    truncation artifacts (the infinite-sequence hull may dip below them).
    """
    if seq.length < 2:
        raise ValidationError("convex_regularize needs at least 2 entries")
    logs = seq.logs
    vertices = _lower_hull_vertices(logs)

    hull = list(logs)
    for a, b in zip(vertices, vertices[1:]):
        ya, yb = logs[a], logs[b]
        slope = (yb - ya) / (b - a)
        for n in range(a + 1, b):
            hull[n] = ya + slope * (n - a)

    scale = max(1.0, max(abs(v) for v in logs))
    tol = _EQ_RTOL * scale
    principal = tuple(n for n in range(len(logs)) if hull[n] >= logs[n] - tol)
    return RegularizedSequence(logs_c=tuple(hull), principal=principal)


def is_log_convex(seq: LogSequence, tol: float = TOL_CONVEX) -> bool:
    """True iff 2 L_n <= L_{n-1} + L_{n+1} for every interior n, within tol."""
    if seq.length < 3:
        raise ValidationError("is_log_convex needs at least 3 entries")
    logs = seq.logs
    return all(
        2.0 * logs[n] <= logs[n - 1] + logs[n + 1] + tol
        for n in range(1, len(logs) - 1)
    )


def ratio_sequence(seq: LogSequence) -> np.ndarray:
    """r_n = L_n - L_{n+1} (log of M_n / M_{n+1}), n = 0..N-2.

    For a log-convex sequence the successive quotients M_{n+1}/M_n increase,
    so this sequence is nonincreasing.
    """
    if seq.length < 2:
        raise ValidationError("ratio_sequence needs at least 2 entries")
    logs = seq.as_array()
    return logs[:-1] - logs[1:]


def root_sequence(seq: LogSequence) -> np.ndarray:
    """rho_n = L_n / n (log of M_n^{1/n}), n = 1..N-1."""
    if seq.length < 2:
        raise ValidationError("root_sequence needs at least 2 entries")
    logs = seq.as_array()
    n = np.arange(1, seq.length, dtype=float)
    return logs[1:] / n
