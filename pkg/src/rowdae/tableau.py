"""Tableau container for linearly-implicit one-step methods.

A method of either family is described by the same coefficient set: a scalar
``gamma``, a strictly lower triangular matrix ``alpha`` of stage weights, a
lower triangular matrix ``gamma_matrix`` carrying ``gamma`` on its diagonal,
solution weights ``b`` and optionally embedded weights ``bhat`` plus up to
four dense-output coefficient sets.  ``kind`` selects how the steppers use
the tableau:

* ``"row"`` -- classical linearly-implicit scheme for ``M y' = f(t, y)``,
* ``"half_explicit"`` -- explicit differential stages combined with
  linearly-implicit algebraic stages for semi-explicit index-1 systems.

The matrix ``beta = alpha + gamma_matrix`` and its inverse ``w`` are always
derived on demand and never stored on disk.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from . import _tsit5da_data as _t5
from .errors import InvariantError, ParseError, ShapeError
from .linalg import invert

__all__ = [
    "RowTableau",
    "tsit5da",
    "linearly_implicit_euler",
    "ros2",
    "check_stiffly_accurate",
    "load_tableau",
    "save_tableau",
]

KINDS = ("row", "half_explicit")


def _frozen(a, shape):
    out = np.array(a, dtype=float)
    if out.shape != shape:
        raise ShapeError(f"expected shape {shape}, got {out.shape}")
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class RowTableau:
    """Coefficients of one method; immutable after construction."""

    kind: str
    gamma: float
    alpha: np.ndarray
    gamma_matrix: np.ndarray
    b: np.ndarray
    bhat: np.ndarray | None = None
    dense_c: np.ndarray | None = None
    dense_d: np.ndarray | None = None
    dense_e: np.ndarray | None = None
    dense_f: np.ndarray | None = None
    order: int | None = None
    embedded_order: int | None = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvariantError(f"unknown kind {self.kind!r}")
        alpha = np.array(self.alpha, dtype=float)
        if alpha.ndim != 2 or alpha.shape[0] != alpha.shape[1]:
            raise ShapeError(f"alpha must be square, got {alpha.shape}")
        s = alpha.shape[0]
        set_ = object.__setattr__
        set_(self, "gamma", float(self.gamma))
        set_(self, "alpha", _frozen(alpha, (s, s)))
        set_(self, "gamma_matrix", _frozen(self.gamma_matrix, (s, s)))
        set_(self, "b", _frozen(self.b, (s,)))
        for nm in ("bhat", "dense_c", "dense_d", "dense_e", "dense_f"):
            v = getattr(self, nm)
            if v is not None:
                set_(self, nm, _frozen(v, (s,)))
        if np.any(np.triu(self.alpha) != 0.0):
            raise InvariantError("alpha must be strictly lower triangular")
        if np.any(np.triu(self.gamma_matrix, 1) != 0.0):
            raise InvariantError("gamma_matrix must be lower triangular")
        if np.any(np.diag(self.gamma_matrix) != self.gamma):
            raise InvariantError("diagonal of gamma_matrix must equal gamma")

    # -- derived quantities ------------------------------------------------

    @property
    def s(self) -> int:
        """Number of stages."""
        return self.alpha.shape[0]

    @cached_property
    def beta(self) -> np.ndarray:
        """Combined weight matrix ``alpha + gamma_matrix`` (diagonal gamma)."""
        out = self.alpha + self.gamma_matrix
        out.setflags(write=False)
        return out

    @cached_property
    def w(self) -> np.ndarray:
        """Inverse of :attr:`beta`."""
        out = invert(self.beta)
        out.setflags(write=False)
        return out

    @cached_property
    def alpha_sums(self) -> np.ndarray:
        """Stage abscissae: row sums of ``alpha``."""
        out = self.alpha.sum(axis=1)
        out.setflags(write=False)
        return out

    @cached_property
    def gamma_sums(self) -> np.ndarray:
        """Row sums of ``gamma_matrix`` (diagonal included)."""
        out = self.gamma_matrix.sum(axis=1)
        out.setflags(write=False)
        return out

    @cached_property
    def duplicate_of(self) -> tuple:
        """For each stage, the index of an earlier stage with an identical
        alpha row, or -1.

        Two stages with the same alpha row receive identical arguments, so
        their function evaluations can be shared without changing any
        result.
        """
        rows = self.alpha
        out = []
        for i in range(self.s):
            hit = -1
            for j in range(i):
                if np.array_equal(rows[i], rows[j]):
                    hit = j
                    break
            out.append(hit)
        return tuple(out)

    @property
    def has_embedded(self) -> bool:
        return self.bhat is not None

    @property
    def has_dense(self) -> bool:
        return any(
            v is not None
            for v in (self.dense_c, self.dense_d, self.dense_e, self.dense_f)
        )

    def dense_weights(self, tau):
        """Continuous-extension weights b_i(tau).

        Quintic polynomial in ``tau`` built from the dense coefficient sets
        (absent sets count as zero); ``tau`` may be a scalar or an array and
        the stage axis is appended last.  The factored evaluation
        ``tau*b + tau*(tau-1)*(c + tau*(d + tau*(e + tau*f)))`` makes
        ``b_i(0) = 0`` and ``b_i(1) = b_i`` hold bit-exactly.
        """
        s = self.s
        zero = np.zeros(s)
        c = self.dense_c if self.dense_c is not None else zero
        d = self.dense_d if self.dense_d is not None else zero
        e = self.dense_e if self.dense_e is not None else zero
        f = self.dense_f if self.dense_f is not None else zero
        tau = np.asarray(tau, dtype=float)[..., None]
        return tau * self.b + tau * (tau - 1.0) * (c + tau * (d + tau * (e + tau * f)))

    def with_updates(self, **kw) -> "RowTableau":
        """Copy with selected fields replaced (re-validated)."""
        return replace(self, **kw)


# ---------------------------------------------------------------------------
# built-in methods


def tsit5da() -> RowTableau:
    """Twelve-stage half-explicit pair of order 5(4) with quartic dense output.

    On a pure ODE the scheme collapses to the Tsitouras 5(4) explicit
    Runge-Kutta pair; the extra stages give order 5 for the algebraic
    variables of semi-explicit index-1 systems.  Stiffly accurate in both
    the main and the embedded weights.
    """
    return RowTableau(
        kind="half_explicit",
        gamma=_t5.GAMMA,
        alpha=_t5.ALPHA,
        gamma_matrix=_t5.GAMMA_LOWER,
        b=_t5.B,
        bhat=_t5.B_EMBEDDED,
        dense_c=_t5.DENSE_C,
        dense_d=_t5.DENSE_D,
        dense_e=_t5.DENSE_E,
        order=5,
        embedded_order=4,
        name="tsit5da",
    )


def linearly_implicit_euler() -> RowTableau:
    """One-stage linearly-implicit Euler method (order 1, L-stable)."""
    return RowTableau(
        kind="row",
        gamma=1.0,
        alpha=[[0.0]],
        gamma_matrix=[[1.0]],
        b=[1.0],
        dense_c=[0.0],  # linear interpolant
        order=1,
        name="li-euler",
    )


def ros2() -> RowTableau:
    """Two-stage second-order linearly-implicit method, L-stable.

    gamma is the smaller root of ``2*g**2 - 4*g + 1 = 0``, which makes the
    stability function vanish at infinity; the off-diagonal entry
    ``-2*gamma`` then satisfies the second-order condition for
    ``b = [1/2, 1/2]``.
    """
    g = 1.0 - 1.0 / np.sqrt(2.0)
    # dense set: c solves sum(c) = 0, c . beta_row_sums = 1/2 for a
    # quadratic interpolant of order 2
    c1 = 0.5 / (2.0 * g - 1.0)
    return RowTableau(
        kind="row",
        gamma=g,
        alpha=[[0.0, 0.0], [1.0, 0.0]],
        gamma_matrix=[[g, 0.0], [-2.0 * g, g]],
        b=[0.5, 0.5],
        bhat=[1.0, 0.0],  # first-order embedded value for step control
        dense_c=[c1, -c1],
        order=2,
        embedded_order=1,
        name="ros2",
    )


BUILTIN = {
    "tsit5da": tsit5da,
    "li-euler": linearly_implicit_euler,
    "ros2": ros2,
}


def check_stiffly_accurate(t: RowTableau, embedded: bool = False, tol: float = 1e-12) -> bool:
    """True if the (embedded) weights coincide with a final beta row.

    The main weights are checked against the last row of ``beta`` together
    with ``alpha_sums[-1] == 1``; with ``embedded=True`` the embedded
    weights are checked against the second-to-last row.  The default
    tolerance absorbs round-off in the abscissa row sums.  A one-stage
    tableau is accepted by convention when its single abscissa requirement
    holds vacuously.
    """
    s = t.s
    if embedded:
        if t.bhat is None or s < 2:
            return False
        row, weights, k = t.beta[s - 2], t.bhat, s - 2
    else:
        row, weights, k = t.beta[s - 1], t.b, s - 1
    if s == 1 and not embedded:
        return bool(abs(weights[0] - t.gamma) <= tol)
    abscissa_ok = abs(t.alpha_sums[k] - 1.0) <= tol
    return bool(np.all(np.abs(weights - row) <= tol) and abscissa_ok)


# ---------------------------------------------------------------------------
# text serialization

_SCALAR_KEYS = ("kind", "s", "gamma", "order", "embedded_order", "name")
_VECTOR_KEYS = ("b", "bhat", "c", "d", "e", "f")
_MATRIX_KEYS = ("alpha", "gammaM")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save_tableau(t: RowTableau, path) -> None:
    """Write a tableau to ``path`` in the plain-text exchange format.

    Floats are printed with 17 significant digits, so a load/save round
    trip is bit exact.  The derived ``beta`` matrix is never written.
    """
    lines = [f"kind: {t.kind}", f"s: {t.s}", f"gamma: {_fmt(t.gamma)}"]
    if t.order is not None:
        lines.append(f"order: {t.order}")
    if t.embedded_order is not None:
        lines.append(f"embedded_order: {t.embedded_order}")
    if t.name:
        lines.append(f"name: {t.name}")
    for key, mat in (("alpha", t.alpha), ("gammaM", t.gamma_matrix)):
        lines.append(f"{key}:")
        for row in mat:
            lines.append("  " + " ".join(_fmt(v) for v in row))
    vecs = {
        "b": t.b,
        "bhat": t.bhat,
        "c": t.dense_c,
        "d": t.dense_d,
        "e": t.dense_e,
        "f": t.dense_f,
    }
    for key, vec in vecs.items():
        if vec is not None:
            lines.append(f"{key}: " + " ".join(_fmt(v) for v in vec))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_floats(text, lineno):
    out = []
    for tok in text.split():
        try:
            out.append(float(tok))
        except ValueError:
            raise ParseError(f"bad number {tok!r}", lineno) from None
    return out


def load_tableau(path) -> RowTableau:
    """Read a tableau from the plain-text exchange format.

    Raises :class:`ParseError` for malformed syntax, :class:`ShapeError`
    for blocks with the wrong number of entries and :class:`InvariantError`
    when the coefficients violate a structural requirement.
    """
    with open(path) as fh:
        raw = fh.readlines()
    # strip comments, keep (lineno, text) for non-blank lines
    items = []
    for no, line in enumerate(raw, start=1):
        text = line.split("#", 1)[0].strip()
        if text:
            items.append((no, text))

    header: dict = {}
    vectors: dict = {}
    matrices: dict = {}
    i = 0
    while i < len(items):
        no, text = items[i]
        if ":" not in text:
            raise ParseError(f"expected 'key: value', got {text!r}", no)
        key, _, rest = text.partition(":")
        key = key.strip()
        rest = rest.strip()
        if key in _SCALAR_KEYS:
            if key in header:
                raise ParseError(f"duplicate key {key!r}", no)
            header[key] = (no, rest)
            i += 1
        elif key in _MATRIX_KEYS:
            if key in matrices:
                raise ParseError(f"duplicate block {key!r}", no)
            if "s" not in header:
                raise ParseError(f"'s:' must appear before block {key!r}", no)
            s = header["__s"]
            if rest:
                raise ParseError(f"matrix block {key!r} takes no inline values", no)
            rows = []
            for r in range(s):
                if i + 1 + r >= len(items):
                    raise ShapeError(f"block {key!r}: expected {s} rows, file ended")
                rno, rtext = items[i + 1 + r]
                if ":" in rtext:
                    raise ShapeError(
                        f"block {key!r}: expected {s} rows, found {r} (line {rno})"
                    )
                row = _parse_floats(rtext, rno)
                if len(row) != s:
                    raise ShapeError(
                        f"block {key!r} row {r + 1}: expected {s} entries, got {len(row)} (line {rno})"
                    )
                rows.append(row)
            matrices[key] = rows
            i += 1 + s
        elif key in _VECTOR_KEYS:
            if key in vectors:
                raise ParseError(f"duplicate vector {key!r}", no)
            if "s" not in header:
                raise ParseError(f"'s:' must appear before vector {key!r}", no)
            s = header["__s"]
            if not rest and i + 1 < len(items) and ":" not in items[i + 1][1]:
                i += 1
                no, rest = items[i]
            vec = _parse_floats(rest, no)
            if len(vec) != s:
                raise ShapeError(
                    f"vector {key!r}: expected {s} entries, got {len(vec)} (line {no})"
                )
            vectors[key] = vec
            i += 1
        else:
            raise ParseError(f"unknown key {key!r}", no)
        if key == "s":
            no_s, text_s = header["s"]
            try:
                header["__s"] = int(text_s)
            except ValueError:
                raise ParseError(f"bad stage count {text_s!r}", no_s) from None
            if header["__s"] < 1:
                raise ParseError(f"stage count must be positive, got {header['__s']}", no_s)

    for key in ("kind", "s", "gamma"):
        if key not in header:
            raise ParseError(f"missing mandatory key {key!r}")
    for key in _MATRIX_KEYS:
        if key not in matrices:
            raise ParseError(f"missing mandatory block {key!r}")
    if "b" not in vectors:
        raise ParseError("missing mandatory vector 'b'")

    no_k, kind = header["kind"]
    if kind not in KINDS:
        raise ParseError(f"kind must be one of {KINDS}, got {kind!r}", no_k)
    no_g, gtext = header["gamma"]
    try:
        gamma = float(gtext)
    except ValueError:
        raise ParseError(f"bad gamma {gtext!r}", no_g) from None

    def _int_or_none(key):
        if key not in header:
            return None
        no, text = header[key]
        try:
            return int(text)
        except ValueError:
            raise ParseError(f"bad integer for {key!r}: {text!r}", no) from None

    return RowTableau(
        kind=kind,
        gamma=gamma,
        alpha=matrices["alpha"],
        gamma_matrix=matrices["gammaM"],
        b=vectors["b"],
        bhat=vectors.get("bhat"),
        dense_c=vectors.get("c"),
        dense_d=vectors.get("d"),
        dense_e=vectors.get("e"),
        dense_f=vectors.get("f"),
        order=_int_or_none("order"),
        embedded_order=_int_or_none("embedded_order"),
        name=header.get("name", (0, ""))[1],
    )
