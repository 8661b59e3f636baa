"""Continuous-time state-space systems and their transfer matrices."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import PoleError, PreconditionError

__all__ = [
    "LtiSystem",
    "transfer_eval",
    "random_system",
    "matrix_to_json",
    "matrix_from_json",
]

#: Eigenvalue real parts must lie below ``-STABILITY_MARGIN * ||A||``.
STABILITY_MARGIN = 1e-12


def _as_matrix(x, name):
    a = np.atleast_2d(np.asarray(x, dtype=complex))
    if a.ndim != 2:
        raise ValueError(f"{name} must be a matrix")
    return a


@dataclass(frozen=True, eq=False)
class LtiSystem:
    """``x' = A x + B u``, ``y = C x + D u`` with complex matrices."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        for name in "ABCD":
            object.__setattr__(self, name, _as_matrix(getattr(self, name), name))
        n = self.A.shape[0]
        if self.A.shape != (n, n):
            raise ValueError("A must be square")
        m, p = self.B.shape[1], self.C.shape[0]
        if self.B.shape[0] != n or self.C.shape[1] != n or self.D.shape != (p, m):
            raise ValueError(
                f"inconsistent dimensions A{self.A.shape} B{self.B.shape} "
                f"C{self.C.shape} D{self.D.shape}"
            )

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.C.shape[0]

    def poles(self) -> np.ndarray:
        return np.linalg.eigvals(self.A)

    def is_stable(self) -> bool:
        if self.n == 0:
            return True
        scale = max(np.linalg.norm(self.A, 2), 1.0)
        return bool(np.all(self.poles().real < -STABILITY_MARGIN * scale))

    def require_stable(self) -> None:
        if not self.is_stable():
            raise PreconditionError("A not asymptotically stable")

    def __call__(self, lam: complex) -> np.ndarray:
        """Transfer matrix ``G(lam) = C (lam I - A)^{-1} B + D``."""
        if self.n == 0:
            return self.D.copy()
        try:
            with warnings.catch_warnings():
                # a singular factor is reported below as PoleError
                warnings.simplefilter("ignore", sla.LinAlgWarning)
                lu = sla.lu_factor(lam * np.eye(self.n) - self.A, check_finite=False)
        except (sla.LinAlgError, ValueError) as exc:
            raise PoleError(f"G evaluated at a pole ({lam})") from exc
        if np.any(np.diag(lu[0]) == 0):
            raise PoleError(f"G evaluated at a pole ({lam})")
        x = sla.lu_solve(lu, self.B, check_finite=False)
        if not np.all(np.isfinite(x)):
            raise PoleError(f"G evaluated at a pole ({lam})")
        return self.C @ x + self.D

    def shifted(self, xi: float) -> "LtiSystem":
        """``A + xi/2 I`` and ``D - xi/2 I`` (requires m == p)."""
        if self.m != self.p:
            raise PreconditionError("shifted system needs as many inputs as outputs")
        return LtiSystem(
            self.A + 0.5 * xi * np.eye(self.n),
            self.B,
            self.C,
            self.D - 0.5 * xi * np.eye(self.m),
        )

    # -- JSON ---------------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {name: matrix_to_json(getattr(self, name)) for name in "ABCD"}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "LtiSystem":
        missing = [k for k in "ABCD" if k not in obj]
        if missing:
            raise ValueError(f"LTI JSON lacks keys {missing}")
        return cls(*(matrix_from_json(obj[k], k) for k in "ABCD"))

    @classmethod
    def load(cls, path) -> "LtiSystem":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=1)
            fh.write("\n")


def transfer_eval(sys: LtiSystem, omega: float) -> np.ndarray:
    """``G(i omega)``."""
    return sys(1j * omega)


def matrix_to_json(a: np.ndarray) -> list:
    """Row-major list of rows of ``[re, im]`` pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(a, dtype=complex)]


def matrix_from_json(rows, name: str = "matrix") -> np.ndarray:
    """Inverse of :func:`matrix_to_json`; empty lists give a 0x0 matrix."""
    if not isinstance(rows, list):
        raise ValueError(f"{name}: expected a list of rows")
    if not rows:
        return np.zeros((0, 0), dtype=complex)
    width = None
    out = []
    for r in rows:
        if not isinstance(r, list) or (width is not None and len(r) != width):
            raise ValueError(f"{name}: rows must be lists of equal length")
        width = len(r)
        row = []
        for z in r:
            if not (isinstance(z, list) and len(z) == 2):
                raise ValueError(f"{name}: entries must be [re, im] pairs")
            row.append(complex(float(z[0]), float(z[1])))
        out.append(row)
    return np.array(out, dtype=complex).reshape(len(rows), width)


def random_system(seed: int, n: int, m: int, p: int, stable: bool = True,
                  margin: float = 0.1, complex_valued: bool = False) -> LtiSystem:
    """Reproducible random system; ``stable`` shifts A left past the imaginary axis."""
    if min(n, m, p) < 1:
        raise ValueError("dimensions must be >= 1")
    rng = np.random.default_rng(seed)

    def draw(*shape):
        a = rng.standard_normal(shape)
        if complex_valued:
            a = a + 1j * rng.standard_normal(shape)
        return a

    A, B, C, D = draw(n, n), draw(n, m), draw(p, n), draw(p, m)
    if stable:
        shift = np.max(np.linalg.eigvals(A).real) + margin
        A = A - shift * np.eye(n)
    return LtiSystem(A, B, C, D)
