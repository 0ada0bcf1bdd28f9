"""Piecewise-polynomial representation of collocation solutions on [0, L].

Each component is stored per mesh interval in the scaled monomial basis

    u(tau) = sum_j c[i, j] * s**j,        s = (tau - i*h) / h in [0, 1],

which reproduces Gauss collocation for any polynomial basis choice.  Values
outside [0, L] are resolved through per-component extension policies:
reflection at 0 (even/odd, optionally with an affine offset such as the Jost
remainder identity), and either zero continuation or a signed reflection
beyond L (the latter encodes 2L-periodic even/odd profiles).  Policies are
applied recursively until the argument lands inside the mesh, so arguments
several periods away fold back correctly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .errors import ExtensionCoverageError

_MAX_GAUSS = 5


@dataclass(frozen=True)
class Mesh:
    """Uniform collocation mesh on [0, L].

    Parameters
    ----------
    length : float
        Right endpoint L of the computational interval.
    intervals : int
        Number M of equal subintervals (at least 4).
    gauss_order : int
        Number k of Gauss-Legendre collocation nodes per interval (2..5).
    """

    length: float
    intervals: int
    gauss_order: int = 3

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"mesh length must be positive, got {self.length}")
        if self.intervals < 4:
            raise ValueError(f"need at least 4 intervals, got {self.intervals}")
        if not 2 <= self.gauss_order <= _MAX_GAUSS:
            raise ValueError(f"gauss order must be in [2, {_MAX_GAUSS}], got {self.gauss_order}")

    @property
    def h(self) -> float:
        return self.length / self.intervals

    @cached_property
    def knots(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.intervals + 1)

    @cached_property
    def gauss_nodes(self) -> np.ndarray:
        """Gauss-Legendre nodes mapped to the unit interval (0, 1)."""
        x, _ = np.polynomial.legendre.leggauss(self.gauss_order)
        return 0.5 * (x + 1.0)

    @cached_property
    def gauss_weights(self) -> np.ndarray:
        _, w = np.polynomial.legendre.leggauss(self.gauss_order)
        return 0.5 * w

    @cached_property
    def collocation_points(self) -> np.ndarray:
        """All M*k collocation points, interval-major."""
        i = np.arange(self.intervals)[:, None]
        return ((i + self.gauss_nodes[None, :]) * self.h).ravel()


@dataclass(frozen=True)
class Extension:
    """Extension policy of one component beyond [0, L].

    Left rule (tau < 0):   u(tau) = left_sign * u(-tau) + left_offset(tau)
    Right rule (tau > L):  "zero" sets the value to 0, "reflect" applies
                           u(tau) = right_sign * u(2L - tau).

    ``left_sign = +1/-1`` with no offset gives the even/odd reflections;
    ``left_sign = 0`` with an offset prescribes an explicit history function.
    ``label`` names affine rules for checkpoint round-trips.
    """

    left: str = "none"          # "none" | "reflect" | "affine"
    left_sign: float = 1.0
    left_offset: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)
    right: str = "none"         # "none" | "zero" | "reflect"
    right_sign: float = 1.0
    label: str = ""

    # -- common policies -------------------------------------------------
    @staticmethod
    def even_zero() -> "Extension":
        return Extension(left="reflect", left_sign=1.0, right="zero")

    @staticmethod
    def odd_zero() -> "Extension":
        return Extension(left="reflect", left_sign=-1.0, right="zero")

    @staticmethod
    def periodic_even() -> "Extension":
        """Even at 0 and 2L-periodic (reflection-even at L)."""
        return Extension(left="reflect", left_sign=1.0, right="reflect", right_sign=1.0)

    @staticmethod
    def periodic_odd() -> "Extension":
        """Odd at 0 and 2L-periodic (reflection-odd at L)."""
        return Extension(left="reflect", left_sign=-1.0, right="reflect", right_sign=-1.0)

    @staticmethod
    def affine(sign: float, offset: Callable, label: str = "", right: str = "zero") -> "Extension":
        return Extension(left="affine", left_sign=sign, left_offset=offset,
                         right=right, label=label)

    @staticmethod
    def prescribed_left(history: Callable, right: str = "zero", label: str = "history") -> "Extension":
        """Explicit history on tau < 0 (delay-equation style)."""
        return Extension(left="affine", left_sign=0.0, left_offset=history,
                         right=right, label=label)

    @staticmethod
    def interior_only() -> "Extension":
        return Extension()

    def tokens(self) -> tuple[str, str]:
        """Serializable (left, right) policy tokens."""
        if self.left == "none":
            lt = "none"
        elif self.left == "affine":
            lt = f"affine{self.left_sign:+g}:{self.label or 'anon'}"
        else:
            lt = "even" if self.left_sign > 0 else "odd"
        if self.right == "none":
            rt = "none"
        elif self.right == "zero":
            rt = "zero"
        else:
            rt = "reflect+" if self.right_sign > 0 else "reflect-"
        return lt, rt


_vandermonde_cache: dict[int, np.ndarray] = {}


def _vandermonde_inv(k: int) -> np.ndarray:
    """Inverse Vandermonde for interpolation at k+1 equispaced local nodes."""
    if k not in _vandermonde_cache:
        s = np.linspace(0.0, 1.0, k + 1)
        V = s[:, None] ** np.arange(k + 1)[None, :]
        _vandermonde_cache[k] = np.linalg.inv(V)
    return _vandermonde_cache[k]


@dataclass
class PiecewiseSolution:
    """Collocation representation of n components on a shared mesh.

    ``coeffs`` has shape (ncomp, M, k+1); ``policies`` holds one
    :class:`Extension` per component.
    """

    mesh: Mesh
    coeffs: np.ndarray
    policies: tuple[Extension, ...]

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        n, m, p = self.coeffs.shape
        if m != self.mesh.intervals or p != self.mesh.gauss_order + 1:
            raise ValueError("coefficient array does not match the mesh")
        if len(self.policies) != n:
            raise ValueError("need one extension policy per component")

    @property
    def ncomp(self) -> int:
        return self.coeffs.shape[0]

    # -- construction -----------------------------------------------------
    @classmethod
    def from_callables(cls, mesh: Mesh, funcs: Sequence[Callable],
                       policies: Sequence[Extension]) -> "PiecewiseSolution":
        """Interpolate callables on each interval at k+1 equispaced nodes."""
        k = mesh.gauss_order
        vinv = _vandermonde_inv(k)
        s = np.linspace(0.0, 1.0, k + 1)
        pts = (np.arange(mesh.intervals)[:, None] + s[None, :]) * mesh.h  # (M, k+1)
        coeffs = np.empty((len(funcs), mesh.intervals, k + 1))
        for c, f in enumerate(funcs):
            vals = np.asarray(f(pts.ravel()), dtype=float).reshape(pts.shape)
            coeffs[c] = vals @ vinv.T
        return cls(mesh, coeffs, tuple(policies))

    @classmethod
    def zeros(cls, mesh: Mesh, policies: Sequence[Extension]) -> "PiecewiseSolution":
        return cls(mesh, np.zeros((len(policies), mesh.intervals, mesh.gauss_order + 1)),
                   tuple(policies))

    def copy(self) -> "PiecewiseSolution":
        return PiecewiseSolution(self.mesh, self.coeffs.copy(), self.policies)

    def with_policies(self, policies: Sequence[Extension]) -> "PiecewiseSolution":
        return PiecewiseSolution(self.mesh, self.coeffs, tuple(policies))

    # -- point resolution --------------------------------------------------
    def resolve(self, tau: np.ndarray, comp: int):
        """Fold exterior points into [0, L].

        Returns ``(q, sign, offset)`` such that u(tau) = sign * u(q) + offset
        with q inside the mesh.  ``sign`` is 0 where a zero rule applied.
        """
        ext = self.policies[comp]
        L = self.mesh.length
        x = np.array(tau, dtype=float, copy=True)
        sign = np.ones_like(x)
        off = np.zeros_like(x)
        if x.size == 0:
            return x, sign, off
        max_folds = int(np.max(np.abs(x)) / L) + 4
        for _ in range(max_folds):
            left = (x < 0.0) & (sign != 0.0)
            right = (x > L) & (sign != 0.0)
            if not (left.any() or right.any()):
                break
            if left.any():
                if ext.left == "none":
                    raise ExtensionCoverageError(
                        f"component {comp} evaluated at tau < 0 without a left policy")
                if ext.left == "affine":
                    if ext.left_offset is None:
                        raise ExtensionCoverageError(
                            f"affine policy {ext.label!r} needs its offset rebound "
                            "before exterior evaluation")
                    off[left] += sign[left] * ext.left_offset(x[left])
                sign[left] *= ext.left_sign
                x[left] = -x[left]
                right = (x > L) & (sign != 0.0)
            if right.any():
                if ext.right == "none":
                    raise ExtensionCoverageError(
                        f"component {comp} evaluated at tau > L without a right policy")
                if ext.right == "zero":
                    sign[right] = 0.0
                    x[right] = 0.0
                else:
                    sign[right] *= ext.right_sign
                    x[right] = 2.0 * L - x[right]
        else:
            if (((x < 0.0) | (x > L)) & (sign != 0.0)).any():
                raise ExtensionCoverageError("extension folding did not terminate")
        return x, sign, off

    # -- evaluation ---------------------------------------------------------
    def _interior(self, q: np.ndarray, comp: int, deriv: int = 0) -> np.ndarray:
        mesh = self.mesh
        idx = np.clip((q / mesh.h).astype(int), 0, mesh.intervals - 1)
        s = q / mesh.h - idx
        c = self.coeffs[comp]
        k = mesh.gauss_order
        vals = np.zeros_like(q)
        for j in range(k, deriv - 1, -1):
            fac = 1.0
            for d in range(deriv):
                fac *= (j - d)
            vals = vals * s + fac * c[idx, j]
        return vals / mesh.h ** deriv

    def eval(self, tau, comp: int, deriv: int = 0):
        """Evaluate one component, resolving exterior points via its policy.

        Derivative evaluation (deriv > 0) is interior-only; first-order
        recasts carry derivatives as separate components with their own
        policies.
        """
        arr = np.asarray(tau, dtype=float)
        x = np.atleast_1d(arr).ravel().astype(float)
        if deriv == 0:
            q, sign, off = self.resolve(x, comp)
            vals = sign * self._interior(q, comp) + off
        else:
            if ((x < 0.0) | (x > self.mesh.length)).any():
                raise ExtensionCoverageError("derivative evaluation requires interior points")
            vals = self._interior(x, comp, deriv)
        if arr.ndim == 0:
            return float(vals[0])
        return vals.reshape(arr.shape)

    def integral(self, comp: int) -> float:
        """Exact integral of one component over [0, L]."""
        k = self.mesh.gauss_order
        inv = 1.0 / (np.arange(k + 1) + 1.0)
        return float(self.mesh.h * np.sum(self.coeffs[comp] @ inv))

    def sup_norm(self, comp: int, samples_per_interval: int = 12) -> float:
        s = np.linspace(0.0, 1.0, samples_per_interval)
        pts = ((np.arange(self.mesh.intervals)[:, None] + s[None, :]) * self.mesh.h).ravel()
        return float(np.max(np.abs(self._interior(pts, comp))))

    def resample(self, mesh: Mesh) -> "PiecewiseSolution":
        """Re-express the same piecewise polynomials on another mesh.

        Exact (to rounding) when the new mesh is a refinement of the old one.
        """
        k = mesh.gauss_order
        vinv = _vandermonde_inv(k)
        s = np.linspace(0.0, 1.0, k + 1)
        pts = ((np.arange(mesh.intervals)[:, None] + s[None, :]) * mesh.h).ravel()
        coeffs = np.empty((self.ncomp, mesh.intervals, k + 1))
        for c in range(self.ncomp):
            vals = self._interior(np.clip(pts, 0.0, self.mesh.length), c)
            coeffs[c] = vals.reshape(mesh.intervals, k + 1) @ vinv.T
        return PiecewiseSolution(mesh, coeffs, self.policies)
