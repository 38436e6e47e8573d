# This code is part of qba-fem.
#
# (C) Copyright qba-fem developers 2026.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
#
# Any modifications or derivative works of this code must retain this
# copyright notice, and modified files need to carry a notice indicating
# that they have been altered from the originals.

"""Scalar fields on the unit square."""

from __future__ import annotations

from collections.abc import Callable

from numpy import asarray, broadcast_arrays, ndarray

from ..utils.typing import isreal

FieldCallable = Callable[[ndarray, ndarray], ndarray]
GradientCallable = Callable[[ndarray, ndarray], "tuple[ndarray, ndarray]"]


class ScalarField:
    """Pure evaluation rule ``(x, y) -> f(x, y)`` with optional derivatives.

    All callables must be vectorized over NumPy arrays of identical shape.

    Args:
        value: the field itself.
        gradient: returns the pair ``(∂f/∂x, ∂f/∂y)``.
        laplacian: returns ``Δf``.
        name: short description used in reprs and logs.
    """

    __slots__ = ("_value", "_gradient", "_laplacian", "name")

    def __init__(
        self,
        value: FieldCallable,
        gradient: GradientCallable | None = None,
        laplacian: FieldCallable | None = None,
        name: str = "field",
    ) -> None:
        for label, func in (("value", value), ("gradient", gradient), ("laplacian", laplacian)):
            if func is not None and not callable(func):
                raise TypeError(f"Field `{label}` must be callable, not `{type(func)}`.")
        if value is None:
            raise TypeError("Field `value` is required.")
        self._value: FieldCallable = value
        self._gradient: GradientCallable | None = gradient
        self._laplacian: FieldCallable | None = laplacian
        self.name: str = name

    @classmethod
    def constant(cls, c: float) -> ScalarField:
        """Constant field ``c`` (zero gradient and Laplacian)."""
        if not isreal(c):
            raise TypeError(f"Constant value must be real, not `{c!r}`.")
        c = float(c)
        return cls(
            lambda x, y: _shaped(c, x, y),
            lambda x, y: (_shaped(0.0, x, y), _shaped(0.0, x, y)),
            lambda x, y: _shaped(0.0, x, y),
            name=f"{c!r}",
        )

    def __repr__(self) -> str:
        return f"ScalarField({self.name})"

    ################################################################################
    ## EVALUATION
    ################################################################################
    def __call__(self, x: ndarray, y: ndarray) -> ndarray:
        return _shaped(self._value(x, y), x, y)

    @property
    def has_gradient(self) -> bool:
        """Whether the gradient is known in closed form."""
        return self._gradient is not None

    @property
    def has_laplacian(self) -> bool:
        """Whether the Laplacian is known in closed form."""
        return self._laplacian is not None

    def gradient(self, x: ndarray, y: ndarray) -> tuple[ndarray, ndarray]:
        """Evaluate ``(∂f/∂x, ∂f/∂y)``."""
        if self._gradient is None:
            raise ValueError(f"Gradient of `{self.name}` is not available.")
        gx, gy = self._gradient(x, y)
        return _shaped(gx, x, y), _shaped(gy, x, y)

    def laplacian(self, x: ndarray, y: ndarray) -> ndarray:
        """Evaluate ``Δf``."""
        if self._laplacian is None:
            raise ValueError(f"Laplacian of `{self.name}` is not available.")
        return _shaped(self._laplacian(x, y), x, y)

    ################################################################################
    ## ARITHMETIC
    ################################################################################
    def __mul__(self, scalar: float) -> ScalarField:
        if not isreal(scalar):
            return NotImplemented
        s = float(scalar)
        gradient = laplacian = None
        if self._gradient is not None:
            gradient = lambda x, y: tuple(s * g for g in self.gradient(x, y))  # noqa: E731
        if self._laplacian is not None:
            laplacian = lambda x, y: s * self.laplacian(x, y)  # noqa: E731
        return ScalarField(lambda x, y: s * self(x, y), gradient, laplacian, f"{s!r}*{self.name}")

    __rmul__ = __mul__

    def __neg__(self) -> ScalarField:
        return self * -1.0

    def __add__(self, other: ScalarField) -> ScalarField:
        if not isinstance(other, ScalarField):
            return NotImplemented
        gradient = laplacian = None
        if self.has_gradient and other.has_gradient:
            gradient = lambda x, y: tuple(  # noqa: E731
                a + b for a, b in zip(self.gradient(x, y), other.gradient(x, y))
            )
        if self.has_laplacian and other.has_laplacian:
            laplacian = lambda x, y: self.laplacian(x, y) + other.laplacian(x, y)  # noqa: E731
        return ScalarField(
            lambda x, y: self(x, y) + other(x, y),
            gradient,
            laplacian,
            f"({self.name} + {other.name})",
        )

    def __sub__(self, other: ScalarField) -> ScalarField:
        if not isinstance(other, ScalarField):
            return NotImplemented
        return self + (-other)


def _shaped(values, x: ndarray, y: ndarray) -> ndarray:
    """Broadcast ``values`` to the common shape of the evaluation points (as a copy)."""
    values, _, _ = broadcast_arrays(asarray(values, dtype=float), asarray(x), asarray(y))
    return values.copy()
