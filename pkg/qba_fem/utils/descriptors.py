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

"""Validated settings descriptor."""

from __future__ import annotations

from collections.abc import Callable
from copy import deepcopy
from typing import Any


class UnsetType:
    """Singleton marking a setting that was never assigned."""

    __slots__ = ()
    _instance: UnsetType | None = None

    def __new__(cls) -> UnsetType:
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __bool__(self) -> bool:
        return False

    def __repr__(self) -> str:
        return "UNSET"

    def __copy__(self) -> UnsetType:
        return self

    def __deepcopy__(self, memo: dict) -> UnsetType:
        return self


UNSET = UnsetType()


class setting:  # pylint: disable=invalid-name
    """Attribute with custom validation, a default and an assignment history flag.

    Behaves like a property whose getter returns the stored value and whose setter
    runs ``fval(instance, value)`` first. Assigning ``None`` restores the default.

    Args:
        fval: validator returning the (possibly normalized) value to store.
        default: value assumed while unset or when set to ``None``.
    """

    __slots__ = "fval", "_default", "_name"

    def __init__(
        self,
        fval: Callable[[Any, Any], Any] | None = None,
        *,
        default: Any = UNSET,
    ) -> None:
        self.fval: Callable[[Any, Any], Any] | None = fval
        self._default: Any = default
        self._name: str | None = None

    ################################################################################
    ## PROPERTIES
    ################################################################################
    @property
    def default(self) -> Any:
        """Default value, copied to keep it immutable across instances."""
        return deepcopy(self._default)

    @property
    def name(self) -> str | None:
        """Public attribute name as provided by ``__set_name__``."""
        return self._name

    @property
    def private_name(self) -> str:
        """Name under which the managed value is stored in the instance."""
        return f"__setting_{self._name}"

    ################################################################################
    ## DESCRIPTOR PROTOCOL
    ################################################################################
    def __set_name__(self, owner: type, name: str) -> None:
        self._name = name

    def __get__(self, obj: object, objtype: type | None = None) -> Any:
        if obj is None:
            return self
        return getattr(obj, self.private_name, self.default)

    def __set__(self, obj: object, value: Any) -> None:
        if value is None or value is UNSET:
            value = self.default
        if self.fval is not None and value is not UNSET:
            value = self.fval(obj, value)
        setattr(obj, self.private_name, value)

    def __delete__(self, obj: object) -> None:
        if hasattr(obj, self.private_name):
            delattr(obj, self.private_name)

    ################################################################################
    ## AUXILIARY
    ################################################################################
    def is_set(self, obj: object) -> bool:
        """Whether the managed attribute was explicitly assigned on ``obj``."""
        return hasattr(obj, self.private_name)
