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

"""Serialization utils module."""

from __future__ import annotations

from dataclasses import asdict, is_dataclass
from enum import Enum
from json import JSONEncoder, dump
from math import isfinite
from typing import Any

from numpy import bool_, floating, integer, ndarray


class DumpEncoder(JSONEncoder):
    """JSON encoder with extra methods for dumping."""

    @classmethod
    def dump(cls, obj: Any, file: str, indent: int | None = None) -> None:
        """Dump object to file using self as JSON encoder."""
        with open(file, "w", encoding="utf8") as fp:  # pylint: disable=invalid-name
            dump(cls._sanitize(obj), fp, indent=indent, cls=cls)

    @classmethod
    def _sanitize(cls, obj: Any) -> Any:
        """Replace non-finite floats (not valid JSON) by ``None``, recursively.

        Namedtuples become dicts on the way since the base encoder would
        otherwise emit them as plain lists.
        """
        if isinstance(obj, float):
            return obj if isfinite(obj) else None
        if isinstance(obj, dict):
            return {key: cls._sanitize(value) for key, value in obj.items()}
        if isinstance(obj, tuple) and hasattr(obj, "_asdict"):
            return cls._sanitize(obj._asdict())
        if isinstance(obj, (list, tuple)):
            return [cls._sanitize(value) for value in obj]
        return obj


class ReprEncoder(DumpEncoder):
    """JSON encoder that falls back to `repr` if TypeError is raised."""

    def default(self, o):
        try:
            return super().default(o)
        except TypeError:
            return repr(o)


class NumPyEncoder(DumpEncoder):
    """JSON encoder for NumPy arrays and scalars."""

    def default(self, o):
        if isinstance(o, ndarray):
            return self._sanitize(o.tolist())
        if isinstance(o, floating):
            return self._sanitize(float(o))
        if isinstance(o, integer):
            return int(o)
        if isinstance(o, bool_):
            return bool(o)
        return super().default(o)


class ReportEncoder(NumPyEncoder, ReprEncoder):
    """JSON encoder for run summaries: dataclasses, enums and NumPy data."""

    def default(self, o):
        if is_dataclass(o) and not isinstance(o, type):
            return self._sanitize(asdict(o))
        if isinstance(o, Enum):
            return o.value
        return super().default(o)
