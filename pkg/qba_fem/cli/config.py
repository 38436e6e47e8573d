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

"""Run configuration: validated settings and key=value config files."""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping
from os import PathLike
from pathlib import Path
from typing import Any

from ..exceptions import ConfigError
from ..linalg.solvers import METHODS as LINEAR_METHODS
from ..optsys import Box, ControlVariant
from ..optsys.constrained import METHODS as BOX_METHODS
from ..studies.base import MAX_LEVEL
from ..utils.descriptors import setting
from ..utils.typing import UNBOUNDED, isinteger, isinterval, ispositive, isreal

COMMANDS: tuple[str, ...] = ("convergence", "infsup-demo", "constants", "constrained")
TRUE_STRINGS: frozenset[str] = frozenset({"1", "true", "yes", "on"})
FALSE_STRINGS: frozenset[str] = frozenset({"0", "false", "no", "off"})


################################################################################
## PARSERS
################################################################################
def parse_real(name: str, value: Any) -> float:
    """Parse a finite real number (``inf`` maps to the unbounded sentinel)."""
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "+inf", "infinity"):
            return UNBOUNDED
        if text in ("-inf", "-infinity"):
            return -UNBOUNDED
        try:
            value = float(text)
        except ValueError:
            raise ConfigError(f"Invalid `{name}` value `{value!r}`, expected a number.") from None
    if not isreal(value):
        raise ConfigError(f"Invalid `{name}` value `{value!r}`, expected a finite number.")
    return float(value)


def parse_int(name: str, value: Any) -> int:
    """Parse an integer."""
    if isinstance(value, str):
        try:
            value = int(value.strip())
        except ValueError:
            raise ConfigError(f"Invalid `{name}` value `{value!r}`, expected an integer.") from None
    if not isinteger(value):
        raise ConfigError(f"Invalid `{name}` value `{value!r}`, expected an integer.")
    return int(value)


def parse_levels(value: Any) -> tuple[int, ...]:
    """Parse ``"3:6"`` (inclusive range), ``"3,4,6"`` or a sequence of ints.

    >>> parse_levels("3:6")
    (3, 4, 5, 6)
    """
    if isinstance(value, str):
        text = value.strip()
        if ":" in text:
            lo, _, hi = text.partition(":")
            lo, hi = parse_int("levels", lo), parse_int("levels", hi)
            if hi < lo:
                raise ConfigError(f"Empty level range `{value}`.")
            value = range(lo, hi + 1)
        else:
            value = text.split(",")
    if isinstance(value, int):
        value = (value,)
    levels = tuple(parse_int("levels", level) for level in _iterable("levels", value))
    if not levels:
        raise ConfigError("Level range must not be empty.")
    if list(levels) != sorted(set(levels)):
        raise ConfigError(f"Levels must be strictly increasing, not `{levels}`.")
    if levels[0] < 0 or levels[-1] > MAX_LEVEL:
        raise ConfigError(f"Levels must lie within `0:{MAX_LEVEL}`, not `{levels}`.")
    return levels


def parse_alphas(value: Any) -> tuple[float, ...]:
    """Parse a comma-separated list of positive Tikhonov parameters."""
    if isinstance(value, str):
        value = [item for item in value.split(",") if item.strip()]
    elif isreal(value):
        value = (value,)
    alphas = tuple(_positive("alphas", alpha) for alpha in _iterable("alphas", value))
    if not alphas:
        raise ConfigError("List of Tikhonov parameters must not be empty.")
    return alphas


def parse_box(value: Any) -> Box:
    """Parse ``"lo:hi"`` or a pair; ``inf`` and ``-inf`` mark unbounded sides.

    >>> parse_box("-0.2:0.2")
    Box(lo=-0.2, hi=0.2)
    """
    if isinstance(value, str):
        lo, sep, hi = value.strip().partition(":")
        if not sep:
            raise ConfigError(f"Invalid box `{value!r}`, expected `LO:HI`.")
        value = (lo, hi)
    pair = tuple(_iterable("box", value))
    if len(pair) != 2:
        raise ConfigError(f"Invalid box `{value!r}`, expected two bounds.")
    lo, hi = (parse_real("box", bound) for bound in pair)
    if not isinterval((lo, hi)):
        raise ConfigError(f"Box lower bound `{lo}` exceeds upper bound `{hi}`.")
    return Box(lo, hi)


def parse_bool(name: str, value: Any) -> bool:
    """Parse a boolean flag (``true``/``false``, ``yes``/``no``, ``1``/``0``, ``on``/``off``)."""
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in TRUE_STRINGS:
        return True
    if text in FALSE_STRINGS:
        return False
    raise ConfigError(f"Invalid `{name}` value `{value!r}`, expected a boolean.")


################################################################################
## VALIDATORS
################################################################################
def _positive(name: str, value: Any) -> float:
    value = parse_real(name, value)
    if not ispositive(value) or value >= UNBOUNDED:
        raise ConfigError(f"`{name}` must be positive, not `{value!r}`.")
    return value


def _choice(name: str, choices: Iterable[str]) -> Callable[[Any, Any], str]:
    choices = tuple(choices)

    def validate(_, value: Any) -> str:
        text = str(value).strip().lower()
        if text not in choices:
            raise ConfigError(f"Invalid `{name}` value `{value!r}`, expected one of {choices}.")
        return text

    return validate


def _non_negative_int(name: str) -> Callable[[Any, Any], int]:
    def validate(_, value: Any) -> int:
        value = parse_int(name, value)
        if value < 0:
            raise ConfigError(f"`{name}` must be non-negative, not `{value}`.")
        return value

    return validate


def _flag(name: str) -> Callable[[Any, Any], bool]:
    return lambda _, value: parse_bool(name, value)


def _path(_, value: Any) -> Path | None:
    if value is None or value == "":
        return None
    if not isinstance(value, (str, PathLike)):
        raise ConfigError(f"Invalid path `{value!r}`.")
    return Path(value)


def _variant(_, value: Any) -> ControlVariant:
    try:
        return ControlVariant.parse(value)
    except (TypeError, ValueError) as error:
        raise ConfigError(str(error)) from error


def _max_iter(_, value: Any) -> int:
    value = parse_int("max_iter", value)
    if value < 1:
        raise ConfigError(f"`max_iter` must be positive, not `{value}`.")
    return value


def _iterable(name: str, value: Any) -> Iterable:
    if isinstance(value, Mapping) or not isinstance(value, Iterable):
        raise ConfigError(f"Invalid `{name}` value `{value!r}`, expected a sequence.")
    return value


################################################################################
## RUN CONFIGURATION
################################################################################
class RunConfig:  # pylint: disable=too-many-instance-attributes
    """Validated configuration of one CLI command.

    Every field accepts either a typed value or its textual form (as read from flags
    or a config file). Assigning ``None`` restores the default.
    """

    command = setting(_choice("command", COMMANDS), default="convergence")
    alpha = setting(lambda _, value: _positive("alpha", value), default=1.0)
    alphas = setting(lambda _, value: parse_alphas(value), default=(1.0, 1e-2, 1e-4))
    levels = setting(lambda _, value: parse_levels(value), default=(3, 4, 5, 6))
    variant = setting(_variant, default=ControlVariant.FULL)
    box = setting(lambda _, value: None if value is None else parse_box(value), default=None)
    method = setting(_choice("method", BOX_METHODS), default="ssn")
    tol = setting(lambda _, value: _positive("tol", value), default=1e-10)
    max_iter = setting(_max_iter, default=50)
    linear_solver = setting(_choice("linear_solver", LINEAR_METHODS), default="direct")
    trials = setting(_non_negative_int("trials"), default=100)
    seed = setting(_non_negative_int("seed"), default=42)
    out = setting(_path, default=None)
    dump_mesh = setting(_path, default=None)
    dump_system = setting(_path, default=None)
    summary = setting(_path, default=None)
    zero_data = setting(_flag("zero_data"), default=False)
    assert_rates = setting(_flag("assert_rates"), default=False)

    FIELDS: tuple[str, ...] = (
        "command",
        "alpha",
        "alphas",
        "levels",
        "variant",
        "box",
        "method",
        "tol",
        "max_iter",
        "linear_solver",
        "trials",
        "seed",
        "out",
        "dump_mesh",
        "dump_system",
        "summary",
        "zero_data",
        "assert_rates",
    )

    def __init__(self, **settings: Any) -> None:
        self.update(settings)

    def __repr__(self) -> str:
        explicit = ", ".join(f"{name}={getattr(self, name)!r}" for name in self.explicit())
        return f"{type(self).__name__}({explicit})"

    ################################################################################
    ## API
    ################################################################################
    def update(self, settings: Mapping[str, Any]) -> RunConfig:
        """Assign several fields; unknown keys raise :class:`ConfigError`."""
        for key, value in settings.items():
            name = key.strip().replace("-", "_")
            if name not in self.FIELDS:
                raise ConfigError(f"Unknown configuration key `{key}`.")
            setattr(self, name, value)
        return self

    def explicit(self) -> tuple[str, ...]:
        """Names of the fields assigned explicitly."""
        return tuple(name for name in self.FIELDS if getattr(type(self), name).is_set(self))

    def asdict(self) -> dict[str, Any]:
        """All fields by name, paths rendered as strings."""
        values = {}
        for name in self.FIELDS:
            value = getattr(self, name)
            values[name] = str(value) if isinstance(value, Path) else value
        return values


def read_config_file(path: str | PathLike) -> dict[str, str]:
    """Read a flat ``key=value`` file (blank lines and ``#`` comments ignored)."""
    try:
        with open(path, encoding="utf8") as file:
            lines = file.readlines()
    except OSError as error:
        raise ConfigError(f"Cannot read configuration file `{path}`: {error}") from error
    settings = {}
    for number, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"Malformed line {number} in `{path}`: `{line}`.")
        settings[key.strip()] = value.strip()
    return settings
