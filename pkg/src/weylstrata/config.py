"""Session files.

A session file is TOML describing one root datum and one twist. It is parsed
with `tomllib` and validated by pydantic models that forbid unknown keys.
"""

from __future__ import annotations

import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, ValidationError

from weylstrata.hecke import TwistedCocenter
from weylstrata.newton import NewtonEngine
from weylstrata.rigid import RigidAnalysis
from weylstrata.root_datum import CartanSpec, RootDatum, build_root_datum
from weylstrata.twist import Twist, TwistSpec, build_twist
from weylstrata.types import IntMatrix, OutputFormat, WeylStrataError
from weylstrata.weyl import ExtendedAffineWeylGroup

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

_logger = logging.getLogger(__name__)


class ConfigError(WeylStrataError):
    """The session file is malformed."""

    module = "config"

    def __init__(self, source: str, message: str) -> None:
        """Init.

        Args:
            source: Name of the offending file.
            message: What is wrong, including its location.
        """
        self.source = source
        super().__init__(f"{source}: {message}")


class StrictModel(BaseModel):
    """Base model rejecting unknown keys."""

    model_config = ConfigDict(extra="forbid")


class TwistConfig(StrictModel):
    """The ``[twist]`` table."""

    diagram_perm: list[int] = Field(default_factory=list)
    """0-based permutation of the finite simple roots; empty means identity."""

    omega: str | None = None
    """Omega label of τ₀."""


class BoundsConfig(StrictModel):
    """The ``[bounds]`` table."""

    ball_radius: NonNegativeInt = 6
    conjugator_depth: NonNegativeInt = 2
    twist_check_depth: NonNegativeInt = 3
    excursion: NonNegativeInt | None = None
    """Class search headroom above the minimal length; `None` means ``2·n_max``."""


class SessionConfig(StrictModel):
    """A validated session file."""

    cartan_type: str
    lattice: Literal["simply_connected", "adjoint"] | list[list[int]] = (
        "simply_connected"
    )
    central_rank: NonNegativeInt = 0
    format: OutputFormat = OutputFormat.TEXT
    simple_roots: list[list[int]] | None = None
    simple_coroots: list[list[int]] | None = None
    twist: TwistConfig = Field(default_factory=TwistConfig)
    omega_labels: dict[str, list[int]] = Field(default_factory=dict)
    bounds: BoundsConfig = Field(default_factory=BoundsConfig)


def _rows(rows: list[list[int]] | None) -> IntMatrix | None:
    return None if rows is None else tuple(tuple(row) for row in rows)


def parse_config(text: str, source: str = "<string>") -> SessionConfig:
    """Validate the text of a session file.

    Raises:
        ConfigError: invalid TOML or a field that fails validation.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as err:
        # the message carries line and column
        raise ConfigError(source, str(err)) from None
    try:
        return SessionConfig.model_validate(data)
    except ValidationError as err:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in error['loc'])}: {error['msg']}"
            for error in err.errors()
        )
        raise ConfigError(source, problems) from None


def load_config(path: Path | str) -> SessionConfig:
    """Read and validate a session file.

    Raises:
        OSError: the file cannot be read.
        ConfigError: the file is not a valid session file.
    """
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), str(path))


@dataclass(frozen=True, eq=False)
class Session:
    """Everything built from one session file."""

    config: SessionConfig
    datum: RootDatum
    group: ExtendedAffineWeylGroup
    twist: Twist
    engine: NewtonEngine
    cocenter: TwistedCocenter
    rigid: RigidAnalysis


def build_session(config: SessionConfig) -> Session:
    """Construct the root datum, group, twist and engines of a session.

    Raises:
        WeylStrataError: the datum, the Omega labels or the twist are invalid.
    """
    lattice: str | IntMatrix
    if isinstance(config.lattice, str):
        lattice = config.lattice
    else:
        lattice = tuple(tuple(row) for row in config.lattice)
    datum = build_root_datum(
        CartanSpec(
            cartan_type=config.cartan_type,
            lattice=lattice,
            central_rank=config.central_rank,
            simple_roots=_rows(config.simple_roots),
            simple_coroots=_rows(config.simple_coroots),
        )
    )
    group = ExtendedAffineWeylGroup(datum, config.omega_labels)
    twist = build_twist(
        group,
        TwistSpec(
            diagram_perm=tuple(config.twist.diagram_perm),
            omega=config.twist.omega,
            check_depth=config.bounds.twist_check_depth,
        ),
    )
    engine = NewtonEngine(twist, config.bounds.excursion)
    _logger.debug(
        "session for %s on a lattice of rank %s", config.cartan_type, datum.dimension
    )
    return Session(
        config=config,
        datum=datum,
        group=group,
        twist=twist,
        engine=engine,
        cocenter=TwistedCocenter(engine),
        rigid=RigidAnalysis(engine),
    )
