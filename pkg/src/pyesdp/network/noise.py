from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from ..utils.exceptions import (
    InvalidParameterError,
    NetworkValidationError,
    OptionNotAvailableError,
)
from ..utils.logging import get_logger
from ..utils.schemas import ANCHOR_EDGE_PREFIX, SENSOR_EDGE_PREFIX
from .network import Network, parse_edge_key

logger = get_logger(__name__)

NOISE_MODELS = ("gaussian",)

# Stream ids mixed into the per-edge seed
_EDGE_KIND_CODES = {SENSOR_EDGE_PREFIX: 0, ANCHOR_EDGE_PREFIX: 1}


@dataclass(frozen=True, eq=False)
class MeasuredNetwork:
    """
    A network together with one noise realization of its edge lengths.

    ``measured_distances[e]`` is ``|true_distances[e] + noise_samples[e]|``.
    Constraint right-hand sides use the signed value squared, see
    :meth:`squared_measurement`.
    """

    network: Network
    noise_std: float
    noise_seed: int
    noise_samples: Mapping[str, float]
    measured_distances: Mapping[str, float]
    noise_model: str = "gaussian"

    def __post_init__(self):
        if not self.noise_std >= 0:
            raise InvalidParameterError(
                f"noise_std must be nonnegative, got {self.noise_std}."
            )
        if self.noise_model not in NOISE_MODELS:
            raise OptionNotAvailableError(
                f"Noise model {self.noise_model!r} is not available. Available: {', '.join(NOISE_MODELS)}."
            )
        object.__setattr__(self, "noise_std", float(self.noise_std))
        object.__setattr__(self, "noise_seed", int(self.noise_seed))
        object.__setattr__(
            self,
            "noise_samples",
            {k: float(v) for k, v in self.noise_samples.items()},
        )
        object.__setattr__(
            self,
            "measured_distances",
            {k: float(v) for k, v in self.measured_distances.items()},
        )

        expected = set(self.network.edge_keys)
        for name in ("noise_samples", "measured_distances"):
            keys = set(getattr(self, name))
            if keys != expected:
                missing = sorted(expected - keys)
                extra = sorted(keys - expected)
                raise NetworkValidationError(
                    f"{name} keys do not match the edges (extra={extra[:3]}, missing={missing[:3]})."
                )
        for key in self.network.edge_keys:
            implied = abs(
                self.network.true_distances[key] + self.noise_samples[key]
            )
            if self.measured_distances[key] != implied:
                raise NetworkValidationError(
                    f"Edge {key} stores measured distance {self.measured_distances[key]!r}, "
                    f"expected |true + noise| = {implied!r}."
                )

    @property
    def n(self) -> int:
        return self.network.n

    @property
    def m(self) -> int:
        return self.network.m

    @property
    def edge_keys(self) -> list[str]:
        return self.network.edge_keys

    def squared_measurement(self, key: str) -> float:
        """Signed measurement squared, ``(d + noise)**2``, for edge ``key``."""
        return (
            self.network.true_distances[key] + self.noise_samples[key]
        ) ** 2

    def __eq__(self, other) -> bool:
        if not isinstance(other, MeasuredNetwork):
            return NotImplemented
        return (
            self.network == other.network
            and self.noise_std == other.noise_std
            and self.noise_seed == other.noise_seed
            and dict(self.noise_samples) == dict(other.noise_samples)
            and dict(self.measured_distances)
            == dict(other.measured_distances)
            and self.noise_model == other.noise_model
        )

    __hash__ = None


def standard_normal_draw(noise_seed: int, key: str) -> float:
    """
    The standard normal draw behind edge ``key`` for a given noise seed.

    Each edge owns a PCG64 stream seeded with
    ``SeedSequence((noise_seed, kind, first, second))``, so the value does
    not depend on which other edges exist or in what order they are visited.
    """
    kind, first, second = parse_edge_key(key)
    code = _EDGE_KIND_CODES[kind]
    sequence = np.random.SeedSequence((int(noise_seed), code, first, second))
    rng = np.random.Generator(np.random.PCG64(sequence))
    return float(rng.standard_normal())


def apply_noise(
    net: Network,
    sigma: float,
    noise_seed: int = 0,
    noise_model: str = "gaussian",
) -> MeasuredNetwork:
    """
    Corrupts every edge length with additive noise.

    Each draw is ``sigma * z`` with ``z`` the edge's own standard normal
    draw, so two calls with different ``sigma`` and the same seed scale the
    same draws.

    Args:
        net (Network): The network to measure.
        sigma (float): Noise standard deviation, ``>= 0``.
        noise_seed (int): Seed of the per-edge streams.
        noise_model (str): Only ``"gaussian"`` is available.

    Returns:
        MeasuredNetwork: The measured network.

    Raises:
        InvalidParameterError: If ``sigma`` is negative or not finite.
        OptionNotAvailableError: If another noise model is requested.

    Examples:
        ```python
        net = generate_network(40, 5, 0.3, seed=1)
        apply_noise(net, 0.1, noise_seed=11)
        ```
    """
    if not (sigma >= 0 and np.isfinite(sigma)):
        raise InvalidParameterError(
            f"sigma must be a nonnegative number, got {sigma}."
        )
    if noise_model not in NOISE_MODELS:
        raise OptionNotAvailableError(
            f"Noise model {noise_model!r} is not available. Available: {', '.join(NOISE_MODELS)}."
        )

    samples = {}
    measured = {}
    for key in net.edge_keys:
        sample = float(sigma) * standard_normal_draw(noise_seed, key)
        samples[key] = sample
        measured[key] = abs(net.true_distances[key] + sample)

    logger.debug(
        f"Applied {noise_model} noise sigma={sigma} seed={noise_seed} "
        f"to {len(samples)} edges"
    )
    return MeasuredNetwork(
        network=net,
        noise_std=float(sigma),
        noise_seed=int(noise_seed),
        noise_samples=samples,
        measured_distances=measured,
        noise_model=noise_model,
    )
