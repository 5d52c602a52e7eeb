"""Model parameters for the sticky/elastic boundary family.

The boundary condition couples four coefficients: a sticky weight ``eta``
(how much the boundary slows the process down), a reflection weight
``sigma``, an elastic absorption weight ``c`` (zero disables killing) and a
fractional order ``alpha`` (1 recovers the classical sticky case).  The bulk
generator is ``gen_norm * d^2/dx^2``; all closed forms in this package assume
``gen_norm == 1``, i.e. Gaussian increments of variance ``2*dt``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidParameterError


@dataclass(frozen=True)
class ModelParams:
    """Coefficient quadruple (eta, sigma, c, alpha) plus the generator scale.

    :param eta:   sticky coefficient, > 0
    :param sigma: reflection coefficient, > 0
    :param c:     elastic (absorption) coefficient, >= 0
    :param alpha: fractional order in (0, 1]
    :param gen_norm: diffusion coefficient of the generator; fixed to 1.0
        because every closed form used for validation assumes the kernel
        exp(-z^2/4t)/sqrt(4 pi t)
    """

    eta: float = 1.0
    sigma: float = 1.0
    c: float = 0.0
    alpha: float = 1.0
    gen_norm: float = 1.0

    def __post_init__(self):
        if not self.eta > 0:
            raise InvalidParameterError(f"eta must be positive, got {self.eta}")
        if not self.sigma > 0:
            raise InvalidParameterError(f"sigma must be positive, got {self.sigma}")
        if self.c < 0:
            raise InvalidParameterError(f"c must be nonnegative, got {self.c}")
        if not 0 < self.alpha <= 1:
            raise InvalidParameterError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.gen_norm != 1.0:
            raise InvalidParameterError(
                "gen_norm is fixed to 1.0; closed forms assume generator d^2/dx^2"
            )

    @property
    def stickiness(self) -> float:
        """Local-time weight eta/sigma of the boundary clock."""
        return self.eta / self.sigma

    @property
    def is_fractional(self) -> bool:
        return self.alpha < 1.0
