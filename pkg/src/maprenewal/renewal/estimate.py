"""Result record shared by the Monte Carlo and Fourier routes."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class RenewalEstimate:
    """A renewal sum with its error budget.

    ``error`` adds the statistical, truncation and quadrature parts; each is
    zero for the routes that do not incur it.
    """

    value: float
    stderr: float
    n_max: int
    n_traj: int
    tail_bound: float
    route: str = "mc"
    a: tuple = ()
    quadrature_error: float = 0.0
    tail_correction: float = 0.0
    components: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.stderr < 0 or self.tail_bound < 0 or self.quadrature_error < 0:
            raise ValueError("error terms must be non-negative")

    @property
    def error(self) -> float:
        return self.stderr + self.tail_bound + self.quadrature_error
