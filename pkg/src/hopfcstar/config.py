"""Global numerical configuration.

A single relative tolerance governs every structural identity check in the
package; operations accept an explicit ``tol`` override.  Rank decisions
use the standard SVD cutoff max(shape) * sigma_max * RANK_CUTOFF.
"""

from dataclasses import dataclass

DEFAULT_TOL = 1e-9
RANK_CUTOFF = 1e-12
HAAR_FAITHFUL_EIG = 1e-10


@dataclass(frozen=True)
class NormSearchConfig:
    """Settings for the non-convex middle-matrix search.

    The search runs Nelder-Mead polish from the identity, from a
    diagonally balanced start and from ``restarts`` random positive
    matrices; every evaluated point is a genuine upper bound, so the
    reported value is the minimum over all evaluations.
    """

    restarts: int = 8
    maxiter: int = 300
    fatol: float = 1e-12
    xatol: float = 1e-8
    samples: int = 64
    seed: int = 0


FAST_SEARCH = NormSearchConfig(restarts=1, maxiter=40)
