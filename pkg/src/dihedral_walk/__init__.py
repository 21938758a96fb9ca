"""
Discrete-time quantum walks on the Cayley graph Cay(D_N, {a, b}) of the
dihedral group, driven by the four one-parameter families of generalized
Grover coins.

Modules
-------
coin      coin classes X, Y, Z, W, parametrization and classification
cayley    the mixed Cayley graph and its reversibility
evolve    shift/evolution operators and position-space stepping
fourier   momentum blocks U(k) and their eigen-decompositions
period    theorem, spectral and brute-force period detection
localize  time-averaged probabilities, long-time limits and sweeps
cli       the ``dihedral-walk`` command
"""

__version__ = "0.1.0"

from .cayley import CayleyGraph, DihedralVertex, build_cayley, is_reversible, vertex_index
from .coin import (
    CoinClass,
    CoinClassification,
    CoinMatrix,
    classify_coin,
    coin_from_theta,
    coin_from_xy,
    grover_coin,
    signed_permutation_angles,
)
from .errors import CapacityError, ConstraintError, InputError, NumericalError, RangeError, WalkError
from .evolve import (
    EvolutionOperator,
    PositionDistribution,
    WalkState,
    basis_state,
    build_evolution,
    build_shift,
    evolve_t,
    position_probabilities,
    step_dense,
    step_local,
)
from .fourier import (
    EigenSystem,
    FourierBlock,
    FullSpectrum,
    build_Uk,
    dft_state,
    eigen_closed_form,
    eigen_numeric,
    full_spectrum,
    idft_state,
    multiset_distance,
)
from .localize import (
    InitialCondition,
    SweepResult,
    TimeAveragedResult,
    limit_time_avg,
    sweep_n,
    sweep_theta,
    time_avg_direct,
    time_avg_spectral,
)
from .period import (
    PeriodResult,
    brute_force_period,
    niven_check,
    spectral_period,
    theorem_period,
    verify_period,
)

