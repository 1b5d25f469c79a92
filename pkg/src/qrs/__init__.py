"""Random quantum states from pluggable entropy sources."""

__version__ = "0.1.0"

from .entropy import (  # noqa: E402
    ByteStreamDevice,
    DeterministicPrng,
    EntropySource,
    LockedSource,
    OsEntropy,
    RemoteQrng,
    open_source,
)
from .qstates import (  # noqa: E402
    DensityMatrix,
    DynamicalMatrix,
    MeasureSpec,
    PureState,
    UnitaryMatrix,
    random_dynamical_matrix,
    random_ket,
    random_local_unitary,
    random_product_ket,
    random_product_state,
    random_state_bures,
    random_state_hs,
    random_state_induced,
    random_unitary,
)
