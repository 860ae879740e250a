"""Koopman operator approximation with learned dictionaries.

The main entry points are :func:`train_kdla` (gradient descent through the
pseudoinverse), :func:`train_kdl_alternating` (the alternating EDMD-DL
baseline), :func:`train_node` (neural-ODE baseline) and the rollout functions
:func:`evolve_observable_only` / :func:`evolve_state_observable`.
"""

from .autodiff import AdamState, MlpParams, adam_step, init_mlp, make_rng, mlp_backward, mlp_forward
from .errors import ConfigError, DimensionError, KdlaError, NumericalError, TrainingError
from .koopman import (
    DictionaryNet,
    KoopmanModel,
    KoopmanSpectrum,
    ObservablePair,
    TrainConfig,
    edmd_fit,
    evolve_observable_only,
    evolve_state_observable,
    kdla_loss,
    kdla_loss_grad,
    lift,
    make_dictionary,
    readback,
    spectrum,
    train_kdl_alternating,
    train_kdla,
)
from .linalg import eigvals, pinv, pinv_vjp, svd
from .metrics import basin_map, energy, power_spectrum, spectrum_report, tracking_error
from .node import NodeModel, NodeTrainConfig, make_node, node_evolve, node_loss, node_predict, train_node
from .systems import (
    KSE,
    Burgers,
    CylinderROM,
    Duffing,
    Rossler,
    SnapshotDataset,
    StuartLandau,
    Trajectory,
    etdrk4_integrate,
    generate_dataset,
    recipe,
    rhs_eval,
    rk4_integrate,
    stuart_landau_exact,
)

__version__ = "0.1.0"
