"""Contextual prior prediction for mechanism exploration.

A contextual-bandit agent that learns a neural reward prior from mechanism
images and uses it as the prior mean of a Gaussian process driving GP-UCB
exploration, evaluated on analytically simulated sliders and doors.
"""

from .acquisition import AcquisitionConfig, best_estimate, maximize, select_ucb_action, zero_prior
from .gp import GpState, KernelParams, Posterior, add_observation, empty_state, posterior, posterior_batch, sqexp_kernel, ucb_score
from .harness import (
    CellResult,
    CurvePoint,
    EvalRecord,
    ExperimentConfig,
    ExperimentResults,
    MotionHistogram,
    Strategy,
    collect_training,
    default_config,
    evaluate_one,
    load_config,
    load_results,
    motion_histogram,
    nn_only_eval,
    normalized_regret,
    run_experiment,
    save_config,
    save_results,
)
from .mechanisms import (
    ActionBounds,
    BoundsViolation,
    DoorParams,
    Mechanism,
    MechanismKind,
    SliderParams,
    action_bounds,
    execute_action,
    generate_mechanism,
    oracle_optimal,
    render,
)
from .prior_net import (
    Dataset,
    NetworkWeights,
    TrainSchedule,
    fit,
    init_weights,
    load_weights,
    loss_and_gradient,
    make_prior,
    predict_reward,
    save_weights,
    spatial_softmax,
)

__version__ = "0.1.0"
