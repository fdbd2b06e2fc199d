"""Canonical potentials and equilibrium measures on the Berkovich projective
line, fiberwise over hybrid base spectra, with degeneration sweeps."""

from .places import LogMag, Place, PlaceError, abs_log, epsilon_of, flow_place
from .points import (
    GAUSS,
    BerkPoint,
    MetricGraph,
    build_skeleton,
    classical,
    disk,
    eval_log_abs,
    flow_point,
    infinity,
    retract,
)
from .graphs import PLFunction, GraphMeasure, dirichlet_extend, graph_laplacian, mass_in
from .rmaps import HomogeneousLift, preimages_arch, pushforward_values, apply_point
from .green import (
    deviation_g,
    ecart_dK,
    gmax,
    lambda_limit,
    lambda_n,
    standard_potential,
)
from .measures import (
    Measure,
    energy_pairing,
    equilibrium_arch,
    equilibrium_nonarch,
    integrate,
    pullback_measure,
    pushforward_measure,
)
from .affable import AffableFn, affable_combine, affable_eval, mass_bound, restrict_to_skeleton
from .battery import load_battery, standard_battery
from .sweeps import SweepConfig, default_grid, report_contraction, sweep_chi, sweep_equilibrium

__version__ = "0.1.0"
