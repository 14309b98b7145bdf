"""disperse: chromatic-dispersion compensation with clustered FIR equalizers."""

__version__ = "0.1.0"

from .cd_model import (
    LIGHT_SPEED,
    SystemParams,
    TapProfile,
    apply_channel,
    cd_frequency_response,
    generate_taps,
    max_taps,
)
from .clustering import (
    ClusterPlan,
    FuzzyPlan,
    HardEntry,
    SoftEntry,
    fuzzify,
    kmeans,
    memberships,
)
from .complexity import (
    ComplexityReport,
    measured_rmps,
    report_for,
    rmps_clustered,
    rmps_fd,
    rmps_td,
)
from .equalizers import (
    Clustered,
    DirectFir,
    EqualizerSpec,
    FreqDomain,
    FuzzyClustered,
    equalize,
    equalize_clustered,
    equalize_direct,
    equalize_fd,
    equalize_fuzzy,
)
from .hyperopt import OptResult, SweepPoint, SweepSpec, optimize_alpha_eta, sweep
from .link_sim import (
    LinkConfig,
    SimResult,
    erfc_inv,
    generate_symbols,
    map_symbols,
    prbs_bits,
    q_from_ber,
    rrc_taps,
    run_link,
)

__all__ = [
    "LIGHT_SPEED",
    "SystemParams",
    "TapProfile",
    "apply_channel",
    "cd_frequency_response",
    "generate_taps",
    "max_taps",
    "ClusterPlan",
    "FuzzyPlan",
    "HardEntry",
    "SoftEntry",
    "fuzzify",
    "kmeans",
    "memberships",
    "ComplexityReport",
    "measured_rmps",
    "report_for",
    "rmps_clustered",
    "rmps_fd",
    "rmps_td",
    "Clustered",
    "DirectFir",
    "EqualizerSpec",
    "FreqDomain",
    "FuzzyClustered",
    "equalize",
    "equalize_clustered",
    "equalize_direct",
    "equalize_fd",
    "equalize_fuzzy",
    "OptResult",
    "SweepPoint",
    "SweepSpec",
    "optimize_alpha_eta",
    "sweep",
    "LinkConfig",
    "SimResult",
    "erfc_inv",
    "generate_symbols",
    "map_symbols",
    "prbs_bits",
    "q_from_ber",
    "rrc_taps",
    "run_link",
]
