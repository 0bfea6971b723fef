from ._qw2d import (
    __version__,
    classify_spacings,
    clean_invariant,
    evolve_distribution,
    invariant,
    parse_angle,
    preset,
    presets,
    run_experiment,
    spacing_samples,
    transmission,
    validate,
)

__all__ = [
    "__version__",
    "classify_spacings",
    "clean_invariant",
    "evolve_distribution",
    "invariant",
    "parse_angle",
    "preset",
    "presets",
    "run_experiment",
    "spacing_samples",
    "transmission",
    "validate",
]
