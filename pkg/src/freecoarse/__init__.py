"""Executable free coarse groups over windowed coarse spaces."""

from .coarse import (
    Entourage,
    Filtration,
    MetricError,
    Modulus,
    Report,
    Window,
    ball,
    bounded_filtration,
    check_asymorphism,
    check_coarse_equivalence_witness,
    coarse_modulus,
    compose,
    grid_filtration,
    inverse,
    is_bounded,
    is_connected,
    is_large,
    l1_filtration,
    metric_filtration,
    path_filtration,
    product,
    restrict,
    symmetrize,
)
from .groups import (
    AbelianExpP,
    AllGroups,
    ApElement,
    FlipElement,
    ReducedWord,
    abelianize,
    augmentation,
    extend_to_hom,
)
from .free import (
    FreeCoarseConfig,
    NormResult,
    ap_ideal_member,
    ap_norm,
    ap_norm_oracle,
    ap_norm_tjoin,
    word_norm_bounds,
)

__version__ = "0.1.0"

__all__ = [
    "Entourage",
    "Filtration",
    "MetricError",
    "Modulus",
    "Report",
    "Window",
    "ball",
    "bounded_filtration",
    "check_asymorphism",
    "check_coarse_equivalence_witness",
    "coarse_modulus",
    "compose",
    "grid_filtration",
    "inverse",
    "is_bounded",
    "is_connected",
    "is_large",
    "l1_filtration",
    "metric_filtration",
    "path_filtration",
    "product",
    "restrict",
    "symmetrize",
    "AbelianExpP",
    "AllGroups",
    "ApElement",
    "FlipElement",
    "ReducedWord",
    "abelianize",
    "augmentation",
    "extend_to_hom",
    "FreeCoarseConfig",
    "NormResult",
    "ap_ideal_member",
    "ap_norm",
    "ap_norm_oracle",
    "ap_norm_tjoin",
    "word_norm_bounds",
]
