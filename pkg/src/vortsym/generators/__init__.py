"""Symmetry generators, brackets and finite transformations."""

from .algebra import (
    BPLANE,
    FPLANE,
    SPHERE0,
    SPHERE_OMEGA,
    PlaneGenerator,
    SphereGenerator,
    basis_decomposition,
    commutator,
    distance,
    eval_vector_field,
    is_zero,
    map_generator_between_frames,
    plane_basis,
    rotating_frame_basis,
    sphere_basis,
)
from .transforms import (
    PointTransformation,
    compose,
    discrete_symmetry,
    flow,
    frame_map,
    frame_transform,
    identity,
    pushforward,
)

__all__ = [
    "BPLANE",
    "FPLANE",
    "SPHERE0",
    "SPHERE_OMEGA",
    "PlaneGenerator",
    "SphereGenerator",
    "PointTransformation",
    "basis_decomposition",
    "commutator",
    "compose",
    "discrete_symmetry",
    "distance",
    "eval_vector_field",
    "flow",
    "frame_map",
    "frame_transform",
    "identity",
    "is_zero",
    "map_generator_between_frames",
    "plane_basis",
    "pushforward",
    "rotating_frame_basis",
    "sphere_basis",
]
