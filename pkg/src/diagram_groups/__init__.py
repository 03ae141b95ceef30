"""Diagram groups over semigroup presentations and their action on Farley's cube complex.

The main objects are :class:`Diagram` (canonical, immutable), the prefix
order on reduced diagrams, convex windows K_{U,V} embedded in I^N, and the
translation of cubes by a group element.  :mod:`diagram_groups.thompson`
holds the Thompson's group F example with a non-attained translation length.
"""

from .diagram import (
    Diagram,
    Entry,
    Presentation,
    atomic,
    attach,
    cancel,
    compose,
    concat,
    degenerate,
    dipoles,
    equals,
    from_cells,
    inverse,
    reduce,
    thin,
)
from .errors import DiagramError
from .poset import cell_poset, glb, ideal_masks, is_prefix, is_thin, match_prefix, prefixes
from .complex import (
    ConvexWindow,
    CubeSpec,
    ball,
    check_star_property,
    cubes_at,
    distance_bounds,
    neighbors,
    window,
)
from .action import GroupElement, act_point, act_vertex, displacement, translation_data

__all__ = [
    "ConvexWindow",
    "CubeSpec",
    "Diagram",
    "DiagramError",
    "Entry",
    "GroupElement",
    "Presentation",
    "act_point",
    "act_vertex",
    "atomic",
    "attach",
    "ball",
    "cancel",
    "cell_poset",
    "check_star_property",
    "compose",
    "concat",
    "cubes_at",
    "degenerate",
    "dipoles",
    "displacement",
    "distance_bounds",
    "equals",
    "from_cells",
    "glb",
    "ideal_masks",
    "inverse",
    "is_prefix",
    "is_thin",
    "match_prefix",
    "neighbors",
    "prefixes",
    "reduce",
    "thin",
    "translation_data",
    "window",
]
