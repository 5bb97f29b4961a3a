"""Decision and synthesis procedures for groups and orbit closures."""
from .containment import candidate_values, containment_iso, rational_point, rational_points, symbolic_matrix
from . import types as _types
from .types import *  # noqa: F401,F403
from .types import UNKNOWN, DetInstance, Verdict
from .verify import closure_ideal, relation_lattice, verify_certificate
from .orbit import exponent_seeds, orbit_det_commutative, orbit_det_semisimple, orbit_target
from .group import (
    conjugate_ideal,
    diagonal_conjugates,
    gen_general_cyclic,
    gen_semisimple_cyclic,
    group_det_commutative,
    group_det_semisimple,
    is_alg_group,
    is_commutative_group,
    unipotent_slice,
)
from ..poly import ResourceLimit

PROCEDURES = {
    "group-semisimple": group_det_semisimple,
    "group-commutative": group_det_commutative,
    "orbit-semisimple": orbit_det_semisimple,
    "orbit-commutative": orbit_det_commutative,
    "gen-cyclic-semisimple": gen_semisimple_cyclic,
    "gen-cyclic-general": gen_general_cyclic,
}


def detect(inst: DetInstance, **opts) -> Verdict:
    """Run the procedure for ``inst.mode``."""
    try:
        return PROCEDURES[inst.mode](inst, **opts)
    except ResourceLimit:
        return Verdict(UNKNOWN, reason="resource limit", limit_hit=True)


__all__ = [
    "PROCEDURES",
    "detect",
    "candidate_values",
    "containment_iso",
    "rational_point",
    "rational_points",
    "symbolic_matrix",
    "closure_ideal",
    "relation_lattice",
    "verify_certificate",
    "exponent_seeds",
    "orbit_det_commutative",
    "orbit_det_semisimple",
    "orbit_target",
    "conjugate_ideal",
    "diagonal_conjugates",
    "gen_general_cyclic",
    "gen_semisimple_cyclic",
    "group_det_commutative",
    "group_det_semisimple",
    "is_alg_group",
    "is_commutative_group",
    "unipotent_slice",
] + _types.__all__
