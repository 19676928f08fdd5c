"""FlowLab library"""
from .groups import (
    Group, Subgroup, CosetSpace, CrossSection, SectionPolicy,
    make_group, cyclic, dihedral, symmetric, alternating, quaternion8,
    klein_four, direct_product, semidirect_product, quotient, cross_section,
    subgroups, normal_subgroups, is_normal, automorphism_group,
)
from .flows import (
    Flow, FlowMorphism, make_flow, left_translation_flow, coset_flow,
    orbits, minimal_subflows, is_minimal, is_free, is_ambit, restrict,
    orbit_space_flow, product_flow, universal_minimal, greatest_ambit,
)
from .isomorphism import NotIsomorphic, find_isomorphism, find_homomorphism, find_group_isomorphism
from .extensions import (
    Cocycle, ExtensionWitness, cocycle_from_section, check_cocycle_identity,
    twisted_product_flow, phi_map, extension_by_compact_flow, evaluation_surjectivity,
    semidirect_flow, verify_extension_theorem,
)
from .wreath import iterated_wreath
from .towers import WreathTower, build_tower, decomposition_chain, level_consistency
from .reports import CheckResult, VerificationReport

__version__ = '1.0.0'
