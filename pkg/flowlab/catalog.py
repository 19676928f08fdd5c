"""
Builtin group catalog
Named constructors for every group the sweep and the CLI know about
"""

from functools import lru_cache
from typing import Callable, Dict, List, Tuple
import logging

from flowlab.errors import UnknownGroup
from flowlab.groups import (
    Group, cyclic, dihedral, direct_product, inversion_action, klein_four,
    quaternion8, semidirect_product, symmetric, trivial_action,
)
from flowlab.wreath import iterated_wreath

logger = logging.getLogger(__name__)


# Semidirect catalog entries: name -> (acting order, normal order, action)
SEMIDIRECT_SPECS: Dict[str, Tuple[int, int, str]] = {
    'C2sdC3': (2, 3, 'inversion'),
    'C2sdC4': (2, 4, 'inversion'),
    'C4sdC4': (4, 4, 'inversion'),
    'C2tC3': (2, 3, 'trivial'),
}

ACTIONS = {
    'inversion': inversion_action,
    'trivial': trivial_action,
}


def semidirect_parts(name: str):
    """(H, K, theta) for a semidirect catalog entry"""
    if name not in SEMIDIRECT_SPECS:
        raise UnknownGroup(f"Unknown semidirect product: {name}")
    nh, nk, action = SEMIDIRECT_SPECS[name]
    H, K = cyclic(nh), cyclic(nk)
    return H, K, ACTIONS[action](H, K)


class GroupCatalog:
    """Registry of builtin group constructors"""

    _builders: Dict[str, Callable[[], Group]] = {}
    _descriptions: Dict[str, str] = {}

    @classmethod
    def register_group(cls, name: str, builder: Callable[[], Group], description: str = "") -> None:
        """Register a constructor under a catalog name"""
        cls._builders[name] = builder
        cls._descriptions[name] = description
        _cached.cache_clear()

    @classmethod
    def create(cls, name: str) -> Group:
        """Build (or fetch the cached) group for a catalog name"""
        if name not in cls._builders:
            raise UnknownGroup(f"Unknown catalog group: {name}")
        return _cached(name)

    @classmethod
    def get_names(cls) -> List[str]:
        return list(cls._builders)

    @classmethod
    def describe(cls, name: str) -> str:
        return cls._descriptions.get(name, "")


@lru_cache(maxsize=None)
def _cached(name: str) -> Group:
    group = GroupCatalog._builders[name]()
    logger.debug(f"Built catalog group {name} of order {group.order}")
    return group


def _semidirect_builder(name: str) -> Callable[[], Group]:
    def build() -> Group:
        H, K, theta = semidirect_parts(name)
        return semidirect_product(H, K, theta, name).group
    return build


def _wreath_builder(n: int, depth: int) -> Callable[[], Group]:
    return lambda: iterated_wreath(n, depth).group


for _n in range(1, 17):
    GroupCatalog.register_group(f"C{_n}", (lambda n: lambda: cyclic(n))(_n), f"cyclic group of order {_n}")
for _n in range(3, 9):
    GroupCatalog.register_group(f"D{_n}", (lambda n: lambda: dihedral(n))(_n), f"dihedral group of order {2 * _n}")
for _n in (3, 4):
    GroupCatalog.register_group(f"S{_n}", (lambda n: lambda: symmetric(n))(_n), f"symmetric group on {_n} letters")
GroupCatalog.register_group("Q8", quaternion8, "quaternion group (non-split over its center)")
GroupCatalog.register_group("V4", klein_four, "Klein four-group")
GroupCatalog.register_group("C2xC4", lambda: direct_product(cyclic(2), cyclic(4)), "direct product C2 x C4")
GroupCatalog.register_group("S3xC2", lambda: direct_product(symmetric(3), cyclic(2)), "direct product S3 x C2")
for _name, (_nh, _nk, _action) in SEMIDIRECT_SPECS.items():
    if _action == 'trivial':
        continue
    GroupCatalog.register_group(_name, _semidirect_builder(_name), f"C{_nh} acting on C{_nk} by {_action}")
GroupCatalog.register_group("W2_2", _wreath_builder(2, 2), "depth-2 binary tree automorphisms")
GroupCatalog.register_group("W2_3", _wreath_builder(2, 3), "depth-3 binary tree automorphisms")

