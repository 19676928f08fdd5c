"""
Error hierarchy for groups, flows and cocycles
Every error carries a witness so reports can embed the failing data
"""

from typing import Any, Optional

from config.verification_config import ConfigError


class FlowLabError(Exception):
    """Base class for all library errors"""

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness


# Groups

class GroupError(FlowLabError, ValueError):
    """Invalid group data"""


class MalformedTable(GroupError):
    pass


class InvalidGenerators(MalformedTable):
    pass


class NoIdentity(GroupError):
    pass


class NotInvertible(GroupError):
    pass


class NotAssociative(GroupError):
    pass


class SizeCapExceeded(GroupError):
    pass


class NotASubgroup(GroupError):
    pass


class NotNormal(GroupError):
    pass


class NotASection(GroupError):
    pass


class NotAHomomorphism(GroupError):
    pass


class NotAnAutomorphism(GroupError):
    pass


class UnknownGroup(GroupError):
    pass


# Flows

class FlowError(FlowLabError, ValueError):
    """Invalid flow or flow morphism"""


class MalformedAction(FlowError):
    pass


class GroupMismatch(FlowError):
    pass


class IdentityActsNontrivially(FlowError):
    pass


class ActionLawViolated(FlowError):
    pass


class BasePointOrbitNotFull(FlowError):
    pass


class IllDefinedQuotientAction(FlowError):
    pass


class NotEquivariant(FlowError):
    pass


class NotBijective(FlowError):
    pass


# Cocycles

class CocycleError(FlowLabError, ValueError):
    """Cocycle construction failed"""


class ValueOutsideSubgroup(CocycleError):
    pass


class CocycleIdentityFailed(CocycleError):
    pass


# Documents

class SchemaError(FlowLabError, ValueError):
    """JSON document does not match its published schema"""


__all__ = [
    'ConfigError', 'FlowLabError',
    'GroupError', 'MalformedTable', 'InvalidGenerators', 'NoIdentity', 'NotInvertible', 'NotAssociative',
    'SizeCapExceeded', 'NotASubgroup', 'NotNormal', 'NotASection',
    'NotAHomomorphism', 'NotAnAutomorphism', 'UnknownGroup',
    'FlowError', 'MalformedAction', 'GroupMismatch', 'IdentityActsNontrivially',
    'ActionLawViolated', 'BasePointOrbitNotFull', 'IllDefinedQuotientAction',
    'NotEquivariant', 'NotBijective',
    'CocycleError', 'ValueOutsideSubgroup', 'CocycleIdentityFailed',
    'SchemaError',
]
