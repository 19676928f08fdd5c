"""
Verification reports
Ordered check ledgers shared by every pipeline; checks never raise,
failures are recorded with a witness
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np


@dataclass
class CheckResult:
    passed: bool
    checked: int = 0
    witness: Any = None

    def to_dict(self) -> Dict[str, Any]:
        return {'pass': bool(self.passed), 'checked': int(self.checked), 'witness': to_plain(self.witness)}


@dataclass
class VerificationReport:
    """Check name -> CheckResult, in insertion order"""
    title: str = ""
    checks: Dict[str, CheckResult] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def add(self, name: str, passed: bool, checked: int = 0, witness: Any = None) -> CheckResult:
        result = CheckResult(bool(passed), int(checked), witness)
        self.checks[name] = result
        return result

    def merge(self, other: 'VerificationReport', prefix: Optional[str] = None) -> None:
        for name, result in other.checks.items():
            self.checks[f"{prefix}.{name}" if prefix else name] = result
        self.notes.extend(other.notes)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.checks.values())

    @property
    def failures(self) -> List[str]:
        return [name for name, result in self.checks.items() if not result.passed]

    @property
    def checked(self) -> int:
        return sum(result.checked for result in self.checks.values())

    def to_dict(self) -> Dict[str, Any]:
        document = {
            'title': self.title,
            'pass': self.passed,
            'checks': {name: result.to_dict() for name, result in self.checks.items()},
        }
        if self.notes:
            document['notes'] = list(self.notes)
        return document


def to_plain(value: Any) -> Any:
    """Convert numpy scalars/arrays and tuples into JSON-ready Python values"""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    return value
