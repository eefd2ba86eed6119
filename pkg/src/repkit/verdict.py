"""Result type shared by all randomized property checkers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

__all__ = ["Verdict", "PASS", "COUNTEREXAMPLE", "NOT_APPLICABLE", "jsonable"]

PASS = "pass"
COUNTEREXAMPLE = "counterexample"
NOT_APPLICABLE = "not_applicable"


def jsonable(obj: Any) -> Any:
    """Recursively convert numpy values into plain JSON types."""
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj


@dataclass(frozen=True)
class Verdict:
    """Outcome of one property check.

    A counterexample is a result, not an error; ``witness`` holds the data
    needed to reproduce it and ``seed`` the generator seed used.
    """

    check: str
    status: str
    seed: int | None = None
    trials: int = 0
    witness: dict = field(default_factory=dict)
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return jsonable({
            "check": self.check,
            "status": self.status,
            "seed": self.seed,
            "trials": self.trials,
            "witness": self.witness,
            "note": self.note,
        })
