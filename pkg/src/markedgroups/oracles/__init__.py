"""Word-problem oracles and the group catalog."""

from markedgroups.oracles.base import (NONTRIVIAL, TRIVIAL, BudgetExceededError, ElementIndex,
                                       MarkedGroup, MarkedGroupError, NormalFormGroup,
                                       OrderResult, RemarkedGroup, UnknownVerdictError, Verdict,
                                       remark)
from markedgroups.oracles.closure import FinitelyPresentedGroup, closure_member
from markedgroups.oracles.families import (BaumslagSolitarGroup, CyclicGroup, FreeAbelianGroup,
                                           FreeGroup, HeisenbergGroup, LamplighterGroup,
                                           SymShiftFiniteGroup, SymShiftGroup)
from markedgroups.oracles.specs import (GroupSpec, SpecError, canonical_spec, catalog,
                                        instantiate, parse_spec)

__all__ = [
    "NONTRIVIAL", "TRIVIAL", "BudgetExceededError", "ElementIndex", "MarkedGroup",
    "MarkedGroupError", "NormalFormGroup", "OrderResult", "RemarkedGroup",
    "UnknownVerdictError", "Verdict", "remark", "FinitelyPresentedGroup", "closure_member",
    "BaumslagSolitarGroup", "CyclicGroup", "FreeAbelianGroup", "FreeGroup", "HeisenbergGroup",
    "LamplighterGroup", "SymShiftFiniteGroup", "SymShiftGroup", "GroupSpec", "SpecError",
    "canonical_spec", "catalog", "instantiate", "parse_spec",
]
