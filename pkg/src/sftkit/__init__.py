"""Subshifts of finite type on finitely generated groups."""

from .groups import GroupElement, GroupModel, ball, get_embedding, get_model
from .sft import Alphabet, PartialConfiguration, Pattern, SftDefinition, locally_admissible

__all__ = [
    "Alphabet",
    "GroupElement",
    "GroupModel",
    "PartialConfiguration",
    "Pattern",
    "SftDefinition",
    "ball",
    "get_embedding",
    "get_model",
    "locally_admissible",
]
