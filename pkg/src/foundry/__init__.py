"""
Command registry of the lab: FoundryManager discovers Blueprints and the
action functions they point to.
"""
from .foundry_manager import FoundryManager
from .blueprints import Blueprint, BlueprintInvocation

__all__ = [
    "FoundryManager",
    "Blueprint",
    "BlueprintInvocation",
]
