# foundry/blueprints.py

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List

logger = logging.getLogger(__name__)


@dataclass
class Blueprint:
    """
    One lab command: the config keys it reads and the action that runs it.

    `parameters` follows a JSON-schema-like layout: {"properties": {key: {"description": ...}}}.
    """
    id: str
    description: str
    parameters: Dict[str, Any]
    action_function_name: str
    acceptance: str = ""

    @property
    def config_keys(self) -> List[str]:
        return list(self.parameters.get("properties", {}))


@dataclass
class BlueprintInvocation:
    """A command bound to the keyword arguments its action will receive."""
    blueprint: Blueprint
    parameters: Dict[str, Any] = field(default_factory=dict)

