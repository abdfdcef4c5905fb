# src/foundry/foundry_manager.py
import importlib
import inspect
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from src.foundry.blueprints import Blueprint

logger = logging.getLogger(__name__)


class FoundryManager:
    """
    Registry of lab commands, discovered from the filesystem.

    Blueprints live in `src/blueprints/*_bp.py` (a module-level `blueprint`),
    actions in `src/foundry/actions/*.py` (every function defined there).
    """

    def __init__(self) -> None:
        self._blueprints: Dict[str, Blueprint] = {}
        self._actions: Dict[str, Callable[..., Any]] = {}

        self.load()

    def load(self) -> None:
        self._blueprints.clear()
        self._actions.clear()
        self._discover_and_load_actions()
        self._discover_and_load_blueprints()
        logger.info(f"FoundryManager loaded {len(self._blueprints)} commands and {len(self._actions)} actions.")

    def _add_blueprint(self, blueprint: Blueprint) -> None:
        if blueprint.action_function_name not in self._actions:
            logger.error(
                f"Blueprint '{blueprint.id}' references an action function "
                f"'{blueprint.action_function_name}' that was not found. "
                "This command will be disabled."
            )
            return

        if blueprint.id in self._blueprints:
            logger.warning(f"Blueprint with id '{blueprint.id}' is being overwritten.")

        self._blueprints[blueprint.id] = blueprint
        logger.debug(f"Registered blueprint: {blueprint.id}")

    def _discover_and_load_blueprints(self) -> None:
        blueprints_dir = Path(__file__).parent.parent / "blueprints"
        package_name = "src.blueprints"
        for file_path in sorted(blueprints_dir.glob("*_bp.py")):
            module_name = f"{package_name}.{file_path.stem}"
            try:
                module = importlib.import_module(module_name)
            except ImportError as e:
                logger.error(f"Failed to import blueprint module {module_name}: {e}", exc_info=True)
                continue
            bp = getattr(module, "blueprint", None)
            if isinstance(bp, Blueprint):
                self._add_blueprint(bp)
            else:
                logger.warning(f"File {file_path.name} does not contain a valid 'blueprint' instance.")

    def _discover_and_load_actions(self) -> None:
        actions_dir = Path(__file__).parent / "actions"
        package_name = "src.foundry.actions"
        if not (actions_dir / "__init__.py").exists():
            logger.error("Action discovery failed: 'foundry/actions/__init__.py' is missing.")
            return
        for file_path in sorted(actions_dir.glob("*.py")):
            if file_path.name.startswith("__"):
                continue
            module_name = f"{package_name}.{file_path.stem}"
            try:
                module = importlib.import_module(module_name)
            except ImportError as e:
                logger.error(f"Failed to import action module {module_name}: {e}", exc_info=True)
                continue
            for name, func in inspect.getmembers(module, inspect.isfunction):
                # Only functions DEFINED in this module, not its imports
                if func.__module__ != module_name or name.startswith("_"):
                    continue
                if name in self._actions:
                    logger.warning(f"Action function '{name}' is being overwritten by module '{module_name}'.")
                self._actions[name] = func
                logger.debug(f"Registered action function: {name} from {file_path.name}")

    def get_blueprint(self, name: str) -> Optional[Blueprint]:
        return self._blueprints.get(name)

    def get_action(self, name: str) -> Optional[Callable[..., Any]]:
        return self._actions.get(name)

    @property
    def command_ids(self) -> List[str]:
        return sorted(self._blueprints)

    @property
    def blueprints(self) -> List[Blueprint]:
        return [self._blueprints[k] for k in self.command_ids]
