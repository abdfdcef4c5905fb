import logging
from collections import defaultdict

logger = logging.getLogger(__name__)


class EventBus:
    """A simple, in-process, synchronous event bus for progress notifications."""

    def __init__(self):
        self._subscribers = defaultdict(list)

    def subscribe(self, event_name: str, callback):
        logger.debug(f"[EventBus] Subscribing '{getattr(callback, '__name__', 'lambda')}' to event '{event_name}'")
        self._subscribers[event_name].append(callback)

    def emit(self, event_name: str, *args, **kwargs):
        """
        Calls every subscriber of `event_name` in subscription order.

        A failing subscriber is logged and skipped; it never aborts the
        experiment that emitted the event.
        """
        logger.debug(f"[EventBus] Emitting event '{event_name}'")
        for callback in self._subscribers.get(event_name, []):
            try:
                callback(*args, **kwargs)
            except Exception as e:
                logger.error(f"[EventBus] Error in callback for event '{event_name}': {e}", exc_info=True)
