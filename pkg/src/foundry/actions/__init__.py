"""
Action functions behind the lab commands, discovered by the FoundryManager.

Every function defined in a module of this package is registered under its
own name; parameters named `cfg`, `event_bus` and `app_settings` are injected
by the CommandHandler.
"""
