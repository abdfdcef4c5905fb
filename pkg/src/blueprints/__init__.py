"""
One module per lab command. Each `*_bp.py` module defines a `blueprint`
that the FoundryManager registers under its id.
"""
