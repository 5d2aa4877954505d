"""Subgroup conjugacy separability toolkit.

Decides conjugacy-into for finitely generated subgroups of free groups and of
fundamental groups of finite trees of finite groups, and produces checkable
finite witnesses of non-conjugacy.
"""

__version__ = "0.1.0"
SCHEMA_VERSION = 1
