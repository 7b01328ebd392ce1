"""Cautious preference learning over binary-attribute alternatives."""

from ordpref.core import (
    Alternative,
    AttributeSubset,
    AttributeUniverse,
    DimensionError,
    ModelError,
    PreferenceError,
    PreferenceSet,
    SubsetFamily,
    UtilityMap,
    evaluate,
    indicator,
    lex_key,
    lex_less,
    preferences_from_tiers,
)

__all__ = [
    "Alternative",
    "AttributeSubset",
    "AttributeUniverse",
    "DimensionError",
    "ModelError",
    "PreferenceError",
    "PreferenceSet",
    "SubsetFamily",
    "UtilityMap",
    "evaluate",
    "indicator",
    "lex_key",
    "lex_less",
    "preferences_from_tiers",
]
