"""Split-state non-malleable codes built on a two-source non-malleable extractor."""

from .bits import BitString, from_hex, prefix, to_hex
from .fields import FieldDescriptor, FieldElem, gf
from .profiles import ParameterProfile, get_profile, load_profiles

__all__ = [
    "BitString",
    "FieldDescriptor",
    "FieldElem",
    "ParameterProfile",
    "from_hex",
    "get_profile",
    "gf",
    "load_profiles",
    "prefix",
    "to_hex",
]
