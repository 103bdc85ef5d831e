"""Boolean circuits: parsing, NAND normalization and direct evaluation."""

from .model import (
    BadInputGate, CircuitDescription, CircuitError, CvpInstance, ForwardReference, GateRecord,
    GateType, MultipleOutputs, UnsortedGates, cone, evaluate, load, load_instance, parse,
    parse_instance, random_circuit, to_nand,
)

__all__ = [
    "BadInputGate", "CircuitDescription", "CircuitError", "CvpInstance", "ForwardReference",
    "GateRecord", "GateType", "MultipleOutputs", "UnsortedGates", "cone", "evaluate", "load",
    "load_instance", "parse", "parse_instance", "random_circuit", "to_nand",
]
