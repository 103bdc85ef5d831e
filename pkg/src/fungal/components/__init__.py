"""Polarized circuit components as certified cell templates."""

from .contract import BehavioralContract, Expectation, Scenario, Stimulus
from .harness import (
    CertificationFailure, CertificationReport, OverlapError, Unconnected, arrival, certify, detect,
    inject, simulate, stamp, wire_distance,
)
from .registry import SHIPPED, Registry, default_registry
from .retarder import DelayTooLarge, box_for, retarder, retarder_moves
from .template import (
    MINUS, PLUS, SIGNAL, WIRE_BLOCK, ComponentTemplate, Polarity, PolarityMismatch, Port, Role, Side,
)

__all__ = [
    "MINUS", "PLUS", "SHIPPED", "SIGNAL", "WIRE_BLOCK", "BehavioralContract",
    "CertificationFailure", "CertificationReport", "ComponentTemplate", "DelayTooLarge",
    "Expectation", "OverlapError", "Polarity", "PolarityMismatch", "Port", "Registry", "Role",
    "Scenario", "Side", "Stimulus", "Unconnected", "arrival", "box_for", "certify",
    "default_registry", "detect", "inject", "retarder", "retarder_moves", "simulate", "stamp", "wire_distance",
]
