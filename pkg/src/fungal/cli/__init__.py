"""Command-line front end and the prediction-instance file format."""

from .instance import (
    InstanceFormatError, Prediction, PredictionInstance, decode_column, encode_column, predict,
    read_instance, write_columns, write_rect,
)
from .main import main, parser
from .render import ascii_frame, pgm_frame, render
from .verify import VerificationReport, all_circuits, random_instances, verify_instance

__all__ = [
    "InstanceFormatError", "Prediction", "PredictionInstance", "VerificationReport", "all_circuits",
    "ascii_frame", "decode_column", "encode_column", "main", "parser", "pgm_frame", "predict",
    "random_instances", "read_instance", "render", "verify_instance", "write_columns", "write_rect",
]
