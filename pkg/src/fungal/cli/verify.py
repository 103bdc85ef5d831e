"""Reduce, predict and compare against direct evaluation."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from ..circuit import CircuitDescription, CvpInstance, GateRecord, GateType, evaluate, random_circuit
from ..layout import compile
from .instance import PredictionInstance, predict


@dataclass
class VerificationReport:
    instance: str
    oracle: int
    fa: int
    first: int | None  # first step at which y was non-zero
    steps: int
    topplings: int
    T: int
    stable: bool  # F was stable when the run stopped

    @property
    def agree(self) -> bool:
        return self.oracle == self.fa

    @property
    def decided(self) -> bool:
        """The run settled the question before T: y fired, or F stabilized."""
        return self.steps < self.T and (self.first is not None or self.stable)

    def line(self) -> str:
        first = "NONE" if self.first is None else self.first
        verdict = "agree" if self.agree else "DISAGREE"
        return (f"{self.instance}: oracle={self.oracle} fa={self.fa} first={first} "
                f"steps={self.steps} topplings={self.topplings} T={self.T} {verdict}")


def verify_instance(inst: CvpInstance, name: str = "instance", *, registry=None, max_steps=None,
                    tamper=None) -> VerificationReport:
    """``tamper(cfg, emb)`` may edit F before the run; it exists to test the checker."""
    emb = compile(inst, registry=registry)
    cfg = emb.F.copy()
    if tamper is not None:
        tamper(cfg, emb)
    p = predict(PredictionInstance(cfg, emb.y, emb.T), max_steps)
    _, want = evaluate(inst)
    return VerificationReport(name, want, p.bit, p.first, p.steps, p.topplings, emb.T, p.stable)


def random_instances(n: int, m: int, seed: int, count: int):
    """``count`` instances on random NAND circuits with n inputs and m gates."""
    rng = random.Random(seed)
    for i in range(count):
        cd = random_circuit(n, m, rng.randrange(2 ** 32))
        bits = tuple(rng.randint(0, 1) for _ in range(n))
        yield f"random-{seed}-{i}", CvpInstance(cd, bits)


def all_circuits(n: int, max_gates: int):
    """Every NAND circuit on ``n`` inputs with 1..max_gates gates, output last."""
    inputs = tuple(GateRecord(i, GateType.INPUT) for i in range(1, n + 1))
    for m in range(1, max_gates + 1):
        choices = [list(itertools.combinations_with_replacement(range(1, g), 2))
                   for g in range(n + 1, n + m + 1)]
        for pick in itertools.product(*choices):
            gates = inputs + tuple(GateRecord(n + 1 + i, GateType.NAND, a, b) for i, (a, b) in enumerate(pick))
            yield CircuitDescription(gates, n + m)
