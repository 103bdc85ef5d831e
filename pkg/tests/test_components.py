import shutil

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fungal.components import (
    MINUS, PLUS, SHIPPED, WIRE_BLOCK, BehavioralContract, CertificationFailure, ComponentTemplate,
    DelayTooLarge, OverlapError, PolarityMismatch, Port, Registry, Role, Side, Unconnected, box_for,
    certify, detect, inject, retarder, simulate, stamp, wire_distance,
)
from fungal.components.harness import arrival
from fungal.engine import HV, Configuration, run

GATES = ("diode_plus", "diode_minus", "dup_plus", "dup_minus", "merge_plus", "merge_minus",
         "semicross_plus", "semicross_minus", "switch_plus", "switch_minus")


@pytest.fixture(scope="module")
def reg():
    return Registry()


def line(blocks, name="line"):
    ports = {"x": Port("x", Role.INPUT, None, Side.LEFT, 0, 0),
             "z": Port("z", Role.OUTPUT, None, Side.RIGHT, 0, blocks - 1)}
    return ComponentTemplate(name, np.full((2, 2 * blocks), 3, np.uint8), ports)


def test_stamp():
    blk = ComponentTemplate("blk", WIRE_BLOCK.copy())
    c = stamp(Configuration(), blk, (3, 4))
    assert c.window(6, 8, 2, 2).tolist() == [[3, 3], [3, 3]]
    with pytest.raises(OverlapError):
        stamp(c, blk, (3, 4))
    c = stamp(c, blk, (3, 5))
    assert c.window(6, 8, 2, 4).tolist() == [[3] * 4] * 2


def test_inject(reg):
    d = reg.templates["diode_plus"]
    c = inject(Configuration.from_array(d.cells), d.port("x"), PLUS)
    r, k = d.port("x").cell
    assert c.window(r, k, 2, 2).tolist() == [[4, 3], [3, 3]]
    m = reg.templates["diode_minus"]
    c = inject(Configuration.from_array(m.cells), m.port("x"), MINUS)
    r, k = m.port("x").cell
    assert c.window(r, k, 2, 2).tolist() == [[3, 3], [4, 3]]
    with pytest.raises(PolarityMismatch):
        inject(Configuration.from_array(m.cells), m.port("x"), PLUS)


def test_detect():
    t = line(2)
    assert simulate(t, {"x": (PLUS, 0)}).outcome["z"] == (1, PLUS)
    cfg = inject(Configuration.from_array(t.cells), t.port("x"), PLUS)
    _, tr = run(cfg, HV, 40, list(t.port("z").sentinels().values()))
    assert detect(tr, t.port("z")) == 1
    assert arrival(tr, t.port("z")) == (1, PLUS)
    _, tr = run(Configuration.from_array(t.cells), HV, 40, list(t.port("z").sentinels().values()))
    assert detect(tr, t.port("z")) is None


def test_open_switch_blocks_source(reg):
    for name in ("switch_plus", "switch_minus"):
        t = reg.templates[name]
        assert simulate(t, {"source": (t.port("source").polarity, 0)}).outcome["drain"] is None
        both = simulate(t, {"gate": (t.port("gate").polarity, 0), "source": (t.port("source").polarity, 0)})
        assert both.outcome["drain"] == (3, t.port("drain").polarity)


def test_shipped_registry_certifies(reg):
    assert sorted(reg.names()) == sorted(SHIPPED)
    for rep in reg.certify_all():
        assert rep.ok, rep.summary()
        assert rep.leaks == 0


@pytest.mark.parametrize("name", GATES)
def test_gate_wire_distance_is_four(reg, name):
    t = reg.templates[name]
    for a in t.inputs():
        for b in t.outputs():
            if a.polarity is b.polarity:
                assert wire_distance(t, a, b) == 4


def test_retarder_metadata(reg):
    t = reg.templates["retarder_base"]
    assert wire_distance(t, "x", "z") == 15
    assert reg.certify("retarder_base").latencies[("x", "z")][0] >= 12
    assert wire_distance(line(2), "x", "z") == 1


def test_unconnected():
    t = line(3)
    t.cells[:, 2:4] = 0
    with pytest.raises(Unconnected):
        wire_distance(t, "x", "z")


@pytest.mark.parametrize("name", [n for n in GATES + ("wire", "retarder_base")])
def test_latency_within_wire_distance(reg, name):
    t = reg.templates[name]
    for (a, b), (_, hi) in reg.certify(name).latencies.items():
        assert hi <= wire_distance(t, a, b)


@pytest.mark.parametrize("name", GATES + ("wire",))
def test_single_use(reg, name):
    t = reg.templates[name]
    ins = {p.name: (p.polarity or PLUS, 0) for p in t.inputs() if p.role is not Role.SOURCE}
    if name.startswith("switch"):
        ins = {"gate": (t.port("gate").polarity, 0), "source": (t.port("source").polarity, 0)}
    if name.startswith("semicross"):
        ins = dict(list(ins.items())[:1])
    first = simulate(t, ins)
    assert any(first.outcome[p.name] for p in t.outputs())
    for port, (pol, _) in ins.items():
        again = simulate(t, {port: (pol, first.end_time // 4 + 1)}, config=first.config, start=first.end_time)
        assert not any(again.outcome[p.name] for p in t.outputs())


def test_forward_polarity_preserved(reg):
    for name in GATES:
        t = reg.templates[name]
        if name.startswith(("switch", "semicross")):
            continue
        r = simulate(t, {p.name: (p.polarity, 0) for p in t.inputs()})
        for p in t.outputs():
            assert r.outcome[p.name][1] is p.polarity


def test_broken_wire_fails_certification(reg, tmp_path):
    bad = reg.templates["wire"].cells.copy()
    bad[1, 4] = 2
    t = ComponentTemplate("wire", bad, reg.templates["wire"].ports)
    with pytest.raises(CertificationFailure):
        certify(t, reg.contracts["wire"])
    rep = certify(t, reg.contracts["wire"], strict=False)
    assert not rep.ok and "silent" in rep.failures[0]


def test_registry_refuses_uncertified(reg, tmp_path):
    shutil.copytree(reg.root, tmp_path / "reg")
    p = tmp_path / "reg" / "wire.tpl"
    p.write_text(p.read_text().replace("33333333", "33332333", 1))
    broken = Registry(tmp_path / "reg")
    with pytest.raises(CertificationFailure):
        broken.get("wire")
    assert broken.get("diode_plus") is broken.templates["diode_plus"]
    with pytest.raises(FileNotFoundError):
        Registry(tmp_path / "missing")


def test_template_text_round_trip(reg):
    for t in reg.templates.values():
        u = ComponentTemplate.from_text(t.to_text(), t.name)
        assert np.array_equal(u.cells, t.cells) and u.ports == t.ports and u.to_text() == t.to_text()


def test_contract_format():
    bc = BehavioralContract.from_text(
        "window 0 5\nquiet 3\nscenario s: x@0 y-@1..W => z+ FIRES w* SILENT\n")
    (sc,) = bc.scenarios
    assert bc.offset_window == (0, 5) and bc.quiet_zone == 3
    assert [dict(o) for o in sc.offsets(5)][-1] == {"x": 0, "y": 5}
    assert sc.stimuli[1].polarity is MINUS
    assert [(e.port, e.fires) for e in sc.expected] == [("z", True), ("w", False)]


def test_retarder_sizes():
    assert np.array_equal(retarder(12).cells, Registry().templates["retarder_base"].cells)
    straight = retarder(0, 12)
    assert straight.shape == retarder(12).shape
    assert wire_distance(straight, "x", "z") == straight.delay == 7
    assert retarder(48, 48).shape == retarder(12, 48).shape
    with pytest.raises(DelayTooLarge):
        retarder(49, 48)


@settings(max_examples=30)
@given(st.integers(13, 160), st.data())
def test_retarder_latency_is_certified(D, data):
    delay = data.draw(st.integers(0, D))
    t = retarder(delay, D)
    assert t.blocks == box_for(D)
    r = simulate(t, {"x": (PLUS, 0)}, cap_cycles=8 * D + 100)
    assert r.outcome["z"] == (t.delay, PLUS)
    assert t.delay >= delay and not r.leaks
