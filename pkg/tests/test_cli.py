import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fungal.circuit import CvpInstance, parse, random_circuit
from fungal.cli import (
    InstanceFormatError, PredictionInstance, all_circuits, decode_column, encode_column, main,
    pgm_frame, predict, read_instance, render, verify_instance, write_rect,
)
from fungal.engine import Configuration
from fungal.layout import compile
from reference import wire

NOT = "1 INPUT 0 0\n2 NAND 1 1\n"


@pytest.fixture
def not_file(tmp_path):
    p = tmp_path / "not.circ"
    p.write_text(NOT)
    return p


def reduce_to(tmp_path, circ, bits, name="out.inst"):
    out = tmp_path / name
    assert main(["reduce", str(circ), bits, "-o", str(out)]) == 0
    return out


@given(arrays(np.uint8, st.integers(0, 300), elements=st.integers(0, 7)))
def test_column_code_round_trip(col):
    line = encode_column(col)
    assert np.array_equal(decode_column(line, col.size), col)
    assert "*" not in line or all(int(tok.split("*")[0]) > 1 for tok in line.split() if "*" in tok)


def test_column_code_errors():
    with pytest.raises(InstanceFormatError):
        decode_column("3*3 x", 4)
    with pytest.raises(InstanceFormatError):
        decode_column("3*3", 4)


@pytest.mark.parametrize("bit, want", [(0, "1"), (1, "0")])
def test_reduce_then_predict(tmp_path, not_file, capsys, bit, want):
    inst = reduce_to(tmp_path, not_file, str(bit))
    capsys.readouterr()
    assert main(["predict", str(inst)]) == 0
    assert capsys.readouterr().out.strip() == want


def test_reduce_file_matches_compile(tmp_path, not_file):
    pi = read_instance(reduce_to(tmp_path, not_file, "0"))
    emb = compile(CvpInstance(parse(NOT), (0,)))
    assert (pi.y, pi.T) == (emb.y, emb.T)
    assert pi.R == emb.F and pi.R.support == emb.F.support


def test_reduce_file_matches_compile_across_buffer_batches(tmp_path):
    # wide enough that the stream repaints its buffer between columns
    xor = parse("1 INPUT 0 0\n2 INPUT 0 0\n3 NAND 1 2\n4 NAND 1 3\n5 NAND 2 3\n6 NAND 4 5\n")
    circ = tmp_path / "xor.circ"
    circ.write_text(xor.to_text())
    pi = read_instance(reduce_to(tmp_path, circ, "01"))
    emb = compile(CvpInstance(xor, (0, 1)))
    assert emb.shape[1] > (1 << 20) // emb.shape[0]
    assert pi.R == emb.F
    assert predict(pi).bit == 1


def test_reduce_is_byte_identical(tmp_path, not_file):
    a = reduce_to(tmp_path, not_file, "1", "a")
    b = reduce_to(tmp_path, not_file, "1", "b")
    assert a.read_bytes() == b.read_bytes()
    head, *_, probe, bound = a.read_text().splitlines()
    assert head.startswith("cols 0 0 ") and probe.startswith("probe ") and bound.startswith("bound ")


def test_reduce_uses_inputs_line(tmp_path, capsys):
    p = tmp_path / "x.circ"
    p.write_text(NOT + "inputs 1\n")
    out = tmp_path / "x.inst"
    assert main(["reduce", str(p), "-o", str(out)]) == 0
    capsys.readouterr()
    main(["predict", str(out)])
    assert capsys.readouterr().out.strip() == "0"


def test_malformed_circuit(tmp_path, capsys):
    p = tmp_path / "bad.circ"
    p.write_text("1 INPUT 0 0\n2 NAND 1\n")
    assert main(["reduce", str(p), "1"]) == 2
    assert "bad.circ:2" in capsys.readouterr().err


def test_usage_errors(tmp_path, not_file):
    assert main(["reduce", str(not_file), "2"]) == 2
    assert main(["reduce", str(tmp_path / "missing"), "1"]) == 2
    assert main(["predict", str(tmp_path / "missing")]) == 2
    (tmp_path / "junk").write_text("hello\n")
    assert main(["predict", str(tmp_path / "junk")]) == 2
    assert main(["verify"]) == 2
    assert main(["--registry", str(tmp_path / "nope"), "certify"]) == 2
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2


def test_rect_instances(tmp_path):
    p = tmp_path / "w.inst"
    with p.open("w") as f:
        write_rect(f, Configuration.from_array(wire(6)), (2, 10), 100)
    pi = read_instance(p)
    assert predict(pi).bit == 1 and predict(pi).first == 20
    zero = PredictionInstance(pi.R, (2, 10), 0)
    assert predict(zero).bit == 0 and predict(zero).steps == 0


def test_truncated_instance(tmp_path, not_file):
    text = reduce_to(tmp_path, not_file, "0").read_text().splitlines()
    bad = tmp_path / "cut.inst"
    bad.write_text("\n".join(text[:5]) + "\n")
    with pytest.raises(InstanceFormatError):
        read_instance(bad)
    bad.write_text("\n".join(text[:-1]) + "\n")
    with pytest.raises(InstanceFormatError):
        read_instance(bad)


def test_max_steps_override(tmp_path, not_file, capsys):
    inst = reduce_to(tmp_path, not_file, "0")
    capsys.readouterr()
    assert main(["--max-steps-override", "5", "predict", str(inst)]) == 0
    assert capsys.readouterr().out.strip() == "0"


def test_early_exit_is_sound():
    for seed in range(6):
        cd = random_circuit(2, 3, seed)
        for bits in ((0, 1), (1, 1)):
            emb = compile(CvpInstance(cd, bits))
            pi = PredictionInstance(emb.F, emb.y, emb.T)
            fast, full = predict(pi), predict(pi, early_exit=False)
            assert fast.bit == full.bit and fast.first == full.first
            assert fast.steps <= full.steps


def test_verify_agrees(not_file, capsys):
    assert main(["verify", str(not_file), "0"]) == 0
    assert "1/1 agree" in capsys.readouterr().out


def test_verify_exhaustive_small(capsys):
    assert main(["verify", "--exhaustive", "1", "2"]) == 0
    out = capsys.readouterr().out
    assert out.startswith(f"{2 * (1 + 3)}/{2 * (1 + 3)} agree")


def test_all_circuits_counts():
    # gate k of m picks an unordered pair of earlier gates, repeats allowed
    assert sum(1 for _ in all_circuits(2, 1)) == 3
    assert sum(1 for _ in all_circuits(2, 2)) == 3 + 3 * 6


def test_tampered_embedding_disagrees():
    inst = CvpInstance(parse(NOT), (0,))

    def cut_output(cfg, emb):
        r, c = emb.y
        for k in range(c - 8, c):  # break the positive output wire just before the probe
            cfg.set_cell(r, k, 0)
            cfg.set_cell(r - 1, k, 0)

    assert verify_instance(inst).agree
    rep = verify_instance(inst, tamper=cut_output)
    assert not rep.agree and rep.fa == 0 and rep.oracle == 1
    assert "DISAGREE" in rep.line()


def test_certify_command(capsys):
    assert main(["certify"]) == 0
    assert "14/14 templates certified" in capsys.readouterr().out


def test_certify_reports_broken_wire(tmp_path, capsys):
    import shutil

    from fungal.components.registry import DATA
    shutil.copytree(DATA, tmp_path / "reg")
    p = tmp_path / "reg" / "wire.tpl"
    p.write_text(p.read_text().replace("33333333", "33332333", 1))
    assert main(["--registry", str(tmp_path / "reg"), "certify"]) == 1
    out = capsys.readouterr().out
    assert "wire: FAIL" in out and "13/14" in out


def test_render_wire_frames(tmp_path):
    p = tmp_path / "w.inst"
    with p.open("w") as f:
        write_rect(f, Configuration.from_array(wire(8)), (2, 14), 200)
    pi = read_instance(p)
    paths = render(pi, tmp_path / "frames", every=1, window=(0, 0, 2, 16), cycles=7)
    assert [q.name for q in paths] == [f"frame_{k:06d}.txt" for k in range(8)]
    for k, q in enumerate(paths):
        rows = q.read_text().splitlines()
        assert rows[0][2 * k] == "4"  # the signal sits in block k after k cycles
        assert rows[0].count("4") == 1


def test_render_empty_window_and_pgm(tmp_path):
    pi = PredictionInstance(Configuration.from_array(wire(4)), (2, 6), 40)
    paths = render(pi, tmp_path / "e", window=(50, 50, 3, 5), cycles=2)
    assert all(q.read_text() == "-----\n" * 3 for q in paths)
    paths = render(pi, tmp_path / "g", fmt="pgm", window=(0, 0, 2, 8), cycles=3)
    data = paths[0].read_bytes()
    assert data.startswith(b"P5\n8 2\n7\n") and len(data) == len(b"P5\n8 2\n7\n") + 16
    assert max(data[len(b"P5\n8 2\n7\n"):]) <= 7
    assert pgm_frame(np.zeros((1, 1), np.uint8)) == b"P5\n1 1\n7\n\x00"


def test_render_command(tmp_path, capsys):
    p = tmp_path / "w.inst"
    with p.open("w") as f:
        write_rect(f, Configuration.from_array(wire(4)), (2, 6), 40)
    out = tmp_path / "fr"
    assert main(["render", str(p), "--every", "2", "--format", "pgm", "--out", str(out)]) == 0
    assert sorted(q.name for q in out.iterdir())[0] == "frame_000000.pgm"


def test_stdout_reduce(not_file, capsys):
    assert main(["reduce", str(not_file), "1"]) == 0
    text = capsys.readouterr().out
    assert text.startswith("cols ") and text.rstrip().splitlines()[-1].startswith("bound ")

