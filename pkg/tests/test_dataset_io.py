import math

import numpy as np
import pytest
import soundfile as sf
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from conftest import write_example_clip
from spatial_mixup.dataset_io import (
    AccdoaEvent,
    AccdoaFrameLabels,
    AmbisonicClip,
    read_audio,
    read_labels,
    write_audio,
    write_labels,
)
from spatial_mixup.sph import Direction
from spatial_mixup.transform import DirectionalTransform, apply_spatial_mixup


def test_float_wav_roundtrip_is_exact(tmp_path, rng):
    write_example_clip(tmp_path, "a", rng, labels=False)
    clip = read_audio(tmp_path / "a.wav")
    assert (clip.order, clip.sample_rate, clip.convention) == (1, 24000, "N3D")
    write_audio(clip, tmp_path / "b.wav")
    a, _ = sf.read(str(tmp_path / "a.wav"), dtype="float32")
    b, _ = sf.read(str(tmp_path / "b.wav"), dtype="float32")
    np.testing.assert_array_equal(a, b)
    assert sf.info(str(tmp_path / "b.wav")).subtype == "FLOAT"


@pytest.mark.parametrize("subtype,bits", [("PCM_16", 16), ("PCM_24", 24)])
def test_pcm_roundtrip_within_one_step(tmp_path, rng, subtype, bits):
    write_example_clip(tmp_path, "a", rng, subtype=subtype, labels=False)
    write_audio(read_audio(tmp_path / "a.wav"), tmp_path / "b.wav")
    a, _ = sf.read(str(tmp_path / "a.wav"))
    b, _ = sf.read(str(tmp_path / "b.wav"))
    assert np.max(np.abs(a - b)) <= 2.0 ** -(bits - 1)
    assert sf.info(str(tmp_path / "b.wav")).subtype == subtype


def test_sn3d_scaling_on_read(tmp_path):
    data = np.tile([[0.1, 0.2, -0.3, 0.05]], (10, 1)).astype("float32")
    sf.write(str(tmp_path / "a.wav"), data, 24000, subtype="FLOAT")
    clip = read_audio(tmp_path / "a.wav")
    np.testing.assert_allclose(clip.samples[:, 0], data[0].astype(float) * [1, math.sqrt(3), math.sqrt(3), math.sqrt(3)])


def test_bad_channel_count(tmp_path):
    sf.write(str(tmp_path / "a.wav"), np.zeros((10, 5)), 24000, subtype="FLOAT")
    with pytest.raises(ValueError, match=r"not \(N\+1\)\^2"):
        read_audio(tmp_path / "a.wav")


def test_malformed_file(tmp_path):
    (tmp_path / "a.wav").write_bytes(b"RIFF0000WAVEjunk")
    with pytest.raises(Exception):
        read_audio(tmp_path / "a.wav")


def test_silence_survives_identity(tmp_path):
    sf.write(str(tmp_path / "a.wav"), np.zeros((100, 4), dtype="float32"), 24000, subtype="FLOAT")
    out = apply_spatial_mixup(read_audio(tmp_path / "a.wav"), DirectionalTransform.identity(), 0.0)
    write_audio(out, tmp_path / "b.wav")
    assert not np.any(sf.read(str(tmp_path / "b.wav"))[0])


@given(arrays(np.float64, (9, 8), elements=st.floats(-1e3, 1e3)))
def test_convention_roundtrip(x):
    clip = AmbisonicClip(x, 48000, 2, "SN3D")
    np.testing.assert_allclose(clip.to_n3d().to_sn3d().samples, x, rtol=1e-15, atol=0)


@given(arrays(np.float32, (4, 8), elements=st.floats(-1, 1, width=32)))
def test_convention_roundtrip_exact_for_float32_wire(x):
    clip = AmbisonicClip(x.astype(float), 48000, 1, "SN3D")
    np.testing.assert_array_equal(clip.to_n3d().to_sn3d().samples.astype(np.float32), x)


def test_clip_validation():
    with pytest.raises(ValueError):
        AmbisonicClip(np.zeros((5, 3)), 24000, 1)
    with pytest.raises(ValueError):
        AmbisonicClip(np.full((4, 3), np.nan), 24000, 1)


def test_read_labels(tmp_path):
    (tmp_path / "l.csv").write_text("10,2,0,30,-10\n10,3,1,0,0\n")
    labels = read_labels(tmp_path / "l.csv")
    (f, ev), (_, ev2) = list(labels.events())
    assert (f, ev.class_id, ev.track_id) == (10, 2, 0)
    np.testing.assert_allclose(ev.direction, Direction(math.radians(30), math.radians(-10)).unit_vector, atol=1e-15)
    np.testing.assert_allclose(ev2.direction, [1, 0, 0], atol=1e-15)


def test_empty_and_bad_labels(tmp_path):
    (tmp_path / "e.csv").write_text("")
    assert len(read_labels(tmp_path / "e.csv")) == 0
    (tmp_path / "b.csv").write_text("1,2,0,30,-10\n1,x,0,30,-10\n")
    with pytest.raises(ValueError, match=":2:"):
        read_labels(tmp_path / "b.csv")
    (tmp_path / "c.csv").write_text("1,13,0,30,-10\n")
    with pytest.raises(ValueError):
        read_labels(tmp_path / "c.csv")


def test_label_roundtrip(tmp_path, rng):
    frames = {}
    for frame in range(20):
        frames[frame] = [AccdoaEvent(int(rng.integers(12)), k,
                                     tuple(Direction(rng.uniform(-3.1, 3.1), rng.uniform(-1.5, 1.5)).unit_vector))
                         for k in range(int(rng.integers(0, 3)))]
    labels = AccdoaFrameLabels(frames)
    write_labels(labels, tmp_path / "l.csv")
    back = read_labels(tmp_path / "l.csv")
    assert len(back) == len(labels)
    for (fa, a), (fb, b) in zip(labels.events(), back.events()):
        assert (fa, a.class_id, a.track_id) == (fb, b.class_id, b.track_id)
        ang = math.degrees(math.acos(min(1.0, float(np.dot(a.direction, b.direction)))))
        assert ang < 1.0
        az_a, el_a = a.angles_deg()
        az_b, el_b = b.angles_deg()
        assert abs(el_a - el_b) <= 0.5 + 1e-9


def test_activity_column(tmp_path):
    labels = AccdoaFrameLabels({3: [AccdoaEvent(1, 0, (0.0, 1.0, 0.0), 0.25)]})
    write_labels(labels, tmp_path / "plain.csv")
    assert (tmp_path / "plain.csv").read_text() == "3,1,0,90,0\n"
    write_labels(labels, tmp_path / "ext.csv", activity_column=True)
    text = (tmp_path / "ext.csv").read_text()
    assert text.startswith("#") and text.endswith("3,1,0,90,0,0.250000\n")
    ev = next(read_labels(tmp_path / "ext.csv").events())[1]
    assert ev.activity == 0.25
