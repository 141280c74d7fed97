import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def write_example_clip(directory, stem, rng, subtype="FLOAT", n_frames=4800, labels=True):
    import soundfile as sf

    data = 0.1 * rng.standard_normal((n_frames, 4))
    sf.write(str(directory / f"{stem}.wav"), data.astype("float32") if subtype == "FLOAT" else data,
             24000, subtype=subtype, format="WAV")
    if labels:
        rows = ["0,1,0,30,-10", "1,1,0,32,-10", "1,5,1,-120,45", "3,11,0,179,0"]
        (directory / f"{stem}.csv").write_text("\n".join(rows) + "\n")


@pytest.fixture
def dataset_dir(tmp_path):
    src = tmp_path / "data"
    src.mkdir()
    r = np.random.default_rng(7)
    write_example_clip(src, "fold1_room1_mix001", r)
    write_example_clip(src, "fold1_room1_mix002", r, subtype="PCM_24")
    return src


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
