from pathlib import Path

import pytest

from spdcsim import dsl
from spdcsim.fock import ModeLabel, StateVector

EXPERIMENTS_DIR = Path(__file__).resolve().parents[1] / "experiments"

CORPUS = sorted(EXPERIMENTS_DIR.glob("*.exp"))


@pytest.fixture(scope="session")
def experiments_dir() -> Path:
    return EXPERIMENTS_DIR


def load_experiment(name: str):
    return dsl.parse((EXPERIMENTS_DIR / name).read_text())


def label(text: str) -> ModeLabel:
    path, _, mode = text.rpartition(":")
    return ModeLabel(path, int(mode))


def basis(spec: dict[str, int] | str, amplitude: complex = 1.0) -> StateVector:
    """Basis state from 'a:0 b:1' text or a {'a:0': 2} mapping."""
    if isinstance(spec, str):
        counts = {}
        for token in spec.split():
            counts[label(token)] = counts.get(label(token), 0) + 1
    else:
        counts = {label(k): v for k, v in spec.items()}
    return StateVector.from_occupations(counts, amplitude)
