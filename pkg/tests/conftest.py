import pathlib

import numpy as np
import pytest

from primelab import zerogen

CACHE_DIR = pathlib.Path(__file__).resolve().parent.parent / ".cache"


@pytest.fixture(scope="session")
def zeros_100k_path() -> pathlib.Path:
    """100k-ordinate dataset; generated once and cached across sessions
    (the scan is the offline stand-in for downloading a published table)."""
    CACHE_DIR.mkdir(exist_ok=True)
    path = CACHE_DIR / "zeros_100k.txt"
    if not path.exists():
        ords = zerogen.generate_zeros(100_000)
        zerogen.write_zeros_file(path, ords, "Hardy-Z grid scan")
    return path


@pytest.fixture(scope="session")
def zeros_2k_path(zeros_100k_path) -> pathlib.Path:
    path = CACHE_DIR / "zeros_2k.txt"
    if not path.exists():
        from primelab.zeros import load_zeros

        table = load_zeros(zeros_100k_path)
        zerogen.write_zeros_file(path, table.ordinates[:2000], "first 2000 ordinates")
    return path
