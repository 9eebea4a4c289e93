"""Shared fixtures: reference binary expansions and one-shot battery runs.

The million-bit sequences are the binary expansions of pi and e (integer
bits included), computed with mpmath and cached under the system temp
directory so repeated runs skip the expensive expansion.
"""

import tempfile
import time
from pathlib import Path

import numpy as np
import pytest
from mpmath import mp

from parvault.statsuite import nist

MILLION = 1_000_000

# first 100 bits of pi's binary expansion, integer part included; guards the
# expansion recipe and any stale cache file
PI_FIRST_100 = ("1100100100001111110110101010001000100001011010001100"
                "001000110100110001001100011001100010100010111000")


def _constant_bits(which, count):
    cache = Path(tempfile.gettempdir()) / f"{which}_bits.npy"
    if cache.exists():
        arr = np.load(cache)
        if arr.size >= count:
            return arr[:count]
    mp.prec = count + 64
    x = mp.pi if which == "pi" else mp.e
    scaled = int(mp.floor(x * mp.mpf(2) ** (count - 2)))
    pad = (-count) % 8
    raw = (scaled << pad).to_bytes((count + pad) // 8, "big")
    arr = np.unpackbits(np.frombuffer(raw, dtype=np.uint8))[:count]
    np.save(cache, arr)
    return arr


@pytest.fixture(scope="session")
def pi_bits():
    arr = _constant_bits("pi", MILLION)
    head = "".join(str(b) for b in arr[:100])
    assert head == PI_FIRST_100, "pi expansion recipe or cache is wrong"
    return arr


@pytest.fixture(scope="session")
def e_bits():
    return _constant_bits("e", MILLION)


def _timed_battery(bits):
    start = time.perf_counter()
    results = nist.nist_battery(bits)
    return {"results": results,
            "by_name": {r.name: r for r in results},
            "seconds": time.perf_counter() - start}


@pytest.fixture(scope="session")
def pi_battery(pi_bits):
    # ran once per session; both the unit anchors and the acceptance gate
    # read from this instead of re-running the heavy tests
    return _timed_battery(pi_bits)


@pytest.fixture(scope="session")
def e_battery(e_bits):
    return _timed_battery(e_bits)


# one line per acceptance criterion, echoed after the run so the verdicts
# survive pytest's output capture
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_report():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
