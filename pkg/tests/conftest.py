import itertools

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def shift_register_encode(message, generators, k):
    """Bit-by-bit reference encoder, independent of the library's convolution path."""
    reg = [0] * k
    out = []
    for u in list(message) + [0] * (k - 1):
        reg = [int(u)] + reg[:-1]
        for g in generators:
            taps = [(g >> (k - 1 - d)) & 1 for d in range(k)]
            out.append(sum(t * r for t, r in zip(taps, reg)) % 2)
    return out


def brute_force_posteriors(p1_channel, p1_prior, generators, k):
    """Exhaustive MAP over all codewords.

    Returns (message posteriors P(u_i = 1), coded extrinsic P(c_j = 1) with
    c_j's own channel term left out).
    """
    m = len(p1_prior)
    p1c = np.asarray(p1_channel, dtype=float)
    msg_acc = np.zeros((m, 2))
    ext_acc = np.zeros((p1c.size, 2))
    for msg in itertools.product((0, 1), repeat=m):
        cw = np.array(shift_register_encode(msg, generators, k))
        prior = np.prod([p if u else 1 - p for u, p in zip(msg, p1_prior)])
        lik = np.where(cw == 1, p1c, 1 - p1c)
        w = prior * np.prod(lik)
        for i, u in enumerate(msg):
            msg_acc[i, u] += w
        for j, c in enumerate(cw):
            ext_acc[j, c] += prior * np.prod(np.delete(lik, j))
    return msg_acc[:, 1] / msg_acc.sum(1), ext_acc[:, 1] / ext_acc.sum(1)


_REPORT = pytest.StashKey[list]()


@pytest.fixture
def acceptance_report(request):
    lines = request.config.stash.setdefault(_REPORT, [])

    def record(name: str, ok: bool, detail: str):
        lines.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        print(lines[-1])
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_REPORT, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
