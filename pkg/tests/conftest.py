import pytest

from curvesmith.curve import Curve


def random_curve(rng, p):
    while True:
        a, b = rng.randrange(p), rng.randrange(p)
        if (4 * a**3 + 27 * b * b) % p:
            return Curve(p, a, b)


@pytest.fixture(autouse=True)
def _no_disk_cache(monkeypatch):
    monkeypatch.delenv("CURVESMITH_CACHE", raising=False)
