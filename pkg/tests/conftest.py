import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def passive_orthogonal(u: np.ndarray) -> np.ndarray:
    """Real orthogonal symplectic matrix of the 2x2 unitary mode mixing ``u``."""
    O = np.zeros((4, 4))
    for j in range(2):
        for k in range(2):
            O[2 * j : 2 * j + 2, 2 * k : 2 * k + 2] = [[u[j, k].real, -u[j, k].imag], [u[j, k].imag, u[j, k].real]]
    return O


def random_unitary(rng) -> np.ndarray:
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_symplectic(rng, max_squeeze: float = 1.0) -> np.ndarray:
    r1, r2 = rng.uniform(-max_squeeze, max_squeeze, size=2)
    Z = np.diag(np.exp([-r1, r1, -r2, r2]))
    return passive_orthogonal(random_unitary(rng)) @ Z @ passive_orthogonal(random_unitary(rng))


def random_covariance(rng, max_squeeze: float = 1.0, max_thermal: float = 2.0) -> np.ndarray:
    """Random physical two-mode covariance built as S diag(nu) S^T."""
    nu = 0.5 + rng.uniform(0.0, max_thermal, size=2)
    S = random_symplectic(rng, max_squeeze)
    s = S @ np.diag(np.repeat(nu, 2)) @ S.T
    return 0.5 * (s + s.T)


def random_local_symplectic(rng, max_squeeze: float = 1.0) -> np.ndarray:
    L = np.zeros((4, 4))
    for k in range(2):
        th, ph = rng.uniform(0, 2 * np.pi, size=2)
        r = rng.uniform(-max_squeeze, max_squeeze)
        R = lambda a: np.array([[np.cos(a), np.sin(a)], [-np.sin(a), np.cos(a)]])
        L[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = R(th) @ np.diag([np.exp(-r), np.exp(r)]) @ R(ph)
    return L


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# -- acceptance report -------------------------------------------------------------------------

_ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call":
        return
    number, title = marker.args
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    _ACCEPTANCE[number] = ("PASS" if rep.passed else "FAIL", title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status, title, detail = _ACCEPTANCE[number]
        line = f"[{status}] criterion {number}: {title}"
        terminalreporter.write_line(line + (f" ({detail})" if detail else ""))
