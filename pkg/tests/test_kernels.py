import os
import subprocess
import sys

import numpy as np
import pytest

from udesign import _backend, _fallback
from udesign.weyl import weyl_monomials_prime_frame

pytestmark = pytest.mark.skipif("cython" not in _backend.BACKENDS, reason="compiled kernels not built")


def kernels():
    return _backend.BACKENDS["cython"]


def test_default_is_compiled():
    assert _backend.BACKEND == ("python" if os.environ.get("UDESIGN_PURE_PYTHON", "") not in ("", "0") else "cython")


def test_env_forces_fallback():
    code = "from udesign import _backend; print(_backend.BACKEND)"
    env = dict(os.environ, UDESIGN_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True).stdout
    assert out.strip() == "python"


@pytest.mark.parametrize("K", [1, 17, 130])
@pytest.mark.parametrize("t", [1, 2, 3, 6])
def test_pair_power_sum(K, t, rng):
    v = rng.standard_normal((K, 9)) + 1j * rng.standard_normal((K, 9))
    a, b = _fallback.pair_power_sum(v, t), kernels().pair_power_sum(v, t)
    assert abs(a - b) <= 1e-12 * abs(a)


@pytest.mark.parametrize("t", [1, 2, 5])
def test_power_sum(t, rng):
    z = rng.standard_normal(101) + 1j * rng.standard_normal(101)
    a, b = _fallback.power_sum(z, t), kernels().power_sum(z, t)
    assert abs(a - b) <= 1e-12 * abs(a)


@pytest.mark.parametrize("d,K,t", [(2, 12, 2), (3, 5, 3), (4, 1, 1), (2, 90, 2), (3, 70, 1)])
def test_potential_and_gradient(d, K, t, rng):
    U = rng.standard_normal((K, d, d)) + 1j * rng.standard_normal((K, d, d))
    va, ga = _fallback.potential_and_gradient(U, t)
    vb, gb = kernels().potential_and_gradient(U, t)
    assert abs(va - vb) <= 1e-12 * abs(va)
    assert np.max(np.abs(ga - gb)) <= 1e-12 * np.max(np.abs(ga))


@pytest.mark.parametrize("p,m,n", [(2, 1, 2), (3, 1, 1), (3, 1, 2)])
def test_monomial_traces(p, m, n, rng):
    perms, phases = weyl_monomials_prime_frame(p, m, n)
    dim = perms.shape[1]
    M = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    a, b = _fallback.monomial_traces(perms, phases, M), kernels().monomial_traces(perms, phases, M)
    assert np.max(np.abs(a - b)) < 1e-12
    rows = np.arange(dim)
    direct = np.array([np.sum(ph * M[rows, pm]) for pm, ph in zip(perms, phases)])
    assert np.allclose(a, direct)


def test_read_only_inputs(rng):
    v = rng.standard_normal((4, 4)) + 0j
    v.setflags(write=False)
    assert abs(kernels().pair_power_sum(v, 2) - _fallback.pair_power_sum(v, 2)) < 1e-9
