import json
import os
import subprocess
import sys

import numpy as np
import pytest

from wzwnorms import _kernels
from wzwnorms.kzflow import reduce_four_point


def _recurrence_args(s, c=0):
    w, Q = np.linalg.eigh(s.M0)
    C = Q.T @ s.M1 @ Q
    lead = np.zeros(s.dim)
    lead[c] = 1.0
    return w, C, s.kappa, w[c] / s.kappa, lead, 0.15, 1e-12, 200


@pytest.mark.skipif(not _kernels.NUMBA_AVAILABLE, reason="numba disabled")
def test_recurrence_compiled_matches_python():
    s = reduce_four_point("3/2", 2, 7.3)
    for c in range(s.dim):
        a = _kernels.frobenius_recurrence(*_recurrence_args(s, c))
        b = _kernels.frobenius_recurrence_py(*_recurrence_args(s, c))
        assert a[1] == b[1]
        assert np.allclose(a[0], b[0], rtol=1e-14, atol=1e-300)


def test_transport_status_max_steps():
    s = reduce_four_point(1, 1, 7.3)
    Y, acc, rej, err, status = _kernels.transport_kernel(
        s.M0, s.M1, s.kappa, 0, 0.0, 0.0, 0.15, 0.85, np.eye(s.dim), 1e-12, 1e-14, max_steps=3)
    assert status == 2


def test_env_flag_disables_numba():
    code = ("import json, wzwnorms._kernels as k; from wzwnorms.kzflow import norm_via_kz;"
            "print(json.dumps([k.NUMBA_AVAILABLE, norm_via_kz(1, 1, 7.3).details['A']]))")
    env = dict(os.environ, WZWNORMS_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout
    flag, A = json.loads(out)
    assert flag is False
    from wzwnorms.kzflow import norm_via_kz
    assert A == pytest.approx(norm_via_kz(1, 1, 7.3).details["A"], rel=1e-12)
