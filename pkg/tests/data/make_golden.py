"""Regenerate golden_expm.npz: the 50x50 test matrices with seed 0 and
their exponentials computed in 40-digit arithmetic.

Run from the repository root:  python tests/data/make_golden.py
Takes a couple of minutes.
"""

from pathlib import Path

import mpmath as mp
import numpy as np

from expmde.matgen import test_matrix

DPS = 40
TAYLOR_TERMS = 40


def mp_expm(A, dps=DPS):
    """Taylor series with scaling and squaring in mpmath arithmetic."""
    mp.mp.dps = dps
    n = A.shape[0]
    M = mp.matrix(A.tolist())
    nrm = max(sum(abs(M[i, j]) for i in range(n)) for j in range(n))
    s = max(0, int(mp.ceil(mp.log(nrm / mp.mpf("0.25"), 2))))
    M = M / mp.mpf(2) ** s
    T = mp.eye(n)
    S = mp.eye(n)
    for j in range(1, TAYLOR_TERMS):
        T = T * M / j
        S = S + T
    for _ in range(s):
        S = S * S
    return np.array(S.tolist(), dtype=complex)


def main():
    out = {}
    for k in (1, 2):
        A = test_matrix(k, n=50, seed=0)
        out[f"A{k}"] = A
        out[f"E{k}"] = mp_expm(A)
        print(f"A{k} done", flush=True)
    path = Path(__file__).with_name("golden_expm.npz")
    np.savez_compressed(path, **out)
    print(path)


if __name__ == "__main__":
    main()
