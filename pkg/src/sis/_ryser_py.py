"""Pure NumPy fallback for the permanent kernel.

Same inclusion-exclusion recursion as the compiled version: subsets in
Gray-code order, one column added or removed per step.
"""

import numpy as np


def permanent_kernel(a: np.ndarray) -> complex:
    n = a.shape[0]
    cols = np.ascontiguousarray(a.T)
    rowsum = np.zeros(n, dtype=np.complex128)
    total = 0j
    for k in range(1, 1 << n):
        j = (k & -k).bit_length() - 1
        if (k ^ (k >> 1)) >> j & 1:
            rowsum += cols[j]
        else:
            rowsum -= cols[j]
        p = complex(rowsum.prod())
        total = total - p if k & 1 else total + p
    return -total if n & 1 else total
