"""Compiled chain kernel (imported lazily; requires numba)."""

import numba
import numpy as np


@numba.njit(cache=True)
def chain_block(x, u, nodes, bw, cols, n_b, scale, x_out, h_out):
    """Advance every replica through ``u.shape[0]`` chain steps.

    ``cols`` holds, per grid node, the branch images (columns 0..n_b-1),
    the selection weights e^phi * h(g(.)) (columns n_b..2n_b-1) and the
    eigenfunction values (column 2n_b).  Barycentric interpolation of those
    columns at the current state drives branch selection and the move;
    ``x_out[b]`` records the state after step b and ``h_out[b]`` the
    eigenfunction there.  ``scale > 0`` selects the footnote denominator
    ``scale * h(x)`` with the last branch taking the remainder.
    """
    n_steps, n_rep = u.shape
    n_nodes = nodes.size
    wd = np.empty(n_nodes)
    q = np.empty(n_b)
    for b in range(n_steps):
        for r in range(n_rep):
            xx = x[r]
            hit = -1
            denom = 0.0
            for j in range(n_nodes):
                d = xx - nodes[j]
                if d == 0.0:
                    hit = j
                    wd[j] = 0.0
                else:
                    wd[j] = bw[j] / d
                    denom += wd[j]
            if hit >= 0:
                for i in range(n_b):
                    q[i] = cols[hit, n_b + i]
                h = cols[hit, 2 * n_b]
            else:
                for i in range(n_b):
                    acc = 0.0
                    for j in range(n_nodes):
                        acc += wd[j] * cols[j, n_b + i]
                    q[i] = acc / denom
                acc = 0.0
                for j in range(n_nodes):
                    acc += wd[j] * cols[j, 2 * n_b]
                h = acc / denom
            if b > 0:
                h_out[b - 1, r] = h
            uu = u[b, r]
            k = n_b - 1
            if scale > 0.0:
                den = scale * h
                csum = 0.0
                for i in range(n_b - 1):
                    csum += q[i] / den
                    if uu <= csum:
                        k = i
                        break
            else:
                total = 0.0
                for i in range(n_b):
                    total += q[i]
                thresh = uu * total
                csum = 0.0
                for i in range(n_b - 1):
                    csum += q[i]
                    if thresh <= csum:
                        k = i
                        break
            if hit >= 0:
                xn = cols[hit, k]
            else:
                acc = 0.0
                for j in range(n_nodes):
                    acc += wd[j] * cols[j, k]
                xn = acc / denom
            if xn > 1.0:
                xn = 1.0
            elif xn < -1.0:
                xn = -1.0
            x[r] = xn
            x_out[b, r] = xn
    for r in range(n_rep):
        xx = x[r]
        hit = -1
        denom = 0.0
        acc = 0.0
        for j in range(n_nodes):
            d = xx - nodes[j]
            if d == 0.0:
                hit = j
            else:
                w = bw[j] / d
                denom += w
                acc += w * cols[j, 2 * n_b]
        h_out[n_steps - 1, r] = cols[hit, 2 * n_b] if hit >= 0 else acc / denom
