"""Pure-Python census kernel; mirrors ``_ccensus.pyx`` line for line."""
import numpy as np

NUM_CODES = 1 << 15


def census_histogram(roots, depth, occupied, deltas, stride, bias):
    """Tally neighbourhood codes over all depth-``depth`` descendants of ``roots``.

    ``roots`` is an ``(r, 6)`` integer array of ``(Lx, Ly, Tx, Ty, Rx, Ry)``
    rows, ``occupied`` the sorted keys of occupied triangles at the leaf level
    and ``deltas[orientation]`` the 15 key offsets of the star entries.
    Returns an int64 array of length 32768.
    """
    occ = set(np.asarray(occupied).tolist())
    table = np.asarray(deltas).tolist()
    hist = [0] * NUM_CODES
    stack = [(tuple(row), 0) for row in np.asarray(roots).tolist()[::-1]]
    while stack:
        (lx, ly, tx, ty, rx, ry), d = stack.pop()
        if d < depth:
            # second child pushed first so the left child is visited first
            ax, ay = rx + tx - ty + ry, ry + ty + tx - rx
            bx, by = tx + lx - ly + ty, ty + ly + lx - tx
            stack.append(((rx, ry, ax >> 1, ay >> 1, tx, ty), d + 1))
            stack.append(((tx, ty, bx >> 1, by >> 1, lx, ly), d + 1))
            continue
        key = (lx + tx + rx + bias) * stride + (ly + ty + ry + bias)
        dx, dy = rx - lx, ry - ly
        orient = ((dx > 0) - (dx < 0) + 1) * 3 + (dy > 0) - (dy < 0) + 1
        code = 0
        bit = 1
        for off in table[orient]:
            if key + off in occ:
                code |= bit
            bit <<= 1
        hist[code] += 1
    return np.array(hist, dtype=np.int64)
