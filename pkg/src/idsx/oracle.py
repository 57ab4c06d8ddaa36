"""Independent reference implementations used as test oracles.

Everything here recomputes results from first principles with its own
arithmetic: per-junction stamping loops, hand-rolled Gaussian elimination
with partial pivoting, Python-level accumulation for the balance rule.
Nothing is shared with the production solver or readout beyond the data
types, so agreement between the two paths is meaningful evidence.  These
routines are orders of magnitude slower than the production code and are
meant for tests and the `ids oracle` debug command.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalError
from .plane import DrivePattern, NetworkSolution, Plane


def _oracle_memristance(plane: Plane, i: int, j: int) -> float:
    # deliberate re-derivation, not a call into the device module
    p = plane.params
    frac = float(plane.w[i, j]) / p.d
    return p.r_on * frac + p.r_off * (1.0 - frac)


def oracle_delta_r(plane: Plane) -> list[list[float]]:
    """Ink pattern r_off - M_ij recomputed cell by cell."""
    return [
        [plane.params.r_off - _oracle_memristance(plane, i, j) for j in range(plane.n)]
        for i in range(plane.m)
    ]


def _gaussian_solve(a: list[list[float]], b: list[float]) -> list[float]:
    """Dense Gaussian elimination with partial pivoting on plain lists."""
    size = len(b)
    for col in range(size):
        pivot = max(range(col, size), key=lambda r: abs(a[r][col]))
        if abs(a[pivot][col]) == 0.0:
            raise NumericalError("singular system in oracle solve")
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            b[col], b[pivot] = b[pivot], b[col]
        inv = 1.0 / a[col][col]
        for row in range(col + 1, size):
            factor = a[row][col] * inv
            if factor == 0.0:
                continue
            for cc in range(col, size):
                a[row][cc] -= factor * a[col][cc]
            b[row] -= factor * b[col]
    x = [0.0] * size
    for row in range(size - 1, -1, -1):
        acc = b[row]
        for cc in range(row + 1, size):
            acc -= a[row][cc] * x[cc]
        x[row] = acc / a[row][row]
    return x


def oracle_solve(plane: Plane, drive: DrivePattern) -> NetworkSolution:
    """Same contract as plane.solve_network, rebuilt independently.

    The full (m+n) system is assembled one junction at a time and the two
    fixed wires are imposed as Dirichlet rows, then eliminated by plain
    Gaussian elimination; no code is shared with the production path.
    """
    m, n = plane.m, plane.n
    size = n + m
    a = [[0.0] * size for _ in range(size)]
    cond = [[1.0 / _oracle_memristance(plane, i, j) for j in range(n)] for i in range(m)]
    for i in range(m):
        for j in range(n):
            gij = cond[i][j]
            c, r = j, n + i
            a[c][c] += gij
            a[r][r] += gij
            a[c][r] -= gij
            a[r][c] -= gij
    if drive.coupling_on:
        gc = 1.0 / plane.r_couple
        for c in range(n - 1):
            a[c][c] += gc
            a[c + 1][c + 1] += gc
            a[c][c + 1] -= gc
            a[c + 1][c] -= gc
        for r in range(n, size - 1):
            a[r][r] += gc
            a[r + 1][r + 1] += gc
            a[r][r + 1] -= gc
            a[r + 1][r] -= gc

    rhs = [0.0] * size
    for fixed, value in ((drive.k0 - 1, drive.v_drive), (n + drive.l0 - 1, 0.0)):
        a[fixed] = [0.0] * size
        a[fixed][fixed] = 1.0
        rhs[fixed] = value

    v = _gaussian_solve(a, rhs)
    currents = [[(v[n + i] - v[j]) * cond[i][j] for j in range(n)] for i in range(m)]
    if plane.block_reverse and drive.v_drive != 0.0:
        wanted = -1.0 if drive.v_drive > 0.0 else 1.0
        for i in range(m):
            for j in range(n):
                if currents[i][j] * wanted < 0.0:
                    currents[i][j] = 0.0
    return NetworkSolution(
        v_cols=np.array(v[:n]),
        v_rows=np.array(v[n:]),
        currents=np.array(currents),
    )


def oracle_drop_ink(plane: Plane, k0: int, l0: int, v0: float, t0: float, steps: int = 1000) -> np.ndarray:
    """Re-simulate one drop with its own forward-Euler stepping at high
    resolution (default 1000 steps, the reference discretization) and
    return the final w grid.  The input plane is not modified."""
    work = plane.copy()
    p = work.params
    drive = DrivePattern(k0=k0, l0=l0, v_drive=v0, coupling_on=True)
    dt = t0 / steps
    rate = p.mu_v * p.r_on / p.d
    for _ in range(steps):
        cur = oracle_solve(work, drive).currents
        for i in range(work.m):
            for j in range(work.n):
                wij = work.w[i, j] + rate * cur[i, j] * dt
                work.w[i, j] = min(max(wij, 0.0), p.d)
    return work.w


def oracle_balance_row(delta_r_column) -> int | None:
    """Smallest row whose cumulative ink reaches half the column total
    (ink above the cell balances ink below); None for an empty column."""
    values = [float(v) for v in delta_r_column]
    total = 0.0
    for value in values:
        total += value
    if total <= 0.0:
        return None
    half = 0.5 * total
    acc = 0.0
    for idx, value in enumerate(values, start=1):
        acc += value
        if acc >= half:
            return idx
    return len(values)  # unreachable: acc ends equal to total


def oracle_spread(delta_r_column, threshold: float) -> int:
    """Number of cells holding at least `threshold` of ink."""
    count = 0
    for value in delta_r_column:
        if float(value) >= threshold:
            count += 1
    return count


def oracle_narrow_curve(plane: Plane) -> list[float]:
    """Balance-rule narrow path per column, empty columns filled by the
    oracle's own linear interpolation (flat at the edges)."""
    ink = oracle_delta_r(plane)
    raw: list[float | None] = []
    for j in range(plane.n):
        raw.append(oracle_balance_row([ink[i][j] for i in range(plane.m)]))
    known = [(j, b) for j, b in enumerate(raw) if b is not None]
    if not known:
        raise NumericalError("oracle curve undefined: every column is empty")
    curve = []
    for j in range(plane.n):
        if raw[j] is not None:
            curve.append(float(raw[j]))
            continue
        left = [(jj, b) for jj, b in known if jj < j]
        right = [(jj, b) for jj, b in known if jj > j]
        if not left:
            curve.append(float(right[0][1]))
        elif not right:
            curve.append(float(left[-1][1]))
        else:
            (j0, b0), (j1, b1) = left[-1], right[0]
            curve.append(b0 + (b1 - b0) * (j - j0) / (j1 - j0))
    return curve


def oracle_infer_y(planes, x_columns, threshold: float, epsilon_weight: float) -> float:
    """Ideal pipeline estimate: balance-rule narrow path and direct
    threshold counts per plane, combined with inverse-spread weighting.
    x_columns are 1-based column indices, one per plane."""
    num = 0.0
    den = 0.0
    for plane, column in zip(planes, x_columns):
        ink = oracle_delta_r(plane)
        col = [ink[i][column - 1] for i in range(plane.m)]
        row = oracle_balance_row(col)
        if row is None:
            row = oracle_narrow_curve(plane)[column - 1]
        count = oracle_spread(col, threshold)
        q = plane.y_quant
        y_value = q.lo + (float(row) - 0.5) * (q.hi - q.lo) / q.bins
        weight = 1.0 / (count / plane.m + epsilon_weight)
        num += weight * y_value
        den += weight
    return num / den
