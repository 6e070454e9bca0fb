"""Dormand-Prince 5(4) step with FSAL and the 4th-order continuous extension.

Works on plain tuples of floats; the systems integrated here are two
dimensional and numpy overhead would dominate.
"""

from __future__ import annotations

C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
# B - B_hat (embedded 4th order weights)
E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
# dense output: y(t + th h) = y + h sum_i k_i sum_j P[i][j] th**(j+1)
P = (
    (1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799),
    (0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072),
    (0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632),
    (0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844),
    (0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423),
)


class StageFailure(Exception):
    """The right-hand side rejected an intermediate stage (e.g. non-positive state)."""


def step(f, t, y, h, k1):
    """One DOPRI5 step from ``(t, y)`` with ``k1 = f(t, y)``.

    Returns ``(y_new, err_vec, ks)`` where ``ks`` holds all seven stage
    derivatives (``ks[6]`` is ``f(t + h, y_new)``).
    """
    n = len(y)
    ks = [k1]
    for i in range(1, 7):
        ai = A[i]
        yi = tuple(y[c] + h * sum(ai[j] * ks[j][c] for j in range(i) if ai[j] != 0.0) for c in range(n))
        if i == 6:
            y_new = yi
        ks.append(f(t + C[i] * h, yi))
    err = tuple(h * sum(E[j] * ks[j][c] for j in range(7) if E[j] != 0.0) for c in range(n))
    return y_new, err, ks


def dense_coefficients(ks, h):
    """Per-component polynomial coefficients ``(c1, c2, c3, c4)`` in the step fraction."""
    n = len(ks[0])
    return tuple(
        tuple(h * sum(ks[i][c] * P[i][j] for i in range(7) if P[i][j] != 0.0) for j in range(4)) for c in range(n)
    )


def dense_eval(y0, coeffs, theta):
    return tuple(
        y0[c] + theta * (q[0] + theta * (q[1] + theta * (q[2] + theta * q[3]))) for c, q in enumerate(coeffs)
    )
