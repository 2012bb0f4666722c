"""Independent reference computations used to freeze derived test values.

These deliberately avoid the package's code paths: rotations go through
rotation matrices, kinematics through numpy linear algebra, and time
integrals through brute-force fine-step summation.
"""

import math

import numpy as np


def rotation_matrix(axis, angle):
    """Rodrigues rotation matrix, right-handed."""
    a = np.asarray(axis, float)
    a = a / np.linalg.norm(a)
    k = np.array([[0, -a[2], a[1]], [a[2], 0, -a[0]], [-a[1], a[0], 0]])
    return np.eye(3) + math.sin(angle) * k + (1 - math.cos(angle)) * (k @ k)


def roller_surface(w, d_r):
    return np.cross([0.0, 0.0, w], [0.0, d_r / 2, 0.0])


def field_from_rollers(w1, w2, th1, th2, d_r):
    """Forward kinematics with explicit projections."""
    out = np.zeros(3)
    for w, th in ((w1, th1), (w2, th2)):
        u = np.array([math.cos(th), 0.0, math.sin(th)])
        out += np.dot(roller_surface(w, d_r), u) * u
    return out


def rollers_for_field(vx, vz, th1, th2, d_r):
    """Solve the 2x2 linear system field(w1, w2) = (vx, vz) numerically."""
    cols = []
    for w in ((1.0, 0.0), (0.0, 1.0)):
        f = field_from_rollers(w[0], w[1], th1, th2, d_r)
        cols.append([f[0], f[2]])
    a = np.array(cols).T
    return np.linalg.solve(a, [vx, vz])


def fine_integral(f, t0, t1, n=100000):
    """Midpoint-rule integral of a vector function on a fine grid."""
    ts = np.linspace(t0, t1, n + 1)
    mids = (ts[:-1] + ts[1:]) / 2
    h = (t1 - t0) / n
    return sum(np.asarray(f(t), float) for t in mids) * h


def torque_accels(eta, tau_motor, gear, motors, tau_fric, inertia, d_r):
    """Surface start/brake acceleration of the rotating assembly, rigid-body form."""
    r = d_r / 2
    torque = eta * 2 * motors * tau_motor * gear
    return (torque - tau_fric) / inertia * r, (torque + tau_fric) / inertia * r


def motor_speed_fine(w0, target, up, down, dt, n):
    """Shaft speed under an asymmetric rate limit, stepped on a fine grid.

    Returns the speeds at the n+1 grid points. Speeding up (|w| growing toward
    a same-signed target) uses ``up``; everything else uses ``down``, and a
    sign reversal passes through zero.
    """
    out = [w0]
    w = w0
    for _ in range(n):
        left = dt
        # at most two phases per step: brake to zero, then speed up
        for _phase in range(2):
            if w == target or left <= 0:
                break
            same = w == 0 or (w > 0) == (target > 0)
            growing = target != 0 and same and abs(target) > abs(w)
            rate = up if growing else down
            goal = target if same else 0.0
            need = abs(goal - w) / rate
            if need <= left:
                w = goal
                left -= need
            else:
                w = w + math.copysign(rate * left, goal - w)
                left = 0
        out.append(w)
    return np.array(out)
