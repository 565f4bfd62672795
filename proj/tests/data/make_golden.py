"""Regenerates golden_trace.csv with numpy, independently of the C++ code.

Linearized midpoint march of the central scheme on n = 32 nodes at L = 2 pi,
dt = 0.1, T = 1, every second step recorded, y0 = 0.2 phi.
"""
import numpy as np

L, n, dt, steps, stride = 2 * np.pi, 32, 0.1, 10, 2
h = L / (n + 1)
x = h * np.arange(1, n + 1)


def apply_central(y):
    # padded index k holds node k - 2, so nodes -1 .. n+2
    z = np.zeros(n + 4)
    z[2:n + 2] = y
    z[1] = 0.0          # y_0
    z[0] = -y[0]        # y_{-1} = -y_1
    z[n + 2] = 0.0      # y_{n+1}
    z[n + 3] = y[-1]    # y_{n+2} = y_n
    i = np.arange(2, n + 2)
    d1 = (z[i + 1] - z[i - 1]) / (2 * h)
    d3 = (z[i + 2] - 2 * z[i + 1] + 2 * z[i - 1] - z[i - 2]) / (2 * h**3)
    return -d1 - d3


A = np.column_stack([apply_central(e) for e in np.eye(n)])
I = np.eye(n)
step = np.linalg.solve(I - 0.5 * dt * A, I + 0.5 * dt * A)

phi = (1 - np.cos(x)) / np.sqrt(3 * np.pi)
a = (2 / (27 * np.pi) - 11 / (108 * np.pi) * np.cos(x) - np.sin(x) / 3
     + x * np.sin(x) / (6 * np.pi) + np.cos(2 * x) / (36 * np.pi))


def record(t, y):
    l2 = np.sqrt(h * np.sum(y * y))
    jumps = np.diff(np.concatenate(([0.0], y, [0.0]))) / h
    h1 = np.sqrt(l2**2 + h * np.sum(jumps**2))
    p = h * np.sum(y * phi)
    res = np.sqrt(h * np.sum((y - p * phi - p * p * a) ** 2))
    return [t, l2, h1, p, res, (y[0] / h) ** 2]


y = 0.2 * phi
rows = [record(0.0, y)]
for k in range(1, steps + 1):
    y = step @ y
    if k % stride == 0 or k == steps:
        rows.append(record(k * dt, y))

with open("golden_trace.csv", "w") as f:
    f.write("t,l2_norm,h1_norm,p,manifold_residual,boundary_dissipation\n")
    for r in rows:
        f.write(",".join("%.17g" % v for v in r) + "\n")
