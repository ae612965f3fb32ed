#!/usr/bin/env python3
"""Generate reference optima for the trace-minimization localization SDP.

Each instance is solved with an interior-point solver (CLARABEL through
cvxpy), independently of the C++ first-order solver. An instance is kept only
if its optimum is unique to within UNIQUE_TOL: after solving for the optimal
trace we minimize and maximize a random linear functional over the optimal
face and require both answers to agree.

Usage:  python3 gen_sdp_oracle.py > sdp_oracle.json
"""

import json
import sys
import warnings

import cvxpy as cp
import numpy as np

UNIQUE_TOL = 2e-5
FACE_SLACK = 1e-12


def edges_within(points, radius):
    n = len(points)
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            if np.linalg.norm(points[i] - points[j]) <= radius:
                out.append((i, j))
    return out


def connected(n, edges):
    seen = {0}
    stack = [0]
    adj = {i: [] for i in range(n)}
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def constraints(Q, edges, meas, delta):
    cons = [Q >> 0]
    for (i, j), m in zip(edges, meas):
        val = Q[i, i] + Q[j, j] - 2 * Q[i, j]
        if delta == 0.0:
            cons.append(val == m)
        else:
            cons.append(cp.abs(val - m) <= delta)
    return cons


def solve(n, edges, meas, delta):
    for tol in (1e-11, 1e-10, 1e-9):
        Q = cp.Variable((n, n), symmetric=True)
        prob = cp.Problem(cp.Minimize(cp.trace(Q)), constraints(Q, edges, meas, delta))
        try:
            prob.solve(solver=cp.CLARABEL, tol_gap_abs=tol, tol_gap_rel=tol,
                       tol_feas=tol, max_iter=500)
        except BaseException:
            continue
        if prob.status == cp.OPTIMAL:
            return prob.value, Q.value
    return None, None


def unique_on_face(n, edges, meas, delta, opt, rng):
    C = rng.standard_normal((n, n))
    C = 0.5 * (C + C.T)
    sols = []
    for sense in (cp.Minimize, cp.Maximize):
        Q = cp.Variable((n, n), symmetric=True)
        cons = constraints(Q, edges, meas, delta)
        cons.append(cp.trace(Q) <= opt + FACE_SLACK)
        prob = cp.Problem(sense(cp.trace(C @ Q)), cons)
        try:
            prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12,
                       tol_feas=1e-12, max_iter=500)
        except BaseException:  # CLARABEL occasionally panics near a degenerate face
            return False
        if prob.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
            return False
        sols.append(Q.value)
    return np.linalg.norm(sols[0] - sols[1]) <= UNIQUE_TOL


def make_instance(index, rng):
    n = 4 + index % 5
    d = 1 + (index // 5) % 2
    delta = 0.0 if index % 2 == 0 else 0.01
    radius = 0.6 if d == 1 else 0.8
    while True:
        points = rng.uniform(-0.5, 0.5, size=(n, d))
        edges = edges_within(points, radius)
        if not edges or not connected(n, edges):
            continue
        true_sq = [float(np.sum((points[i] - points[j]) ** 2)) for i, j in edges]
        if delta > 0:
            meas = [max(0.0, t + rng.uniform(-delta, delta)) for t in true_sq]
        else:
            meas = list(true_sq)
        opt, Q = solve(n, edges, meas, delta)
        if Q is None:
            continue
        if not unique_on_face(n, edges, meas, delta, opt, rng):
            print(f"instance {index}: optimum not unique, resampling", file=sys.stderr)
            continue
        return {
            "name": f"random_{index:02d}",
            "n": n,
            "dim": d,
            "delta": delta,
            "points": points.tolist(),
            "edges": [[i, j, m] for (i, j), m in zip(edges, meas)],
            "objective": opt,
            "q": Q.tolist(),
        }


def complete_graph_instance(rng):
    n, d = 6, 2
    points = rng.uniform(-0.5, 0.5, size=(n, d))
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    meas = [float(np.sum((points[i] - points[j]) ** 2)) for i, j in edges]
    opt, Q = solve(n, edges, meas, 0.0)
    centered = points - points.mean(axis=0)
    gram = centered @ centered.T
    gap = np.linalg.norm(Q - gram)
    print(f"complete_6: |Q - LXX'L|_F = {gap:.3e}", file=sys.stderr)
    assert gap < 1e-5
    return {
        "name": "complete_6",
        "n": n,
        "dim": d,
        "delta": 0.0,
        "points": points.tolist(),
        "edges": [[i, j, m] for (i, j), m in zip(edges, meas)],
        "objective": opt,
        "q": Q.tolist(),
    }


def main():
    warnings.filterwarnings("ignore", category=UserWarning)
    rng = np.random.default_rng(20100614)
    instances = [make_instance(k, rng) for k in range(20)]
    instances.append(complete_graph_instance(rng))
    json.dump({"generator": "cvxpy/CLARABEL", "instances": instances}, sys.stdout, indent=1)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
