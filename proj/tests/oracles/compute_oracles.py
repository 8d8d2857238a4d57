"""Independent reference values for the test suites.

Everything here is computed from first principles with numpy/scipy (linear
algebra, matrix exponentials, series), never with the C++ code. The output is
frozen in oracle_values.json; rerun with

    python3 tests/oracles/compute_oracles.py > tests/oracles/oracle_values.json
"""

import json
import math

import numpy as np
from scipy.linalg import expm


def ctmc_stationary(rates):
    q = np.array(rates, dtype=float)
    np.fill_diagonal(q, 0.0)
    np.fill_diagonal(q, -q.sum(axis=1))
    m = q.shape[0]
    a = np.vstack([q.T, np.ones(m)])
    rhs = np.zeros(m + 1)
    rhs[-1] = 1.0
    return np.linalg.lstsq(a, rhs, rcond=None)[0]


# --- two-state toy -----------------------------------------------------------

Q_AB, Q_BA, B = 1.0, 2.0, np.array([3.0, 6.0])
MATRIX_A = np.array([[0.2, 0.8], [0.7, 0.3]])
MATRIX_B = np.array([[0.9, 0.1], [0.3, 0.7]])

mu = ctmc_stationary([[0, Q_AB], [Q_BA, 0]])
mean_rate = float(mu @ B)
biased = mu * B / mean_rate
jump_matrix = biased[0] * MATRIX_A + biased[1] * MATRIX_B


def prelimit_tau_cdf(n, start, ts):
    """P(tau_1^n <= t) from the killed generator n*Q - diag(b)."""
    q = np.array([[-Q_AB, Q_AB], [Q_BA, -Q_BA]])
    sub = n * q - np.diag(B)
    e = np.zeros(2)
    e[start] = 1.0
    return np.array([1.0 - e @ expm(sub * t) @ np.ones(2) for t in ts])


def exact_ks(n, start):
    ts = np.linspace(0.0, 4.0, 8001)
    f = prelimit_tau_cdf(n, start, ts)
    g = 1.0 - np.exp(-mean_rate * ts)
    return float(np.max(np.abs(f - g)))


toy_ks = {str(n): exact_ks(n, 0) for n in (1, 4, 16, 64)}

# limit index process: semi-Markov with Exp(mean_rate) holding and chain P,
# i.e. a Markov chain with generator mean_rate * (P - I)
gen = mean_rate * (jump_matrix - np.eye(2))
toy_limit_marginals = {str(t): (np.array([1.0, 0.0]) @ expm(gen * t)).tolist() for t in (0.25, 0.5, 1.0)}

# --- branching ---------------------------------------------------------------

chi = ctmc_stationary([[0, 1], [1, 0]])
r_bar = float(chi @ np.array([4.0, 0.0]))
q_bar = float(chi @ np.array([1.0, 1.0]))
extinction_one = q_bar / r_bar if r_bar > q_bar else 1.0

# --- contact process -----------------------------------------------------------

nu = ctmc_stationary([[0, 1], [1, 0]])
lam = float(nu @ np.array([1.0, 3.0]))
heal = float(nu @ np.array([2.0, 2.0]))


def contact_law(n_vertices, lam, heal, start_config, t):
    edges = [(k, k + 1) for k in range(n_vertices - 1)]
    size = 1 << n_vertices
    g = np.zeros((size, size))
    for c in range(size):
        for v in range(n_vertices):
            if c >> v & 1:
                g[c, c & ~(1 << v)] += heal
            else:
                k = sum(1 for a, b in edges for w, u in ((a, b), (b, a)) if w == v and c >> u & 1)
                if k:
                    g[c, c | (1 << v)] += lam * k
    np.fill_diagonal(g, -g.sum(axis=1))
    p0 = np.zeros(size)
    p0[start_config] = 1.0
    return (p0 @ expm(g * t)).tolist()


contact_law_t1 = contact_law(3, lam, heal, 0b010, 1.0)

# --- ladder --------------------------------------------------------------------

basel = math.pi ** 2 / 6


def ladder_explosion_by(T, terms=4000, reps=200_000, seed=7):
    """P(sum_{i>=1} E_i / i^2 <= T) by Monte Carlo, tail replaced by its mean."""
    rng = np.random.default_rng(seed)
    inv = 1.0 / np.arange(1, terms + 1) ** 2
    tail = basel - inv.sum()
    hits = 0
    for _ in range(reps // 5000):
        s = rng.exponential(size=(5000, terms)) @ inv + tail
        hits += int(np.sum(s <= T))
    p = hits / reps
    return p, math.sqrt(p * (1 - p) / reps)


p_expl, se_expl = ladder_explosion_by(3.0)

out = {
    "toy": {
        "stationary": mu.tolist(),
        "mean_rate": mean_rate,
        "biased_weights": biased.tolist(),
        "matrix_a": MATRIX_A.tolist(),
        "matrix_b": MATRIX_B.tolist(),
        "jump_matrix": jump_matrix.tolist(),
        "exact_ks_from_a": toy_ks,
        "limit_marginals_from_0": toy_limit_marginals,
    },
    "branching": {"r_bar": r_bar, "q_bar": q_bar, "extinction_one": extinction_one,
                  "extinction_two": extinction_one ** 2},
    "contact": {"infection_rate": lam, "healing_rate": heal, "law_t1_from_middle": contact_law_t1},
    "ladder": {"expected_explosion_time": basel, "explosion_by_3": p_expl, "explosion_by_3_se": se_expl},
    "oscillator": {"position_at_1": {str(n): math.cos(n) for n in range(1, 11)}},
    "clock": {"exponential_threshold_half": math.log(2.0),
              "ks_constant_001": math.sqrt(-0.5 * math.log(0.005))},
}
print(json.dumps(out, indent=2))
