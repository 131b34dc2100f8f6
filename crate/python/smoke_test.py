"""Smoke test for the probdom_py extension.

Install first:  pip install -e crates/python --no-build-isolation
"""
from fractions import Fraction
from itertools import combinations

import probdom_py as pd

P3 = "ugraph 3 2\n0 1\n1 1\n2 1\n0 1 1/2\n1 2 1/2\n"


def main():
    g = pd.Graph.from_text(P3)
    assert (g.n, g.m) == (3, 2) and g.is_tree()
    assert g.to_text() == P3
    assert g.coverage_exact([1]) == "2"

    for algo in ["brute", "greedy", "tree-exact-uniform", "tree-exact-spm", "twdp", "apex"]:
        r = pd.solve(g, algo, 1)
        assert r["value_exact"] == "2", (algo, r)
        assert r["set"] == [1], (algo, r)
    r = pd.solve(g, "tree-ptas", 1, eps="1/10")
    assert r["value"] == 2.0 and r["guarantee"] == "(1-ε)-approx"

    h = pd.Graph([1, "3/2", 2.5, 1], [(0, 1, 0.25), (1, 2, "3/4"), (2, 3, 1)])
    best = max(Fraction(h.coverage_exact(list(s))) for s in combinations(range(4), 2))
    r = pd.solve(h, "tree-exact-spm", 2)
    assert Fraction(r["value_exact"]) == best, r
    r = pd.solve(h, "brute", 2, exact=False)
    assert abs(r["value"] - float(best)) < 1e-12
    mean, se = h.monte_carlo(r["set"], samples=20000, seed=1)
    assert abs(mean - float(best)) <= 4 * se + 1e-12

    r = pd.solve_kspm([(1, 2), ("1/2", "1/3"), (2, 3)], 2)
    assert r["set"] == [1, 2] and Fraction(r["value_exact"]) == Fraction(3, 2)

    tree, k, thr = pd.ksum_to_tree([-1, 0, 1], 3)
    assert tree.is_tree() and tree.n == 13 and k == 3
    opt = pd.solve(tree, "brute", k)
    assert Fraction(opt["value_exact"]) >= Fraction(thr)

    try:
        pd.Graph.from_text("ugraph 2 1\n0 1\n1 1\n0 1 3/2\n")
    except ValueError as e:
        assert "line 4" in str(e)
    else:
        raise AssertionError("out-of-range probability accepted")
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
