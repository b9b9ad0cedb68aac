"""Compare MOY rewriting with graph homology on a few closed webs.

For each graph the polynomial from the rewriting rules is printed next to the
graded dimension of the matrix factorization homology.

    python3 demos/moy_graphs.py
"""

from colored_sln.moy import (circle, colored_rotation, disjoint_union, graded_dimension,
                             graph_homology, moy_poly, theta, validate)

GRAPHS = {
    "circle of color 1": circle(1),
    "circle of color 2": circle(2),
    "theta (1, 1)": theta(1, 1),
    "theta (1, 2)": theta(1, 2),
    "two circles (1, 2)": disjoint_union(circle(1), circle(2)),
}


def main():
    for N in (2, 3):
        print(f"N = {N}")
        for name, G in GRAPHS.items():
            status, _ = validate(G, N)
            rewritten = moy_poly(G, N)
            if status == "ok":
                dims, z2 = graded_dimension(graph_homology(G, N))
                agree = "agree" if dims == rewritten else "DISAGREE"
                extra = f"homology z2 {sorted(z2)}, rotation {colored_rotation(G)}, {agree}"
            else:
                extra = "exceeds the width cap, homology is zero"
            print(f"  {name:20s} {rewritten.to_text():28s} {extra}")


if __name__ == "__main__":
    main()
