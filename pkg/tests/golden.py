"""Matrices printed alongside the three worked examples."""

N = float("-inf")

FIG1_G = [
    [29, N, N, 29, N],
    [33, 4, N, 33, N],
    [63, N, 30, 63, N],
    [N, N, N, N, 0],
    [64, 5, 31, 64, N],
]

FIG2_GA = FIG1_G

FIG2_GB = [
    [28, N, N, 28, N],
    [34, 6, N, 34, N],
    [72, N, 24, 72, N],
    [N, N, N, N, 0],
    [82, 16, 34, 82, N],
]

# Symbolic matrix on b+p*q*c >= s*d, in canonical serialization.
NESTED_GE = [
    ["a", None, None, "a", None],
    ["a+s*d", "s*d", None, "a+s*d", None],
    ["a+b+p*q*c", None, "p*q*c", "a+b+p*q*c", None],
    [None, None, None, None, "0"],
    ["a+b+p*q*c+e", "s*d+e", "p*q*c+e", "a+b+p*q*c+e", None],
]
