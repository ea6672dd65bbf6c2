"""High-precision evaluation of the ten-term Shekel sum used by the mixed benchmark."""
from mpmath import mp, mpf

mp.dps = 40
C = [mpf(v) / 10 for v in (1, 2, 2, 4, 4, 6, 3, 7, 5, 5)]
A = [
    [4, 1, 8, 6, 3, 2, 5, 8, 6, 7],
    [4, 1, 8, 6, 7, 9, 3, 1, 2, mpf("3.6")],
    [4, 1, 8, 6, 3, 2, 5, 8, 6, 7],
    [4, 1, 8, 6, 7, 9, 3, 1, 2, mpf("3.6")],
]


def shekel(x):
    total = mpf(0)
    for i in range(10):
        total += 1 / (C[i] + sum((mpf(x[j]) - A[j][i]) ** 2 for j in range(4)))
    return total


if __name__ == "__main__":
    for p in [(4, 4, 4, 4), (1, 1, 1, 1), (0, 10, 2.5, 7.25)]:
        print(p, mp.nstr(shekel(p), 25))
