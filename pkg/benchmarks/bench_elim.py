"""Compiled vs pure elimination on random sparse matrices and on real coboundaries.

    python benchmarks/bench_elim.py [--repeat N]
"""
import argparse
import random
import time

from opcohom import linalg
from opcohom.cohomology import gs_complex
from opcohom.inputs import load


def random_matrix(rng, rows, cols, density, rank_cap=None):
    m = linalg.ExactMatrix(rows, cols)
    if rank_cap is None:
        for r in range(rows):
            for c in range(cols):
                if rng.random() < density:
                    m.add(r, c, rng.randint(-9, 9))
        return m
    # product of two thin factors, so rank <= rank_cap and the kernel is big
    a = [[rng.randint(-3, 3) if rng.random() < density * 4 else 0 for _ in range(rank_cap)] for _ in range(rows)]
    b = [[rng.randint(-3, 3) if rng.random() < density * 4 else 0 for _ in range(cols)] for _ in range(rank_cap)]
    for r in range(rows):
        for c in range(cols):
            v = sum(a[r][k] * b[k][c] for k in range(rank_cap))
            if v:
                m.add(r, c, v)
    return m


def timed(fn, repeat):
    best = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        dt = time.perf_counter() - t
        best = dt if best is None else min(best, dt)
    return best, out


def lift_ok(m):
    mm = m.transpose() if m.cols > m.rows else m
    return linalg._modular(mm.integer_rows(), mm.cols) is not None


def compiled_rank(m):
    # modular elimination, exact fallback if the lift fails
    return linalg.rank(m, "compiled")


def pure_rank(m):
    return linalg.rank(m, "forward")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    cases = [
        ("random 60x60 d=0.3", random_matrix(rng, 60, 60, 0.3)),
        ("random 150x120 d=0.1", random_matrix(rng, 150, 120, 0.1)),
        ("low rank 200x200 r=40", random_matrix(rng, 200, 200, 0.05, rank_cap=40)),
    ]
    for name, path, deg in (("gs arrow quotient D=5", "inputs/arrow_quotient.json", 5),
                            ("gs point dual D=6", "inputs/point_dual_numbers.json", 6)):
        try:
            _, data = load(path)
        except Exception:
            continue
        c = gs_complex(data, deg)
        big = max(c.d, key=lambda m: m.rows * m.cols)
        cases.append((f"{name} ({big.rows}x{big.cols})", big))
    print(f"compiled kernel available: {linalg._elim_c is not None}; "
          f"auto uses it above fill ratio {linalg.DENSE_THRESHOLD}")
    print(f"{'case':40} {'pure s':>9} {'compiled s':>11} {'speedup':>8}  rank  lift  fill")
    for name, m in cases:
        tp, rp = timed(lambda: pure_rank(m), args.repeat)
        if linalg._elim_c is not None:
            tc, rc = timed(lambda: compiled_rank(m), args.repeat)
            assert rc == rp, (name, rc, rp)
            lift = "ok" if lift_ok(m) else "fallback"
            fill = m.nnz() / (m.rows * m.cols)
            print(f"{name:40} {tp:9.4f} {tc:11.4f} {tp / tc:8.1f}  {rp:4}  {lift:4}  {fill:.3f}")
        else:
            print(f"{name:40} {tp:9.4f} {'-':>11} {'-':>8}  {rp}")


if __name__ == "__main__":
    main()
