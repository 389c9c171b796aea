"""Table of f(n), h_K, the recovered unit exponent and its error for admissible n."""

import argparse

import mpmath as mp

from heegner6.cli import scan_inputs_unit
from heegner6.cubicfield import verify_unit_identity


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max", type=int, default=50)
    ap.add_argument("--precision", type=int, default=384)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    print(f"{'n':>4} {'f(n)':>6} {'h_K':>4} {'sigma':>6} {'exponent':>9} {'error':>10}  ok")
    for n in scan_inputs_unit(1, args.max):
        r = verify_unit_identity(n, args.precision, workers=args.workers)
        print(f"{n:>4} {r.f:>6} {r.h:>4} {r.sigma:>6} {r.expected_exponent:>9} "
              f"{mp.nstr(r.exponent_error, 3):>10}  {'yes' if r.passed else 'NO'}")


if __name__ == "__main__":
    main()
