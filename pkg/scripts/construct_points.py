"""Construct the rational point for each (a, b) given on the command line, e.g. 5,1 41,1."""

import argparse
import time

import mpmath as mp

from heegner6 import HeegnerJob, finalize


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("pairs", nargs="*", default=["5,1", "41,1", "61,1", "77,1"])
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    for pair in args.pairs:
        a, b = (int(v) for v in pair.split(","))
        t0 = time.perf_counter()
        cert = finalize(HeegnerJob(a, b), workers=args.workers)
        X, Y = cert.point
        print(f"({a},{b}) n={cert.n} rho={cert.rho} eps={cert.eps}: y^2 = x^3 + {cert.D}")
        print(f"  point x = {X}")
        print(f"        y = {Y}")
        print(f"  on curve {cert.on_curve}, non-torsion {cert.non_torsion}, h_K {cert.h_K}, "
              f"precision {cert.precision_used}, division index {cert.division_index}")
        if cert.generator is not None:
            print(f"  generator {cert.generator}, height ratio {mp.nstr(cert.height_ratio, 12)} "
                  f"(odd square {cert.odd_square})")
        if cert.descent is not None:
            print(f"  descent class {cert.descent.square_class}, passed {cert.descent.passed}")
        for note in cert.notes:
            print(f"  note: {note}")
        print(f"  {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
