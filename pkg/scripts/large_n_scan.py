"""How far n must grow before the Dirichlet j=5 error and the ground-state
gap fall below given thresholds.

Usage: python3 scripts/large_n_scan.py [--n 40,48,56] [--digits 120]
"""
import argparse

import mpmath

from boxgalerkin import BasisSpec, BoundaryCondition, PrecisionContext, truncated_hamiltonian
from boxgalerkin.experiment import approximation_error


def run(argv=None):
    p = argparse.ArgumentParser()
    p.add_argument("--n", default="40,48,56")
    p.add_argument("--digits", type=int, default=120)
    args = p.parse_args(argv)
    basis, bc = BasisSpec.legendre(4), BoundaryCondition.dirichlet()
    with PrecisionContext(args.digits):
        e0 = mpmath.pi ** 2 / 4
        print("n,lambda_gap,error_t1,error_t4pi")
        for n in (int(v) for v in args.n.split(",")):
            gap = truncated_hamiltonian(basis, n).lambda_min - e0
            e1 = approximation_error(basis, bc, 5, n, "1")
            e2 = approximation_error(basis, bc, 5, n, "4/1/pi")
            print(n, *(mpmath.nstr(v, 6) for v in (gap, e1, e2)), sep=",", flush=True)


if __name__ == "__main__":
    run()
