"""Build one design with Moser-Tardos resampling and check it independently.

The lifted parity-check matrix is written to the working directory as an alist
file, and its girth is recomputed from scratch.
"""

from __future__ import annotations

import sys
from pathlib import Path

from scforge import (
    build_coupled_protograph,
    build_csp_instance,
    count_active_structures,
    export_matrix,
    girth,
    lift_to_parity_check,
    run_mt,
    validate_params,
)


def main(seed: int = 7) -> None:
    params = validate_params(gamma=3, kappa=5, m=1, Z=21, L=10)
    instance = build_csp_instance(params)
    assignment, stats = run_mt(params, instance, seed)
    print("partition matrix P:")
    print(assignment.partition)
    print("lifting matrix L:")
    print(assignment.lifting)
    print(f"resamples: {stats.total_resamples}")
    print(f"active 4-cycle candidates: {count_active_structures(params, assignment)[2]}")

    H = lift_to_parity_check(build_coupled_protograph(params, assignment), params, assignment)
    print(f"lifted matrix {H.rows} x {H.cols}, girth {girth(H)}")
    out = Path.cwd() / f"design_seed{seed}.alist"
    out.write_bytes(export_matrix(H, "alist"))
    print(f"wrote {out}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 7)
