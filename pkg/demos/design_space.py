"""How large is the 4-cycle-free design space as the lifting size grows?

Prints the log counting bound, its non-equivalent variant and the two
MT-support bounds for a (3, 5) base with memory 1.
"""

from __future__ import annotations

import math

from scforge import (
    build_csp_instance,
    corollary1_bound,
    mt_support_lower_bound,
    noneq_count_lower_bound,
    validate_params,
)


def main() -> None:
    gamma, kappa, m = 3, 5, 1
    instance = build_csp_instance((gamma, kappa))
    print(f"base {gamma}x{kappa}, memory {m}: {instance.n_events} cycle candidates, delta {instance.delta}")
    print(f"{'Z':>4} {'ln|space|':>10} {'ln count':>10} {'ln noneq':>10} {'ln eq19':>10} {'ln eq20':>10}")
    for Z in (13, 17, 21, 30, 40, 64, 128):
        params = validate_params(gamma=gamma, kappa=kappa, m=m, Z=Z)
        count = corollary1_bound(params, instance)
        noneq = noneq_count_lower_bound(count, gamma, kappa)
        support = mt_support_lower_bound(params, instance)

        def show(report):
            return f"{report.log_bound:10.3f}" if report.satisfied else f"{'-':>10}"

        space = gamma * kappa * math.log((m + 1) * Z)
        print(f"{Z:>4} {space:10.3f} {show(count)} {show(noneq)} {show(support.eq19)} {show(support.eq20)}")


if __name__ == "__main__":
    main()
