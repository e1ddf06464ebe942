"""qdunkl: Stancu-type q-Dunkl Kantorovich-Szasz-Mirakjan operators.

Library layers, bottom up:

- `qcore`     q-brackets, q-factorials, q-binomials, q-Pochhammer symbols,
              the two classical q-exponentials.
- `dunkl`     Dunkl coefficients gamma_{mu,q} (recursion + classical limit)
              and the Dunkl q-exponentials with their parity components,
              continued past the series radius by a q-difference ladder.
- `qintegral` Jackson q-integrals and the operator's cell integrals.
- `functions` the closed test-function family with analytic metadata.
- `operators` D_{n,q}, T*_{n,q}, series weights, exact moments, closed-form
              first moments, moment and central-moment bounds.
- `moduli`    grid estimators for omega, omega2 and the weighted modulus.
- `experiments` Korovkin and rate-of-convergence sweeps with CSV/JSON reports.
- `cli`       `qdunkl eval|verify|experiment`.
"""

from .errors import (ConfigError, OutOfOperatorDomainError, QDomainError,
                     SeriesOverflowError)
from .qcore import (DEFAULT_TOL, QContext, q_binomial, q_bracket, q_exp_big,
                    q_exp_small, q_factorial, q_pochhammer)
from .dunkl import (DunklKernel, GammaTable, E_mu_q, e_mu_q, e_series,
                    gamma_classical, gamma_q, theta)
from .qintegral import (QCell, jackson_integral, jackson_integral_zero,
                        monomial_cell_integral)
from .functions import (TestFunction, abs_shift, constant, exp_decay,
                        holder_cusp, make_function, monomial, sine)
from .operators import (MomentBounds, StancuParams, central_moment_bound,
                        central_moment_exact, central_moment_T1,
                        d_moment_bounds, eval_D, eval_T, eval_T_sweep,
                        lambda_exact, moment_engine, moment_T1,
                        moment_T_bounds, phi_n, weights)
from .moduli import (DomainGrid, Modulus2Table, lipschitz_estimate, modulus,
                     modulus2, weighted_modulus)
from .experiments import (ExperimentReport, QnScheme, korovkin_run,
                          rate_bound_lipschitz, rate_bound_modulus,
                          rate_bound_second_order, rate_bound_smooth,
                          rate_bound_weighted, write_report)

__version__ = "0.1.0"
