"""Energy-efficiency optimizer for an IRS-assisted NOMA mobile-edge-computing uplink.

Layering, bottom up:

- numerics: Hermitian eigen tools, complex Gaussian sampling, seeded streams
- channel: geometry, pathloss, fading draws, composite channel assembly
- ratemodel: SINR/rate/power/EE formulas and the concave rate surrogate
- solvers: the three convex subproblems (power+frequency, receive beams,
  reflect phases) via a self-contained log-barrier interior method, plus
  rank-one recovery
- optimizer: the alternating outer loop with ratio reweighting
- baselines: orthogonal access, offload-only, and no-surface reference schemes
- expcli: experiment specs, CSV emission, and the command-line front end
"""

from .channel import (ChannelRealization, SystemConfig, composite_gain, dbm_to_watt,
                      displace_ues, generate_channels, pathloss_gain, sic_order,
                      w_bar_from_phases, without_irs)
from .errors import ConfigError, DimensionError, DomainError, InfeasibleError
from .numerics import (HermitianEig, SeedStreams, dominant_eigvec, eig_hermitian,
                       psd_project, sample_cgauss)
from .ratemodel import (Allocation, AuxState, RateContext, dinkelbach_objective,
                        effective_gain, energy_efficiency, gain_table,
                        lemma1_update, local_rate, log_sum_rate, offload_rate,
                        rate_slack, sinr, sum_power, sum_rate, surrogate_rate,
                        total_power)
from .solvers import (ConicSolution, PowerFreqSolution, RecoveryResult,
                      SolverOptions, phases_from_lifted, recover_rank1,
                      solve_beamforming, solve_irs_phase, solve_power_freq)
from .optimizer import (IterationRecord, RunTrace, alternate, dinkelbach_update,
                        initialize)
from .baselines import (SCHEME_RUNNERS, SchemeResult, run_noirs, run_oma,
                        run_onlyoff, run_proposed)
from .expcli import (ExperimentSpec, ResultRow, convergence_trace, load_spec,
                     run_experiment, summarize, write_csv)

__version__ = "0.1.0"
