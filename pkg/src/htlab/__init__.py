"""Operator norms and Grothendieck values of heavy-tailed random matrices."""

from .dist import (HeavyTailLaw, StableLaw, ccdf, frechet_cdf, make_rng, quantile_b_n,
                   sample_heavy, sample_stable, stable_reference_sample, tail_quantile)
from .errors import (ConfigError, HTLabError, InvalidLaw, NotPairable, OracleRejected,
                     OracleScopeError, RegimeError, TrialTimeout, Unsupported)
from .limits import (ReferenceDistribution, TheoremId, TheoremParams, check_valid,
                     denormalize_statistic, is_valid, ks_distance, ks_two_sample,
                     normalize_statistic, reference_for)
from .mat import (Decomposition, PairedSparseMatrix, SparseEntries, SymmetricMatrix,
                  TypicalityReport, compact_large, decompose, default_thresholds, diagnostics,
                  max_abs_entry, read_matrix, read_sparse, sample_matrix, write_matrix,
                  write_sparse)
from .norms import (NormCertificate, NormProblem, ansatz_bounds, boyd_power_method,
                    dual_value, ground_state, grothendieck_lower_witness, grothendieck_value,
                    kkt_residual, lp_norm, multistart_ascent, operator_norm,
                    oracle_grothendieck_small, oracle_norm_small, paired_grothendieck_closed_form,
                    paired_norm_closed_form, psi_map, rowsum_upper_bound)
from .xlab import ExperimentConfig, TrialRecord, run_experiment

__version__ = "0.1.0"
