"""Combings, Rips complexes and finite-support cohomology on finite truncations
of metric spaces, with scale-labelled audits of combing properties."""

__version__ = "0.1.0"

from .audits import (INCONCLUSIVE, REFUTED, SUPPORTED, AuditReport, audit_coherent, audit_controlled,
                     audit_expanding, audit_proper, audit_quasi_geodesic, check_gromov_fellow,
                     evaluate_witness, expansion_table)
from .cohomology import (coarse_cohomology_report, coboundary, cohomology, restriction_map,
                         uniform_triviality_probe)
from .combing import (Combing, bresenham_combing, geodesic_combing, noncoherent_example, nonproper_example,
                      normal_form_combing, product_combing, reduced_word, shortlex_normal_form)
from .cones import ConeSpec, WarpSpec, cone_combing, open_cone, rotation_action, warped_cone
from .corona import boundary_clusters, cluster_nerve, corona_compare, default_recipe, nerve_cohomology
from .errors import (BudgetError, CoarseLabError, DisconnectedError, InternalError, MissingBasePointError,
                     TruncationError)
from .groups import DirectProduct, ExplicitGraph, FiniteGroup, FreeAbelian, FreeGroup, cycle_graph, path_graph
from .metric import (FiniteMetricSpace, annulus, ball, build_cayley_graph, check_metric_axioms,
                     estimate_asdim_upper, estimate_hyperbolicity, gromov_product, interval_space,
                     product_space, uniform_space)
from .rips import SimplicialComplex, full_simplex, inclusion, rips_complex, simplicial_neighborhood
from .snf import GF, QQ, ZZ, Ring, smith_normal_form
