"""Compositional-theory engine: typed string diagrams, rewriting, matrix and
relational semantics, observable-structure laws, and the GHZ harness."""

from .diagram import (Diagram, DiagramError, CompositionTypeError, compose,
                      dagger, iso_equal, partial_trace, tensor, trace,
                      transpose_upper, conjugate_lower, yank_normalize)
from .groups import Angle, FiniteAbelianGroup, GroupElement
from .laws import (LawReport, ObservablePair, check_coherence,
                   check_complementarity, check_enough_classical_points,
                   check_exponent_law, check_frobenius,
                   check_sharpness_implies_sc, check_strong_complementarity,
                   coherify, group_algebra_pair, max_two_sc_check, qubit_pair)
from .model import (ModelBinding, SoundnessReport, check_soundness, interpret,
                    scalar_monoid, semantically_equal)
from .observables import (ObservableStructure, classical_points, phase_action,
                          phase_group, spider)
from .rewrite import (CharacteristicMatrix, Matching, RewriteRule,
                      apply_rule, bialg_normal_form, characteristic_matrix,
                      collapse_bipartite, equivalent_within, find_matchings,
                      rewrite_to_fixpoint, spider_fuse)
from .tensor import Tensor, equal_tensors, global_scalar
from .textio import parse_diagram, parse_rules, print_diagram, print_rules
from .theories import TheoryFixture, fixture
from .types import GeneratorDecl, Signature, SystemType

__version__ = "0.1.0"
