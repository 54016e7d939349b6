"""Tree decompositions with constrained torsos, canonical forms and partial domination."""

from .canon import (CanonicalForm, ColoredGraph, canonical_form, canonise_refined, canonise_small,
                    canonise_torso, isomorphic, lift_canonisation)
from .config import Ceilings, SizeLimitError, ceilings
from .decomposition import (Budget, DecompositionNotFound, InvalidDecompositionError, TorsoConstraint,
                            TreeDecomposition, VerificationReport, Violation, decompose, find_separator,
                            torso, verify_decomposition)
from .formats import GraphFormatError, emit_graph, parse_graph
from .graph import Graph, GraphInputError
from .oracles import (MinorModel, TopologicalModel, automorphisms, find_minor, find_topological_subgraph,
                      is_isomorphic_brute)
from .pds import PdsInstance, PdsSolution, solve_pds_brute, solve_pds_dp
from .treelike import TreelikeDecomposition, invariant_decompose, verify_invariance, verify_treelike

__all__ = [name for name in dir() if not name.startswith("_")]
