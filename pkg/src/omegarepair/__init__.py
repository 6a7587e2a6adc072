"""Quantitative repair of transition systems against omega-regular
specifications: synchronized products, threshold games, epsilon-optimal
strategies, adversarial impairment analysis, and omega-regular masks."""

from .core import (NBA, Aggregator, AggregatorKind, Diagnostic, Diagnostics,
                   KripkeStructure, Lasso, ModelError, RepairMachine,
                   RMTransition, eval_aggregator, kripke_to_nba,
                   lasso_membership, validate)
from .formats import FormatError, parse_model, parse_rational, serialize_model
from .impair import ImpairError, ImpairWitness, impair_threshold, impair_witness
from .mask import (MaskChainReport, MaskError, SupAutomaton, complement_nba,
                   dsum_mask_bad_nba, dsum_mask_chain_check, intersect_nba,
                   limsup_mask, mask_synthesize, sup_gt_threshold_nba, sup_mask)
from .oracle import (OracleBudget, OracleError, bounded_bad_rewrite,
                     brute_impair_threshold, brute_repair_threshold,
                     enumerate_accepting_lassos, oracle_report, random_instance)
from .product import (ArenaVertex, GameArena, ProductGraph, ProductVertex,
                      build_arena, build_product, output_product,
                      restrict_domain)
from .repair import (RepairError, repair_strategy, repair_threshold,
                     simulate_strategy)
from .results import (Attainment, ExitKind, ExitRule, FiniteMemoryStrategy,
                      MemoryClass, Orientation, StrategyMode, ThresholdResult)

__version__ = "0.1.0"
