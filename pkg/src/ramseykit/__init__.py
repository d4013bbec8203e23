"""Exact small-case Ramsey machinery.

Graph invariants with budgeted exact solvers, blocked-clique lower-bound
witnesses, exhaustive arrowing search for small Ramsey numbers, and a
constructive pipeline that embeds a bounded-degree target graph into the
blue side of any colouring whose red side has no long path.
"""

from .graphs import (
    Graph,
    bits,
    clique_union,
    complete_graph,
    complete_multipartite,
    cycle_graph,
    disjoint_union,
    empty_graph,
    from_graph6,
    generate,
    path_graph,
    path_power,
    random_graph,
    to_graph6,
)
from .invariants import (
    ProperColoring,
    SearchBudget,
    Undecided,
    bandwidth,
    chromatic_number,
    find_cycle_at_least,
    has_path,
    independence_number,
    is_equal_clique_union,
    longest_cycle,
    optimal_coloring_min_class,
    sigma,
)
from .catalogue import all_graphs, canonical_code, connected_graphs
from .two_coloring import (
    BLUE,
    RED,
    MonoEmbedding,
    TwoColoring,
    WitnessVerificationError,
    burr_witness,
    contains_mono,
    find_subgraph,
)
from .ramsey import (
    ArrowResult,
    GoodnessReport,
    arrows,
    burr_bound,
    goodness_check,
    ramsey_number,
)
from .pipeline import (
    BetaExceeded,
    CapacityViolation,
    CycleDecomposition,
    EmbedError,
    Embedding,
    InvalidEmbedding,
    MaximalityViolation,
    MultipartiteWitness,
    PartitionPlan,
    PipelineError,
    PipelineParams,
    PipelineResult,
    PruneResult,
    SmallLeftoverError,
    blue_multipartite,
    common_blue_neighborhood,
    embed_classes,
    erdos_gallai,
    extract_longest_cycles,
    make_params,
    partition_plan,
    prune_heavy_red,
    run_pipeline,
    verify_embedding,
)

__version__ = "0.1.0"
