"""U-relational databases: finite sets of possible worlds stored as
vertically partitioned relations guarded by world-set descriptors, with
query evaluation, reduction, normalization and certain answers."""
from .errors import *  # noqa: F401,F403
from .model import (
    EMPTY,
    Descriptor,
    RelationDef,
    Table,
    UDatabase,
    URelation,
    Violation,
    WorldTable,
    combine,
    consistent,
    descriptor_probability,
    extends,
    make_database,
    make_partition,
    minimal_covers,
    validate,
    world_count_log10,
)
from .engine import (
    answer_relation,
    certain,
    certain_answers,
    certain_relation,
    evaluate,
    is_reduced,
    op_cover,
    op_join,
    op_merge,
    op_poss,
    op_project,
    op_select,
    op_union,
    possible,
    reduce,
)
from .normalize import ComponentGraph, normalize
from .oracle import certain_oracle, enumerate_worlds, eval_plain, instantiate, poss_oracle
from .query import explain, insert_merges, optimize, parse, plan_query, translate
from .storage import load_database, save_database
from .datagen import GenParams, GenStats, domain_size, generate, stats, zipf_bucket_counts

__version__ = "0.1.0"
