"""Query language, logical trees, physical plans and their optimization."""
from .ast import ColRef, Const, Atom, Relation, Select, Project, Join, Union, Poss, Merge, Cover, PartitionRef, algebra, project
from .parser import parse, to_sql
from .plan import PCover, PJoin, PMerge, PPoss, PProject, PSelect, PUnion, Plan, Scan, render
from .planner import insert_merges, plan_query, translate
from .optimizer import RULES, estimate, explain, optimize

__all__ = [
    "ColRef", "Const", "Atom", "Relation", "Select", "Project", "Join", "Union", "Poss", "Merge", "Cover",
    "PartitionRef", "algebra", "project", "parse", "to_sql", "Plan", "Scan", "PSelect", "PProject",
    "PJoin", "PMerge", "PUnion", "PCover", "PPoss", "render", "insert_merges", "translate", "plan_query",
    "RULES", "estimate", "explain", "optimize",
]
