from .sets import ScenarioSet, sample_scenario_sets
from .tree import ScenarioTree, TreeNode, build_scenario_tree, export_tree_csv, validate_tree
from .kmeans import kmeans, standardize

__all__ = [
    "ScenarioSet", "sample_scenario_sets",
    "ScenarioTree", "TreeNode", "build_scenario_tree", "export_tree_csv", "validate_tree",
    "kmeans", "standardize",
]
