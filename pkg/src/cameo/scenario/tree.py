"""Stage-wise clustered scenario trees for multi-stage sizing runs.

Three stages map to the decision sequence: sizing at the root, a
day-ahead stage whose nodes carry clustered day-ahead price / wind-factor
profiles, and a real-time stage whose leaves carry real-time prices, wind
deviations from the parent centroid, and reserve prices.  Construction is
a pure function of (history, branching, seed).
"""

import csv
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..errors import InsufficientDataError
from ..payload import derive_seed
from ..data.history import HistoricalRecord, slice_days
from ..data.powercurve import DEFAULT_CURVE, PowerCurve
from ..workflow.model import ValidationReport
from .kmeans import kmeans, standardize

PROB_TOL = 1e-9


@dataclass(frozen=True)
class TreeNode:
    node_id: str
    stage: int
    parent: Optional[str]
    prob: float                      # conditional on the parent
    payload: dict

    def to_dict(self) -> dict:
        return {"node_id": self.node_id, "stage": self.stage, "parent": self.parent,
                "prob": self.prob, "payload": self.payload}

    @staticmethod
    def from_dict(d) -> "TreeNode":
        return TreeNode(node_id=d["node_id"], stage=d["stage"], parent=d["parent"],
                        prob=d["prob"], payload=d["payload"])


@dataclass(frozen=True)
class ScenarioTree:
    tree_id: str
    site_id: str
    seed: int
    branching: tuple                 # (b1, b2)
    nodes: tuple                     # root, stage-1 nodes, then leaves

    def node(self, node_id) -> Optional[TreeNode]:
        for n in self.nodes:
            if n.node_id == node_id:
                return n
        return None

    def children(self, node_id) -> List[TreeNode]:
        return [n for n in self.nodes if n.parent == node_id]

    @property
    def root(self) -> TreeNode:
        return self.nodes[0]

    @property
    def leaves(self) -> List[TreeNode]:
        parents = {n.parent for n in self.nodes}
        return [n for n in self.nodes if n.node_id not in parents]

    def absolute_prob(self, node_id) -> float:
        prob, node = 1.0, self.node(node_id)
        while node is not None:
            prob *= node.prob
            node = self.node(node.parent) if node.parent else None
        return prob

    def to_dict(self) -> dict:
        return {"tree_id": self.tree_id, "site_id": self.site_id, "seed": self.seed,
                "branching": list(self.branching),
                "nodes": [n.to_dict() for n in self.nodes]}

    @staticmethod
    def from_dict(d) -> "ScenarioTree":
        return ScenarioTree(tree_id=d["tree_id"], site_id=d["site_id"], seed=d["seed"],
                            branching=tuple(d["branching"]),
                            nodes=tuple(TreeNode.from_dict(n) for n in d["nodes"]))


def _rebalance(labels: np.ndarray, points: np.ndarray, centroids: np.ndarray,
               minimum: int) -> np.ndarray:
    """Ensure every cluster keeps >= minimum members by draining the largest."""
    labels = labels.copy()
    k = len(centroids)
    while True:
        counts = np.bincount(labels, minlength=k)
        deficient = [j for j in range(k) if counts[j] < minimum]
        if not deficient:
            return labels
        target = deficient[0]
        donor = int(np.argmax(counts))
        members = np.flatnonzero(labels == donor)
        off = np.sum((points[members] - centroids[donor]) ** 2, axis=1)
        labels[members[int(np.argmax(off))]] = target


def build_scenario_tree(history: HistoricalRecord, branching=(4, 3), seed: int = 0,
                        max_iter: int = 100, tol: float = 1e-9,
                        curve: PowerCurve = DEFAULT_CURVE) -> ScenarioTree:
    """Cluster representative days into a 3-stage tree.

    Stage 1 clusters days on 48-vectors (24 day-ahead prices, 24 wind
    factors); stage 2 clusters each stage-1 group on 72-vectors (24
    real-time prices, 24 wind-factor deviations from the stage-1
    centroid, 24 reserve prices).  Features are standardized per
    dimension before each clustering.
    """
    b1, b2 = int(branching[0]), int(branching[1])
    if b1 < 1 or b2 < 1:
        raise InsufficientDataError("branching factors must be >= 1")
    days = slice_days(history, curve)
    if len(days) < b1 * b2:
        raise InsufficientDataError(
            f"history has {len(days)} days, need at least {b1 * b2} for branching ({b1},{b2})")

    da = np.array([d.da_usd_mwh for d in days])
    wf = np.array([d.wind_factor for d in days])
    rt = np.array([d.rt_usd_mwh for d in days])
    res = np.array([d.res_usd_mw for d in days])

    f1 = standardize(np.hstack([da, wf]))
    labels1, centroids1 = kmeans(f1, b1, derive_seed(seed, "stage1"),
                                 max_iter=max_iter, tol=tol)
    labels1 = _rebalance(labels1, f1, centroids1, minimum=b2)

    nodes = [TreeNode(node_id="root", stage=0, parent=None, prob=1.0,
                      payload={"site_id": history.site_id})]
    stage2_nodes = []
    n_total = len(days)

    for m in range(b1):
        members = np.flatnonzero(labels1 == m)
        da_centroid = da[members].mean(axis=0)
        wf_centroid = wf[members].mean(axis=0)
        nodes.append(TreeNode(
            node_id=f"s1-{m}", stage=1, parent="root",
            prob=len(members) / n_total,
            payload={"da_usd_mwh": [float(v) for v in da_centroid],
                     "wind_factor": [float(v) for v in wf_centroid]}))

        dev = wf[members] - wf_centroid
        f2 = standardize(np.hstack([rt[members], dev, res[members]]))
        labels2, _ = kmeans(f2, b2, derive_seed(seed, "stage2", m),
                            max_iter=max_iter, tol=tol)
        for j in range(b2):
            sub = np.flatnonzero(labels2 == j)
            stage2_nodes.append(TreeNode(
                node_id=f"s2-{m}-{j}", stage=2, parent=f"s1-{m}",
                prob=len(sub) / len(members),
                payload={"rt_usd_mwh": [float(v) for v in rt[members][sub].mean(axis=0)],
                         "wind_dev": [float(v) for v in dev[sub].mean(axis=0)],
                         "res_usd_mw": [float(v) for v in res[members][sub].mean(axis=0)]}))

    return ScenarioTree(
        tree_id=f"{history.site_id}-tree{b1}x{b2}-seed{seed}",
        site_id=history.site_id, seed=seed, branching=(b1, b2),
        nodes=tuple(nodes + stage2_nodes))


_SERIES_BY_STAGE = {1: ("da_usd_mwh", "wind_factor"),
                    2: ("rt_usd_mwh", "wind_dev", "res_usd_mw")}


def validate_tree(tree: ScenarioTree) -> ValidationReport:
    """Structural audit: root/orphans, probability sums, stages, payload shape."""
    report = ValidationReport()
    ids = {n.node_id for n in tree.nodes}
    roots = [n for n in tree.nodes if n.parent is None]

    if len(roots) != 1:
        report.add("error", "root-count", f"expected exactly one root, found {len(roots)}")
    for n in roots:
        if n.stage != 0:
            report.add("error", "root-stage", "root must be stage 0", where=n.node_id)

    for n in tree.nodes:
        if n.parent is not None and n.parent not in ids:
            report.add("error", "orphan", f"node {n.node_id!r} has missing parent "
                       f"{n.parent!r}", where=n.node_id)
        if not 0.0 <= n.prob <= 1.0 + PROB_TOL:
            report.add("error", "prob-range", f"node {n.node_id!r} probability "
                       f"{n.prob} outside [0, 1]", where=n.node_id)
        for series in _SERIES_BY_STAGE.get(n.stage, ()):
            values = n.payload.get(series)
            if not isinstance(values, list) or len(values) != 24:
                report.add("error", "payload-shape",
                           f"node {n.node_id!r} series {series!r} must have 24 entries",
                           where=n.node_id)

    for n in tree.nodes:
        children = tree.children(n.node_id)
        if children:
            total = sum(c.prob for c in children)
            if abs(total - 1.0) > PROB_TOL:
                report.add("error", "prob-sum",
                           f"children of {n.node_id!r} have probabilities summing to "
                           f"{total!r}", where=n.node_id)
        elif n.stage != 2:
            report.add("error", "leaf-stage",
                       f"leaf {n.node_id!r} is at stage {n.stage}, expected 2",
                       where=n.node_id)

    leaf_total = sum(tree.absolute_prob(n.node_id) for n in tree.leaves)
    if abs(leaf_total - 1.0) > PROB_TOL:
        report.add("error", "leaf-prob-sum",
                   f"absolute leaf probabilities sum to {leaf_total!r}")
    return report


def export_tree_csv(tree: ScenarioTree, path) -> None:
    """Edge list for external inspection: node_id,parent,stage,prob."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_id", "parent", "stage", "prob"])
        for n in tree.nodes:
            writer.writerow([n.node_id, n.parent or "", n.stage, repr(n.prob)])
