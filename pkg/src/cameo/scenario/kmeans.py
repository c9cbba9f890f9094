"""Deterministic k-means used for scenario tree construction.

Seeded farthest-point initialization, lowest-index tie breaking, and
empty-cluster repair by splitting the currently largest cluster make the
clustering a pure function of (points, k, seed).
"""

import numpy as np


def standardize(points: np.ndarray) -> np.ndarray:
    """Zero-mean unit-variance per dimension; constant dims stay zero."""
    mean = points.mean(axis=0)
    std = points.std(axis=0)
    std = np.where(std < 1e-12, 1.0, std)
    return (points - mean) / std


def _farthest_point_init(points, k, rng):
    n = len(points)
    centers = [int(rng.integers(n))]
    d2 = np.sum((points - points[centers[0]]) ** 2, axis=1)
    while len(centers) < k:
        idx = int(np.argmax(d2))  # argmax takes the lowest index on ties
        centers.append(idx)
        d2 = np.minimum(d2, np.sum((points - points[idx]) ** 2, axis=1))
    return points[centers].copy()


def kmeans(points: np.ndarray, k: int, seed: int,
           max_iter: int = 100, tol: float = 1e-9):
    """Cluster standardized `points` into exactly k non-empty clusters.

    Returns (labels, centroids).  Assignment ties go to the lowest cluster
    index; an empty cluster is repaired by moving the member of the
    largest cluster farthest from its centroid (lowest point index on
    ties).  Requires len(points) >= k.
    """
    points = np.asarray(points, dtype=float)
    n = len(points)
    if n < k:
        raise ValueError(f"cannot form {k} clusters from {n} points")
    if k == 1:
        return np.zeros(n, dtype=int), points.mean(axis=0, keepdims=True)

    rng = np.random.default_rng(seed)
    centroids = _farthest_point_init(points, k, rng)
    labels = np.zeros(n, dtype=int)

    for _ in range(max_iter):
        dists = np.sum((points[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
        new_labels = np.argmin(dists, axis=1)  # lowest cluster index on ties

        repaired = False
        counts = np.bincount(new_labels, minlength=k)
        for empty in np.flatnonzero(counts == 0):
            largest = int(np.argmax(counts))
            members = np.flatnonzero(new_labels == largest)
            off = np.sum((points[members] - centroids[largest]) ** 2, axis=1)
            mover = members[int(np.argmax(off))]
            new_labels[mover] = empty
            counts = np.bincount(new_labels, minlength=k)
            repaired = True

        new_centroids = np.vstack([points[new_labels == j].mean(axis=0) for j in range(k)])
        shift = float(np.max(np.abs(new_centroids - centroids)))
        converged = np.array_equal(new_labels, labels) and shift <= tol and not repaired
        labels, centroids = new_labels, new_centroids
        if converged:
            break

    return labels, centroids
