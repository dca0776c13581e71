"""User selection for the colouring plan and the two clustering baselines.

Every method returns a :class:`ServiceAssignment`.  A served entry is
``(user, serving_bs, partner_bs or None, pattern or None)``; the serving
BS is always the user's nearest BS.  The proposed plan serves users on
``L`` orthogonal patterns, the baselines on a single shared slot.
"""

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .geometry import delaunay, nearest_two_many, region_key
from .rng import substream

METHODS = ("proposed", "dynamic", "static", "single_cell")


@dataclass(frozen=True, eq=False)
class ServiceAssignment:
    method: str
    served: tuple
    unserved: tuple
    n_slots: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        object.__setattr__(self, "served", tuple(tuple(s) for s in self.served))
        object.__setattr__(self, "unserved", tuple(int(u) for u in self.unserved))

    @property
    def slots(self):
        """Slot labels: pattern indices for the proposed plan, else ``[None]``."""
        return sorted({s[3] for s in self.served}) if self.method == "proposed" else [None]

    def in_slot(self, slot):
        return [s for s in self.served if s[3] == slot]

    def streams(self, slot):
        """Number of users each BS serves in ``slot``."""
        return Counter(s[1] for s in self.in_slot(slot))

    def clusters(self, slot):
        """BS pairs cooperating in ``slot`` (sorted keys)."""
        return sorted({region_key(s[1], s[2]) for s in self.in_slot(slot) if s[2] is not None})

    def served_users(self):
        return sorted(s[0] for s in self.served)


def _pick(rng, pool, k):
    pool = np.asarray(pool)
    if len(pool) <= k:
        return sorted(int(u) for u in pool)
    return sorted(int(u) for u in rng.choice(pool, size=k, replace=False))


def _unserved(n, served):
    taken = {s[0] for s in served}
    return [u for u in range(n) if u not in taken]


def _nearest(users, topology):
    if len(users) == 0:
        return np.empty((0, 2), dtype=np.int64)
    return nearest_two_many(topology.bs, users.positions)


def associate_proposed(users, plan, topology, K, seed):
    """K random users per side of every uncut region with enough users.

    A region with fewer than ``K`` users on either side stays idle, and
    users in cut regions are never served.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    rng = substream(seed, "association", "proposed")
    near = _nearest(users, topology)
    groups = {}
    for u, (a, b) in enumerate(near):
        groups.setdefault(region_key(int(a), int(b)), {}).setdefault(int(a), []).append(u)
    served = []
    for key, ell in sorted(plan.coloring.color.items()):
        sides = groups.get(key, {})
        pools = [sides.get(key[0], []), sides.get(key[1], [])]
        if min(len(p) for p in pools) < K:
            continue
        for side, pool in enumerate(pools):
            bs, partner = key[side], key[1 - side]
            served.extend((u, bs, partner, ell) for u in _pick(rng, pool, K))
    return ServiceAssignment("proposed", served, _unserved(len(users), served), plan.L)


def schedule_dynamic(users, topology, K, seed):
    """Greedy global scheduler over a random user order (single user per BS).

    A user claims its two nearest BSs when both are free; the partner BS
    then takes the closest free user on its own side of the same region,
    or failing that the closest free user in its own cell.  BSs left
    without a cluster serve their closest free user alone.
    """
    if K != 1:
        raise ValueError("dynamic clustering is defined for K = 1 only")
    rng = substream(seed, "association", "dynamic")
    n = len(users)
    near = _nearest(users, topology)
    pos = users.positions
    free = np.ones(n, dtype=bool)
    claimed = np.zeros(len(topology), dtype=bool)

    def closest(bs, mask):
        cand = np.flatnonzero(mask & free)
        if len(cand) == 0:
            return None
        d = np.sum((pos[cand] - topology.bs[bs]) ** 2, axis=1)
        return int(cand[np.argmin(d)])

    served = []
    for u in rng.permutation(n):
        a, b = int(near[u, 0]), int(near[u, 1])
        if not free[u] or claimed[a] or claimed[b]:
            continue
        claimed[[a, b]] = True
        free[u] = False
        served.append((int(u), a, b, None))
        v = closest(b, (near[:, 0] == b) & (near[:, 1] == a))
        if v is None:
            v = closest(b, near[:, 0] == b)
        if v is not None:
            free[v] = False
            served.append((v, b, a, None))
    for bs in np.flatnonzero(~claimed):
        v = closest(int(bs), near[:, 0] == bs)
        if v is not None:
            free[v] = False
            served.append((v, int(bs), None, None))
    served.sort()
    return ServiceAssignment("dynamic", served, _unserved(n, served))


def static_pairs(topology, seed):
    """Random matching on Delaunay neighbours, visited in random BS order."""
    rng = substream(seed, "association", "static")
    adj = delaunay(topology).adjacency
    mate = np.full(len(topology), -1)
    for a in rng.permutation(len(topology)):
        if mate[a] >= 0:
            continue
        options = [b for b in adj[a] if mate[b] < 0]
        if options:
            b = options[rng.integers(len(options))]
            mate[a], mate[b] = b, a
    return mate


def _per_cell(users, topology, K, rng, mate=None):
    near = _nearest(users, topology)
    served = []
    for bs in range(len(topology)):
        partner = None if mate is None or mate[bs] < 0 else int(mate[bs])
        served.extend((u, bs, partner, None) for u in _pick(rng, np.flatnonzero(near[:, 0] == bs), K))
    return sorted(served)


def assign_static(topology, users, K, seed):
    """Fixed BS pairs chosen before users are known; K random users per cell."""
    if K < 1:
        raise ValueError("K must be at least 1")
    mate = static_pairs(topology, seed)
    served = _per_cell(users, topology, K, substream(seed, "association", "static", "users"), mate)
    return ServiceAssignment("static", served, _unserved(len(users), served))


def assign_single_cell(topology, users, K, seed):
    """Uncoordinated operation: every BS serves K random users of its cell."""
    if K < 1:
        raise ValueError("K must be at least 1")
    served = _per_cell(users, topology, K, substream(seed, "association", "single_cell"))
    return ServiceAssignment("single_cell", served, _unserved(len(users), served))
