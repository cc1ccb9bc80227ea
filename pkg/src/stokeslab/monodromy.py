"""Generalized monodromy data and the relation variety.

A MonodromyData tuple holds, over a fixed direction table: the diagonal
formal monodromies gamma-hat_i (prescribed eigenvalues), the Stokes
matrices St = I + sum c E_{j2,j1} supported on the pattern J(d,i), the
links L_i in GL_r and handle matrices A_k, B_k.  The relation map

    mu = prod_{i=n..1} L_i^{-1} Top_i L_i  prod_{k=g..1} B_k^-1 A_k^-1 B_k A_k,
    Top_i = gamma-hat_i St_{s_i} ... St_1,

cuts out the variety; its residual, the group action of
GL_r x prod (C*)^r, a gauge-fixed normal form, irreducibility and the
finite-difference rank of d(mu) are implemented here.  Matrices are
numpy complex arrays throughout (exactness is not needed on this side).
"""

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, RunConfig
from .errors import DegenerateOrbit, NotIrreducible, NotOnVariety


def _as_matrix(x, r):
    a = np.array(x, dtype=complex)
    if a.shape != (r, r):
        raise ValueError(f"expected {r}x{r} matrix, got {a.shape}")
    return a


@dataclass
class MonodromyData:
    """Point of the (pre-relation) data space S(nu).

    patterns[i][k] is the ordered-pair set J(d^(i)_k, i); stokes[i][k]
    differs from the identity only at entries (j2, j1) with (j1, j2) in
    the pattern.  gamma[i] is the eigenvalue vector of gamma-hat_i in
    label order.
    """
    r: int
    patterns: list            # list over i of list over k of frozenset
    gamma: list               # list over i of (r,) complex arrays
    stokes: list              # list over i of list over k of (r,r) arrays
    links: list               # list over i of (r,r) arrays
    A: list = field(default_factory=list)
    B: list = field(default_factory=list)

    def __post_init__(self):
        r = self.r
        self.gamma = [np.asarray(g, dtype=complex).reshape(r)
                      for g in self.gamma]
        self.stokes = [[_as_matrix(s, r) for s in row] for row in self.stokes]
        self.links = [_as_matrix(l, r) for l in self.links]
        self.A = [_as_matrix(a, r) for a in self.A]
        self.B = [_as_matrix(b, r) for b in self.B]
        if len(self.patterns) != len(self.gamma) or \
                len(self.patterns) != len(self.links):
            raise ValueError("per-point data lengths disagree")
        for i, row in enumerate(self.stokes):
            if len(row) != len(self.patterns[i]):
                raise ValueError(f"point {i}: stokes/pattern length mismatch")

    @property
    def n(self):
        return len(self.links)

    @property
    def g(self):
        return len(self.A)

    def copy(self):
        return MonodromyData(
            r=self.r,
            patterns=[list(p) for p in self.patterns],
            gamma=[g.copy() for g in self.gamma],
            stokes=[[s.copy() for s in row] for row in self.stokes],
            links=[l.copy() for l in self.links],
            A=[a.copy() for a in self.A],
            B=[b.copy() for b in self.B])

    def validate_support(self, tol=1e-12):
        """Stokes matrices must be I plus entries on their patterns."""
        for i, row in enumerate(self.stokes):
            for k, st in enumerate(row):
                allowed = {(j2, j1) for (j1, j2) in self.patterns[i][k]}
                probe = st - np.eye(self.r)
                for p in range(self.r):
                    for q in range(self.r):
                        if (p, q) in allowed:
                            continue
                        if abs(probe[p, q]) > tol:
                            raise ValueError(
                                f"stokes[{i}][{k}] entry {(p, q)} off "
                                f"pattern: {probe[p, q]}")

    def flatten(self):
        """Deterministic vector of all non-fixed coordinates (Stokes
        entries on-pattern, links, handles); gamma is prescribed data."""
        out = []
        for i, row in enumerate(self.stokes):
            for k, st in enumerate(row):
                for (j1, j2) in sorted(self.patterns[i][k]):
                    out.append(st[j2, j1])
        for l in self.links:
            out.extend(l.ravel())
        for a in self.A:
            out.extend(a.ravel())
        for b in self.B:
            out.extend(b.ravel())
        return np.array(out, dtype=complex)


def stokes_from_entries(pattern, entries, r):
    """Build I + sum c E_{j2,j1} from {(j1,j2): c}."""
    st = np.eye(r, dtype=complex)
    for (j1, j2), c in entries.items():
        if (j1, j2) not in pattern:
            raise ValueError(f"entry {(j1, j2)} not in pattern")
        st[j2, j1] = c
    return st


def top_monodromy(data: MonodromyData, i: int) -> np.ndarray:
    """Top_i = gamma-hat_i St_{s_i} ... St_2 St_1 (product in that order)."""
    out = np.diag(data.gamma[i]).astype(complex)
    for st in reversed(data.stokes[i]):
        out = out @ st
    return out


def relation_mu(data: MonodromyData) -> np.ndarray:
    r = data.r
    out = np.eye(r, dtype=complex)
    for i in range(data.n - 1, -1, -1):
        li = data.links[i]
        out = out @ np.linalg.solve(li, top_monodromy(data, i) @ li)
    for k in range(data.g - 1, -1, -1):
        a, b = data.A[k], data.B[k]
        out = out @ np.linalg.solve(b, np.linalg.solve(a, b @ a))
    return out


def relation_residual(data: MonodromyData):
    """mu(data) - I and its max-abs-entry norm."""
    res = relation_mu(data) - np.eye(data.r)
    return res, float(np.max(np.abs(res)))


# -- group action -----------------------------------------------------------------


@dataclass
class GroupElement:
    """(sigma, (sigma^(i))_i): sigma in GL(V_b), sigma^(i) diagonal."""
    sigma: np.ndarray
    local: list   # list over i of (r,) complex arrays (diagonal entries)

    def __post_init__(self):
        self.sigma = np.asarray(self.sigma, dtype=complex)
        self.local = [np.asarray(d, dtype=complex).ravel()
                      for d in self.local]

    @classmethod
    def identity(cls, r, n):
        return cls(np.eye(r, dtype=complex), [np.ones(r, dtype=complex)] * n)

    @classmethod
    def scalar(cls, c, r, n):
        """The central subgroup Z: (c I, (c, ..., c))."""
        return cls(c * np.eye(r, dtype=complex),
                   [c * np.ones(r, dtype=complex)] * n)

    def compose(self, other: "GroupElement") -> "GroupElement":
        """self o other, matching act(self, act(other, x)) =
        act(self.compose(other), x)."""
        return GroupElement(self.sigma @ other.sigma,
                            [d1 * d2 for d1, d2 in zip(self.local,
                                                       other.local)])


def act(g: GroupElement, data: MonodromyData) -> MonodromyData:
    """Solve the equivalence equations for the primed tuple:
    L'_i = sigma^(i) L_i sigma^{-1}, St' = sigma^(i) St sigma^(i)^{-1},
    gamma' = gamma, A' = sigma A sigma^{-1}, B' = sigma B sigma^{-1}.
    Then mu(act(g, data)) = sigma mu(data) sigma^{-1}."""
    sig_inv = np.linalg.inv(g.sigma)
    out = data.copy()
    for i in range(data.n):
        d = g.local[i]
        out.links[i] = (d[:, None] * data.links[i]) @ sig_inv
        out.stokes[i] = [d[:, None] * st / d[None, :]
                         for st in data.stokes[i]]
    out.A = [g.sigma @ a @ sig_inv for a in data.A]
    out.B = [g.sigma @ b @ sig_inv for b in data.B]
    return out


# -- irreducibility -----------------------------------------------------------------


def _generators(data: MonodromyData):
    gens = []
    for i in range(data.n):
        li = data.links[i]
        gens.append(np.linalg.solve(li, top_monodromy(data, i) @ li))
    gens.extend(data.A)
    gens.extend(data.B)
    return gens


def is_irreducible(data: MonodromyData, cfg: RunConfig = DEFAULT) -> bool:
    """No proper nonzero common invariant subspace of the monodromy
    generators.  r = 2: common-eigenvector search; r >= 3: Burnside span
    check (the generated algebra must be all of End(C^r)).  r = 1 has no
    proper nonzero subspaces; True by convention."""
    r = data.r
    if r == 1:
        return True
    gens = _generators(data)
    scale = max(float(np.max(np.abs(g))) for g in gens)
    tol = cfg.float_eq * max(1.0, scale)
    if r == 2:
        nonscalar = [g for g in gens
                     if np.max(np.abs(g - g[0, 0] * np.eye(2))) > tol]
        if not nonscalar:
            return False
        _, vecs = np.linalg.eig(nonscalar[0])
        for idx in range(2):
            v = vecs[:, idx]
            if all(_is_eigvec(g, v, tol) for g in gens):
                return False
        # a shared eigenvector of the first generator is the only candidate
        # for a common invariant line unless it is scalar (handled above)
        return True
    # Burnside: span of words in the generators
    basis = [np.eye(r, dtype=complex)]
    mat = np.array([b.ravel() for b in basis])
    changed = True
    while changed and len(basis) < r * r:
        changed = False
        for b in list(basis):
            for g in gens:
                cand = g @ b
                stacked = np.vstack([mat, cand.ravel()])
                if np.linalg.matrix_rank(stacked, tol=1e-10) > len(basis):
                    basis.append(cand)
                    mat = np.vstack([mat, cand.ravel()])
                    changed = True
    return len(basis) == r * r


def _is_eigvec(g, v, tol):
    w = g @ v
    # w parallel to v: 2x2 determinant test
    cross = w[0] * v[1] - w[1] * v[0]
    return abs(cross) <= tol * max(1.0, float(np.linalg.norm(w)))


# -- normalization -----------------------------------------------------------------


def _spanning_tree_scaling(data: MonodromyData, cfg: RunConfig):
    """Diagonal delta (up to a scalar) making a deterministic list of
    off-diagonal candidate entries equal to 1.

    Candidates scale as value * delta_p / delta_q at position (p, q):
    Stokes entries at point 1 first, then off-diagonal entries of the
    handle matrices and of the conjugated local monodromies.  Entries
    are consumed greedily while they connect new index components."""
    r = data.r
    candidates = []
    for k, st in enumerate(data.stokes[0] if data.stokes else []):
        for (j1, j2) in sorted(data.patterns[0][k]):
            candidates.append((st[j2, j1], j2, j1))
    for mats in (data.A, data.B):
        for mtx in mats:
            for p in range(r):
                for q in range(r):
                    if p != q:
                        candidates.append((mtx[p, q], p, q))
    for i in range(data.n):
        li = data.links[i]
        m = np.linalg.solve(li, top_monodromy(data, i) @ li)
        for p in range(r):
            for q in range(r):
                if p != q:
                    candidates.append((m[p, q], p, q))

    parent = list(range(r))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    scale = max(1.0, float(np.max(np.abs(data.flatten()))))
    chosen = []
    for val, p, q in candidates:
        if abs(val) <= cfg.float_eq * scale:
            continue
        rp, rq = find(p), find(q)
        if rp != rq:
            parent[rp] = rq
            chosen.append((val, p, q))
        if len(chosen) == r - 1:
            break
    if len(chosen) < r - 1:
        raise DegenerateOrbit(
            "no spanning set of nonzero off-diagonal entries; "
            "the data looks reducible")
    # solve val * delta_p / delta_q = 1 on the tree: moving p <- q divides
    # by val, moving q <- p multiplies by it
    adj = {}
    for val, p, q in chosen:
        adj.setdefault(q, []).append((p, 1.0 / val))
        adj.setdefault(p, []).append((q, val))
    delta = {0: 1.0 + 0.0j}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for y, factor in adj.get(x, []):
            if y not in delta:
                delta[y] = delta[x] * factor
                queue.append(y)
    out = np.ones(r, dtype=complex)
    for idx, v in delta.items():
        out[idx] = v
    return out


def normalize(data: MonodromyData, cfg: RunConfig = DEFAULT) -> MonodromyData:
    """Canonical orbit representative (irreducible data only): L_1 = I, a
    spanning tree of off-diagonal candidate entries scaled to 1, and the
    first nonzero entry of every row of the remaining links scaled to 1.
    Two tuples are equivalent iff their normal forms agree entrywise."""
    if not is_irreducible(data, cfg):
        raise NotIrreducible("normalize needs irreducible data")
    r, n = data.r, data.n
    # step 1: kill L_1
    g1 = GroupElement(data.links[0],
                      [np.ones(r, dtype=complex)] * n)
    out = act(g1, data)
    # step 2: the residual diagonal (sigma = sigma^(1) = delta) is fixed by
    # scaling a spanning tree of candidate entries to 1
    delta = _spanning_tree_scaling(out, cfg)
    g2 = GroupElement(np.diag(delta),
                      [delta] + [np.ones(r, dtype=complex)] * (n - 1))
    out = act(g2, out)
    # step 3: remaining per-point tori: first nonzero entry of each row of
    # L_i becomes 1 (i >= 2)
    scale = max(1.0, float(np.max(np.abs(out.flatten()))))
    for i in range(1, n):
        li = out.links[i]
        d = np.ones(r, dtype=complex)
        for p in range(r):
            row = li[p]
            idx = next((q for q in range(r)
                        if abs(row[q]) > cfg.float_eq * scale), None)
            if idx is None:
                raise DegenerateOrbit(f"link {i} has a zero row")
            d[p] = 1.0 / row[idx]
        loc = [np.ones(r, dtype=complex) for _ in range(n)]
        loc[i] = d
        out = act(GroupElement(np.eye(r, dtype=complex), loc), out)
    return out


def data_distance(a: MonodromyData, b: MonodromyData) -> float:
    """Max-abs distance between the flattened coordinates (gamma included,
    so tuples over different formal types are far apart)."""
    va, vb = a.flatten(), b.flatten()
    if va.shape != vb.shape:
        return math.inf
    d = float(np.max(np.abs(va - vb))) if va.size else 0.0
    for ga, gb in zip(a.gamma, b.gamma):
        d = max(d, float(np.max(np.abs(ga - gb))))
    return d


# -- tangent rank of d(mu) ------------------------------------------------------------


def _free_coordinates(data: MonodromyData):
    """Setter list for the free coordinates of S(nu): Stokes entries,
    links, handles.  gamma is prescribed and stays fixed."""
    coords = []
    for i in range(data.n):
        for k in range(len(data.stokes[i])):
            for (j1, j2) in sorted(data.patterns[i][k]):
                coords.append(("st", i, k, j2, j1))
    for i in range(data.n):
        for p in range(data.r):
            for q in range(data.r):
                coords.append(("link", i, p, q))
    for which, mats in (("A", data.A), ("B", data.B)):
        for k in range(len(mats)):
            for p in range(data.r):
                for q in range(data.r):
                    coords.append((which, k, p, q))
    return coords


def _get_coord(data, coord):
    kind = coord[0]
    if kind == "st":
        _, i, k, p, q = coord
        return data.stokes[i][k][p, q]
    if kind == "link":
        _, i, p, q = coord
        return data.links[i][p, q]
    _, k, p, q = coord
    return (data.A if kind == "A" else data.B)[k][p, q]


def _set_coord(data, coord, value):
    kind = coord[0]
    if kind == "st":
        _, i, k, p, q = coord
        data.stokes[i][k][p, q] = value
    elif kind == "link":
        _, i, p, q = coord
        data.links[i][p, q] = value
    elif kind == "A":
        _, k, p, q = coord
        data.A[k][p, q] = value
    else:
        _, k, p, q = coord
        data.B[k][p, q] = value


def dmu_jacobian(data: MonodromyData, cfg: RunConfig = DEFAULT,
                 step: float = 1e-6) -> np.ndarray:
    """Central finite differences of mu over the free coordinates; columns
    are complex directional derivatives, rows flatten mu."""
    coords = _free_coordinates(data)
    cols = []
    for coord in coords:
        base = _get_coord(data, coord)
        h = step * max(1.0, abs(base))
        plus = data.copy()
        _set_coord(plus, coord, base + h)
        minus = data.copy()
        _set_coord(minus, coord, base - h)
        col = (relation_mu(plus) - relation_mu(minus)).ravel() / (2 * h)
        cols.append(col)
    return np.array(cols, dtype=complex).T


def tangent_rank_dmu(data: MonodromyData, cfg: RunConfig = DEFAULT,
                     step: float = 1e-6, residual_tol: float = 1e-6) -> int:
    """Numerical rank of d(mu) at a point of the relation variety; r^2 - 1
    at irreducible non-resonant points (the trace direction is absent
    because det mu is locally constant)."""
    _, res = relation_residual(data)
    if res > residual_tol:
        raise NotOnVariety(f"relation residual {res:.2e} too large")
    if data.r == 1:
        return 0
    jac = dmu_jacobian(data, cfg, step)
    svals = np.linalg.svd(jac, compute_uv=False)
    if svals.size == 0 or svals[0] == 0.0:
        return 0
    return int(np.sum(svals > cfg.rank_threshold * svals[0]))


# -- dimension formulas ---------------------------------------------------------------


def expected_dimension(g: int, r: int, n: int, m) -> dict:
    """Moduli dimension 2 r^2 (g-1) + sum m_i r (r-1) + 2 (which the
    monodromy side reproduces) and the ambient dim of S(nu)."""
    if r < 1 or n < 0 or any(mi < 1 for mi in m) or len(m) != n:
        raise ValueError("need r >= 1, m_i >= 1, len(m) == n")
    moduli = 2 * r * r * (g - 1) + sum(mi * r * (r - 1) for mi in m) + 2
    dim_s = sum((mi - 1) * r * (r - 1) for mi in m) + (n + 2 * g) * r * r
    dim_group = r * r + n * r
    monodromy = dim_s - (r * r - 1) - (dim_group - 1)
    return {"moduli": moduli, "monodromy": monodromy, "S": dim_s}
