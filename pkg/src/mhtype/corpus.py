"""Built-in example algebras and random generators for property tests.

The ``teh*`` family is one underlying Lie algebra, H3 x R, with four
different metrics.  ``teh1`` and ``teh2`` are given in their
``{u, v}``-bases, where the brackets carry a 1/sqrt(2); the ``*_e`` variants
are the same metrics written in the rational ``{e}``-basis.

Random MHT instances are built from a Clifford-type family ``J_1..J_n`` of
G-skew operators with ``J_i J_k + J_k J_i = -2 s_i delta_ik``; setting
``j(z_k) = sum_i A_ik J_i`` gives ``Phi = A^T diag(s) A`` by construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import linalg as la
from .algebra import BlockMetric, StepTwoAlgebra, change_basis
from .mht import random_rational
from .scalars import Q, QuadraticSurd

__all__ = [
    "BUILTINS",
    "CORE_CORPUS",
    "Instance",
    "algebra_from_j",
    "builtin",
    "fuzz_mht",
    "fuzz_general",
    "two_block",
]


@dataclass(frozen=True)
class Instance:
    alg: StepTwoAlgebra
    metric: BlockMetric
    phi_expected: tuple | None = None  # Phi known by construction

    def __iter__(self):
        return iter((self.alg, self.metric))


def _alg(p, m, brackets, name, cl=(), vl=()):
    return StepTwoAlgebra.from_brackets(
        p, m, {(a, b): tuple(Q(c) if not isinstance(c, QuadraticSurd) else c for c in z)
               for (a, b), z in brackets.items()}, name, cl, vl
    )


def _m(rows):
    return la.as_matrix([[Q(c) for c in r] for r in rows])


_R2 = QuadraticSurd(0, Q(1, 2), 2)  # sqrt(2)/2


def _h3():
    return _alg(1, 2, {(0, 1): (1,)}, "h3", ("z",), ("x", "y")), BlockMetric(_m([[1]]), _m([[1, 0], [0, 1]]))


def _h3sig():
    return _alg(1, 2, {(0, 1): (1,)}, "h3sig", ("z",), ("x", "y")), BlockMetric(_m([[1]]), _m([[-1, 0], [0, 1]]))


def _rgheis():
    return _alg(1, 2, {(0, 1): (2,)}, "rgheis", ("z",), ("x", "y")), BlockMetric(_m([[1]]), _m([[1, 0], [0, 1]]))


def _teh(name, G_z, G_v):
    alg = _alg(2, 2, {(0, 1): (0, 1)}, name, ("e0", "e3"), ("e1", "e2"))
    return alg, BlockMetric(_m(G_z), _m(G_v))


def _teh_uv(name, G_v):
    alg = _alg(2, 2, {(0, 1): (_R2, -_R2)}, name, ("u1", "u2"), ("v1", "v2"))
    return alg, BlockMetric(_m([[1, 0], [0, -1]]), _m(G_v))


_QUAT = None


def _quaternion_units():
    global _QUAT
    if _QUAT is None:
        Li = _m([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
        Lj = _m([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]])
        _QUAT = (Li, Lj, la.matmul(Li, Lj))
    return _QUAT


def _quat():
    I4 = la.identity(4)
    alg = algebra_from_j(_quaternion_units(), la.identity(3), I4, "quat")
    return alg, BlockMetric(la.identity(3), I4)


_BUILDERS = {
    "h3": _h3,
    "h3sig": _h3sig,
    "rgheis": _rgheis,
    "quat": _quat,
    "teh0": lambda: _teh("teh0", [[1, 0], [0, 1]], [[1, 0], [0, 1]]),
    "teh1": lambda: _teh_uv("teh1", [[1, 0], [0, 1]]),
    "teh2": lambda: _teh_uv("teh2", [[1, 0], [0, -1]]),
    "teh3": lambda: _teh("teh3", [[1, 0], [0, 1]], [[0, 1], [1, 0]]),
    "teh1_e": lambda: _teh("teh1_e", [[0, 1], [1, 0]], [[1, 0], [0, 1]]),
    "teh2_e": lambda: _teh("teh2_e", [[0, 1], [1, 0]], [[0, 1], [1, 0]]),
}

BUILTINS = tuple(_BUILDERS)
CORE_CORPUS = ("h3", "h3sig", "teh0", "teh1", "teh2", "teh3")


def builtin(name: str) -> tuple[StepTwoAlgebra, BlockMetric]:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown built-in {name!r}; choose from {', '.join(BUILTINS)}") from None


def algebra_from_j(J_list, G_z, G_v, name: str = "") -> StepTwoAlgebra:
    """Algebra whose j-maps in the center basis are exactly ``J_list``.

    Requires each J_k to be G_v-skew.  Uses <[v_a, v_b], z_k> = (G_v J_k)_ba.
    """
    G_z, G_v = la.as_matrix(G_z), la.as_matrix(G_v)
    p, m = len(G_z), len(G_v)
    GJ = [la.matmul(G_v, J) for J in J_list]
    Gz_inv = la.inverse(G_z)
    brackets = {}
    for a in range(m):
        for b in range(a + 1, m):
            if GJ and any(GJ[k][b][a] != -GJ[k][a][b] for k in range(p)):
                raise ValueError("j-maps must be skew-adjoint for G_v")
            rhs = tuple(GJ[k][b][a] for k in range(p))
            brackets[(a, b)] = la.matvec(Gz_inv, rhs)
    return StepTwoAlgebra.from_brackets(p, m, brackets, name)


def two_block(coeffs=(1, 2), name: str = "two_block") -> tuple[StepTwoAlgebra, BlockMetric]:
    """p = 1, m = 2k with [v_{2i-1}, v_{2i}] = c_i z; J^2 has eigenvalues -c_i^2.

    With distinct |c_i| this is the simplest non-MHT algebra.
    """
    m = 2 * len(coeffs)
    br = {(2 * i, 2 * i + 1): (Q(c),) for i, c in enumerate(coeffs)}
    return StepTwoAlgebra.from_brackets(1, m, br, name), BlockMetric(la.identity(1), la.identity(m))


# ---------------------------------------------------------------------------
# random instances

_S = [[0, -1], [1, 0]]
_FAMILIES = {
    # name: (G0, generators, s_i with J_i^2 = -s_i Id)
    "F2a": ([[1, 0], [0, 1]], [_S], (1,)),
    "F2b": ([[1, 0], [0, -1]], [[[0, 1], [1, 0]]], (-1,)),
    "F2c": ([[0, 1], [1, 0]], [[[1, 0], [0, -1]]], (-1,)),
}


def _f4_families():
    I4 = la.identity(4)
    fam = {"F4": (I4, _quaternion_units(), (1, 1, 1))}
    S2 = _m(_S)
    J1 = la.block_diag(S2, S2)
    J2 = _m([[0, 0, 1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, -1, 0, 0]])
    fam["F4s"] = (la.diag([1, 1, -1, -1]), (J1, J2, la.matmul(J1, J2)), (1, -1, -1))
    return fam


def _random_invertible(rng: random.Random, n: int, height: int = 2):
    while True:
        P = la.as_matrix(
            [[Q(rng.randint(-height, height)) for _ in range(n)] for _ in range(n)]
        )
        if la.det(P) != 0:
            return P


def _clifford_block(rng: random.Random, max_m: int):
    families = dict(_FAMILIES)
    if max_m >= 4:
        families.update(_f4_families())
    name = rng.choice(sorted(families))
    G0, gens, s = families[name]
    G0, gens = _m(G0), [_m(g) for g in gens]
    if len(G0) == 2:
        copies = rng.randint(1, max_m // 2)
        signs = [rng.choice((1, -1)) for _ in range(copies)]
        G = la.scale(signs[0], G0)
        J = list(gens)
        for sg in signs[1:]:
            G = la.block_diag(G, la.scale(sg, G0))
            J = [la.block_diag(Jc, g) for Jc, g in zip(J, gens)]
        return G, J, s
    return G0, list(gens), s


def fuzz_mht(seed: int, max_p: int = 3, max_m: int = 6) -> Instance:
    """Random rational MHT algebra with known Phi, in a scrambled basis."""
    rng = random.Random(seed)
    G_v, gens, s = _clifford_block(rng, max_m)
    n = rng.randint(1, len(gens))
    gens, s = gens[:n], s[:n]
    p = rng.randint(1, max_p)
    while True:
        A = [[Q(rng.randint(-2, 2)) for _ in range(p)] for _ in range(n)]
        if any(any(r) for r in A):
            break
    J_list = []
    m = len(G_v)
    for k in range(p):
        Jk = la.zeros(m)
        for i in range(n):
            if A[i][k]:
                Jk = la.add(Jk, la.scale(A[i][k], gens[i]))
        J_list.append(Jk)
    P_z = _random_invertible(rng, p)
    G_z = la.matmul(la.matmul(la.transpose(P_z), la.diag([rng.choice((1, -1)) for _ in range(p)])), P_z)
    alg = algebra_from_j(J_list, G_z, G_v, f"fuzz_mht_{seed}")
    metric = BlockMetric(G_z, G_v)
    P_v = _random_invertible(rng, m, 1)
    alg, metric = change_basis(alg, metric, None, P_v, alg.name)
    At = la.transpose(la.as_matrix(A))
    Phi = la.matmul(la.matmul(At, la.diag(s)), la.as_matrix(A))
    return Instance(alg, metric, Phi)


def fuzz_general(seed: int, max_p: int = 3, max_m: int = 6, height: int = 5) -> Instance:
    """Random rational 2-step algebra with random nondegenerate block metric."""
    rng = random.Random(seed)
    p = rng.randint(1, max_p)
    m = rng.randint(2, max_m)
    br = {}
    for a in range(m):
        for b in range(a + 1, m):
            if rng.random() < 0.6:
                br[(a, b)] = tuple(random_rational(rng, height) if rng.random() < 0.7 else Q(0) for _ in range(p))
    alg = StepTwoAlgebra.from_brackets(p, m, br, f"fuzz_general_{seed}")

    def form(n):
        P = _random_invertible(rng, n)
        D = la.diag([rng.choice((1, -1)) * rng.randint(1, 3) for _ in range(n)])
        return la.matmul(la.matmul(la.transpose(P), D), P)

    return Instance(alg, BlockMetric(form(p), form(m)))
