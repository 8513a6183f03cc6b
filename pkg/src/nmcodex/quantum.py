"""Dense simulation of a few qubits: Paulis, the Clifford subgroup SC, twirls,
and the 3-split quantum code C_R(message) with R = 2nmExt(x, y).

Qubits are ordered most-significant first in state-vector indices. SC on m
qubits is the Pauli group extended by SL(2, GF(2^m)) acting on pairs
(a, b) in GF(2^m)^2, where a gives the X part in the polynomial basis and b
the Z part in the trace-dual basis; this action is symplectic, so it lifts to
Cliffords. Its order is 2^{5m} - 2^{3m}.
"""

from __future__ import annotations

import functools
import itertools
import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .bits import BitString
from .fields import gf
from .nmext import two_nmext
from .profiles import ParameterProfile

ATOL = 1e-10
MAX_QUBITS = 12

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)


class QuantumError(ValueError):
    pass


# --- states ----------------------------------------------------------------------


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] & (m.shape[0] - 1):
            raise QuantumError("density matrix must be square with power-of-two size")
        if not np.allclose(m, m.conj().T, atol=ATOL):
            raise QuantumError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > ATOL:
            raise QuantumError(f"density matrix has trace {np.trace(m).real}")
        if np.linalg.eigvalsh(m).min() < -ATOL:
            raise QuantumError("density matrix is not positive semidefinite")
        object.__setattr__(self, "matrix", m)

    @property
    def num_qubits(self) -> int:
        return self.matrix.shape[0].bit_length() - 1

    def partial_trace(self, keep: list[int]) -> "DensityMatrix":
        return DensityMatrix(partial_trace(self.matrix, keep, self.num_qubits))


@dataclass(frozen=True)
class DenseState:
    """Pure state with a register label per qubit (e.g. message, purification, ancilla)."""

    amplitudes: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).ravel()
        n = len(self.labels)
        if n > MAX_QUBITS or a.size != 1 << n:
            raise QuantumError(f"{a.size} amplitudes for {n} labelled qubits")
        if abs(np.linalg.norm(a) - 1) > 1e-12:
            raise QuantumError(f"state norm {np.linalg.norm(a)} is not 1")
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def num_qubits(self) -> int:
        return len(self.labels)

    def qubits(self, label: str) -> list[int]:
        return [i for i, lb in enumerate(self.labels) if lb == label]

    def apply(self, u: np.ndarray, qubits: list[int]) -> "DenseState":
        return DenseState(apply_on(u, self.amplitudes, qubits, self.num_qubits), self.labels)

    def relabel(self, old: str, new: str) -> "DenseState":
        return DenseState(self.amplitudes, tuple(new if lb == old else lb for lb in self.labels))

    def density(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def fidelity(self, other: "DenseState") -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)


def basis_state(bits: str, labels) -> DenseState:
    a = np.zeros(1 << len(bits), dtype=complex)
    a[int(bits, 2) if bits else 0] = 1
    return DenseState(a, tuple(labels))


def max_entangled(m: int) -> DenseState:
    """Canonical purification of the maximally mixed state on m message qubits."""
    d = 1 << m
    a = np.zeros(d * d, dtype=complex)
    for i in range(d):
        a[i * d + i] = 1 / np.sqrt(d)
    return DenseState(a, ("message",) * m + ("purification",) * m)


def canonical_purification(rho: np.ndarray) -> DenseState:
    """sum_i sqrt(lambda_i) |e_i>|e_i*> for rho = sum_i lambda_i |e_i><e_i|; message first."""
    rho = DensityMatrix(rho).matrix
    w, v = np.linalg.eigh(rho)
    d = rho.shape[0]
    a = np.zeros(d * d, dtype=complex)
    for lam, vec in zip(w, v.T):
        if lam > 0:
            a += np.sqrt(lam) * np.kron(vec, vec.conj())
    m = d.bit_length() - 1
    return DenseState(a / np.linalg.norm(a), ("message",) * m + ("purification",) * m)


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return a / np.linalg.norm(a)


def random_density(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    d = 1 << n
    g = rng.normal(size=(d, rank or d)) + 1j * rng.normal(size=(d, rank or d))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def apply_on(u: np.ndarray, amps: np.ndarray, qubits: list[int], n: int) -> np.ndarray:
    k = len(qubits)
    if u.shape != (1 << k, 1 << k):
        raise QuantumError(f"{u.shape} operator on {k} qubits")
    t = amps.reshape((2,) * n)
    t = np.tensordot(u.reshape((2,) * (2 * k)), t, axes=(list(range(k, 2 * k)), qubits))
    rest = [i for i in range(n) if i not in qubits]
    order = np.argsort(list(qubits) + rest)
    return np.transpose(t, order).reshape(-1)


def embed(u: np.ndarray, qubits: list[int], n: int) -> np.ndarray:
    """The full 2^n operator acting as ``u`` on ``qubits`` and identity elsewhere."""
    cols = [apply_on(u, e, qubits, n) for e in np.eye(1 << n, dtype=complex)]
    return np.array(cols).T


def partial_trace(rho: np.ndarray, keep: list[int], n: int) -> np.ndarray:
    t = rho.reshape((2,) * (2 * n))
    drop = [i for i in range(n) if i not in keep]
    for offset, q in enumerate(sorted(drop, reverse=True)):
        cur = n - offset
        t = np.trace(t, axis1=q, axis2=q + cur)
    d = 1 << len(keep)
    return t.reshape(d, d)


def trace_norm(a: np.ndarray) -> float:
    return float(np.abs(np.linalg.eigvalsh((a + a.conj().T) / 2)).sum())


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    return 0.5 * trace_norm(a - b)


# --- Paulis ------------------------------------------------------------------------


@dataclass(frozen=True)
class PauliOp:
    """i^phase times the tensor product with X^x Z^z on each qubit (Y for x=z=1)."""

    x_mask: int
    z_mask: int
    num_qubits: int
    phase: int = 0

    def __post_init__(self):
        if not 0 <= self.x_mask < (1 << self.num_qubits) or not 0 <= self.z_mask < (1 << self.num_qubits):
            raise QuantumError("Pauli masks wider than the qubit count")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def from_label(cls, label: str) -> "PauliOp":
        x = z = 0
        for ch in label:
            x, z = x << 1, z << 1
            if ch in "XY":
                x |= 1
            if ch in "ZY":
                z |= 1
            if ch not in "IXYZ":
                raise QuantumError(f"bad Pauli label {label!r}")
        return cls(x, z, len(label))

    @classmethod
    def from_index(cls, idx: int, m: int) -> "PauliOp":
        return cls(idx >> m, idx & ((1 << m) - 1), m)

    @property
    def index(self) -> int:
        return (self.x_mask << self.num_qubits) | self.z_mask

    @property
    def label(self) -> str:
        out = []
        for j in range(self.num_qubits):
            b = self.num_qubits - 1 - j
            out.append("IZXY"[((self.x_mask >> b) & 1) * 2 + ((self.z_mask >> b) & 1)])
        return "".join(out)

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def same_up_to_phase(self, other: "PauliOp") -> bool:
        return (self.x_mask, self.z_mask) == (other.x_mask, other.z_mask)

    def __mul__(self, other: "PauliOp") -> "PauliOp":
        if other.num_qubits != self.num_qubits:
            raise QuantumError("Pauli product of different sizes")
        prod = pauli_matrix(self) @ pauli_matrix(other)
        base = PauliOp(self.x_mask ^ other.x_mask, self.z_mask ^ other.z_mask, self.num_qubits)
        ratio = prod[np.unravel_index(np.abs(prod).argmax(), prod.shape)] / pauli_matrix(base)[
            np.unravel_index(np.abs(prod).argmax(), prod.shape)]
        return PauliOp(base.x_mask, base.z_mask, self.num_qubits, int(round(np.angle(ratio) / (np.pi / 2))))


def pauli_matrix(p: PauliOp) -> np.ndarray:
    if p.num_qubits > 6:
        raise QuantumError("Pauli matrices limited to 6 qubits")
    out = np.array([[1]], dtype=complex)
    for ch in p.label:
        out = np.kron(out, {"I": _I2, "X": _X, "Y": _Y, "Z": _Z}[ch])
    return (1j ** p.phase) * out


def all_paulis(m: int) -> list[PauliOp]:
    return [PauliOp.from_index(i, m) for i in range(4**m)]


@functools.lru_cache(maxsize=None)
def _pauli_stack(m: int) -> np.ndarray:
    out = np.array([pauli_matrix(p) for p in all_paulis(m)])
    out.flags.writeable = False
    return out


def _as_pauli(mat: np.ndarray, m: int) -> PauliOp | None:
    """The phased Pauli equal to ``mat``, or None.

    A Pauli sends |c> to a phase times |c xor x>, so column 0 reveals x and
    the sign pattern on basis vectors e_j reveals z.
    """
    col = mat[:, 0]
    x = int(np.abs(col).argmax())
    if abs(abs(col[x]) - 1) > 1e-9:
        return None
    z = 0
    for j in range(m):
        c = 1 << (m - 1 - j)
        ratio = mat[c ^ x, c] / col[x]
        if abs(ratio + 1) < 1e-6:
            z |= c
    base = PauliOp(x, z, m)
    stack = _pauli_stack(m)
    ref = stack[base.index]
    ph = int(round(np.angle(col[x] / ref[x, 0]) / (np.pi / 2))) % 4
    if not np.allclose(mat, (1j**ph) * ref, atol=1e-9):
        return None
    return PauliOp(x, z, m, ph)


# --- Cliffords ---------------------------------------------------------------------


@dataclass(frozen=True)
class CliffordElem:
    matrix: np.ndarray = field(repr=False)
    provenance: str = "enumerated"
    index: int | None = None

    @property
    def num_qubits(self) -> int:
        return self.matrix.shape[0].bit_length() - 1

    def is_unitary(self) -> bool:
        u = self.matrix
        return np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=ATOL)

    def conjugate(self, p: PauliOp) -> PauliOp | None:
        """C^dagger P C as a phased Pauli (None if C is not Clifford)."""
        u = self.matrix
        return _as_pauli(u.conj().T @ pauli_matrix(p) @ u, self.num_qubits)

    def is_clifford(self) -> bool:
        m = self.num_qubits
        gens = [PauliOp(1 << j, 0, m) for j in range(m)] + [PauliOp(0, 1 << j, m) for j in range(m)]
        return self.is_unitary() and all(self.conjugate(g) is not None for g in gens)


def _canonical_key(u: np.ndarray) -> bytes:
    flat = u.ravel()
    k = np.flatnonzero(np.abs(flat) > 1e-9)[0]
    v = flat * (abs(flat[k]) / flat[k])
    # adding 0.0 folds -0.0 into 0.0 so equal matrices share a key
    return (np.round(v, 8) + 0.0).tobytes()


def _generators(m: int) -> list[np.ndarray]:
    gens = []
    for j in range(m):
        gens.append(embed(_H, [j], m))
        gens.append(embed(_S, [j], m))
    cnot = np.eye(4, dtype=complex)[[0, 1, 3, 2]]
    for a, b in itertools.permutations(range(m), 2):
        gens.append(embed(cnot, [a, b], m))
    return gens


def _tableau(u: np.ndarray, m: int) -> tuple:
    """(x, z, sign) images of u P u^dagger for P = X_1..X_m, Z_1..Z_m."""
    out = []
    for j in range(m):
        for p in (PauliOp(1 << (m - 1 - j), 0, m), PauliOp(0, 1 << (m - 1 - j), m)):
            q = _as_pauli(u @ pauli_matrix(p) @ u.conj().T, m)
            out.append((q.x_mask, q.z_mask, q.phase))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def clifford_group(m: int) -> dict:
    """All m-qubit Cliffords modulo phase, keyed by their tableau."""
    if m not in (1, 2):
        raise QuantumError("Clifford enumeration supports 1 or 2 qubits")
    ident = np.eye(1 << m, dtype=complex)
    seen = {_canonical_key(ident): ident}
    queue = deque([ident])
    gens = _generators(m)
    while queue:
        u = queue.popleft()
        for g in gens:
            v = g @ u
            key = _canonical_key(v)
            if key not in seen:
                seen[key] = v
                queue.append(v)
    return {_tableau(u, m): u for u in seen.values()}


def _trace_dual_basis(m: int) -> list[int]:
    """Basis {d_j} with Tr(alpha^i d_j) = [i == j] for the polynomial basis alpha^i."""
    F = gf(2, m)

    def tr(v):
        acc, cur = 0, v
        for _ in range(m):
            acc ^= cur
            cur = F.mul(cur, cur)
        return acc

    poly = [1 << (m - 1 - i) for i in range(m)]  # alpha^{m-1}, ..., 1 as MSB-first bits
    dual = []
    for target in range(m):
        for d in range(1, F.size):
            if all(tr(F.mul(poly[i], d)) == (i == target) for i in range(m)):
                dual.append(d)
                break
    return dual


def _sl2(m: int) -> list[tuple[int, int, int, int]]:
    F = gf(2, m)
    q = F.size
    mats = [(a, b, c, d) for a in range(q) for b in range(q) for c in range(q) for d in range(q)
            if F.add(F.mul(a, d), F.mul(b, c)) == 1]
    mats.remove((1, 0, 0, 1))
    return [(1, 0, 0, 1)] + mats


def _symplectic_of_sl(mat, m: int) -> tuple:
    """Images of X_j, Z_j (as (x, z) masks) under the SL(2, GF(2^m)) element."""
    F = gf(2, m)
    al, be, ga, de = mat
    dual = _trace_dual_basis(m)

    def to_pair(xm, zm):
        # x mask = coordinates of a in the polynomial basis (MSB-first bits of a)
        a = xm
        b = 0
        for j in range(m):
            if (zm >> (m - 1 - j)) & 1:
                b ^= dual[j]
        return a, b

    def from_pair(a, b):
        z = 0
        for j in range(m):
            # coordinate of b along dual[j] is Tr(alpha^j-th basis element * b)
            basis = 1 << (m - 1 - j)
            acc, cur = 0, F.mul(basis, b)
            for _ in range(m):
                acc ^= cur
                cur = F.mul(cur, cur)
            z |= acc << (m - 1 - j)
        return a, z

    out = []
    for j in range(m):
        for xm, zm in ((1 << (m - 1 - j), 0), (0, 1 << (m - 1 - j))):
            a, b = to_pair(xm, zm)
            a2 = F.add(F.mul(al, a), F.mul(be, b))
            b2 = F.add(F.mul(ga, a), F.mul(de, b))
            out.append(from_pair(a2, b2))
    return tuple(out)


def clifford_from_tableau(images: list[PauliOp]) -> np.ndarray:
    """The Clifford U (up to phase) with U X_j U^dag = images[2j] and U Z_j U^dag = images[2j+1].

    U|0..0> is the joint +1 eigenvector of the Z images, and U|b> is obtained
    from it by the X images selected by b.
    """
    m = images[0].num_qubits
    d = 1 << m
    proj = np.eye(d, dtype=complex)
    for j in range(m):
        proj = proj @ (np.eye(d) + pauli_matrix(images[2 * j + 1])) / 2
    k = int(np.abs(np.diag(proj)).argmax())
    psi0 = proj[:, k] / np.linalg.norm(proj[:, k])
    cols = []
    for b in range(d):
        v = psi0
        for j in range(m):
            if (b >> (m - 1 - j)) & 1:
                v = pauli_matrix(images[2 * j]) @ v
        cols.append(v)
    u = np.array(cols).T
    if not np.allclose(u.conj().T @ u, np.eye(d), atol=1e-9):
        raise QuantumError("tableau does not describe a Clifford (images fail to commute correctly)")
    return u


@functools.lru_cache(maxsize=None)
def _sc_matrices(m: int) -> tuple[np.ndarray, ...]:
    paulis = [pauli_matrix(p) for p in all_paulis(m)]
    out = []
    for mat in _sl2(m):
        images = [PauliOp(x, z, m) for x, z in _symplectic_of_sl(mat, m)]
        # the lift whose generator images all carry sign +1
        c = clifford_from_tableau(images)
        if _tableau(c, m) != tuple((q.x_mask, q.z_mask, 0) for q in images):
            raise AssertionError(f"lift of {mat} has the wrong tableau")
        out.extend(c @ p for p in paulis)
    _validate_sc(out, m)
    return tuple(out)


def _validate_sc(elems: list[np.ndarray], m: int):
    expected = 2 ** (5 * m) - 2 ** (3 * m)
    keys = {_canonical_key(u) for u in elems}
    if len(elems) != expected or len(keys) != expected:
        raise AssertionError(f"SC construction produced {len(keys)} distinct elements, expected {expected}")


def sc_enumerate(m: int) -> list[CliffordElem]:
    """The subgroup SC on m qubits modulo phase; element 0 is the identity."""
    if m not in (1, 2):
        raise QuantumError("SC enumeration supports m = 1 or 2")
    return [CliffordElem(u, "enumerated", i) for i, u in enumerate(_sc_matrices(m))]


def sc_order(m: int) -> int:
    return 2 ** (5 * m) - 2 ** (3 * m)


def sc_index(r: int, m: int) -> int:
    return r % sc_order(m)


def sc_sample(r: BitString, m: int) -> CliffordElem:
    if m not in (1, 2):
        raise QuantumError("SC sampling supports m = 1 or 2")
    if r.length != 5 * m:
        raise QuantumError(f"SC sampling needs {5 * m} bits, got {r.length}")
    i = sc_index(r.value, m)
    return CliffordElem(_sc_matrices(m)[i], "sampled", i)


def sc_sampling_bias(m: int) -> float:
    """Total variation of the modular index map from uniform over SC."""
    n, order = 2 ** (5 * m), sc_order(m)
    q, rem = divmod(n, order)
    probs = np.array([(q + 1) / n] * rem + [q / n] * (order - rem))
    return 0.5 * float(np.abs(probs - 1 / order).sum())


# --- twirls ------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _group_stack(kind: str, m: int) -> np.ndarray:
    if kind == "pauli":
        out = np.stack([pauli_matrix(p) for p in all_paulis(m)])
    elif kind == "sc":
        out = np.stack(_sc_matrices(m))
    else:
        raise QuantumError(f"unknown group {kind!r}")
    out.flags.writeable = False
    return out


def _conjugates(op: np.ndarray, kind: str, m: int) -> np.ndarray:
    """Stack of Q^dag op Q over the group."""
    g = _group_stack(kind, m)
    return np.conj(np.swapaxes(g, 1, 2)) @ op @ g


def _check_distinct(p1: PauliOp, p2: PauliOp):
    if p1.same_up_to_phase(p2):
        raise QuantumError("the twirl residual is only zero for distinct Paulis")


def _sandwich_last(left: np.ndarray, rho: np.ndarray, right: np.ndarray, m: int) -> np.ndarray:
    """sum_g (I x L_g) rho (I x R_g) with L_g, R_g on the last m qubits."""
    d = 1 << m
    big = rho.shape[0] // d
    r = rho.reshape(big, d, big, d)
    return np.einsum("gab,xbyc,gcd->xayd", left, r, right).reshape(rho.shape)


def twirl_residual_pauli(rho: np.ndarray, p1: PauliOp, p2: PauliOp, group: str = "pauli") -> float:
    """Operator norm of sum_Q Q^dag p1 Q rho Q^dag p2^dag Q over the group."""
    _check_distinct(p1, p2)
    m = p1.num_qubits
    left = _conjugates(pauli_matrix(p1), group, m)
    right = _conjugates(pauli_matrix(p2).conj().T, group, m)
    acc = np.einsum("gij,jk,gkl->il", left, np.asarray(rho, dtype=complex), right)
    return float(np.linalg.norm(acc, 2))


def twirl_residual_purified(rho: np.ndarray, p1: PauliOp, p2: PauliOp, group: str = "sc") -> float:
    """Same residual with the Paulis acting on the second half of a bipartite rho (Ahat, A)."""
    _check_distinct(p1, p2)
    m = p1.num_qubits
    left = _conjugates(pauli_matrix(p1), group, m)
    right = _conjugates(pauli_matrix(p2).conj().T, group, m)
    acc = _sandwich_last(left, np.asarray(rho, dtype=complex), right, m)
    return float(np.linalg.norm(acc, 2))


def one_design_average(rho_ab: np.ndarray, m_a: int, group: str = "pauli") -> np.ndarray:
    """(1/|G|) sum_g (g x I) rho (g x I)^dag with g on the first m_a qubits."""
    n = rho_ab.shape[0].bit_length() - 1
    if m_a > n:
        raise QuantumError("subsystem larger than the state")
    g = _group_stack(group, m_a)
    d = 1 << m_a
    rest = rho_ab.shape[0] // d
    r = np.asarray(rho_ab, dtype=complex).reshape(d, rest, d, rest)
    acc = np.einsum("gab,bxcy,gdc->axdy", g, r, g.conj()).reshape(rho_ab.shape)
    return acc / g.shape[0]


def maximally_mixed_tensor(rho_ab: np.ndarray, m_a: int) -> np.ndarray:
    n = rho_ab.shape[0].bit_length() - 1
    rho_b = partial_trace(rho_ab, list(range(m_a, n)), n)
    return np.kron(np.eye(1 << m_a) / (1 << m_a), rho_b)


def _purified_split(state: DenseState) -> tuple[list[int], list[int]]:
    msg = state.qubits("message")
    pur = state.qubits("purification")
    if not msg or len(pur) != len(msg) or len(msg) + len(pur) != state.num_qubits:
        raise QuantumError("expected a pure state on message qubits plus an equal-size purification")
    return pur, msg


def conjugated_pauli_average(state: DenseState, p: PauliOp, q: PauliOp) -> np.ndarray:
    """(1/|SC|) sum_C (I x C^dag p C) rho (I x C^dag q^dag C) on (purification, message).

    The returned matrix is ordered purification qubits first.
    """
    pur, msg = _purified_split(state)
    m = len(msg)
    if p.num_qubits != m or q.num_qubits != m:
        raise QuantumError("Paulis must act on the message register")
    rho = _reordered_density(state, pur + msg)
    left = _conjugates(pauli_matrix(p), "sc", m)
    right = _conjugates(pauli_matrix(q).conj().T, "sc", m)
    return _sandwich_last(left, rho, right, m) / sc_order(m)


def _reordered_density(state: DenseState, order: list[int]) -> np.ndarray:
    n = state.num_qubits
    amps = np.transpose(state.amplitudes.reshape((2,) * n), order).reshape(-1)
    return np.outer(amps, amps.conj())


def equal_pauli_closed_form(rho_hat_a: np.ndarray, m: int) -> np.ndarray:
    """(4^m (rho_Ahat x U_A) - rho_AhatA) / (4^m - 1), purification first."""
    n = rho_hat_a.shape[0].bit_length() - 1
    rho_hat = partial_trace(rho_hat_a, list(range(n - m)), n)
    prod = np.kron(rho_hat, np.eye(1 << m) / (1 << m))
    d = 4**m
    return (d * prod - rho_hat_a) / (d - 1)


# --- the quantum code --------------------------------------------------------------


def _qnmc_len(p: ParameterProfile) -> int:
    if not p.supports("qnmc"):
        raise QuantumError(f"profile {p.name} does not support the quantum code")
    return p.out_len // 5


def qnmc_encode(message_state: DenseState, rand: BitString, p: ParameterProfile):
    """(z_state, y, x): the message register rotated by C_R, R = 2nmExt(x, y)."""
    m = _qnmc_len(p)
    msg = message_state.qubits("message")
    if len(msg) != m:
        raise QuantumError(f"profile {p.name} encodes {m} message qubits, state has {len(msg)}")
    if rand.length != p.rand_len:
        raise QuantumError(f"randomness has {rand.length} bits, expected {p.rand_len}")
    x, y = rand.split(p.n, p.y_len)
    c = sc_sample(two_nmext(x, y, p), m)
    return message_state.apply(c.matrix, msg).relabel("message", "z"), y, x


def qnmc_decode(z_state: DenseState, y: BitString, x: BitString, p: ParameterProfile) -> DenseState:
    m = _qnmc_len(p)
    z = z_state.qubits("z")
    if len(z) != m:
        raise QuantumError(f"expected {m} z qubits, state has {len(z)}")
    c = sc_sample(two_nmext(x, y, p), m)
    return z_state.apply(c.matrix.conj().T, z).relabel("z", "message")


def induced_sc_distribution(p: ParameterProfile) -> np.ndarray:
    """Exact probability of each SC element under uniform encoder randomness."""
    from .nmext import nmext_table

    m = _qnmc_len(p)
    table = nmext_table(p).astype(np.int64)
    counts = np.bincount(table % sc_order(m), minlength=sc_order(m))
    return counts / table.size


@dataclass(frozen=True)
class TamperOutcome:
    output: np.ndarray  # over (purification, message)
    p: float
    predicted: np.ndarray
    bias: float

    @property
    def deviation(self) -> float:
        return trace_distance(self.output, self.predicted)


def isometry_tamper_experiment(message_state: DenseState, unitary: np.ndarray, ancilla: np.ndarray,
                               p: ParameterProfile) -> TamperOutcome:
    """Average decoded output when the z register and an ancilla undergo ``unitary``.

    The adversary holds the ancilla state ``ancilla`` (up to 2 qubits) and acts
    on (z, ancilla); x and y are untouched. Returns the exact average over all
    encoder randomness, together with the prediction p * rho + (1 - p) * (the
    equal-Pauli closed form), where p = || (Tr_z U / 2^m) |ancilla> ||^2.
    """
    m = _qnmc_len(p)
    pur, msg = _purified_split(message_state)
    anc = np.asarray(ancilla, dtype=complex).ravel()
    k = anc.size.bit_length() - 1
    if k > 2 or anc.size != 1 << k:
        raise QuantumError("ancilla limited to 2 qubits")
    if unitary.shape != (1 << (m + k), 1 << (m + k)):
        raise QuantumError("unitary must act on the z register and the ancilla")
    amps = np.transpose(message_state.amplitudes.reshape((2,) * (2 * m)), pur + msg).reshape(-1)
    psi = np.kron(amps, anc)  # purification, message, ancilla
    n = 2 * m + k
    weights = induced_sc_distribution(p)
    u_full = embed(unitary, list(range(m, n)), n)
    out = np.zeros((1 << (2 * m), 1 << (2 * m)), dtype=complex)
    for c, w in zip(_sc_matrices(m), weights):
        if w == 0:
            continue
        cz = embed(c, list(range(m, 2 * m)), n)
        v = cz.conj().T @ u_full @ cz @ psi
        out += w * partial_trace(np.outer(v, v.conj()), list(range(2 * m)), n)
    rho = np.outer(amps, amps.conj())
    block = unitary.reshape(1 << m, 1 << k, 1 << m, 1 << k)
    u_id = np.einsum("iaib->ab", block) / (1 << m)
    prob = float(np.linalg.norm(u_id @ anc) ** 2)
    predicted = prob * rho + (1 - prob) * equal_pauli_closed_form(rho, m)
    bias = 0.5 * float(np.abs(weights - 1 / sc_order(m)).sum())
    return TamperOutcome(out, prob, predicted, bias)


def pauli_tamper_experiment(message_state: DenseState, pauli_on_z: PauliOp, p: ParameterProfile) -> TamperOutcome:
    return isometry_tamper_experiment(message_state, pauli_matrix(pauli_on_z), np.array([1.0]), p)


# --- serialization -----------------------------------------------------------------


def state_to_json(state: DenseState) -> str:
    return json.dumps({"labels": list(state.labels),
                       "amplitudes": [[float(a.real), float(a.imag)] for a in state.amplitudes]})


def state_from_json(text: str) -> DenseState:
    obj = json.loads(text)
    if isinstance(obj, list):
        amps, labels = obj, None
    else:
        amps, labels = obj["amplitudes"], obj.get("labels")
    a = np.array([complex(re, im) for re, im in amps])
    n = a.size.bit_length() - 1
    return DenseState(a, tuple(labels) if labels else ("message",) * n)


def sc_conjugation_table(m: int) -> np.ndarray:
    """table[c, i] = Pauli index of C_c^dag P_i C_c (phase dropped)."""
    elems = _sc_matrices(m)
    stack = _pauli_stack(m)
    out = np.zeros((len(elems), 4**m), dtype=np.int64)
    for ci, c in enumerate(elems):
        cd = c.conj().T
        for pi in range(4**m):
            out[ci, pi] = _as_pauli(cd @ stack[pi] @ c, m).index
    return out
