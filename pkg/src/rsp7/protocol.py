"""Noiseless deterministic remote preparation of alpha|00> + beta|11>.

Protocol flow: the sender (qubit A) measures in a target-dependent
two-state basis; the four helpers (C1, C2, D1, D2) measure in the
computational basis; broadcasting those outcomes lets the receiver turn
the collapsed state of the pair (B1, B2) into the target with a short
sequence of local gates.

The published gate table for that last step contains defects: two rows
carry a helper-outcome label that never occurs, and one row's gate list
does not map its collapsed state to the target.  ``recovery_table``
therefore audits every row against the factor-state blocks at build
time, re-keys rows whose printed label is impossible, and replaces
broken gate lists with the shortest working sequence found by
breadth-first search over the published gate alphabet.  The audit trail
is available through ``table_report``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from . import channel
from .linalg import CX, H, I2, X, Z, apply_to_qubits, ket, n_qubits, tensor

_ORTHO_TOL = 1e-12
_MIN_BRANCH_PROBABILITY = 1e-14


class ImpossibleBranchError(RuntimeError):
    """A forced measurement outcome has (numerically) zero probability."""

    def __init__(self, message: str, probability: float):
        super().__init__(message)
        self.probability = probability


class UnknownOutcomeError(LookupError):
    """An outcome key outside the sixteen supported protocol branches."""


@dataclass(frozen=True)
class TargetState:
    """Receiver target alpha|00> + beta|11> with |alpha|^2 + |beta|^2 = 1.

    Both amplitudes may be complex.  The preparation basis is orthonormal
    only when conj(alpha)*beta is real, i.e. for real amplitude pairs up
    to one shared global phase; a genuine relative phase is rejected by
    ``alice_basis`` (not here) because the factor states themselves stay
    well defined for any normalized pair.
    """

    alpha: complex
    beta: complex

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        norm = abs(a) ** 2 + abs(b) ** 2
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"|alpha|^2 + |beta|^2 = {norm!r} is not 1 within 1e-10")

    def ket(self) -> np.ndarray:
        vec = np.zeros(4, dtype=np.complex128)
        vec[0] = self.alpha
        vec[3] = self.beta
        vec.setflags(write=False)
        return vec

    @classmethod
    def random(cls, rng: np.random.Generator, *, with_phase: bool = True) -> "TargetState":
        """Draw a supported target: real amplitudes times one shared phase."""
        t = rng.uniform(0.0, 2.0 * math.pi)
        phase = np.exp(1j * rng.uniform(0.0, 2.0 * math.pi)) if with_phase else 1.0
        return cls(phase * math.cos(t), phase * math.sin(t))


@dataclass(frozen=True)
class AliceBasis:
    """Orthonormal sender basis (u1, u2) for one target."""

    u1: np.ndarray
    u2: np.ndarray


def alice_basis(target: TargetState) -> AliceBasis:
    """Sender measurement basis u1 = alpha|0> + beta|1>, u2 = alpha|1> - beta|0>.

    Raises ValueError when the pair is not orthonormal, which happens
    exactly when alpha and beta carry a relative complex phase; such
    targets are outside the family this preparation scheme supports.
    """
    u1, u2 = channel.sender_basis_vectors(target)
    if abs(np.vdot(u1, u2)) > _ORTHO_TOL:
        raise ValueError(
            "sender basis is not orthonormal: alpha and beta must be real up "
            "to one shared global phase"
        )
    u1.setflags(write=False)
    u2.setflags(write=False)
    return AliceBasis(u1, u2)


#: Helper outcome patterns (charlie, david) that occur with nonzero probability.
VALID_PAIRS = channel.CORRELATED_PAIRS


@dataclass(frozen=True)
class OutcomeKey:
    """One protocol branch: sender outcome 1|2 plus helper bit patterns."""

    alice: int
    charlie: str
    david: str

    def __post_init__(self):
        if self.alice not in (1, 2):
            raise ValueError(f"sender outcome must be 1 or 2, got {self.alice!r}")
        for name, bits in (("charlie", self.charlie), ("david", self.david)):
            if len(bits) != 2 or any(c not in "01" for c in bits):
                raise ValueError(f"{name} outcome must be two bits, got {bits!r}")
        if (self.charlie, self.david) not in VALID_PAIRS:
            raise ValueError(
                f"helper outcome ({self.charlie}, {self.david}) is not one of "
                f"the eight correlated patterns"
            )

    def label(self) -> str:
        return f"U{self.alice},{self.charlie},{self.david}"

    @classmethod
    def parse(cls, text: str) -> "OutcomeKey":
        parts = text.strip().split(",")
        if len(parts) != 3 or parts[0] not in ("U1", "U2"):
            raise ValueError(f"expected 'U1,cc,dd' or 'U2,cc,dd', got {text!r}")
        return cls(int(parts[0][1]), parts[1], parts[2])


ALL_OUTCOME_KEYS: tuple[OutcomeKey, ...] = tuple(
    OutcomeKey(a, c, d) for a in (1, 2) for (c, d) in VALID_PAIRS
)

# Receiver gate alphabet: 4x4 matrices on the pair (B1, B2), B1 most
# significant.  CX12 = control B1 / target B2, CX21 the reverse.
_CX21 = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=np.complex128
)
GATE_MATRICES = {
    "CX12": CX,
    "CX21": _CX21,
    "H1": tensor(H, I2),
    "H2": tensor(I2, H),
    "X1": tensor(X, I2),
    "X2": tensor(I2, X),
    "Z1": tensor(Z, I2),
    "Z2": tensor(I2, Z),
}
for _m in GATE_MATRICES.values():
    _m.setflags(write=False)

_GATE_ORDER = ("CX12", "CX21", "H1", "H2", "X1", "X2", "Z1", "Z2")


def gate_matrix(token: str) -> np.ndarray:
    try:
        return GATE_MATRICES[token]
    except KeyError:
        raise ValueError(f"unknown gate token {token!r}") from None


def _apply_sequence(gates: Sequence[str], vec: np.ndarray) -> np.ndarray:
    out = vec
    for tok in gates:  # left-to-right: first listed gate acts first
        out = gate_matrix(tok) @ out
    return out


# The published recovery table, row for row, including its defects.
# Bob-state coefficients are kept so rows with an impossible helper label
# can be re-keyed by matching them against the true factor blocks.
_PRINTED_ROWS = (
    (1, "00", "00", (("a", "00", 1), ("b", "10", 1), ("a", "11", 1), ("b", "01", -1)),
     ("CX12", "H1", "Z1")),
    (1, "01", "01", (("a", "01", 1), ("b", "11", 1), ("a", "10", 1), ("b", "00", -1)),
     ("CX12", "H1", "X2", "Z1")),
    (1, "10", "00", (("a", "01", -1), ("b", "11", 1), ("a", "10", -1), ("b", "00", -1)),
     ("CX12", "H1", "Z1", "Z2", "X2")),
    (1, "11", "01", (("a", "00", 1), ("b", "10", -1), ("a", "11", 1), ("b", "01", 1)),
     ("CX12", "H1")),
    (1, "00", "10", (("a", "01", -1), ("b", "11", 1), ("a", "10", 1), ("b", "00", 1)),
     ("CX12", "H1", "Z1", "X1", "X2")),
    (1, "10", "10", (("a", "00", 1), ("b", "10", 1), ("a", "11", -1), ("b", "01", 1)),
     ("CX12", "H1", "Z2", "X1", "CX21")),
    (1, "10", "11", (("a", "00", 1), ("b", "10", -1), ("a", "11", -1), ("b", "01", -1)),
     ("CX12", "H1", "Z2", "X1")),
    (1, "11", "11", (("a", "01", 1), ("b", "11", 1), ("a", "10", -1), ("b", "00", 1)),
     ("CX12", "H1", "X2", "X1")),
    (2, "00", "00", (("a", "10", 1), ("b", "00", -1), ("a", "01", -1), ("b", "11", -1)),
     ("CX12", "H1", "Z1", "X1", "X2", "Z1")),
    (2, "01", "01", (("a", "11", 1), ("b", "01", -1), ("a", "00", -1), ("b", "10", -1)),
     ("CX12", "H1", "Z2", "Z1", "X1")),
    (2, "10", "00", (("a", "11", 1), ("b", "01", 1), ("a", "00", -1), ("b", "10", 1)),
     ("CX12", "H1", "Z1", "X1")),
    (2, "11", "01", (("a", "10", -1), ("b", "00", -1), ("a", "01", 1), ("b", "11", -1)),
     ("CX12", "H1", "X1", "X2", "Z1")),
    (2, "00", "10", (("a", "11", 1), ("b", "01", 1), ("a", "00", 1), ("b", "10", -1)),
     ("CX12", "H1")),
    (2, "10", "10", (("a", "10", 1), ("b", "00", -1), ("a", "01", 1), ("b", "11", 1)),
     ("CX12", "H1", "Z1", "X2")),
    (2, "10", "11", (("a", "10", -1), ("b", "00", -1), ("a", "01", -1), ("b", "11", 1)),
     ("CX12", "H1", "Z1", "Z2", "X2")),
    (2, "11", "11", (("a", "11", 1), ("b", "01", -1), ("a", "00", 1), ("b", "10", 1)),
     ("CX12", "H1", "Z1")),
)

_MAX_REPAIR_LENGTH = 6


@dataclass(frozen=True)
class RecoveryRule:
    """Verified receiver gate sequence for one outcome key."""

    key: OutcomeKey
    gates: tuple[str, ...]
    status: str  # "verified" | "rekeyed" | "repaired" | "rekeyed+repaired"
    printed_pair: Optional[tuple[str, str]] = None
    printed_gates: Optional[tuple[str, ...]] = None
    printed_gate_defect: float = 0.0


@dataclass(frozen=True)
class TableReport:
    rules: tuple[RecoveryRule, ...]

    @property
    def repaired(self) -> tuple[RecoveryRule, ...]:
        return tuple(r for r in self.rules if "repaired" in r.status)

    @property
    def rekeyed(self) -> tuple[RecoveryRule, ...]:
        return tuple(r for r in self.rules if "rekeyed" in r.status)


def _block_pair(key: OutcomeKey) -> tuple[np.ndarray, np.ndarray]:
    """Collapsed receiver states of a branch at parameters (1,0) and (0,1).

    Receiver gates are complex-linear maps, so a sequence prepares the
    target for every parameter pair exactly when it sends these two basis
    blocks to |00> and |11> with one common phase.
    """
    b10 = channel.factor_block(key.alice, key.charlie, key.david, (1.0, 0.0))
    b01 = channel.factor_block(key.alice, key.charlie, key.david, (0.0, 1.0))
    return b10, b01


def _pair_defect(w0: np.ndarray, w1: np.ndarray) -> float:
    """Distance of (w0, w1) from (phi|00>, phi|11>) with one common phase."""
    phase = w0[0]
    if abs(phase) < 1e-9:
        return float(max(np.linalg.norm(w0 - ket("00")), np.linalg.norm(w1 - ket("11"))))
    r0 = np.linalg.norm(w0 - phase * ket("00"))
    r1 = np.linalg.norm(w1 - phase * ket("11"))
    return float(max(r0, r1))


def _sequence_defect(gates: Sequence[str], blocks: tuple[np.ndarray, np.ndarray]) -> float:
    """Distance of a gate list from being a correct recovery (0 = correct)."""
    return _pair_defect(_apply_sequence(gates, blocks[0]), _apply_sequence(gates, blocks[1]))


def _canon(w0: np.ndarray, w1: np.ndarray) -> tuple:
    both = np.concatenate([w0, w1])
    for v in both:
        if abs(v) > 1e-9:
            both = both * (np.conj(v) / abs(v))
            break
    return tuple(np.round(both, 9).tolist())


def _search_sequence(blocks: tuple[np.ndarray, np.ndarray]) -> tuple[str, ...]:
    """Shortest gate sequence mapping the branch blocks onto the target.

    Breadth-first over the gate alphabet with dedup up to global phase;
    ties resolve to the first sequence in alphabet order, so the result
    is deterministic.
    """
    start = (blocks[0], blocks[1])
    if _pair_defect(*start) <= 1e-10:
        return ()
    seen = {_canon(*start)}
    queue = deque([((), start)])
    while queue:
        gates, (w0, w1) = queue.popleft()
        if len(gates) >= _MAX_REPAIR_LENGTH:
            continue
        for tok in _GATE_ORDER:
            m = GATE_MATRICES[tok]
            nxt = (m @ w0, m @ w1)
            cand = gates + (tok,)
            if _pair_defect(*nxt) <= 1e-10:
                return cand
            sig = _canon(*nxt)
            if sig not in seen:
                seen.add(sig)
                queue.append((cand, nxt))
    raise RuntimeError("no recovery sequence found within the search depth")


@lru_cache(maxsize=1)
def _build_table() -> TableReport:
    claimed: dict[OutcomeKey, tuple] = {}
    orphans = []
    for alice, c, d, coeffs, gates in _PRINTED_ROWS:
        if (c, d) in VALID_PAIRS:
            claimed[OutcomeKey(alice, c, d)] = (coeffs, gates, None)
        else:
            orphans.append((alice, c, d, coeffs, gates))

    # Rows whose printed helper label cannot occur are matched to an
    # unclaimed branch through their printed receiver-state column.
    unclaimed = [k for k in ALL_OUTCOME_KEYS if k not in claimed]
    for alice, c, d, coeffs, gates in orphans:
        printed10 = np.zeros(4, dtype=np.complex128)
        printed01 = np.zeros(4, dtype=np.complex128)
        for which, bbits, sign in coeffs:
            idx = int(bbits, 2)
            if which == "a":
                printed10[idx] += sign
            else:
                printed01[idx] += sign
        printed10 /= np.sqrt(2.0)
        printed01 /= np.sqrt(2.0)
        match = None
        for key in unclaimed:
            if key.alice != alice:
                continue
            b10, b01 = _block_pair(key)
            if (
                abs(abs(np.vdot(printed10, b10)) - 1.0) <= 1e-12
                and abs(abs(np.vdot(printed01, b01)) - 1.0) <= 1e-12
            ):
                match = key
                break
        if match is None:
            raise RuntimeError(
                f"printed row U{alice},{c},{d} matches no unclaimed branch"
            )
        unclaimed.remove(match)
        claimed[match] = (coeffs, gates, (c, d))
    if unclaimed:
        raise RuntimeError(f"branches without any printed row: {unclaimed}")

    rules = []
    for key in ALL_OUTCOME_KEYS:
        coeffs, gates, printed_pair = claimed[key]
        blocks = _block_pair(key)
        defect = _sequence_defect(gates, blocks)
        if defect <= 1e-10:
            status = "verified" if printed_pair is None else "rekeyed"
            final = tuple(gates)
            printed_gates = None if printed_pair is None else tuple(gates)
        else:
            repaired = _search_sequence(blocks)
            status = "repaired" if printed_pair is None else "rekeyed+repaired"
            final = repaired
            printed_gates = tuple(gates)
        rules.append(
            RecoveryRule(
                key=key,
                gates=final,
                status=status,
                printed_pair=printed_pair,
                printed_gates=printed_gates,
                printed_gate_defect=float(defect),
            )
        )
    return TableReport(rules=tuple(rules))


def recovery_table() -> dict[OutcomeKey, RecoveryRule]:
    return {r.key: r for r in _build_table().rules}


def table_report() -> TableReport:
    """Audit of all sixteen published rows (verifications, re-keys, repairs)."""
    return _build_table()


def recovery_sequence(key: OutcomeKey) -> tuple[str, ...]:
    """Gate tokens the receiver applies for the given measurement outcome."""
    try:
        return recovery_table()[key].gates
    except KeyError:
        raise UnknownOutcomeError(f"no recovery rule for outcome {key!r}") from None


def measure_projective(
    state: np.ndarray,
    qubits: Sequence[int],
    basis: Sequence[np.ndarray],
    *,
    forced: Optional[int] = None,
    rng: Union[np.random.Generator, int, None] = None,
):
    """Projective measurement of ``qubits`` in an orthonormal ``basis``.

    The basis must contain 2^k states spanning the measured subspace.
    Exactly one of ``forced`` (an outcome index) or ``rng`` (Generator or
    seed) selects the branch.  Returns (outcome_index, probability,
    collapsed_state); the collapsed state keeps the full register, with
    the measured qubits left in the observed basis state.
    """
    state = np.asarray(state, dtype=np.complex128)
    n = n_qubits(state)
    qubits = list(qubits)
    k = len(qubits)
    if len(set(qubits)) != k or any(q < 1 or q > n for q in qubits):
        raise ValueError(f"invalid measurement qubits {qubits} for {n}-qubit state")
    basis = [np.asarray(b, dtype=np.complex128).reshape(-1) for b in basis]
    if len(basis) != 2 ** k or any(b.shape != (2 ** k,) for b in basis):
        raise ValueError(f"basis must hold {2 ** k} states of dimension {2 ** k}")
    gram = np.array([[np.vdot(a, b) for b in basis] for a in basis])
    if np.max(np.abs(gram - np.eye(2 ** k))) > 1e-10:
        raise ValueError("measurement basis is not orthonormal")
    if (forced is None) == (rng is None):
        raise ValueError("provide exactly one of forced= or rng=")

    axes = [q - 1 for q in qubits]
    psi = state.reshape((2,) * n)
    # amplitudes[b] = <basis_b| psi, a tensor over the unmeasured qubits
    moved = np.moveaxis(psi, axes, range(k))
    flat = moved.reshape(2 ** k, -1)
    amp = np.array([b.conj() @ flat for b in basis])
    probs = np.einsum("bi,bi->b", amp, amp.conj()).real

    if forced is not None:
        if not 0 <= forced < 2 ** k:
            raise ValueError(f"forced outcome {forced} out of range")
        outcome = int(forced)
        p = float(probs[outcome])
        if p < _MIN_BRANCH_PROBABILITY:
            raise ImpossibleBranchError(
                f"forced outcome {forced} has probability {p:.3e}", p
            )
    else:
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        total = float(probs.sum())
        outcome = int(rng.choice(len(basis), p=probs / total))
        p = float(probs[outcome])

    # Rebuild the collapsed register: outcome ket on the measured qubits,
    # renormalized branch amplitudes on the rest.
    branch = amp[outcome].reshape([2] * (n - k)) / np.sqrt(p)
    out = np.tensordot(basis[outcome].reshape((2,) * k), branch, axes=0)
    out = np.moveaxis(out, range(k), axes)
    out = np.ascontiguousarray(out.reshape(-1))
    out.setflags(write=False)
    return outcome, p, out


@dataclass(frozen=True)
class ProtocolTranscript:
    target: TargetState
    outcome: OutcomeKey
    branch_probability: float
    gates: tuple[str, ...]
    bob_state: np.ndarray
    fidelity: float


@lru_cache(maxsize=1)
def _computational16() -> tuple[np.ndarray, ...]:
    eye = np.eye(16, dtype=np.complex128)
    return tuple(eye[i] for i in range(16))


def _extract_pair(state: np.ndarray, u: np.ndarray, charlie: str, david: str) -> np.ndarray:
    """Receiver-pair amplitudes of a post-measurement product state."""
    psi = state.reshape((2,) * 7)
    c1, c2 = int(charlie[0]), int(charlie[1])
    d1, d2 = int(david[0]), int(david[1])
    # register order: A, B1, B2, C1, D1, C2, D2
    sub = psi[:, :, :, c1, d1, c2, d2]
    vec = np.einsum("a,abc->bc", u.conj(), sub).reshape(-1)
    nrm = np.linalg.norm(vec)
    if nrm < 1e-12:
        raise ImpossibleBranchError("empty receiver branch", float(nrm) ** 2)
    out = vec / nrm
    out.setflags(write=False)
    return out


def run_rsp(
    target: TargetState,
    *,
    seed: Optional[int] = None,
    forced_key: Optional[OutcomeKey] = None,
) -> ProtocolTranscript:
    """One full noiseless protocol round.

    Branches are either sampled (``seed``) or forced (``forced_key``).
    """
    if (seed is None) == (forced_key is None):
        raise ValueError("provide exactly one of seed= or forced_key=")
    psi = channel.build_channel()
    basis = alice_basis(target)
    rng = np.random.default_rng(seed) if seed is not None else None

    if forced_key is not None:
        a_forced: Optional[int] = forced_key.alice - 1
        cd_forced: Optional[int] = int(
            forced_key.charlie + forced_key.david, 2
        )
    else:
        a_forced = cd_forced = None

    a_idx, p_a, psi = measure_projective(
        psi, [1], [basis.u1, basis.u2], forced=a_forced, rng=rng
    )
    # Measuring (C1, C2, D1, D2) in that qubit order makes the outcome
    # index read as the four bits c1 c2 d1 d2.
    cd_idx, p_cd, psi = measure_projective(
        psi, [4, 6, 5, 7], _computational16(), forced=cd_forced, rng=rng
    )
    bits = format(cd_idx, "04b")
    key = OutcomeKey(a_idx + 1, bits[:2], bits[2:])
    gates = recovery_sequence(key)
    for tok in gates:
        psi = apply_to_qubits(gate_matrix(tok), [2, 3], psi)
    u = basis.u1 if key.alice == 1 else basis.u2
    bob = _extract_pair(psi, u, key.charlie, key.david)
    fid = float(abs(np.vdot(target.ket(), bob)) ** 2)
    return ProtocolTranscript(
        target=target,
        outcome=key,
        branch_probability=float(p_a * p_cd),
        gates=gates,
        bob_state=bob,
        fidelity=fid,
    )


def enumerate_branches(target: TargetState) -> list[ProtocolTranscript]:
    """Every one of the sixteen branches, forced in a fixed order."""
    return [run_rsp(target, forced_key=key) for key in ALL_OUTCOME_KEYS]
