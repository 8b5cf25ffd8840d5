import numpy as np
import pytest
import scipy.linalg

from cavitycluster import (
    HermiticityError, OperatorMatrix, OracleBudgetError, QuantumState, SpaceError, SpaceLabel, StateError,
    embed, embed_product, expm_apply, expm_oracle, fidelity, partial_trace, product_state, reorder, reset_site,
    trace_distance,
)
from cavitycluster.numkernel import (
    HADAMARD, KET_0, KET_1, KET_PLUS, SIGMA_X, SIGMA_Z, apply_kraus, apply_local, apply_operator, basis_state,
    expectation, unitarity_error,
)

SEED = 7
TOL = 1e-10
SITES = [0, 1, 2, 3]


def random_hermitian(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (m + m.conj().T) / 2


def random_state(rng, space):
    v = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    return QuantumState(space, v / np.linalg.norm(v))


def test_space_label():
    print("[NK][01] Space labels")
    space = SpaceLabel.qubits(SITES)
    assert space.dim == 16
    assert space.index(2) == 2
    assert 3 in space and 4 not in space
    assert space.subspace([3, 1]).ids == [1, 3]
    with pytest.raises(SpaceError):
        SpaceLabel.qubits([0, 0])
    with pytest.raises(SpaceError):
        space.index(9)
    mixed = SpaceLabel(((0, 2), ((1, 1), 6)))
    assert mixed.dim == 12
    assert SpaceLabel.from_json(mixed.to_json()) == mixed


def test_embed():
    print("[NK][02] Embedding local operators")
    space = SpaceLabel.qubits([0, 1])
    assert np.allclose(embed(SIGMA_X, 0, space).dense(), np.kron(SIGMA_X, np.eye(2)))
    assert np.allclose(embed(SIGMA_X, 1, space).dense(), np.kron(np.eye(2), SIGMA_X))
    both = embed_product({0: SIGMA_Z, 1: SIGMA_X}, space)
    assert np.allclose(both.dense(), np.kron(SIGMA_Z, SIGMA_X))
    with pytest.raises(SpaceError):
        embed(np.eye(3), 0, space)
    with pytest.raises(SpaceError):
        embed(SIGMA_X, 5, space)


def test_operator_algebra():
    print("[NK][03] Operator algebra")
    space = SpaceLabel.qubits([0])
    x = OperatorMatrix(space, SIGMA_X, hermitian=True)
    z = OperatorMatrix(space, SIGMA_Z, hermitian=True)
    assert (x + z).hermitian
    assert not (1j * x).hermitian
    assert np.allclose(x.commutator(z).dense(), SIGMA_X @ SIGMA_Z - SIGMA_Z @ SIGMA_X)
    with pytest.raises(HermiticityError):
        OperatorMatrix(space, [[0, 1], [0, 0]], hermitian=True)
    with pytest.raises(SpaceError):
        x + OperatorMatrix(SpaceLabel.qubits([1]), SIGMA_Z)


def test_expm_apply_against_oracle():
    print("[NK][04] Sparse propagation against the dense oracle")
    rng = np.random.default_rng(SEED)
    space = SpaceLabel.qubits(SITES)
    for _ in range(5):
        H = OperatorMatrix(space, random_hermitian(rng, space.dim), hermitian=True)
        psi = random_state(rng, space)
        t = rng.uniform(0.1, 3.0)
        out = expm_apply(H, t, psi)
        assert abs(np.linalg.norm(out.amplitudes) - 1) < 1e-10
        assert np.allclose(out.amplitudes, expm_oracle(H, t) @ psi.amplitudes, atol=1e-8)
        assert np.allclose(expm_oracle(H, t), scipy.linalg.expm(-1j * t * H.dense()), atol=1e-8)
        assert unitarity_error(expm_oracle(H, t)) < 1e-10


def test_expm_edge_cases():
    print("[NK][05] Propagation edge cases")
    space = SpaceLabel.qubits([0, 1])
    psi = product_state(space, {0: KET_1})
    H = OperatorMatrix(space, np.diag([0, 1, 2, 3]), hermitian=True)
    assert np.allclose(expm_apply(H, 0.0, psi).amplitudes, psi.amplitudes)
    with pytest.raises(HermiticityError):
        expm_apply(OperatorMatrix(space, np.triu(np.ones((4, 4)))), 1.0, psi)
    with pytest.raises(SpaceError):
        expm_apply(H, 1.0, product_state(SpaceLabel.qubits([0, 2]), {}))
    with pytest.raises(OracleBudgetError):
        expm_oracle(H, 1.0, budget=2)


def test_state_validation():
    print("[NK][06] State invariants")
    space = SpaceLabel.qubits([0])
    with pytest.raises(StateError):
        QuantumState(space, [1, 1])
    with pytest.raises(StateError):
        QuantumState(space, np.diag([1.2, -0.2]))
    with pytest.raises(SpaceError):
        QuantumState(space, [1, 0, 0])
    partial = QuantumState(space, np.diag([0.25, 0.25]), trace=0.5)
    assert partial.trace == 0.5
    assert np.isclose(np.trace(partial.normalized().amplitudes).real, 1.0)
    assert not QuantumState(space, [1, 0]).amplitudes.flags.writeable


def test_product_and_basis_states():
    print("[NK][07] Product and basis states")
    space = SpaceLabel.qubits([0, 1, 2])
    assert np.argmax(abs(basis_state(space, {1: 1}).amplitudes)) == 0b010
    plus = product_state(space, {}, KET_PLUS)
    assert np.allclose(plus.amplitudes, np.full(8, 1 / np.sqrt(8)))
    assert np.allclose(product_state(space, {2: [0, 3]}).amplitudes, basis_state(space, {2: 1}).amplitudes)


def test_apply_and_expectation():
    print("[NK][08] Local operators, channels and expectations")
    space = SpaceLabel.qubits([0, 1])
    psi = product_state(space, {})
    flipped = apply_local(SIGMA_X, 1, psi)
    assert np.isclose(expectation(embed(SIGMA_Z, 1, space), flipped).real, -1)
    rho = apply_local(HADAMARD, 0, psi.to_density())
    assert np.isclose(expectation(embed(SIGMA_X, 0, space), rho).real, 1)
    bell = apply_operator(np.diag([1, 1, 1, -1]), [0, 1], product_state(space, {}, KET_PLUS))
    assert np.isclose(expectation(embed_product({0: SIGMA_X, 1: SIGMA_Z}, space), bell).real, 1)
    dephase = [np.sqrt(0.5) * np.eye(2), np.sqrt(0.5) * SIGMA_Z]
    mixed = apply_kraus(dephase, [0], product_state(space, {0: KET_PLUS}))
    assert np.isclose(expectation(embed(SIGMA_X, 0, space), mixed).real, 0)
    assert np.isclose(mixed.trace, 1.0)


def test_partial_trace_and_reorder():
    print("[NK][09] Partial trace and reordering")
    rng = np.random.default_rng(SEED)
    space = SpaceLabel.qubits(SITES)
    psi = random_state(rng, space)
    pure_red = partial_trace(psi, [1, 3])
    mixed_red = partial_trace(psi.to_density(), [1, 3])
    assert pure_red.space.ids == [1, 3]
    assert np.allclose(pure_red.amplitudes, mixed_red.amplitudes)
    assert np.isclose(pure_red.trace, 1.0)
    order = [2, 0, 3, 1]
    moved = reorder(psi, order)
    assert moved.space.ids == order
    assert np.allclose(reorder(partial_trace(moved, [1, 3]), [1, 3]).amplitudes, pure_red.amplitudes)
    assert np.allclose(reorder(moved, SITES).amplitudes, psi.amplitudes)
    with pytest.raises(SpaceError):
        reorder(psi, [0, 1])


def test_reset_site():
    print("[NK][10] Reset")
    space = SpaceLabel.qubits([0, 1])
    psi = product_state(space, {0: KET_1, 1: KET_PLUS})
    out = reset_site(psi, 0, KET_0)
    assert out.is_pure
    assert np.allclose(out.amplitudes, product_state(space, {1: KET_PLUS}).amplitudes)
    entangled = apply_operator(np.diag([1, 1, 1, -1]), [0, 1], product_state(space, {}, KET_PLUS))
    reset = reset_site(entangled, 0, KET_0)
    assert not reset.is_pure
    assert np.isclose(reset.trace, 1.0)


def test_fidelity_and_distance():
    print("[NK][11] Fidelity and trace distance")
    rng = np.random.default_rng(SEED)
    space = SpaceLabel.qubits([0, 1])
    a, b = random_state(rng, space), random_state(rng, space)
    f = fidelity(a, b)
    assert np.isclose(fidelity(a.to_density(), b), f)
    assert np.isclose(fidelity(a, b.to_density()), f)
    noisy = QuantumState(space, 0.8 * a.density() + 0.05 * np.eye(4))
    assert np.isclose(fidelity(noisy, noisy), 1.0, atol=1e-8)
    assert np.isclose(fidelity(noisy, b), 0.8 * f + 0.05)
    assert np.isclose(trace_distance(a, b), np.sqrt(1 - f))
    assert np.isclose(fidelity(a, a), 1.0)
    with pytest.raises(SpaceError):
        fidelity(a, product_state(SpaceLabel.qubits([0]), {}))
