import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlocal.errors import DescriptorError, PhysicalityError
from nlocal.qstate import (
    BELL_VECTORS,
    BellDiagonal,
    BellState,
    BlochDecomposition,
    Explicit,
    HorodeckiMix,
    PureSchmidt,
    RANDOM_KINDS,
    RankTwoBellDiagonal,
    SingularTriple,
    TwoQubitState,
    Werner,
    XState,
    bloch_decompose,
    make_state,
    random_local_unitary,
    random_state,
    singular_triple,
    state_from_descriptor,
)


def test_werner_zero_is_maximally_mixed():
    np.testing.assert_allclose(make_state(Werner(0)).matrix, np.eye(4) / 4)


def test_singlet_projector():
    psi = np.array([0, 1, -1, 0]) / np.sqrt(2)
    np.testing.assert_allclose(make_state(BellState(3)).matrix, np.outer(psi, psi), atol=1e-15)


def test_half_quarter_spectrum(half_quarter):
    # direct diagonalization; the anti-diagonal blocks give 1/4 +- 1/16 and 1/4 +- 3/16
    np.testing.assert_allclose(np.sort(half_quarter.eigenvalues()), [1 / 16, 3 / 16, 5 / 16, 7 / 16], atol=1e-15)


def test_rank2_layout():
    m = make_state(RankTwoBellDiagonal(0.9, 0.2789)).matrix
    expected = np.zeros((4, 4))
    expected[1, 1], expected[2, 2], expected[1, 2], expected[2, 1] = 0.7211 / 2, 1.2789 / 2, 0.45, 0.45
    np.testing.assert_allclose(m, expected, atol=1e-15)


def test_xstate_layout():
    m = make_state(XState(0.4, 0.2, 0.3, 0.1, 0.15, -0.2)).matrix
    assert m[0, 3] == m[3, 0] == 0.15
    assert m[1, 2] == m[2, 1] == -0.2
    np.testing.assert_allclose(np.diag(m).real, [0.4, 0.2, 0.3, 0.1])


@pytest.mark.parametrize(
    "family, fragment",
    [
        (Werner(1.2), "visibility"),
        (Werner(-0.1), "visibility"),
        (HorodeckiMix(1.5), "mixing"),
        (PureSchmidt(-0.2), "concurrence"),
        (RankTwoBellDiagonal(0.0, 0.0), "concurrence"),
        (RankTwoBellDiagonal(0.8, 0.7), "S^2 + C^2 > 1"),
        (XState(0.5, 0.2, 0.3, 0.0, 0.0, 0.3), "y2^2 > x2*x3"),
        (XState(0.5, 0.2, 0.2, 0.1, 0.3, 0.0), "y1^2 > x1*x4"),
        (XState(0.5, 0.2, 0.2, 0.2), "expected 1"),
        (XState(-0.1, 0.5, 0.3, 0.3), "x1 < 0"),
        (BellDiagonal((0.5, 0.5, 0.1, -0.1)), "nonnegative"),
        (BellDiagonal((0.5, 0.5, 0.1, 0.1)), "sum to 1"),
        (BellState(4), "Bell index"),
    ],
)
def test_invalid_parameters_rejected(family, fragment):
    with pytest.raises(PhysicalityError, match=fragment.replace("*", r"\*").replace("^", r"\^").replace("+", r"\+")):
        make_state(family)


@pytest.mark.parametrize(
    "matrix, fragment",
    [
        (np.eye(3) / 3, "4x4"),
        (np.eye(4) / 2, "trace"),
        (np.diag([1.1, -0.1, 0, 0]), "positive semidefinite"),
        (np.eye(4) / 4 + np.triu(np.ones((4, 4)), 1) * 0.01, "Hermitian"),
    ],
)
def test_invalid_matrices_rejected(matrix, fragment):
    with pytest.raises(PhysicalityError, match=fragment):
        TwoQubitState(matrix)


def test_state_is_read_only():
    s = make_state(Werner(0.5))
    with pytest.raises(ValueError):
        s.matrix[0, 0] = 1


def test_bloch_of_maximally_mixed():
    b = bloch_decompose(TwoQubitState(np.eye(4) / 4))
    assert not b.u.any() and not b.v.any() and not b.R.any()


def test_bloch_of_phi_plus():
    b = bloch_decompose(make_state(BellState(0)))
    np.testing.assert_allclose(b.u, 0, atol=1e-15)
    np.testing.assert_allclose(b.v, 0, atol=1e-15)
    # oracle: nine expectation values of |phi+> written out by hand
    psi = BELL_VECTORS[0]
    paulis = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]
    R = np.array([[np.real(psi.conj() @ np.kron(a, b) @ psi) for b in paulis] for a in paulis])
    np.testing.assert_allclose(R, np.diag([1, -1, 1]), atol=1e-15)
    np.testing.assert_allclose(b.R, R, atol=1e-15)


@pytest.mark.parametrize("v", [0.0, 0.25, 0.6, 1.0])
def test_bloch_of_werner(v):
    b = bloch_decompose(make_state(Werner(v)))
    np.testing.assert_allclose(b.R, -v * np.eye(3), atol=1e-15)
    np.testing.assert_allclose(b.u, 0, atol=1e-15)


def test_singular_triple_half_quarter(half_quarter):
    np.testing.assert_allclose(singular_triple(half_quarter).as_tuple(), (0.5, 0.25, 0.0), atol=1e-15)


def test_singular_triple_werner_quarter():
    np.testing.assert_allclose(singular_triple(make_state(Werner(0.25))).as_tuple(), (0.25,) * 3, atol=1e-15)


@pytest.mark.parametrize("C", [0.0, 0.3, 0.77, 1.0])
def test_singular_triple_pure_schmidt(C):
    np.testing.assert_allclose(singular_triple(make_state(PureSchmidt(C))).as_tuple(), (1, C, C), atol=1e-12)


@pytest.mark.parametrize("p", [0.1, 0.5, 0.8])
def test_horodecki_tensor(p):
    R = bloch_decompose(make_state(HorodeckiMix(p))).R
    np.testing.assert_allclose(R, np.diag([p, p, 1 - 2 * p]), atol=1e-15)


def test_rank2_tensor_and_local_vectors():
    b = bloch_decompose(make_state(RankTwoBellDiagonal(0.6, 0.5)))
    np.testing.assert_allclose(b.R, np.diag([0.6, 0.6, -1]), atol=1e-15)
    np.testing.assert_allclose(b.u, [0, 0, -0.5], atol=1e-15)
    np.testing.assert_allclose(b.v, [0, 0, 0.5], atol=1e-15)


def test_singular_triple_ordering_enforced():
    with pytest.raises(ValueError):
        SingularTriple(0.2, 0.5, 0.1)


@pytest.mark.parametrize("kind", RANDOM_KINDS)
def test_random_state_deterministic(kind):
    a = random_state(kind, np.random.default_rng(11))
    b = random_state(kind, np.random.default_rng(11))
    np.testing.assert_array_equal(a.matrix, b.matrix)


def test_random_kind_unknown():
    with pytest.raises(ValueError, match="unknown random state kind"):
        random_state("gaussian", np.random.default_rng(0))


def test_ginibre_invariant_sweep():
    rng = np.random.default_rng(5)
    for _ in range(10_000):
        s = random_state("mixed-ginibre", rng)
        b = bloch_decompose(s)
        assert np.linalg.norm(b.u) <= 1 + 1e-9 and np.linalg.norm(b.v) <= 1 + 1e-9


@pytest.mark.parametrize("kind", RANDOM_KINDS)
def test_bloch_round_trip(kind, rng):
    for _ in range(50):
        s = random_state(kind, rng)
        np.testing.assert_allclose(bloch_decompose(s).to_matrix(), s.matrix, atol=1e-10)


def test_singular_triple_local_unitary_invariance(rng):
    for kind in RANDOM_KINDS:
        for _ in range(20):
            s = random_state(kind, rng)
            t = s.transformed(random_local_unitary(rng))
            np.testing.assert_allclose(singular_triple(t).as_tuple(), singular_triple(s).as_tuple(), atol=1e-9)


@given(st.floats(0, 1), st.floats(-1, 1))
@settings(max_examples=200)
def test_rank2_family_always_valid_or_rejected(C, s):
    fam = RankTwoBellDiagonal(C, s)
    if C > 0 and s * s + C * C <= 1:
        assert np.linalg.eigvalsh(make_state(fam).matrix).min() >= -1e-10
    else:
        with pytest.raises(PhysicalityError):
            make_state(fam)


@given(st.lists(st.floats(0, 1), min_size=4, max_size=4), st.floats(-1, 1), st.floats(-1, 1))
@settings(max_examples=200)
def test_xstate_constraints_match_positivity(w, t1, t2):
    total = sum(w)
    if total < 1e-3:
        return
    x = [wi / total for wi in w]
    fam = XState(*x, y1=t1 * np.sqrt(x[0] * x[3]), y2=t2 * np.sqrt(x[1] * x[2]))
    assert np.linalg.eigvalsh(make_state(fam).matrix).min() >= -1e-10


def test_descriptor_round_trip(rng):
    s = random_state("mixed-ginibre", rng)
    t = state_from_descriptor(s.to_descriptor())
    np.testing.assert_array_equal(s.matrix, t.matrix)


@pytest.mark.parametrize(
    "desc, field",
    [
        ({"v": 0.5}, "state"),
        ({"family": "nope"}, "state.family"),
        ({"family": "werner"}, "state.v"),
        ({"family": "werner", "v": "high"}, "state.v"),
        ({"family": "werner", "v": 0.5, "w": 1}, "state"),
        ({"family": "bell", "index": "psi"}, "state.index"),
        ({"family": "explicit", "re": [[1, 0], [0, 0]]}, "state.re"),
    ],
)
def test_descriptor_errors_name_field(desc, field):
    with pytest.raises(DescriptorError) as exc:
        state_from_descriptor(desc)
    assert exc.value.field == field


def test_descriptor_names_and_indices_agree():
    a = state_from_descriptor({"family": "bell", "index": "psi-"})
    b = state_from_descriptor({"family": "bell", "index": 3})
    np.testing.assert_array_equal(a.matrix, b.matrix)


def test_explicit_family_defaults_imaginary_to_zero():
    s = make_state(Explicit(np.eye(4) / 4))
    np.testing.assert_array_equal(s.matrix, np.eye(4) / 4)


def test_bloch_decomposition_rebuild_identity():
    b = BlochDecomposition(np.zeros(3), np.zeros(3), np.zeros((3, 3)))
    np.testing.assert_array_equal(b.to_matrix(), np.eye(4) / 4)
