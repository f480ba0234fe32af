import numpy as np
import pytest

from strukt import (
    StructureKind,
    compare_spectra,
    frob_norm,
    minimal_indices,
    pencil_eigs,
    random_structured,
    reference_polyeigs,
    symmetry_check,
)
from strukt import polycore, spectra
from strukt.errors import SingularPolynomialError, SpectrumMismatchError
from strukt.linearize import build_linearization

from conftest import ALL_KINDS


def test_pencil_eigs_diagonal():
    spec = pencil_eigs(-np.diag([1.0, 2.0]), np.eye(2))
    vals = sorted(spec.finite_values().real)
    assert vals == pytest.approx([1.0, 2.0])
    assert spec.n_infinite == 0


def test_pencil_eigs_infinite():
    # l * diag(1, 0) - I has one eigenvalue at 1 and one at infinity
    spec = pencil_eigs(-np.eye(2), np.diag([1.0, 0.0]))
    assert spec.n_infinite == 1
    assert spec.finite_values().real == pytest.approx([1.0])


def test_reference_polyeigs_cube_roots():
    p = polycore.from_coeff_list([np.eye(1), np.zeros((1, 1)), np.zeros((1, 1)), np.eye(1)])
    spec = reference_polyeigs(p)
    got = np.sort_complex(spec.finite_values())
    want = np.sort_complex(np.array([-1.0, 0.5 + 0.8660254037844386j, 0.5 - 0.8660254037844386j]))
    assert np.allclose(got, want, atol=1e-10)


def test_reference_polyeigs_zero_eigenvalues():
    p = polycore.from_coeff_list([np.zeros((2, 2)), np.eye(2)])
    spec = reference_polyeigs(p)
    assert np.allclose(spec.finite_values(), 0.0)


def test_reference_polyeigs_rejects_singular():
    p = polycore.from_coeff_list([np.zeros((2, 2)), np.diag([1.0, 0.0])])
    with pytest.raises(SingularPolynomialError):
        reference_polyeigs(p)


def test_palindromic_spectrum_reciprocal_closure():
    kind = StructureKind.palindromic
    p = random_structured(3, 5, kind, 1.0, seed=14)
    spec = reference_polyeigs(p)
    assert symmetry_check(spec, kind) <= 1e-8


@pytest.mark.parametrize(
    "kind", [k for k in ALL_KINDS if k is not StructureKind.skew_symmetric]
)
def test_transport_pencil_vs_reference(kind):
    p = random_structured(3, 5, kind, 1.0, seed=15)
    pencil = build_linearization(p, kind, "stacked")
    got = pencil_eigs(pencil.l0, pencil.l1)
    want = reference_polyeigs(p)
    assert compare_spectra(got, want).max_distance <= 1e-6
    assert symmetry_check(got, kind) <= 1e-8


def _spectrum_of(values, infinite=0):
    alpha = list(map(complex, values)) + [1.0] * infinite
    beta = [1.0] * len(values) + [0.0] * infinite
    return spectra._normalize_pairs(np.array(alpha), np.array(beta))


def test_symmetry_check_examples():
    assert symmetry_check(_spectrum_of([2.0, 0.5]), StructureKind.palindromic) <= 1e-15
    assert symmetry_check(_spectrum_of([3.0, -3.0, 1j, -1j]), StructureKind.even) <= 1e-15
    assert symmetry_check(_spectrum_of([2.0, 3.0]), StructureKind.palindromic) > 0.1


def test_symmetry_check_zero_pairs_with_infinity():
    spec = _spectrum_of([0.0], infinite=1)
    assert symmetry_check(spec, StructureKind.palindromic) <= 1e-15


def test_compare_spectra_identical_and_permuted():
    a = _spectrum_of([1.0, 2.0, 3.0])
    b = _spectrum_of([3.0, 1.0, 2.0])
    assert compare_spectra(a, b).max_distance <= 1e-15


def test_compare_spectra_infinity_vs_huge():
    a = _spectrum_of([], infinite=1)
    b = _spectrum_of([1e16])
    match = compare_spectra(a, b)
    assert match.max_distance == pytest.approx(1e-16, rel=1e-6)


def test_compare_spectra_cardinality_mismatch():
    with pytest.raises(SpectrumMismatchError):
        compare_spectra(_spectrum_of([1.0]), _spectrum_of([1.0, 2.0]))


# ---------------------------------------------------------------------------
# minimal indices
# ---------------------------------------------------------------------------

def test_minimal_indices_zero_polynomial():
    p = polycore.zeros(1, 1, 1)
    rep = minimal_indices(p)
    assert rep.right == (0,) and rep.left == (0,)
    assert rep.complete


def test_minimal_indices_block_diagonal_singular():
    coeffs = np.zeros((4, 2, 2))
    coeffs[0, 1, 1] = 3.0
    coeffs[1, 1, 1] = 1.0
    coeffs[3, 1, 1] = 2.0
    p = polycore.MatrixPolynomial(coeffs)
    rep = minimal_indices(p)
    assert rep.right == (0,) and rep.left == (0,)


@pytest.mark.parametrize("g", [3, 5])
def test_minimal_index_shift_of_linearization(g):
    k = (g - 1) // 2
    coeffs = np.zeros((g + 1, 2, 2))
    coeffs[0, 1, 1] = 3.0
    coeffs[1, 1, 1] = 1.0
    coeffs[g, 1, 1] = 2.0
    p = polycore.MatrixPolynomial(coeffs)
    pencil = build_linearization(p, StructureKind.symmetric, "tridiagonal")
    rep = minimal_indices(pencil.as_polynomial())
    assert rep.right == (k,) and rep.left == (k,)


def test_minimal_indices_left_right_equal_for_structured():
    p = random_structured(3, 5, StructureKind.skew_symmetric, 1.0, seed=16)
    rep = minimal_indices(p)
    assert rep.right == rep.left
    assert rep.complete


def test_minimal_indices_partial_flag():
    p = random_structured(3, 5, StructureKind.skew_symmetric, 1.0, seed=16)
    rep = minimal_indices(p, max_degree=1)
    assert not rep.complete


def test_normal_rank():
    p = polycore.from_coeff_list([np.diag([1.0, 0.0]), np.zeros((2, 2))])
    assert spectra.normal_rank(p) == 1
    assert spectra.normal_rank(polycore.zeros(2, 2, 1)) == 0
