import numpy as np
import pytest

import liemorph as lm
from liemorph.errors import DomainError
from liemorph.groups import sample_points
from liemorph.jets import (Constant, Frame, Jet2, Polynomial, derivs,
                           fd_check, holomorphic_post, identity_polynomial,
                           kappa, kappa_matrix, laplacian, laplacian_values,
                           linear_combination, log_diag, matrix_entry,
                           random_polynomial, verify_family)


def rel_err(a, b):
    return abs(a - b) / max(1.0, abs(a), abs(b))


# ---------------------------------------------------------------------------
# Jet2 arithmetic
# ---------------------------------------------------------------------------

def poly_jet(coeffs):
    """Jet at s=0 of the polynomial sum coeffs[k] s^k."""
    c = list(coeffs) + [0.0, 0.0, 0.0]
    return Jet2(c[0], c[1], 2.0 * c[2])


def test_jet_product_rule(rng):
    for _ in range(20):
        a = rng.standard_normal(3)
        b = rng.standard_normal(3)
        prod = np.polynomial.polynomial.polymul(a, b)
        got = poly_jet(a) * poly_jet(b)
        want = poly_jet(prod)
        assert abs(got.v - want.v) < 1e-12
        assert abs(got.d1 - want.d1) < 1e-12
        assert abs(got.d2 - want.d2) < 1e-12


def test_jet_quotient_and_log_against_fd(rng):
    h = 1e-5
    for _ in range(10):
        a = rng.uniform(0.5, 2.0, 3)
        b = rng.uniform(0.5, 2.0, 3)
        f = lambda s: np.polyval(a[::-1], s) / np.polyval(b[::-1], s)
        got = poly_jet(a) / poly_jet(b)
        assert rel_err(got.d1, (f(h) - f(-h)) / (2 * h)) < 1e-8
        assert rel_err(got.d2, (f(h) - 2 * f(0) + f(-h)) / h ** 2) < 1e-4
        g = lambda s: np.log(np.polyval(a[::-1], s))
        got = poly_jet(a).log()
        assert rel_err(got.d1, (g(h) - g(-h)) / (2 * h)) < 1e-8
        assert rel_err(got.d2, (g(h) - 2 * g(0) + g(-h)) / h ** 2) < 1e-4


def test_jet_log_domain():
    with pytest.raises(DomainError):
        Jet2(-1.0, 0.0, 0.0).log()


def test_jet_integer_powers():
    j = poly_jet([2.0, 3.0, 0.5])
    want = j * j * j
    got = j ** 3
    assert abs(got.v - want.v) < 1e-12 and abs(got.d2 - want.d2) < 1e-10


# ---------------------------------------------------------------------------
# derivs and its oracles
# ---------------------------------------------------------------------------

def test_derivs_n3_basic(built):
    alg, real = built["N3"]
    e = np.eye(3)
    d = derivs(matrix_entry(0, 1), e, np.array([1.0, 0, 0]), real)
    assert d == (1.0, 0.0)
    d = derivs(matrix_entry(0, 2), e, np.array([1.0, 0, 0]), real)
    assert d == (0.0, 0.0)
    d = derivs(matrix_entry(0, 2), e, np.zeros(3), real)
    assert d == (0.0, 0.0)


def quadratic_interp_oracle(field, point, mat):
    """Exact 3-point interpolation of phi along the truncated quadratic curve.

    For matrix-entry fields the curve entry is a quadratic polynomial in s, so
    sampling at s = -1, 0, 1 recovers the derivatives without truncation error.
    """
    def at(s):
        return field.value(point + s * (point @ mat) + 0.5 * s * s * (point @ mat @ mat))
    return (at(1.0) - at(-1.0)) / 2.0, at(1.0) - 2.0 * at(0.0) + at(-1.0)


def test_derivs_match_symbolic_quadratic(built, rng):
    # entry fields and real linear combinations are quadratic along the curve
    for name in ("N4", "S3"):
        alg, real = built[name]
        pts = sample_points(real, 5, seed=21, scale=1.0)
        n = real.ambient
        fields = [matrix_entry(i, j) for i in range(n) for j in range(n)]
        fields.append(linear_combination([0.7, -1.3], [fields[1], fields[n]]))
        for p in pts:
            for f in fields[:: max(1, len(fields) // 7)]:
                x = rng.uniform(-1, 1, alg.dim)
                mat = real.matrix_of(x)
                got = derivs(f, p, x, real)
                want = quadratic_interp_oracle(f, p, mat)
                assert abs(got[0] - want[0]) < 1e-12
                assert abs(got[1] - want[1]) < 1e-12


def test_fd_check_matches_derivs_entry_fields(built, rng):
    alg, real = built["N4"]
    for p in sample_points(real, 20, seed=5, scale=1.0):
        x = rng.uniform(-1, 1, alg.dim)
        jet = derivs(matrix_entry(0, 2), p, x, real)
        fd = fd_check(matrix_entry(0, 2), p, x, real)
        assert rel_err(jet[0], fd[0]) < 1e-6
        assert rel_err(jet[1], fd[1]) < 1e-6


def test_fd_check_matches_derivs_log_diag(built, rng):
    alg, real = built["S3"]
    for p in sample_points(real, 10, seed=6, scale=0.8):
        x = rng.uniform(-1, 1, alg.dim)
        for i in range(3):
            jet = derivs(log_diag(i), p, x, real)
            fd = fd_check(log_diag(i), p, x, real)
            assert rel_err(jet[0], fd[0]) < 1e-6
            assert rel_err(jet[1], fd[1]) < 1e-6


def test_fd_check_constant_field(built):
    alg, real = built["N3"]
    fd = fd_check(Constant(4.2), np.eye(3), np.ones(3), real)
    assert fd == (0.0, 0.0)
    with pytest.raises(ValueError):
        fd_check(Constant(1.0), np.eye(3), np.ones(3), real, h=0.0)


def test_log_diag_domain_error(built):
    alg, real = built["S2"]
    p = -np.eye(2)
    with pytest.raises(DomainError):
        derivs(log_diag(0), p, np.zeros(alg.dim), real)


# ---------------------------------------------------------------------------
# kappa / laplacian
# ---------------------------------------------------------------------------

def closed_form_kappa(p, i, j, k, l):
    """Independent oracle: delta_jl * sum_{max(i,k) <= r < l} x_ir x_kr."""
    if j != l:
        return 0.0
    return float(sum(p[i, r] * p[k, r] for r in range(max(i, k), l)))


@pytest.mark.parametrize("n", [3, 4, 5])
def test_kappa_closed_form_oracle(n):
    alg, real = lm.build_N(n)
    frame = Frame.build(alg, real)
    entries = [(i, j) for i in range(n) for j in range(i + 1, n)]
    fields = [matrix_entry(i, j) for i, j in entries]
    for p in sample_points(real, 20, seed=n, scale=1.0):
        km = kappa_matrix(fields, p, frame).real
        for a, (i, j) in enumerate(entries):
            for b, (k, l) in enumerate(entries):
                assert abs(km[a, b] - closed_form_kappa(p, i, j, k, l)) < 1e-9


def test_kappa_at_identity_n3(frames):
    frame = frames["N3"]
    assert abs(kappa(matrix_entry(0, 1), matrix_entry(0, 1), np.eye(3), frame) - 1.0) < 1e-14


def test_kappa_with_constant_vanishes(built, frames):
    alg, real = built["N4"]
    for p in sample_points(real, 5, seed=3, scale=1.0):
        assert kappa(matrix_entry(0, 1), Constant(3.0), p, frames["N4"]) == 0.0


def test_kappa_symmetry(built, frames, rng):
    alg, real = built["S3"]
    frame = frames["S3"]
    fields = [log_diag(0), matrix_entry(0, 2), log_diag(2)]
    for p in sample_points(real, 10, seed=12, scale=0.7):
        for f in fields:
            for g in fields:
                assert abs(kappa(f, g, p, frame) - kappa(g, f, p, frame)) < 1e-12


def random_orthogonal(dim, rng):
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def test_kappa_and_tau_basis_independence(built, rng):
    for name in ("N4", "S3"):
        alg, real = built[name]
        frame1 = Frame.build(alg, real)
        frame2 = Frame.build(alg, real, onb=random_orthogonal(alg.dim, rng) @ frame1.onb)
        fields = [matrix_entry(0, real.ambient - 1), matrix_entry(0, 1)]
        if name == "S3":
            fields.append(log_diag(1))
        for p in sample_points(real, 5, seed=77, scale=0.9):
            k1 = kappa_matrix(fields, p, frame1)
            k2 = kappa_matrix(fields, p, frame2)
            assert np.abs(k1 - k2).max() < 1e-10
            t1 = laplacian_values(fields, p, frame1)
            t2 = laplacian_values(fields, p, frame2)
            assert np.abs(t1 - t2).max() < 1e-10


@pytest.mark.parametrize("n", [3, 4])
def test_tau_vanishes_on_unipotent_entries(n):
    alg, real = lm.build_N(n)
    frame = Frame.build(alg, real)
    fields = [matrix_entry(i, j) for i in range(n) for j in range(i + 1, n)]
    for p in sample_points(real, 100, seed=42, scale=1.0):
        assert np.abs(laplacian_values(fields, p, frame)).max() < 1e-9


@pytest.mark.parametrize("n", [2, 3, 4])
def test_tau_of_log_diagonals_matches_trace_ad(n):
    # tau(t_k) = -(trace ad_{D_k}) = 2k - (n+1): the diagonal logs are *not*
    # harmonic on their own; only xi-orthogonal combinations are.  Both the
    # jet route and the finite-difference oracle agree on the value.
    alg, real = lm.build_S(n)
    frame = Frame.build(alg, real)
    pts = sample_points(real, 20, seed=8, scale=0.8)
    for k in range(n):
        expected = float(2 * (k + 1) - (n + 1))
        for p in pts:
            assert abs(laplacian(log_diag(k), p, frame) - expected) < 1e-9
        p = pts[0]
        fd_total = sum(fd_check(log_diag(k), p, row, real)[1] for row in frame.onb)
        fd_drift = fd_check(log_diag(k), p, frame.tension, real)[0]
        assert rel_err(fd_total - fd_drift, expected) < 1e-6


def test_tau_constant_field(built, frames):
    alg, real = built["N3"]
    assert laplacian(Constant(2.5), np.eye(3), frames["N3"]) == 0.0


# ---------------------------------------------------------------------------
# families and holomorphic composition
# ---------------------------------------------------------------------------

def n3_family(frame):
    return [lm.pairing([1.0, 1.0j], [matrix_entry(0, 1), matrix_entry(1, 2)])]


def test_verify_family_passes_for_n3(built, frames):
    alg, real = built["N3"]
    pts = sample_points(real, 100, seed=7, scale=1.0)
    rep = verify_family(n3_family(frames["N3"]), pts, frames["N3"], tol=1e-8)
    assert rep.passed and rep.worst < 1e-12


def test_verify_family_detects_conformality_failure(built, frames):
    alg, real = built["N3"]
    bad = [lm.pairing([1.0, 1.0j], [matrix_entry(0, 1), matrix_entry(0, 1)])]
    rep = verify_family(bad, [np.eye(3)], frames["N3"], tol=1e-8)
    assert not rep.passed
    assert abs(rep.kappa_max[0, 0] - 2.0) < 1e-12  # kappa(phi, phi) = 2i at e


def test_verify_family_empty_points_is_vacuous(built, frames):
    rep = verify_family(n3_family(frames["N3"]), [], frames["N3"], tol=1e-8)
    assert rep.passed
    assert rep.warnings


def test_holomorphic_identity_is_noop(built, frames):
    alg, real = built["N3"]
    fam = n3_family(frames["N3"])
    composed = holomorphic_post(identity_polynomial(0, 1), fam)
    for p in sample_points(real, 5, seed=2, scale=1.0):
        assert abs(composed.value(p) - fam[0].value(p)) < 1e-14


def test_holomorphic_constant_is_flat(built, frames):
    alg, real = built["N3"]
    composed = holomorphic_post(Polynomial.from_dict({(0,): 2.0 + 1.0j}),
                                n3_family(frames["N3"]))
    frame = frames["N3"]
    for p in sample_points(real, 3, seed=2, scale=1.0):
        assert abs(kappa(composed, composed, p, frame)) == 0.0
        assert abs(laplacian(composed, p, frame)) == 0.0


def test_product_post_composition_h2(built, frames):
    alg, real = built["H2"]
    fc = lm.first_construction(alg, real, "H")
    product = holomorphic_post(Polynomial.from_dict({(1, 1): 1.0}), fc.family)
    pts = sample_points(real, 100, seed=7, scale=1.0)
    rep = verify_family([product], pts, frames["H2"], tol=1e-8)
    assert rep.passed


def test_random_post_compositions_keep_family_property(built, frames, rng):
    # passing family + degree <= 3 polynomial coefficients in the unit disk
    # => composed family passes at 10x the base tolerance
    for name, kind in (("N4", "N"), ("H2", "H")):
        alg, real = built[name]
        fc = lm.first_construction(alg, real, kind)
        pts = sample_points(real, 50, seed=13, scale=1.0)
        base = verify_family(fc.family, pts, frames[name], tol=1e-8)
        assert base.passed
        n_fields = len(fc.family)
        for _ in range(5):
            polys = [random_polynomial(n_fields, rng) for _ in range(2)]
            fam = [holomorphic_post(q, fc.family) for q in polys]
            rep = verify_family(fam, pts, frames[name], tol=1e-7)
            assert rep.passed, name
