import numpy as np
import pytest

from hybridrelay.channel import RegionProbabilities
from hybridrelay.oracle import (
    CASE_ALPHA0,
    CERT_TOL,
    build_allocation_lp,
    case_boundary_vectors,
    certify,
    inject_typo,
    oracle_vs_analytic,
    policy_from_solution,
    random_probabilities,
    selection_functions,
    solve_lp,
)
from hybridrelay.policy import (
    Policy,
    StatCase,
    classify_case,
    hd_optimal_throughput,
    link_rates,
    optimal_policy,
)
from hybridrelay.simplex import simplex_max

PSI2 = RegionProbabilities([0.3, 0.1, 0.05, 0.15, 0.1, 0.3])
PSI3 = RegionProbabilities([0.2, 0.2, 0.15, 0.1, 0.05, 0.3])


@pytest.fixture(scope="module")
def vectors():
    rng = np.random.default_rng(2024)
    return random_probabilities(rng, 1000) + case_boundary_vectors(rng)


def test_lp_shape():
    c, A, b = build_allocation_lp(PSI2)
    assert c.shape == (24,) and A.shape == (7, 24) and b.shape == (7,)


@pytest.mark.parametrize("p, expected", [
    (PSI2.p, 0.45),
    ([0, 0, 0, 0, 0, 1], 0.0),
    ([0.5, 0, 0, 0, 0, 0.5], 0.5),
])
def test_solve_lp_examples(p, expected):
    value, x = solve_lp(RegionProbabilities(p))
    assert value == pytest.approx(expected, abs=1e-12)
    np.testing.assert_allclose(x.sum(axis=1), 1.0, atol=1e-12)


def test_all_fd_in_r1():
    _, x = solve_lp(RegionProbabilities([0.5, 0, 0, 0, 0, 0.5]))
    assert x[0, 2] == pytest.approx(1.0)


def test_inert_modes_reported_as_silent():
    _, x = solve_lp(RegionProbabilities([0, 0, 0, 0, 0, 1]))
    np.testing.assert_array_equal(x[5], [0, 0, 0, 1])


def test_lp_dominates_and_matches_closed_form(vectors):
    worst = max(oracle_vs_analytic(rp).gap for rp in vectors)
    assert worst < CERT_TOL
    for rp in vectors[:200]:
        cmp = oracle_vs_analytic(rp)
        assert cmp.lp_value >= cmp.closed_form - 1e-12
        assert cmp.ok()


def test_vertex_support(vectors):
    for rp in vectors[:300]:
        c, A, b = build_allocation_lp(rp)
        res = simplex_max(c, A, b)
        assert np.count_nonzero(res.x) <= 7


def test_hd_lp_matches_hd_closed_form(vectors):
    forbidden = np.zeros((6, 4), dtype=bool)
    forbidden[:, 2] = True
    for rp in vectors[:1000]:
        value, _ = solve_lp(rp, forbidden=forbidden)
        assert value == pytest.approx(hd_optimal_throughput(rp), abs=1e-9)


@pytest.mark.parametrize("r0", [0.5, 2.0, 7.25])
def test_r0_scaling(r0, vectors):
    for rp in vectors[:50]:
        assert solve_lp(rp, r0=r0)[0] == pytest.approx(r0 * solve_lp(rp)[0], abs=1e-9)


def test_lp_solution_is_a_balanced_policy(vectors):
    for rp in vectors[:200]:
        value, x = solve_lp(rp)
        pol = policy_from_solution(x)
        arrival, departure = link_rates(pol, rp)
        assert departure == pytest.approx(value, abs=1e-9)
        assert arrival == pytest.approx(departure, abs=1e-9)


def test_selection_functions():
    v = selection_functions(0.5, 2.0).v
    np.testing.assert_allclose(v[0], [1, 1, 2, 0])
    np.testing.assert_allclose(v[1], [1, 1, 0, 0])
    np.testing.assert_allclose(v[5], 0)


def test_certify_psi3_examples():
    pol = optimal_policy(PSI3)
    assert certify(pol, PSI3, 0.5).certified
    bad = certify(pol, PSI3, 0.9)
    assert not bad.certified
    assert any(k == 2 and j == 2 for k, j, _ in bad.violations)


def test_certify_silent_row():
    pol = Policy.deterministic([3, 1, 2, 1, 1, 4])
    for alpha0 in (0.0, 0.5, 1.0, 2.0):
        cert = certify(pol, PSI3, alpha0)
        assert all(k != 6 for k, _, _ in cert.violations)


def test_certify_skips_impossible_regions():
    rp = RegionProbabilities([0.5, 0, 0, 0, 0, 0.5])
    pol = Policy.deterministic([3, 1, 1, 1, 1, 4])
    assert certify(pol, rp, 0.0).certified


def test_case_alpha0_certifies_every_case(vectors):
    seen = set()
    for rp in vectors:
        case = classify_case(rp)
        seen.add(case)
        cert = certify(optimal_policy(rp), rp, CASE_ALPHA0[case])
        assert cert.certified, (case, rp.p, cert.violations)
    assert seen == set(StatCase)


def test_alpha0_two_rejects_psi5_mixing():
    rp = RegionProbabilities([0.1, 0.05, 0.5, 0.05, 0.05, 0.25])
    pol = optimal_policy(rp)
    cert = certify(pol, rp, 2.0)
    assert not cert.certified
    assert cert.violations[0][:2] == (3, 2)


@pytest.mark.parametrize("which", ["r2-m3", "r3-m1"])
def test_typo_injection_is_detected(which):
    rp = PSI3
    pol = inject_typo(optimal_policy(rp), which)
    arrival, departure = link_rates(pol, rp)
    broken_balance = abs(arrival - departure) > CERT_TOL
    broken_cert = not certify(pol, rp, CASE_ALPHA0[classify_case(rp)]).certified
    assert broken_balance or broken_cert


def test_inject_typo_rejects_unknown():
    with pytest.raises(ValueError):
        inject_typo(optimal_policy(PSI3), "r9-m9")


def test_boundary_vectors_sit_on_boundaries():
    rng = np.random.default_rng(0)
    vecs = case_boundary_vectors(rng, per_boundary=5)
    assert len(vecs) == 20
    for i, rp in enumerate(vecs):
        p1, p2, p3, s = rp[1], rp[2], rp[3], rp.fd_strip
        target = (s - p1 - p2, s - p2, s + p2, s + p2 + p1)[i // 5]
        assert p3 == pytest.approx(target, abs=1e-15)
