"""Sampling engine, residual reports, and the structure verifiers."""

from itertools import islice

import pytest

from pqnverify.catalog import RecipeInput, closed_toda, das_okubo, magri_veselov, prop_local_pair, r3_recipe
from pqnverify.expr import (
    ONE,
    ZERO,
    Chart,
    Coord,
    add,
    constant,
    div,
    evaluate,
    intpow,
    log,
    neg,
    parse,
    sqrt,
    to_string,
)
from pqnverify.fields import (
    Bivector,
    Endomorphism,
    KForm,
    VectorField,
    VolumeForm,
    basis_oneform,
    sharp,
    star,
)
from pqnverify.verify import (
    SUITES,
    CheckReport,
    Structure,
    check_identity,
    decompose_3d,
    deform_3d,
    points,
    random_endomorphism,
    random_oneform,
    random_polynomial,
    random_vectorfield,
    reconstruct_decomposition,
    run_pairs,
    run_suites,
    sample_plan,
    splitmix64,
    verify_3d_conditions,
    verify_haantjes_structure,
    verify_lm_chain,
    verify_minpoly,
    verify_pn,
    verify_poisson,
    verify_pqn,
    verify_recursion_involutivity,
    verify_theo_inv,
    xi_form,
)

CH = Chart(("x", "y", "z"))
X, Y, Z = Coord(0), Coord(1), Coord(2)
VOL = VolumeForm(CH, ONE)
CANONICAL = Bivector(CH, {(0, 1): ONE})
HALF = constant(2.0)

RECIPE = RecipeInput(lam=div(Z, HALF), a=div(X, HALF), g=Z)


@pytest.fixture(scope="module")
def plan():
    return sample_plan(CH)


def test_splitmix64_reference_stream():
    assert list(islice(splitmix64(0), 3)) == [
        16294208416658607535,
        7960286522194355700,
        487617019471545679,
    ]


def test_splitmix64_stays_in_64_bits():
    for value in islice(splitmix64(2**64 - 1), 16):
        assert 0 <= value < 2**64


def test_sample_plan_defaults(plan):
    pts = points(plan)
    assert len(pts) == 64
    assert all(len(p) == 3 for p in pts)
    assert all(-1.0 <= c <= 1.0 for p in pts for c in p)
    assert pts == points(sample_plan(CH))


def test_sample_plan_seed_changes_the_stream():
    assert points(sample_plan(CH, seed=7)) != points(sample_plan(CH, seed=8))


def test_sample_plan_per_coordinate_box():
    plan = sample_plan(CH, box=((0.0, 1.0), (2.0, 3.0), (-5.0, -4.0)))
    for p in points(plan):
        assert 0.0 <= p[0] <= 1.0
        assert 2.0 <= p[1] <= 3.0
        assert -5.0 <= p[2] <= -4.0


def test_sample_plan_validation():
    with pytest.raises(ValueError):
        sample_plan(CH, box=(1.0, -1.0))
    with pytest.raises(ValueError):
        sample_plan(CH, count=0)


def test_run_pairs_resamples_past_domain_failures(plan):
    rep = run_pairs("half_domain", [(sqrt(X), sqrt(X))], plan, 1e-8)
    assert rep.status == "pass"
    assert rep.samples_used == 64
    assert rep.detail == "resampled 55 points"


def test_run_pairs_skips_when_the_budget_runs_out():
    plan = sample_plan(CH, resample_limit=0)
    bad = log(neg(add(ONE, intpow(X, 2))))
    rep = run_pairs("nowhere_defined", [(bad, ZERO)], plan, 1e-8)
    assert rep.status == "skipped"
    assert rep.samples_used == 0
    assert rep.detail == "resample budget exhausted with 64 unusable points"


def test_run_pairs_worst_point_is_the_first_argmax(plan):
    rep = run_pairs("constant_gap", [(ZERO, ONE)], plan, 1e-8)
    assert rep.status == "fail"
    assert rep.max_scaled_residual == 1.0
    assert rep.worst_point == points(plan)[0]


def test_run_pairs_scales_by_the_larger_side(plan):
    gap = 3e-8
    rep = run_pairs(
        "relative", [(constant(3.0), constant(3.0 + gap))], plan, 1e-8
    )
    assert rep.status == "pass"
    assert rep.max_scaled_residual == pytest.approx(gap / (3.0 + gap), rel=1e-12)


def test_run_pairs_with_no_components_passes(plan):
    rep = run_pairs("empty", [], plan, 1e-8)
    assert (rep.status, rep.max_scaled_residual, rep.samples_used) == ("pass", 0.0, 0)
    assert rep.detail == "no components"


def test_status_tracks_the_tolerance(plan):
    for tol in (1e-12, 1e-2, 2.0):
        rep = run_pairs("gap", [(ZERO, constant(0.5))], plan, tol)
        assert (rep.status == "pass") == (rep.max_scaled_residual <= tol)


def test_check_identity_accepts_structured_values(plan):
    lhs = VectorField(CH, (X, Y, ZERO))
    rhs = VectorField(CH, (X, Y, ZERO))
    rep = check_identity("vector_eq", lhs, rhs, plan, 1e-8)
    assert rep.status == "pass"
    rep0 = check_identity("vector_zero", VectorField(CH, (ZERO, ZERO, ZERO)), None, plan, 1e-8)
    assert rep0.status == "pass" and rep0.max_scaled_residual == 0.0


def test_random_generators_are_deterministic():
    a = random_polynomial(CH, splitmix64(5))
    b = random_polynomial(CH, splitmix64(5))
    assert to_string(a, CH) == to_string(b, CH)
    va = random_vectorfield(CH, splitmix64(6))
    vb = random_vectorfield(CH, splitmix64(6))
    assert [to_string(c, CH) for c in va.components] == [
        to_string(c, CH) for c in vb.components
    ]
    fa = random_oneform(CH, splitmix64(7))
    fb = random_oneform(CH, splitmix64(7))
    assert {k: to_string(v, CH) for k, v in fa.components.items()} == {
        k: to_string(v, CH) for k, v in fb.components.items()
    }
    ea = random_endomorphism(CH, splitmix64(8))
    eb = random_endomorphism(CH, splitmix64(8))
    assert [[to_string(e, CH) for e in row] for row in ea.matrix] == [
        [to_string(e, CH) for e in row] for row in eb.matrix
    ]


def test_xi_form_is_the_volume_contraction(plan):
    xi = xi_form(CANONICAL, VOL)
    direct = star(CANONICAL, VOL)
    for i in range(3):
        assert evaluate(xi.component(i), points(plan)[0]) == evaluate(
            direct.component(i), points(plan)[0]
        )


class TestPoissonDiscrimination:
    def test_the_canonical_bivector_passes(self, plan):
        reports = verify_poisson(CANONICAL, plan, 1e-8, volume=VOL)
        assert {r.name for r in reports} == {
            "poisson.jacobi",
            "poisson.integrability",
            "poisson.sharp_annihilates_xi",
        }
        assert all(r.status == "pass" for r in reports)

    def test_the_twisted_bivector_fails_both_ways(self, plan):
        twisted = Bivector(CH, {(0, 1): ONE, (1, 2): neg(Y)})
        by_name = {r.name: r for r in verify_poisson(twisted, plan, 1e-8, volume=VOL)}
        assert by_name["poisson.jacobi"].status == "fail"
        assert by_name["poisson.jacobi"].max_scaled_residual > 0.1
        assert by_name["poisson.integrability"].status == "fail"
        assert by_name["poisson.integrability"].max_scaled_residual > 0.1


def test_verify_pn_on_the_lattice_pair():
    do = das_okubo(2)
    plan = sample_plan(do.chart)
    reports = verify_pn(do.pi, do.n, plan, 1e-8)
    assert [r.name for r in reports] == ["pn.C1", "pn.C2", "pn.torsion"]
    assert all(r.status == "pass" for r in reports)


def test_verify_pqn_on_the_periodic_lattice():
    td = closed_toda(2)
    plan = sample_plan(td.chart)
    reports = verify_pqn(td.pi, td.n, td.phi, plan, 1e-8)
    assert all(r.status == "pass" for r in reports)
    with pytest.raises(ValueError):
        verify_pqn(td.pi, td.n, KForm(td.chart, 2, {}), plan, 1e-8)


def test_decompose_3d_at_a_point():
    st = r3_recipe(RECIPE)
    xi = xi_form(st.pi, st.volume)
    lam, z = decompose_3d(st.n, xi, (1.0, 1.0, 2.0))
    assert lam == pytest.approx(1.0, abs=1e-12)
    assert z == pytest.approx((0.5, 0.0, 1.0), abs=1e-12)


def test_decompose_3d_needs_a_nonvanishing_oneform():
    st = r3_recipe(RECIPE)
    with pytest.raises(ValueError, match="vanishes"):
        decompose_3d(st.n, KForm(CH, 1, {}), (1.0, 1.0, 2.0))


def test_decompose_3d_rejects_a_generic_matrix():
    n = Endomorphism(CH, ((X, ZERO, ZERO), (ZERO, Y, ZERO), (ZERO, ZERO, Z)))
    with pytest.raises(ValueError, match="no rank-one split"):
        decompose_3d(n, basis_oneform(CH, 2), (0.3, 0.7, 0.2))


def test_reconstruct_decomposition_round_trips(plan):
    st = r3_recipe(RECIPE)
    xi = xi_form(st.pi, st.volume)
    got = reconstruct_decomposition(st.n, xi, plan)
    assert got is not None
    lam, z = got
    for p in points(plan)[:8]:
        assert evaluate(lam, p) == pytest.approx(evaluate(st.lam, p), abs=1e-10)
        for i in range(3):
            assert evaluate(z.components[i], p) == pytest.approx(
                evaluate(st.z.components[i], p), abs=1e-10
            )


def test_reconstruct_decomposition_gives_up_on_the_zero_form(plan):
    st = r3_recipe(RECIPE)
    assert reconstruct_decomposition(st.n, KForm(CH, 1, {}), plan) is None


def test_verify_3d_conditions_on_the_recipe(plan):
    st = r3_recipe(RECIPE)
    reports = verify_3d_conditions(
        st.pi, st.n, st.phi, st.volume, plan, 1e-8, lam=st.lam, z=st.z
    )
    assert all(r.status == "pass" for r in reports)


def test_verify_3d_conditions_survive_a_volume_rescale(plan):
    st = r3_recipe(RECIPE)
    vol = VolumeForm(CH, parse("1 + x^2/4", CH))
    reports = verify_3d_conditions(st.pi, st.n, st.phi, vol, plan, 1e-8)
    assert all(r.status == "pass" for r in reports)


def test_verify_3d_conditions_need_three_coordinates():
    do = das_okubo(2)
    plan = sample_plan(do.chart)
    with pytest.raises(ValueError):
        verify_3d_conditions(do.pi, do.n, None, VolumeForm(do.chart, ONE), plan, 1e-8)


def test_verify_haantjes_structure_passes_and_validates(plan):
    mv = magri_veselov()
    reports = verify_haantjes_structure(mv.n, mv.theta, plan, 1e-8)
    assert all(r.status == "pass" for r in reports)
    with pytest.raises(ValueError):
        verify_haantjes_structure(mv.n, KForm(CH, 2, {}), plan, 1e-8)


def test_verify_lm_chain_flags_only_the_final_torsion(plan):
    mv = magri_veselov()
    reports = verify_lm_chain(mv.chain, mv.theta, plan, 1e-8, n=mv.n)
    failing = {
        r.name
        for r in reports
        if r.status == "fail" and not r.name.startswith("chain.product_closed")
    }
    assert failing == {"chain.C4_torsion_annihilated[2]"}


def test_recursion_table_is_symmetric_with_exact_zero_diagonal():
    do = das_okubo(2)
    plan = sample_plan(do.chart)
    result = verify_recursion_involutivity(do.pi, do.n, 3, plan, 1e-8)
    assert result.kmax == 3
    assert all(r.status == "pass" for r in result.reports)
    for i in range(3):
        assert result.table[i][i] == 0.0
        for j in range(3):
            assert result.table[i][j] == result.table[j][i]
            assert result.table[i][j] is not None


def test_recursion_needs_at_least_two_invariants():
    do = das_okubo(2)
    plan = sample_plan(do.chart)
    with pytest.raises(ValueError):
        verify_recursion_involutivity(do.pi, do.n, 1, plan, 1e-8)


def test_verify_minpoly_on_the_recipe(plan):
    st = r3_recipe(RECIPE)
    xi = xi_form(st.pi, st.volume)
    reports = verify_minpoly(st.n, st.lam, st.z, xi, plan, 1e-8)
    assert [r.name for r in reports] == ["minpoly.quadratic_annihilator"]
    assert reports[0].status == "pass"


def test_verify_theo_inv_accepts_the_factored_form(plan):
    st = r3_recipe(RECIPE)
    omega = KForm(CH, 2, {(0, 1): div(Z, constant(8.0))})
    reports = verify_theo_inv(st.pi, st.n, st.phi, omega, 3, plan, 1e-8)
    assert {r.name for r in reports} == {
        "theoinv.factorization",
        "theoinv.obstruction_pairings",
    }
    assert all(r.status == "pass" for r in reports)


def test_verify_theo_inv_rejects_the_zero_form(plan):
    st = r3_recipe(RECIPE)
    omega = KForm(CH, 2, {})
    by_name = {
        r.name: r for r in verify_theo_inv(st.pi, st.n, st.phi, omega, 3, plan, 1e-8)
    }
    assert by_name["theoinv.factorization"].status == "fail"


def test_deform_3d_validates_its_inputs(plan):
    st = r3_recipe(RECIPE)
    n1, omega = prop_local_pair(RECIPE)
    not_closed = KForm(CH, 2, {(0, 1): Z})
    with pytest.raises(ValueError):
        deform_3d(st.pi, n1, None, not_closed, plan, 1e-8)
    shifted = Bivector(CH, {(0, 2): ONE})
    with pytest.raises(ValueError):
        deform_3d(shifted, n1, None, omega, plan, 1e-8)


def test_run_suites_dispatches_and_skips(plan):
    mv = magri_veselov()
    reports = run_suites(mv, sample_plan(mv.chart), 1e-8)
    names = {r.name for r in reports}
    # suites whose members are absent surface as single skipped entries
    assert "poisson.skipped" in names
    assert "recursion.skipped" in names
    assert any(n.startswith("haantjes.") for n in names)
    skipped = {r.name: r for r in reports if r.status == "skipped"}
    assert "missing members" in skipped["poisson.skipped"].detail


def test_run_suites_rejects_unknown_suite_names(plan):
    st = r3_recipe(RECIPE)
    with pytest.raises(ValueError):
        run_suites(st, plan, 1e-8, suites=("poisson", "nonsense"))


def test_run_suites_on_the_full_recipe_structure(plan):
    st = r3_recipe(RECIPE)
    reports = run_suites(st, plan, 1e-8, suites=("poisson", "pqn", "3d", "minpoly"))
    assert reports
    assert all(r.status == "pass" for r in reports)


def test_suite_names_are_stable():
    assert SUITES == (
        "poisson",
        "pn",
        "pqn",
        "3d",
        "haantjes",
        "chain",
        "recursion",
        "minpoly",
        "theoinv",
        "battery",
    )


def test_check_report_is_immutable():
    rep = CheckReport("x", "pass", 0.0, None, 0, 1e-8, "")
    with pytest.raises(AttributeError):
        rep.status = "fail"


def test_structure_members_are_optional():
    st = Structure(chart=CH, pi=CANONICAL)
    assert st.n is None and st.phi is None and st.name == ""
