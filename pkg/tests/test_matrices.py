"""Weight matrices: constructors, per-index condition search, absorption."""

import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from wcalc import (
    BEURLING,
    FAILS,
    HOLDS,
    ROUMIEU,
    UNDETERMINED,
    HorizonError,
    InvalidParameterError,
    MatrixConditionId,
    OrderViolationError,
    check_exponent_family_absorption,
    check_matrix_condition,
    composition_sequence,
    condition_id,
    constant_family,
    generic_matrix,
    indexed_family,
    linear_exponents,
    matrix_report_json,
    matrix_scale,
    matrix_term,
    power_exponents,
    ptt_matrix,
    scale_family,
    sigma_matrix,
    table,
    table_exponents,
)
from wcalc.matrices import DEFAULT_INDEX_GRID, MATRIX_CONDITIONS, exponent_family_scale

GRID4 = (0.5, 1.0, 2.0, 4.0)


def test_condition_id_normalization():
    cid = condition_id("fdb", "b")
    assert cid == MatrixConditionId("FdB", BEURLING)
    assert condition_id("BR").flavor == ROUMIEU
    assert condition_id("mg", "roumieu").tag == "mg"
    with pytest.raises(InvalidParameterError):
        condition_id("nope")
    with pytest.raises(InvalidParameterError):
        condition_id("mg", "sideways")
    with pytest.raises(InvalidParameterError):
        MatrixConditionId("xyz")


def test_matrix_grid_validation(g1):
    with pytest.raises(InvalidParameterError):
        scale_family(g1, linear_exponents(), ())
    with pytest.raises(InvalidParameterError):
        scale_family(g1, linear_exponents(), (1.0, -2.0))
    with pytest.raises(InvalidParameterError):
        scale_family(g1, linear_exponents(), (2.0, 1.0))


def test_element_memoization_and_validation(g1):
    mm = scale_family(g1, linear_exponents(), GRID4)
    assert mm.element(2.0) is mm.element(2)
    with pytest.raises(InvalidParameterError):
        mm.element(0.0)
    assert mm.index_grid == GRID4


def test_label_and_json_hide_private_params(g1):
    mm = scale_family(g1, power_exponents(2.0), GRID4)
    assert "_base" not in mm.label()
    d = mm.to_json()
    assert set(d) == {"construction", "params", "index_grid"}
    assert all(not k.startswith("_") for k in d["params"])
    assert d["index_grid"] == list(GRID4)


def test_sigma_matrix_terms():
    mm = sigma_matrix(2.0, (1.0, 2.0, 4.0))
    assert matrix_term(mm, 2.0, 3) == pytest.approx(
        9.0 * math.log(2.0) + 18.0 * math.log(3.0), rel=1e-15)
    assert matrix_term(mm, 1.0, 0) == 0.0
    with pytest.raises(InvalidParameterError):
        sigma_matrix(0.5)


def test_ptt_matrix_terms():
    mm = ptt_matrix(1.0, 2.0, GRID4)
    assert matrix_term(mm, 0.5, 3) == pytest.approx(
        9.0 * math.log(3.0) + 9.0 * math.log(0.5), rel=1e-14)
    assert mm.phi is not None
    assert mm.diagnostics["phi_convex"]


def test_matrix_scale_composes_scalings():
    base = ptt_matrix(1.0, 2.0, GRID4)
    mm = matrix_scale(base, power_exponents(2.0))
    assert mm.index_grid == base.index_grid
    got = matrix_term(mm, 2.0, 3)
    assert got == pytest.approx(9.0 * math.log(3.0) + 18.0 * math.log(2.0), rel=1e-14)


def test_generic_matrix_order_violation(g1, g2):
    with pytest.raises(OrderViolationError) as err:
        generic_matrix([(1.0, g2), (2.0, g1)])
    assert err.value.witness == (1.0, 2.0, 2)
    with pytest.raises(InvalidParameterError):
        generic_matrix([])
    with pytest.raises(InvalidParameterError):
        generic_matrix([(1.0, g1), (1.0, g1)])
    mm = generic_matrix([(1.0, g1), (2.0, g2)])
    with pytest.raises(InvalidParameterError):
        mm.element(3.0)


def test_exponent_family_scale_signed_order(g1):
    ok = exponent_family_scale(g1, constant_family(power_exponents(2.0)), GRID4)
    assert matrix_term(ok, 0.5, 2) == pytest.approx(
        math.lgamma(3.0) + 4.0 * math.log(0.5), rel=1e-14)
    mixed = indexed_family(
        lambda a: power_exponents(2.0) if a <= 2.0 else linear_exponents(),
        "mixed")
    with pytest.raises(OrderViolationError) as err:
        exponent_family_scale(g1, mixed, (2.0, 4.0))
    assert err.value.witness == (2.0, 4.0, 3)


def test_scaling_law_is_exact():
    # term difference per index must be phi_j * log(c2/c1) to float accuracy
    mm = ptt_matrix(1.0, 2.0, DEFAULT_INDEX_GRID)
    for c1, c2 in ((1.0, 2.0), (0.5, 4.0)):
        e1, e2 = mm.element(c1), mm.element(c2)
        ratio = math.log(c2) - math.log(c1)
        worst = max(
            abs((e2.log_term(j) - e1.log_term(j)) / j - j * ratio)
            for j in range(1, 257))
        assert worst < 1e-9


# --- per-index condition search -------------------------------------------


def mg_roumieu(mm, grid, h=128):
    return check_matrix_condition(mm, MatrixConditionId("mg", ROUMIEU),
                                  index_grid=grid, horizon=h)


def test_sigma_matrix_mg_partner_map():
    grid = (1.0, 2.0, 4.0, 16.0, 256.0)
    out = mg_roumieu(sigma_matrix(2.0, grid), grid)
    want = {1.0: 4.0, 2.0: 16.0, 4.0: 16.0, 16.0: 256.0, 256.0: 4096.0}
    for alpha, beta in want.items():
        v = out[alpha]
        assert v.status == HOLDS, (alpha, v.evidence)
        assert v.witness == beta
        assert v.evidence["beyond_grid"] is (alpha == 256.0)
        assert v.evidence["stabilized"]


def test_ptt_matrix_mg_diverges_everywhere():
    grid = (1.0, 2.0, 4.0, 8.0)
    out = mg_roumieu(ptt_matrix(1.0, 2.0, grid), grid)
    for alpha, v in out.items():
        assert v.status == UNDETERMINED
        assert v.evidence["diverging"] is True
        assert "best_beta" in v.evidence


def test_l_condition_scale_families(g1, g2):
    lin = scale_family(g1, linear_exponents(), GRID4)
    for flavor in (ROUMIEU, BEURLING):
        out = check_matrix_condition(lin, MatrixConditionId("L", flavor),
                                     horizon=128)
        for alpha, v in out.items():
            assert v.status == HOLDS, (flavor, alpha)
            assert v.evidence["exponent_growth"]["positive_gap"] is True
    # the linear family needs the full factor-8 stretch on the heavy side
    r = check_matrix_condition(lin, MatrixConditionId("L", ROUMIEU), horizon=128)
    assert r[1.0].witness == 8.0
    sq = scale_family(g2, power_exponents(2.0), GRID4)
    r2 = check_matrix_condition(sq, MatrixConditionId("L", ROUMIEU), horizon=128)
    assert r2[1.0].status == HOLDS
    assert r2[1.0].witness == 2.0  # quadratic exponents absorb in one step


def test_l_condition_sqrt_exponents_undetermined(g1):
    phi = table_exponents([math.ceil(math.sqrt(j)) for j in range(513)])
    mm = scale_family(g1, phi, GRID4)
    for flavor in (ROUMIEU, BEURLING):
        out = check_matrix_condition(mm, MatrixConditionId("L", flavor),
                                     horizon=512)
        for alpha, v in out.items():
            assert v.status == UNDETERMINED, (flavor, alpha)
            assert v.evidence["exponent_growth"]["decaying"] is True


def test_dc_and_br_take_next_grid_point():
    grid = (1.0, 2.0, 4.0, 8.0)
    mm = ptt_matrix(1.0, 2.0, grid)
    dc_r = check_matrix_condition(mm, MatrixConditionId("dc", ROUMIEU),
                                  index_grid=grid, horizon=64)
    assert dc_r[2.0].status == HOLDS and dc_r[2.0].witness == 4.0
    dc_b = check_matrix_condition(mm, MatrixConditionId("dc", BEURLING),
                                  index_grid=grid, horizon=64)
    assert dc_b[2.0].status == HOLDS and dc_b[2.0].witness == 1.0
    br = check_matrix_condition(mm, MatrixConditionId("BR", ROUMIEU),
                                index_grid=grid, horizon=64)
    assert br[2.0].status == HOLDS and br[2.0].witness == 4.0


def test_rai_holds_on_the_diagonal():
    grid = (1.0, 2.0, 4.0)
    mm = ptt_matrix(1.0, 2.0, grid)
    for flavor in (ROUMIEU, BEURLING):
        out = check_matrix_condition(mm, MatrixConditionId("rai", flavor),
                                     index_grid=grid, horizon=64)
        for alpha, v in out.items():
            assert v.status == HOLDS
            assert v.witness == alpha  # an element controls its own roots


def test_fdb_holds_at_same_index():
    grid = (1.0, 2.0, 4.0)
    out = check_matrix_condition(ptt_matrix(1.0, 2.0, grid),
                                 MatrixConditionId("FdB", ROUMIEU),
                                 index_grid=grid, horizon=48)
    for alpha, v in out.items():
        assert v.status == HOLDS
        assert v.witness == alpha
        assert v.evidence["k_top"] == 48


def test_sc_per_element(g2):
    mm = scale_family(g2, power_exponents(2.0), GRID4)
    out = check_matrix_condition(mm, MatrixConditionId("sc", ROUMIEU),
                                 horizon=64)
    assert out[0.5].status == FAILS
    assert out[0.5].witness == 3  # scaled-down head breaks log-convexity
    for alpha in (1.0, 2.0, 4.0):
        assert out[alpha].status == HOLDS


def test_constant_condition(g1):
    mm = ptt_matrix(1.0, 2.0, (1.0, 2.0, 4.0))
    out = check_matrix_condition(mm, MatrixConditionId("constant", ROUMIEU),
                                 horizon=64)
    assert out[1.0].status == HOLDS  # anchor compared with itself
    assert out[2.0].status == FAILS
    assert out[2.0].evidence["partner"] == 1.0
    flat = generic_matrix([(1.0, g1), (2.0, g1), (4.0, g1)])
    out2 = check_matrix_condition(flat, MatrixConditionId("constant", ROUMIEU),
                                  horizon=64)
    assert all(v.status == HOLDS for v in out2.values())


def test_check_matrix_condition_validation(g1):
    mm = scale_family(g1, linear_exponents(), GRID4)
    with pytest.raises(HorizonError):
        check_matrix_condition(mm, MatrixConditionId("mg"), horizon=8)
    with pytest.raises(InvalidParameterError):
        check_matrix_condition(mm, MatrixConditionId("mg"),
                               index_grid=(1.0, 2.0), horizon=64)
    # element-wise conditions accept short grids
    out = check_matrix_condition(mm, MatrixConditionId("sc"),
                                 index_grid=(1.0,), horizon=64)
    assert out[1.0].status == HOLDS


def test_matrix_report_json_shape():
    grid = (1.0, 2.0, 4.0)
    cid = MatrixConditionId("dc", ROUMIEU)
    out = check_matrix_condition(ptt_matrix(1.0, 2.0, grid), cid,
                                 index_grid=grid, horizon=64)
    rep = matrix_report_json(cid, out)
    assert rep["condition"] == "dc" and rep["flavor"] == ROUMIEU
    assert [row["alpha"] for row in rep["per_index"]] == [1.0, 2.0, 4.0]
    for row in rep["per_index"]:
        assert {"alpha", "status", "beta", "constant", "evidence"} <= set(row)


# --- composition transform -------------------------------------------------


def brute_composition(logs, K):
    # enumerate partitions (non-increasing parts) of each k
    def partitions(k, cap):
        if k == 0:
            yield ()
            return
        for first in range(min(k, cap), 0, -1):
            for rest in partitions(k - first, first):
                yield (first,) + rest

    out = [0.0]
    for k in range(1, K + 1):
        out.append(max(logs[len(p)] + math.fsum(logs[q] for q in p)
                       for p in partitions(k, k)))
    return out


def test_composition_matches_enumeration_fixed():
    logs = [0.0] + [math.lgamma(j + 1) for j in range(1, 13)]
    got = composition_sequence(logs, 12)
    want = brute_composition(logs, 12)
    assert got == pytest.approx(want, abs=1e-9)
    assert got[0] == 0.0


@settings(deadline=None, max_examples=50)
@given(st.lists(st.floats(min_value=0.0, max_value=3.0), min_size=10, max_size=10))
def test_composition_matches_enumeration_random(increments):
    # normalized log-convex reduced input: increasing quotient increments
    q = sorted(increments)
    logs = [0.0, 0.0]
    for step in q:
        logs.append(logs[-1] + logs[-1] - logs[-2] + step)
    K = len(logs) - 1
    got = composition_sequence(logs, K)
    want = brute_composition(logs, K)
    assert got == pytest.approx(want, abs=1e-9)


def test_composition_accepts_sequence_views():
    logs = [0.0, 0.0, 1.0, 3.0, 6.0, 10.0]
    via_list = composition_sequence(logs, 5)
    via_seq = composition_sequence(table(log_values=logs), 5)
    assert via_list == via_seq
    with pytest.raises(InvalidParameterError):
        composition_sequence(logs, -1)
    with pytest.raises(InvalidParameterError):
        composition_sequence([0.0, 1.0], 5)


def test_composition_dominates_single_block():
    logs = [0.0] + [math.lgamma(j + 1) for j in range(1, 21)]
    comp = composition_sequence(logs, 20)
    for k in range(1, 21):
        assert comp[k] >= logs[k] + logs[1] - 1e-12


# --- exponent family absorption --------------------------------------------


def test_absorption_power_families():
    fam = constant_family(power_exponents(2.0))
    for flavor in (ROUMIEU, BEURLING):
        v = check_exponent_family_absorption(fam, flavor, GRID4, horizon=128)
        assert v.status == HOLDS, flavor
        assert v.evidence["epsilon"] > 1.0
    pairs = check_exponent_family_absorption(
        fam, ROUMIEU, GRID4, horizon=128).evidence["pairs"]
    assert pairs[repr(0.5)]["partner"] == 1.0
    assert pairs[repr(4.0)]["partner"] == 8.0
    assert pairs[repr(4.0)]["beyond_grid"] is True


def test_absorption_linear_constant_gap():
    fam = constant_family(linear_exponents())
    v = check_exponent_family_absorption(fam, ROUMIEU, GRID4, horizon=128)
    assert v.status == HOLDS
    assert v.evidence["epsilon"] == pytest.approx(math.log(2.0), abs=1e-12)
    b = check_exponent_family_absorption(fam, BEURLING, GRID4, horizon=128)
    assert b.status == HOLDS
    assert b.evidence["epsilon"] == pytest.approx(math.log(2.0), abs=1e-12)


def test_absorption_sqrt_gap_vanishes():
    tab = table_exponents([math.ceil(math.sqrt(j)) for j in range(513)])
    fam = constant_family(tab)
    for flavor in (ROUMIEU, BEURLING):
        v = check_exponent_family_absorption(fam, flavor, GRID4, horizon=512)
        assert v.status == UNDETERMINED, flavor
        assert v.evidence["vanishing_gap"] is True


def test_absorption_validation():
    fam = constant_family(linear_exponents())
    with pytest.raises(HorizonError):
        check_exponent_family_absorption(fam, ROUMIEU, GRID4, horizon=8)
    with pytest.raises(InvalidParameterError):
        check_exponent_family_absorption(fam, ROUMIEU, (1.0,), horizon=64)
    with pytest.raises(InvalidParameterError):
        check_exponent_family_absorption(fam, "mixed", GRID4, horizon=64)


def test_condition_tag_inventory():
    assert MATRIX_CONDITIONS == ("L", "mg", "dc", "rai", "FdB", "BR", "sc", "constant")
    for tag, flavor in itertools.product(("L", "mg"), (ROUMIEU, BEURLING)):
        MatrixConditionId(tag, flavor)  # constructible
