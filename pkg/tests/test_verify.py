import numpy as np
import pytest

from mulspace import (Band, EnsembleSpec, FREQUENCY, Symbol, ValidationError, atom_transfer_ratio,
                      build_dyadic_partition, default_grid, equivalence_ratio, forward_transform,
                      make_ensemble, make_grid, operator_norm_l2, parse_symbol, sample, symbol_catalog)
from mulspace.verify import RatioReport

BL = EnsembleSpec("band_limited", 12, 5, Band("ball", 2.0))


@pytest.fixture(scope="module")
def g64():
    return make_grid(1, 4096, 64 * np.pi)


class TestBandLimited:
    @pytest.mark.parametrize("p, q, s", [(2, 1, 0), (2, 1, 0.5), (1, 1, 0.5), (np.inf, 1, 0.5)])
    def test_spread_finite(self, g64, p, q, s):
        rep = equivalence_ratio("prop32", BL, {"p": p, "q": q, "s": s}, g64)
        assert len(rep.per_input) == 12
        assert 1 <= rep.ratio_spread < 2

    def test_plancherel_row(self, g64):
        # p = q = 2, s = 0: the modulation norm is the L2 norm up to the partition defect
        rep = equivalence_ratio("prop32", BL, {"p": 2, "q": 2, "s": 0}, g64)
        assert rep.ratio_spread < 1.1

    def test_space_support(self, g64):
        rep = equivalence_ratio("prop32", BL, {"p": 2, "q": 1, "s": 0}, g64, support="space")
        assert rep.extra["support"] == "space" and np.isfinite(rep.ratio_spread)

    def test_rejects_unlimited_input(self, g64):
        f = sample(g64, lambda x: np.exp(-x[..., 0] ** 2))
        with pytest.raises(ValidationError):
            equivalence_ratio("prop32", ([f], Band("ball", 2.0)), {"p": 2, "q": 1, "s": 0}, g64)
        with pytest.raises(ValidationError):
            equivalence_ratio("prop32", EnsembleSpec("gaussian_mix", 2, 0), {}, g64)

    def test_partition_change(self, g64):
        a = equivalence_ratio("prop32", BL, {"p": 2, "q": 1, "s": 0.5}, g64)
        from mulspace import build_uniform_partition
        b = equivalence_ratio("prop32", BL, {"p": 2, "q": 1, "s": 0.5}, g64,
                              uniform=build_uniform_partition(1, sharpness=3.0))
        assert np.all(np.abs(a.ratios / b.ratios - 1) < 2)
        assert max(a.ratio_spread, b.ratio_spread) / min(a.ratio_spread, b.ratio_spread) < 3

    def test_refinement(self):
        reps = [equivalence_ratio("prop32", BL, {"p": 2, "q": 1, "s": 0.5}, make_grid(1, n, 64 * np.pi))
                for n in (2048, 4096)]
        assert abs(reps[1].ratio_spread / reps[0].ratio_spread - 1) < 0.05


class TestPieces:
    def test_herz_one(self):
        rep = equivalence_ratio("herz16", params={"s": 0.5}, symbol=symbol_catalog("one"), j_range=(-4, 4))
        assert rep.ratio_spread == pytest.approx(1.0, abs=1e-10)
        assert [r["id"] for r in rep.per_input] == list(range(-4, 5))

    @pytest.mark.parametrize("p", [1, np.inf])
    def test_pnorm_homogeneous(self, p):
        rep = equivalence_ratio("pnorm17", params={"p": p, "s": 0.5}, symbol=parse_symbol("riesz:1"),
                                j_range=(-4, 4))
        assert rep.ratio_spread - 1 < 1e-10

    def test_mihlin_poly(self):
        rep = equivalence_ratio("herz16", params={"s": 0.5}, symbol=parse_symbol("mihlin_poly:1"),
                                j_range=(-6, 6))
        assert 1 <= rep.ratio_spread < 1.1

    def test_zero_pieces_skipped(self):
        rep = equivalence_ratio("herz16", params={"s": 0.5}, symbol=parse_symbol("oscillatory:0"),
                                j_range=(-4, 2))
        assert any(np.isnan(r["ratio"]) for r in rep.per_input)
        assert np.isfinite(rep.ratio_spread)

    def test_needs_symbol(self):
        with pytest.raises(ValidationError):
            equivalence_ratio("pnorm17", params={"p": 1})


class TestEmbeddings:
    def test_embed110(self, g64):
        rep = equivalence_ratio("embed110", BL, None, g64)
        assert rep.extra["violations"] == 0
        assert rep.ratio_max <= rep.extra["cell_constant"]

    def test_embed110_gaussians(self, g64):
        rep = equivalence_ratio("embed110", EnsembleSpec("gaussian_mix", 8, 3), None, g64)
        assert rep.extra["violations"] == 0

    def test_embedding_chain(self, g64):
        rep = equivalence_ratio("toft_chain", BL, None, g64)
        assert rep.extra["violations"] == 0
        c, c2 = rep.extra["constants"]["c"], rep.extra["constants"]["c_prime"]
        for r in rep.per_input:
            assert r["lhs"] >= c * r["mid"] * (1 - 1e-12)
            assert r["lhs"] >= c2 * r["rhs"] * (1 - 1e-12)

    def test_unknown_mode(self):
        with pytest.raises(ValidationError):
            equivalence_ratio("nope", BL)


class TestOperatorNorm:
    @pytest.fixture(scope="class")
    @classmethod
    def grid(cls):
        return make_grid(1, 1024, 8 * np.pi)

    @pytest.mark.parametrize("name", ["one", "sign", "riesz:1", "mihlin_poly:1", "imag_power:2", "oscillatory:0"])
    def test_matches_node_max(self, grid, name):
        m = parse_symbol(name)
        target = np.max(np.abs(m(grid.points(FREQUENCY))))
        assert operator_norm_l2(m, grid) == pytest.approx(target, rel=1e-6)

    def test_peaked_symbol(self, grid):
        xi0 = grid.xi_axis[700]
        m = Symbol(lambda xi: 1 + 2 * np.exp(-(xi[..., 0] - xi0) ** 2), "bump")
        value, info = operator_norm_l2(m, grid, return_info=True)
        assert value == pytest.approx(3.0, rel=1e-6) and info["iterations"] >= 16

    def test_zero_symbol(self, grid):
        assert operator_norm_l2(Symbol(lambda xi: 0 * xi[..., 0], "zero"), grid) == 0.0

    def test_validation(self):
        with pytest.raises(ValidationError):
            operator_norm_l2(symbol_catalog("one"), iterations=3)


class TestAtoms:
    def test_identity(self):
        ens = EnsembleSpec("h1_atom", 5, 2, atom_scale=2.0)
        rep = atom_transfer_ratio(symbol_catalog("one"), ens)
        assert np.all(np.abs(rep.ratios - 1) < 1e-10)

    def test_hilbert_maximal(self):
        ens = EnsembleSpec("h1_atom", 4, 2, atom_scale=4.0)
        rep = atom_transfer_ratio(symbol_catalog("sign"), ens, method="maximal")
        assert 0.5 < rep.ratio_min <= rep.ratio_max < 2

    def test_needs_atoms(self):
        with pytest.raises(ValidationError):
            atom_transfer_ratio(symbol_catalog("one"), BL)


class TestReport:
    def test_serialization(self, g64):
        rep = equivalence_ratio("embed110", EnsembleSpec("band_limited", 3, 1, Band("ball", 2.0)), None, g64)
        d = rep.to_dict()
        assert d["mode"] == "embed110" and d["seed"] == 1 and len(d["per_input"]) == 3
        assert rep.to_csv().splitlines()[0] == "id,lhs,rhs,ratio"

    def test_empty(self):
        with pytest.raises(ValidationError):
            RatioReport("prop32", [], {})

    def test_all_nan(self):
        rep = RatioReport("x", [{"ratio": float("nan")}], {})
        assert np.isnan(rep.ratio_min) and np.isnan(rep.ratio_spread)
