import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mulspace import ValidationError, build_dyadic_partition, build_uniform_partition, partition_defect
from mulspace.partitions import DyadicPartition


@pytest.fixture(scope="module")
def dyadic():
    return build_dyadic_partition()


@pytest.fixture(scope="module")
def uniform1():
    return build_uniform_partition(1)


class TestDyadic:
    def test_support_edges(self, dyadic):
        psi = dyadic.psi
        assert psi(np.array([[0.49]]))[0] == 0.0
        assert psi(np.array([[2.01]]))[0] == 0.0
        assert psi(np.array([[0.5]]))[0] == 0.0 and psi(np.array([[2.0]]))[0] == 0.0

    def test_telescoping_at_one_point(self, dyadic):
        total = sum(dyadic.psi(np.array([[1.3 * 2.0 ** -j]]))[0] for j in range(-20, 21))
        assert abs(total - 1.0) < 1e-12

    def test_lower_bound(self, dyadic):
        assert dyadic.lower_bound > 0
        assert dyadic.psi(np.array([[1.0]]))[0].real >= dyadic.lower_bound
        r = np.linspace(2 ** -0.5, 2 ** 0.5, 5000)
        assert np.min(dyadic.radial(r)) >= dyadic.lower_bound - 1e-15

    def test_default_lower_bound_value(self, dyadic):
        # rho(2^{+-1/2}) = 1 - S(1/2) = 1/2 with the symmetric smooth step
        assert dyadic.lower_bound == pytest.approx(0.5, abs=1e-6)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_radial(self, seed):
        rng = np.random.default_rng(seed)
        d = rng.standard_normal((20, 2))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        r = rng.uniform(0.4, 2.1)
        psi = build_dyadic_partition().psi
        vals = psi(d * r).real
        assert np.max(np.abs(vals - vals[0])) <= 1e-14

    def test_defect(self, dyadic):
        assert partition_defect(dyadic, 10000, 7) < 1e-10
        assert partition_defect(dyadic, 2000, 7, dim=2) < 1e-10

    def test_broken_defect(self, dyadic):
        broken = DyadicPartition(lambda r: 0.9 * dyadic.radial(r), dyadic.lower_bound, dyadic.j_range)
        assert partition_defect(broken, 1000, 1) == pytest.approx(0.1, abs=1e-10)

    def test_inhomogeneous_sum(self, dyadic):
        r = np.abs(np.arange(-2048, 2048) / 64.0)
        total = dyadic.inhomogeneous(r, 0) + sum(dyadic.inhomogeneous(r, l) for l in range(1, 12))
        assert np.max(np.abs(total - 1.0)) < 1e-10
        generic = DyadicPartition(dyadic.radial, dyadic.lower_bound)
        np.testing.assert_allclose(generic.inhomogeneous(r, 0), dyadic.inhomogeneous(r, 0), atol=1e-12)
        assert np.all(dyadic.inhomogeneous(r, 0) >= 0)

    def test_disjoint_supports(self, dyadic):
        r = np.linspace(0, 64, 200001)
        for j in range(-3, 4):
            assert not np.any(dyadic.scaled(r, j) * dyadic.scaled(r, j + 2))

    @pytest.mark.parametrize("s", [0.5, 0.99])
    def test_rejects_wide_support(self, s):
        with pytest.raises(ValidationError):
            build_dyadic_partition(s)

    def test_rejects_collapsed_lower_bound(self):
        build_dyadic_partition(1.8)
        with pytest.raises(ValidationError):
            build_dyadic_partition(1.95)

    def test_sharper_transition_stays_admissible(self):
        p = build_dyadic_partition(1.5)
        assert partition_defect(p, 2000, 3) < 1e-10
        r = np.linspace(0, 4, 40001)
        assert not np.any(p.radial(r[(r < 0.5) | (r > 2)]))


class TestUniform:
    def test_sum_one_point(self, uniform1):
        phi = uniform1.phi
        total = sum(phi(np.array([[0.37 - k]]))[0] for k in range(-3, 4))
        assert abs(total - 1.0) < 1e-12

    def test_support(self):
        phi = build_uniform_partition(2).phi
        assert phi(np.array([[1.01, 0.0]]))[0] == 0.0
        assert phi(np.array([[0.0, -1.0]]))[0] == 0.0

    def test_nonnegative(self, uniform1):
        t = np.linspace(-1.5, 1.5, 3001)
        assert np.all(uniform1.theta(t) >= 0)

    @settings(max_examples=40, deadline=None)
    @given(xi=st.floats(-5, 5), k=st.integers(-6, 6), dk=st.integers(2, 5))
    def test_far_translates_disjoint(self, xi, k, dk):
        p = build_uniform_partition(1)
        assert p.phi(np.array([[xi - k]]))[0] * p.phi(np.array([[xi - k - dk]]))[0] == 0.0

    def test_defect(self, uniform1):
        assert partition_defect(uniform1, 10000, 7) < 1e-10
        assert partition_defect(build_uniform_partition(2), 2000, 7) < 1e-10

    def test_other_sharpness(self):
        assert partition_defect(build_uniform_partition(1, sharpness=3.0), 2000, 1) < 1e-10

    def test_lattice_order(self):
        ks = build_uniform_partition(2).lattice(1)
        assert ks.tolist()[:4] == [[-1, -1], [-1, 0], [-1, 1], [0, -1]]

    def test_dim_check(self):
        with pytest.raises(ValidationError):
            build_uniform_partition(3)


def test_sample_count_checked(dyadic):
    with pytest.raises(ValidationError):
        partition_defect(dyadic, 0, 1)
