#include "tsqm/qcore.hpp"

#include <gtest/gtest.h>

#include "tsqm/states.hpp"

using namespace tsqm;

namespace {

void expect_near(const Amplitude& a, const Amplitude& b, double tol) {
    EXPECT_NEAR(a.real(), b.real(), tol);
    EXPECT_NEAR(a.imag(), b.imag(), tol);
}

// row-major unitary whose columns are the eigenvectors of a random Hermitian
UnitaryMap random_unitary(std::size_t dim, states::Rng& rng) {
    const Observable h = states::random_hermitian(dim, rng);
    const Spectrum& s = h.spectrum();
    Matrix u(dim * dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) u[i * dim + j] = s.vectors[j * dim + i];
    return UnitaryMap(std::move(u), dim);
}

}  // namespace

TEST(StateVector, RejectsIllFormedInput) {
    using Amps = std::vector<Amplitude>;
    EXPECT_THROW(StateVector(Amps{}), std::invalid_argument);
    EXPECT_THROW(StateVector(Amps{{0, 0}, {0, 0}}), std::invalid_argument);  // zero vector
    EXPECT_THROW(StateVector(Amps{{1, 0}}, {"a", "b"}), DimensionMismatch);
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_THROW(StateVector(Amps{{inf, 0}}), std::invalid_argument);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(StateVector(Amps{{0, nan}, {1, 0}}), std::invalid_argument);
}

TEST(InnerProduct, KnownOverlaps) {
    expect_near(inner_product(states::up_x(), states::up_x()), {1, 0}, 1e-15);
    // <up_y|up_x> = (1-i)/2, squared modulus 1/2
    const Amplitude z = inner_product(states::up_y(), states::up_x());
    expect_near(z, {0.5, -0.5}, 1e-15);
    EXPECT_NEAR(std::norm(z), 0.5, 1e-15);
    expect_near(inner_product(states::three_box_post(), states::three_box_pre()),
                {1.0 / 3.0, 0}, 1e-15);
    EXPECT_THROW(inner_product(states::up_x(), states::three_box_pre()), DimensionMismatch);
}

TEST(TensorProduct, IdentityAndEigenstates) {
    const Observable id4 = tensor_product(Observable::identity(2), Observable::identity(2));
    EXPECT_NEAR(max_abs_diff(id4.matrix(), identity_matrix(4)), 0.0, 1e-15);

    // sigma_z x sigma_z on |up_z>|down_z> has eigenvalue -1
    const StateVector prod = tensor_product(states::up_z(), states::down_z());
    const Observable zz = tensor_product(states::sigma_z(), states::sigma_z());
    const StateVector out = zz.apply(prod);
    for (std::size_t i = 0; i < 4; ++i)
        expect_near(out[i], -prod[i], 1e-15);
}

TEST(TensorProduct, MixedPauliProductMatchesDirectMultiplication) {
    // (sx x sy)(sy x sx) multiplied out as plain 4x4 matrices
    const Observable a = tensor_product(states::sigma_x(), states::sigma_y());
    const Observable b = tensor_product(states::sigma_y(), states::sigma_x());
    const Matrix direct = matmul(a.matrix(), b.matrix(), 4);
    const Observable zz = tensor_product(states::sigma_z(), states::sigma_z());
    EXPECT_LT(max_abs_diff(direct, zz.matrix()), 1e-15);
}

TEST(TensorProduct, FactorsThroughApplication) {
    states::Rng rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t da = 2 + std::size_t(rng.uniform() * 3);
        const std::size_t db = 2 + std::size_t(rng.uniform() * 3);
        const Observable a = states::random_hermitian(da, rng);
        const Observable b = states::random_hermitian(db, rng);
        const StateVector x = states::random_state(da, rng);
        const StateVector y = states::random_state(db, rng);

        const auto lhs = tensor_product(a, b).apply_raw(tensor_product(x, y).amplitudes());
        const auto rhs = tensor_product(StateVector(a.apply_raw(x.amplitudes())),
                                        StateVector(b.apply_raw(y.amplitudes())));
        double dev = 0.0;
        for (std::size_t i = 0; i < lhs.size(); ++i) dev = std::max(dev, std::abs(lhs[i] - rhs[i]));
        EXPECT_LT(dev, 1e-12 * std::max(1.0, rhs.norm()));
    }
}

TEST(TensorProduct, LabelsConcatenate) {
    const StateVector s = tensor_product(StateVector({{1, 0}, {0, 0}}, {"O", "NO"}),
                                         StateVector({{0, 0}, {1, 0}}, {"O", "NO"}));
    ASSERT_EQ(s.basis().size(), 4u);
    EXPECT_EQ(s.basis()[1], "O⊗NO");
}

TEST(Observable, RejectsNonHermitian) {
    EXPECT_THROW(Observable({{0, 0}, {1, 0}, {0, 0}, {0, 0}}, 2), NotHermitian);
    EXPECT_THROW(Observable({{0, 1e-6}, {0, 0}, {0, 0}, {0, 0}}, 2), NotHermitian);
}

TEST(Eigendecompose, PauliSpectra) {
    const Observable sz_obs = states::sigma_z();
    const auto& sz = eigendecompose(sz_obs);
    ASSERT_EQ(sz.lines.size(), 2u);
    EXPECT_NEAR(sz.lines[0].eigenvalue, -1.0, 1e-14);
    EXPECT_NEAR(sz.lines[1].eigenvalue, 1.0, 1e-14);
    // projectors onto |down_z>, |up_z>
    const Matrix p_dn = sz_obs.projector_matrix(0);
    EXPECT_NEAR(std::abs(p_dn[3] - Amplitude{1, 0}), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(p_dn[0]), 0.0, 1e-14);

    const Observable sxi = states::sigma_xi();
    const auto evs = sxi.eigenvalues();
    ASSERT_EQ(evs.size(), 2u);
    EXPECT_NEAR(evs[0], -1.0, 1e-14);
    EXPECT_NEAR(evs[1], 1.0, 1e-14);
}

TEST(Eigendecompose, CollectiveSigmaZForThreeSpins) {
    // A^(3) = (sz1 + sz2 + sz3)/3 on the 8-dimensional product space
    const Observable id2 = Observable::identity(2);
    const Observable sz = states::sigma_z();
    const Observable a =
            (1.0 / 3.0) * (tensor_product(tensor_product(sz, id2), id2) +
                           tensor_product(tensor_product(id2, sz), id2) +
                           tensor_product(tensor_product(id2, id2), sz));
    const auto& spec = eigendecompose(a);
    ASSERT_EQ(spec.lines.size(), 4u);
    const double expected_ev[] = {-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0};
    const std::size_t expected_mult[] = {1, 3, 3, 1};
    for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(spec.lines[k].eigenvalue, expected_ev[k], 1e-12);
        EXPECT_EQ(spec.lines[k].multiplicity, expected_mult[k]);
    }
}

TEST(Eigendecompose, SpectralInvariantsOnRandomMatrices) {
    states::Rng rng(20250810);
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t dim = 2 + std::size_t(rng.uniform() * 15);
        const Observable obs = states::random_hermitian(dim, rng);
        const auto& spec = eigendecompose(obs);

        // reconstruction sum lambda_k P_k == M
        Matrix recon(dim * dim, Amplitude{0, 0});
        Matrix psum(dim * dim, Amplitude{0, 0});
        for (std::size_t k = 0; k < spec.lines.size(); ++k) {
            const Matrix p = obs.projector_matrix(k);
            for (std::size_t i = 0; i < p.size(); ++i) {
                recon[i] += spec.lines[k].eigenvalue * p[i];
                psum[i] += p[i];
            }
        }
        const double scale = std::max(1.0, std::abs(spec.lines.back().eigenvalue));
        ASSERT_LT(max_abs_diff(recon, obs.matrix()), 1e-10 * scale);
        ASSERT_LT(max_abs_diff(psum, identity_matrix(dim)), 1e-10);
    }
}

TEST(Eigendecompose, ProjectorsIdempotentAndOrthogonal) {
    states::Rng rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t dim = 2 + std::size_t(rng.uniform() * 5);
        const Observable obs = states::random_hermitian(dim, rng);
        const auto& spec = eigendecompose(obs);
        for (std::size_t k = 0; k < spec.lines.size(); ++k) {
            const Matrix pk = obs.projector_matrix(k);
            ASSERT_LT(max_abs_diff(matmul(pk, pk, dim), pk), 1e-10);
            for (std::size_t l = k + 1; l < spec.lines.size(); ++l) {
                const Matrix pl = obs.projector_matrix(l);
                Matrix zero(dim * dim, Amplitude{0, 0});
                ASSERT_LT(max_abs_diff(matmul(pk, pl, dim), zero), 1e-10);
            }
        }
    }
}

TEST(Eigendecompose, MergesDegenerateEigenvalues) {
    // diag(1, 1, 2) has a two-dimensional eigenspace
    Matrix m(9, Amplitude{0, 0});
    m[0] = {1, 0};
    m[4] = {1, 0};
    m[8] = {2, 0};
    const Observable obs(std::move(m), 3);
    const auto& spec = eigendecompose(obs);
    ASSERT_EQ(spec.lines.size(), 2u);
    EXPECT_EQ(spec.lines[0].multiplicity, 2u);
    EXPECT_EQ(spec.lines[1].multiplicity, 1u);
}

TEST(UnitaryMap, ValidatesAndPreservesNorm) {
    EXPECT_THROW(UnitaryMap({{1, 0}, {1, 0}, {0, 0}, {1, 0}}, 2), NotUnitary);
    states::Rng rng(99);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t dim = 2 + std::size_t(rng.uniform() * 7);
        const UnitaryMap u = random_unitary(dim, rng);
        const StateVector s = states::random_state(dim, rng);
        EXPECT_NEAR(u.apply(s).norm_sq(), s.norm_sq(), 1e-12 * s.norm_sq());
    }
}

TEST(Eigenbasis, ResolvesIdentity) {
    states::Rng rng(3);
    const Observable obs = states::random_hermitian(5, rng);
    const auto basis = eigenbasis(obs);
    ASSERT_EQ(basis.size(), 5u);
    Matrix sum(25, Amplitude{0, 0});
    for (const StateVector& v : basis)
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 5; ++j) sum[i * 5 + j] += v[i] * std::conj(v[j]);
    EXPECT_LT(max_abs_diff(sum, identity_matrix(5)), 1e-12);
}

TEST(BinomialU64, ExactSmallAndLargeValues) {
    EXPECT_EQ(binomial_u64(0, 0), 1ull);
    EXPECT_EQ(binomial_u64(20, 10), 184756ull);
    EXPECT_EQ(binomial_u64(64, 32), 1832624140942590534ull);
    EXPECT_EQ(binomial_u64(13, 20), 0ull);
    EXPECT_THROW(binomial_u64(65, 1), std::invalid_argument);
}
