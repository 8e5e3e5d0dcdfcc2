#include "tsqm/superosc.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <numbers>

#include "tsqm/meter.hpp"
#include "tsqm/states.hpp"
#include "tsqm/tsv.hpp"

using namespace tsqm;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

// Exact coefficients for alpha = sqrt(2) in the ring Z[sqrt(2)]:
// (1+sqrt2)^n (1-sqrt2)^(N-n) = P + Q sqrt(2) with integer P, Q.
std::pair<long long, long long> z_sqrt2_power(int n_plus, int n_minus) {
    long long a = 1, b = 0;
    for (int i = 0; i < n_plus; ++i) {  // multiply by (1 + sqrt2)
        const long long na = a + 2 * b, nb = a + b;
        a = na;
        b = nb;
    }
    for (int i = 0; i < n_minus; ++i) {  // multiply by (1 - sqrt2)
        const long long na = a - 2 * b, nb = b - a;
        a = na;
        b = nb;
    }
    return {a, b};
}

}  // namespace

TEST(BuildSuperoscillation, TwoTermExpansion) {
    const FourierSum f = build_superoscillation({kSqrt2, 1, 1.0});
    ASSERT_EQ(f.coefficients.size(), 2u);
    EXPECT_NEAR(f.coefficients[0].real(), (1.0 - kSqrt2) / 2.0, 1e-15);
    EXPECT_NEAR(f.coefficients[1].real(), (1.0 + kSqrt2) / 2.0, 1e-15);
    EXPECT_EQ(f.wavenumbers[0], -1.0);
    EXPECT_EQ(f.wavenumbers[1], 1.0);
}

TEST(BuildSuperoscillation, CoefficientsSumToOne) {
    for (const SuperoscSpec spec : {SuperoscSpec{kSqrt2, 20, 1.0}, SuperoscSpec{4.0, 13, 2.0},
                                    SuperoscSpec{0.3, 7, 1.0}}) {
        const FourierSum f = build_superoscillation(spec);
        Amplitude sum{0, 0};
        for (const Amplitude& c : f.coefficients) sum += c;
        EXPECT_NEAR(std::abs(sum - Amplitude{1, 0}), 0.0, 1e-12);
        for (double k : f.wavenumbers) EXPECT_LE(std::abs(k), 1.0 + 1e-12);
    }
    // complex weak values enter through the advanced constructor
    const FourierSum g = build_superoscillation(Amplitude{0, 1}, 9);
    Amplitude sum{0, 0}, slope{0, 0};
    for (std::size_t n = 0; n < g.coefficients.size(); ++n) {
        sum += g.coefficients[n];
        slope += g.coefficients[n] * g.wavenumbers[n];
    }
    EXPECT_NEAR(std::abs(sum - Amplitude{1, 0}), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(slope - Amplitude{0, 1}), 0.0, 1e-12);  // sum c_n k_n = alpha
}

TEST(BuildSuperoscillation, MatchesExactRingArithmeticAtSqrt2) {
    const int N = 20;
    const FourierSum f = build_superoscillation({kSqrt2, N, 1.0});
    const long double root = std::sqrt(2.0L);
    long double max_coeff = 0.0L;
    for (int n = 0; n <= N; ++n) {
        const auto [p, q] = z_sqrt2_power(n, N - n);
        const long double exact =
                (long double)(binomial_u64(N, n)) * ((long double)p + (long double)q * root) /
                1048576.0L;  // 2^20
        EXPECT_NEAR(f.coefficients[n].real(), double(exact),
                    1e-12 * std::max(1.0, std::abs(double(exact))))
                << "n=" << n;
        max_coeff = std::max(max_coeff, std::abs(exact));
    }
    double max_built = 0.0;
    for (const Amplitude& c : f.coefficients) max_built = std::max(max_built, std::abs(c));
    EXPECT_NEAR(max_built, double(max_coeff), 1e-12 * double(max_coeff));
}

TEST(BuildSuperoscillation, SignOscillationAboveTheBand) {
    const FourierSum f = build_superoscillation({kSqrt2, 20, 1.0});
    int sign_changes = 0;
    for (std::size_t n = 1; n < f.coefficients.size(); ++n)
        if (f.coefficients[n - 1].real() * f.coefficients[n].real() < 0.0) ++sign_changes;
    EXPECT_GE(sign_changes, 1);
}

TEST(Evaluate, ReproducesTargetToneOnTheSuperoscillationWindow) {
    const FourierSum f = build_superoscillation({kSqrt2, 20, 1.0});
    std::vector<double> xs(2001);
    for (int i = 0; i < 2001; ++i) xs[i] = -1.0 + 2.0 * i / 2000.0;
    const auto vals = evaluate(f, xs);
    double worst = 0.0;
    for (int i = 0; i < 2001; ++i) {
        const Amplitude target{std::cos(kSqrt2 * xs[i]), std::sin(kSqrt2 * xs[i])};
        worst = std::max(worst, std::abs(vals[i] - target));
    }
    EXPECT_LE(worst, 0.05);
    EXPECT_NEAR(worst, 0.0252898900903109, 1e-9);  // 60-digit evaluation of the same grid
}

TEST(Evaluate, ExponentialGrowthOutsideTheWindow) {
    const FourierSum f = build_superoscillation({4.0, 20, 1.0});
    std::vector<double> xs;
    for (double x = 0.0; x <= 20.0 * std::numbers::pi / 2.0; x += 0.01) xs.push_back(x);
    const auto vals = evaluate(f, xs);
    double peak = 0.0;
    bool beyond_ten = false;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        peak = std::max(peak, std::abs(vals[i]));
        if (std::abs(vals[i]) > 10.0) beyond_ten = true;
    }
    EXPECT_TRUE(beyond_ten);
    EXPECT_GT(peak, 1e10);
}

TEST(LocalFrequency, PureToneAndCanonicalConstructions) {
    const FourierSum tone({Amplitude{1, 0}}, {0.7}, 1.0);
    for (double x : {-3.0, 0.0, 1.7}) EXPECT_NEAR(local_frequency(tone, x, 1e-4), 0.7, 1e-8);

    const FourierSum f2 = build_superoscillation({kSqrt2, 20, 1.0});
    EXPECT_NEAR(local_frequency(f2, 0.0, 1e-4), kSqrt2, 0.05);
    // analytic phase derivative at 0 is sum c_n k_n / sum c_n = alpha
    Amplitude num{0, 0}, den{0, 0};
    for (std::size_t n = 0; n < f2.coefficients.size(); ++n) {
        num += f2.coefficients[n] * f2.wavenumbers[n];
        den += f2.coefficients[n];
    }
    EXPECT_NEAR(local_frequency(f2, 0.0, 1e-4), (num / den).real(), 1e-6);

    const FourierSum f4 = build_superoscillation({4.0, 20, 1.0});
    EXPECT_NEAR(local_frequency(f4, 0.0, 1e-4), 4.0, 0.1);
}

TEST(LocalFrequency, ZeroModulusIsRejected) {
    // c = {1/2, -1/2} at the same wavenumber adds to the zero function
    const FourierSum zero({Amplitude{0.5, 0}, Amplitude{-0.5, 0}}, {1.0, 1.0}, 1.0);
    EXPECT_THROW(local_frequency(zero, 0.3, 1e-4), ZeroModulus);
}

// Band-limit property at quad precision: |k_n| <= 1 throughout, yet the
// local frequency at the origin reaches alpha = 10. The double path drowns
// in cancellation beyond alpha ~ 5, which is the point of the BigReal
// instantiation.
TEST(LocalFrequency, ReachesAlphaTenAtTwentyTerms) {
    for (double alpha : {2.0, 4.0, 10.0}) {
        const auto series = make_superosc_series<BigReal>(BigReal(alpha), 20, BigReal(1));
        for (double k_raw : std::vector<double>(series.wavenumbers.begin(),
                                                series.wavenumbers.end()))
            ASSERT_LE(std::abs(k_raw), 1.0 + 1e-12);
        const double freq = double(series_local_frequency(series, BigReal(0), BigReal(1e-4)));
        EXPECT_NEAR(freq, alpha, 0.05 * alpha) << "alpha=" << alpha;
    }
}

// Term-by-term consistency with the meter module: the collective readout
// amplitudes for measuring sigma_xi on N pre/post-selected spins are
// <up_y|up_x>^N c_n with the same binomial coefficients at alpha = A_w.
TEST(MeterConsistency, CollectiveAmplitudesShareTheBinomialCoefficients) {
    const int N = 20;
    const PrePostEnsemble ens(states::up_x(), states::up_y());
    const Amplitude aw = weak_value(ens, states::sigma_xi());
    const FourierSum f = build_superoscillation({aw.real(), N, 1.0});

    const auto terms = collective_shift_amplitudes(N, states::up_x(), states::up_y(),
                                                   states::sigma_xi());
    ASSERT_EQ(terms.size(), std::size_t(N + 1));
    Amplitude overlap_pow{1, 0};
    for (int i = 0; i < N; ++i) overlap_pow *= inner_product(states::up_y(), states::up_x());
    for (int n = 0; n <= N; ++n) {
        EXPECT_NEAR(terms[n].first, double(2 * n - N) / double(N), 1e-12);
        EXPECT_LT(std::abs(terms[n].second - overlap_pow * f.coefficients[n]), 1e-12);
    }
}

// --- shift superposition ---

TEST(ShiftSuperposition, SingleExactShiftIsPerfect) {
    GaussianPulse<double> pulse{12.0};
    const double err = shifted_sum_max_error<double>({1.0}, {10.0}, pulse, 10.0, 0.0, 20.0, 201);
    EXPECT_EQ(err, 0.0);
}

// Frozen demonstration: width-12 Gaussian, 14 shifts inside [0,1], target
// shift 10, window [0,20] at 801 points. Expected errors computed once with
// 60-digit arithmetic on the identical grid.
TEST(ShiftSuperposition, ReconstructsDistantShiftFromUnitShifts) {
    const double err13 = shift_demo_error(13);
    EXPECT_LE(err13, 0.1);  // visual-match quality: one tenth of max|f| = 1
    EXPECT_NEAR(err13, 0.0514371649910003, 1e-8);

    const double err8 = shift_demo_error(8);
    const double err14 = shift_demo_error(14);
    const double err20 = shift_demo_error(20);
    EXPECT_NEAR(err8, 0.0865598283163429, 1e-8);
    EXPECT_NEAR(err14, 0.047552301652858, 1e-8);
    EXPECT_NEAR(err20, 0.0326945260892875, 1e-8);
    EXPECT_GT(err8, err14);
    EXPECT_GT(err14, err20);
}

TEST(ShiftSuperposition, InteriorTargetConvergesFaster) {
    for (int n : {8, 14, 20}) {
        const double interior = shift_demo_error(n, 0.7);
        const double outside = shift_demo_error(n, 10.0);
        EXPECT_LT(interior, outside) << "n=" << n;
        EXPECT_LT(interior, 2e-4) << "n=" << n;
    }
}

TEST(ShiftSuperposition, AffineMapRoundTrip) {
    const AffineShiftMap map{};
    EXPECT_NEAR(map.apply(-1.0), 0.0, 1e-15);
    EXPECT_NEAR(map.apply(1.0), 1.0, 1e-15);
    EXPECT_NEAR(map.invert(10.0), 19.0, 1e-12);
}
