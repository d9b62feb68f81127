#include "cgl/model.hpp"

#include "cgl/systems.hpp"
#include "testutil.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace cgl;
using testutil::TwoDClosedForm;

namespace {

void check_map_invariants(const CoarseGrainingMap& cg) {
    const Eigen::Index n = cg.n(), m = cg.m(), full = cg.full_dim();
    CHECK((cg.phi * cg.phi.transpose() - Matrix::Identity(n, n)).norm() < 1e-10);
    if (m > 0) {
        CHECK((cg.psi * cg.psi.transpose() - Matrix::Identity(m, m)).norm() < 1e-10);
        CHECK((cg.phi * cg.psi.transpose()).norm() < 1e-10);
    }
    const Matrix resolution =
        cg.phi.transpose() * cg.phi +
        (m > 0 ? Matrix(cg.psi.transpose() * cg.psi) : Matrix(Matrix::Zero(full, full)));
    CHECK((resolution - Matrix::Identity(full, full)).norm() < 1e-10);
}

}  // namespace

TEST_SUITE_BEGIN("model");

TEST_CASE("normalize_map scaling and equal-weight rows") {
    const CoarseGrainingMap scaled = normalize_map((Matrix(1, 2) << 2.0, 0.0).finished());
    CHECK(scaled.phi(0, 0) == doctest::Approx(1.0));
    CHECK(scaled.phi(0, 1) == doctest::Approx(0.0));
    CHECK(std::abs(scaled.psi(0, 1)) == doctest::Approx(1.0));
    CHECK(scaled.psi(0, 0) == doctest::Approx(0.0));

    const double s = std::sqrt(2.0) / 2.0;
    const CoarseGrainingMap equal = normalize_map((Matrix(1, 2) << 1.0, 1.0).finished());
    CHECK(equal.phi(0, 0) == doctest::Approx(s));
    CHECK(equal.phi(0, 1) == doctest::Approx(s));
    // psi determined up to sign
    CHECK(std::abs(equal.psi(0, 0)) == doctest::Approx(s));
    CHECK(std::abs(equal.psi(0, 1)) == doctest::Approx(s));
    CHECK(equal.psi(0, 0) * equal.psi(0, 1) < 0.0);
}

TEST_CASE("normalize_map invariants and projector idempotence in R^10") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 20; ++trial) {
        Matrix raw(2, 10);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 10; ++j) raw(i, j) = gauss(rng);
        }
        const CoarseGrainingMap cg = normalize_map(raw);
        check_map_invariants(cg);
        const Matrix p = cg.phi.transpose() * cg.phi;
        CHECK((p * p - p).norm() < 1e-10);
    }
}

TEST_CASE("normalize_map rejects rank-deficient rows and is idempotent") {
    Matrix dup(2, 3);
    dup << 1.0, 2.0, 3.0, 2.0, 4.0, 6.0;
    CHECK_THROWS_WITH_AS(normalize_map(dup), doctest::Contains("rank"), std::invalid_argument);

    std::mt19937_64 rng(37);
    const Matrix raw = random_orthonormal_rows(3, 7, rng) * 2.7;
    const CoarseGrainingMap once = normalize_map(raw);
    const CoarseGrainingMap twice = normalize_map(once.phi);
    const Matrix p1 = once.phi.transpose() * once.phi;
    const Matrix p2 = twice.phi.transpose() * twice.phi;
    CHECK((p1 - p2).norm() < 1e-10);
}

TEST_CASE("normalize_map accepts n == N with empty complement") {
    const CoarseGrainingMap cg = normalize_map(Matrix::Identity(3, 3) * 1.5);
    CHECK(cg.m() == 0);
    check_map_invariants(cg);
}

TEST_CASE("block_decompose on the 2D family") {
    SUBCASE("eigen-aligned map") {
        auto [sys, cg] = build_2d(TwoDSpec{2.0, 0.0}, 1.0);
        const BlockDecomposition bd = block_decompose(sys, cg);
        CHECK(bd.a0.m(0, 0) == doctest::Approx(1.0));
        CHECK(bd.alpha(0, 0) == doctest::Approx(0.0));
        CHECK(bd.a1.m(0, 0) == doctest::Approx(2.0));
    }
    SUBCASE("diagonal map at pi/4") {
        auto [sys, cg] = build_2d(TwoDSpec{2.0, M_PI / 4.0}, 1.0);
        const BlockDecomposition bd = block_decompose(sys, cg);
        CHECK(bd.a0.m(0, 0) == doctest::Approx(1.5));
        CHECK(bd.alpha(0, 0) == doctest::Approx(0.5));
        CHECK(bd.a1.m(0, 0) == doctest::Approx(1.5));
    }
    SUBCASE("alpha closed form across angles") {
        for (double lambda : {1.0, 2.0, 7.5, 40.0}) {
            for (double theta : {-1.2, -0.3, 0.1, 0.7, 1.4}) {
                auto [sys, cg] = build_2d(TwoDSpec{lambda, theta}, 1.0);
                const BlockDecomposition bd = block_decompose(sys, cg);
                const TwoDClosedForm cf(lambda, theta);
                CHECK(bd.alpha(0, 0) == doctest::Approx(cf.alpha()).epsilon(1e-12));
                CHECK(bd.a0.m(0, 0) == doctest::Approx(cf.a0()).epsilon(1e-12));
                CHECK(bd.a1.m(0, 0) == doctest::Approx(cf.a1()).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("effective_matrices") {
    SUBCASE("decoupled block gives b = a0 and c = I") {
        std::mt19937_64 rng(41);
        BlockDecomposition bd;
        bd.a0 = random_spd(3, rng);
        bd.a1 = random_spd(4, rng);
        bd.alpha = Matrix::Zero(3, 4);
        const auto [b, c] = effective_matrices(bd);
        CHECK((b.m - bd.a0.m).norm() < 1e-12);
        CHECK((c.m - Matrix::Identity(3, 3)).norm() < 1e-12);
    }
    SUBCASE("2D closed forms") {
        auto [sys, cg] = build_2d(TwoDSpec{2.0, M_PI / 4.0}, 1.0);
        const auto [b, c] = effective_matrices(block_decompose(sys, cg));
        CHECK(b.m(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
        CHECK(c.m(0, 0) == doctest::Approx(0.9).epsilon(1e-12));
    }
    SUBCASE("general (lambda, theta) closed forms") {
        for (double lambda : {1.5, 3.0, 20.0, 400.0}) {
            for (double theta : {-0.9, -0.2, 0.05, 0.45, 1.1}) {
                auto [sys, cg] = build_2d(TwoDSpec{lambda, theta}, 1.0);
                const auto [b, c] = effective_matrices(block_decompose(sys, cg));
                const TwoDClosedForm cf(lambda, theta);
                CHECK(b.m(0, 0) == doctest::Approx(cf.b()).epsilon(1e-12));
                CHECK(c.m(0, 0) == doctest::Approx(cf.c()).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("Schur identity: phi A^{-1} phi^T equals B^{-1}") {
    std::mt19937_64 rng(43);
    std::uniform_int_distribution<int> dim_dist(2, 50);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index full = dim_dist(rng);
        const Eigen::Index n =
            std::uniform_int_distribution<int>(1, static_cast<int>(full) - 1)(rng);
        const SystemSpec sys = make_system(random_spd(full, rng), 1.0);
        const CoarseGrainingMap cg = normalize_map(random_orthonormal_rows(n, full, rng));
        const auto [b, c] = effective_matrices(block_decompose(sys, cg));
        const Matrix lhs = cg.phi * inverse_spd(sys.a).m * cg.phi.transpose();
        const Matrix rhs = inverse_spd(b).m;
        CHECK((lhs - rhs).norm() / rhs.norm() < 1e-9);
    }
}

TEST_CASE("Loewner sandwich 0 < B <= A0 and 0 < C <= I") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index full = std::uniform_int_distribution<int>(3, 12)(rng);
        const Eigen::Index n =
            std::uniform_int_distribution<int>(1, static_cast<int>(full) - 1)(rng);
        const SystemSpec sys = make_system(random_spd(full, rng), 1.0);
        const CoarseGrainingMap cg = normalize_map(random_orthonormal_rows(n, full, rng));
        const BlockDecomposition bd = block_decompose(sys, cg);
        const auto [b, c] = effective_matrices(bd);
        const SymMatrix zero(Matrix::Zero(n, n));
        CHECK(loewner_geq(b, zero, -1e-12));  // strictly positive
        CHECK(loewner_geq(bd.a0, b, 1e-10));
        CHECK(loewner_geq(c, zero, -1e-12));
        CHECK(loewner_geq(SymMatrix::identity(n), c, 1e-10));
    }
}

TEST_CASE("build_reduced per approach") {
    SUBCASE("aligned map collapses all approaches") {
        auto [sys, cg] = build_2d(TwoDSpec{5.0, 0.0}, 1.0);
        const ReducedModel m0 = build_reduced(sys, cg, Approach::zero);
        const ReducedModel m1 = build_reduced(sys, cg, Approach::one);
        const ReducedModel m2 = build_reduced(sys, cg, Approach::two);
        CHECK(m0.drift(0, 0) == doctest::Approx(1.0));
        CHECK((m0.drift - m1.drift).norm() < 1e-12);
        CHECK((m1.drift - m2.drift).norm() < 1e-12);
        CHECK((m2.noise_factor.m - Matrix::Identity(1, 1)).norm() < 1e-12);
    }
    SUBCASE("approach 2 drift and noise factor") {
        auto [sys, cg] = build_2d(TwoDSpec{2.0, M_PI / 4.0}, 1.0);
        const ReducedModel m2 = build_reduced(sys, cg, Approach::two);
        CHECK(m2.drift(0, 0) == doctest::Approx(1.2).epsilon(1e-12));
        CHECK(m2.noise_factor.m(0, 0) == doctest::Approx(std::sqrt(0.9)).epsilon(1e-12));
        // drift * B^{-1} = C stays symmetric
        const Matrix check = m2.drift * inverse_spd(m2.b).m;
        CHECK((check - check.transpose()).norm() < 1e-9);
    }
    SUBCASE("stationary covariance solves the Lyapunov equation") {
        std::mt19937_64 rng(53);
        for (int trial = 0; trial < 10; ++trial) {
            const SystemSpec sys = make_system(random_spd(6, rng), 2.0);
            const CoarseGrainingMap cg = normalize_map(random_orthonormal_rows(3, 6, rng));
            for (Approach approach : {Approach::one, Approach::two}) {
                const ReducedModel model = build_reduced(sys, cg, approach);
                // D X + X D^T = (2/beta) factor factor^T
                const Matrix noise_cov = (2.0 / model.beta) * model.noise_factor.m *
                                         model.noise_factor.m.transpose();
                const Matrix stat = testutil::lyapunov_solve(model.drift, noise_cov);
                const Matrix expected = inverse_spd(model.b).m / model.beta;
                CHECK((stat - expected).norm() / expected.norm() < 1e-9);
            }
        }
    }
    SUBCASE("zeta0 length is validated") {
        auto [sys, cg] = build_2d(TwoDSpec{3.0, 0.4}, 1.0);
        CHECK_THROWS_AS(build_reduced(sys, cg, Approach::one, Vector(Vector::Zero(2))),
                        std::invalid_argument);
        const ReducedModel ok = build_reduced(sys, cg, Approach::one, Vector(Vector::Zero(1)));
        CHECK(ok.memory.has_value());
    }
}

TEST_CASE("check_eigenspace_alignment") {
    auto [sys0, cg0] = build_2d(TwoDSpec{2.0, 0.0}, 1.0);
    CHECK(check_eigenspace_alignment(sys0, cg0, 1e-10));

    auto [sys1, cg1] = build_2d(TwoDSpec{20.0, 0.3}, 1.0);
    CHECK_FALSE(check_eigenspace_alignment(sys1, cg1, 1e-10));

    // rows spanning exact eigenvectors of a random 5D SPD matrix
    std::mt19937_64 rng(59);
    const SymMatrix a = random_spd(5, rng);
    const SpectralDecomp sd = spectral_decompose(a);
    Matrix raw(2, 5);
    raw.row(0) = sd.q.col(1).transpose();
    raw.row(1) = sd.q.col(3).transpose();
    const SystemSpec sys = make_system(a, 1.0);
    const CoarseGrainingMap cg = normalize_map(raw);
    CHECK(check_eigenspace_alignment(sys, cg, 1e-9));
    const auto [b, c] = effective_matrices(block_decompose(sys, cg));
    const BlockDecomposition bd = block_decompose(sys, cg);
    CHECK((b.m - bd.a0.m).norm() < 1e-9);
}

TEST_CASE("alignment collapse: aligned maps give identical drifts") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 10; ++trial) {
        const SymMatrix a = random_spd(6, rng);
        const SpectralDecomp sd = spectral_decompose(a);
        Matrix raw(2, 6);
        raw.row(0) = sd.q.col(0).transpose();
        raw.row(1) = sd.q.col(4).transpose();
        const SystemSpec sys = make_system(a, 1.0);
        const CoarseGrainingMap cg = normalize_map(raw);
        REQUIRE(check_eigenspace_alignment(sys, cg, 1e-9));
        const ReducedModel m0 = build_reduced(sys, cg, Approach::zero);
        const ReducedModel m1 = build_reduced(sys, cg, Approach::one);
        const ReducedModel m2 = build_reduced(sys, cg, Approach::two);
        CHECK((m0.drift - m1.drift).norm() < 1e-9);
        CHECK((m1.drift - m2.drift).norm() < 1e-9);
    }
}

TEST_CASE("statistics are invariant under the choice of complement") {
    // Rotating psi by any orthogonal matrix must leave B, C and the
    // forcing sequence unchanged.
    std::mt19937_64 rng(67);
    const SystemSpec sys = make_system(random_spd(7, rng), 1.0);
    const CoarseGrainingMap cg = normalize_map(random_orthonormal_rows(2, 7, rng));
    const Matrix rot = random_orthonormal_rows(5, 5, rng);
    CoarseGrainingMap rotated = cg;
    rotated.psi = rot * cg.psi;

    const Vector q0 = Vector::LinSpaced(7, -1.0, 2.0);
    const auto forcing_at = [&](const CoarseGrainingMap& map, double t) {
        const BlockDecomposition bd = block_decompose(sys, map);
        const Vector zeta0 = map.psi * q0;
        return Matrix(bd.alpha * expm_scaled(bd.a1, t).m * zeta0);
    };

    const auto [b1, c1] = effective_matrices(block_decompose(sys, cg));
    const auto [b2, c2] = effective_matrices(block_decompose(sys, rotated));
    CHECK((b1.m - b2.m).norm() < 1e-10);
    CHECK((c1.m - c2.m).norm() < 1e-10);
    for (double t : {0.0, 0.37, 2.1}) {
        CHECK((forcing_at(cg, t) - forcing_at(rotated, t)).norm() < 1e-10);
    }
}

TEST_CASE("default_zeta0 matches -A1^{-1} alpha^T xi0") {
    auto [sys, cg] = build_2d(TwoDSpec{20.0, 0.3}, 1.0);
    const BlockDecomposition bd = block_decompose(sys, cg);
    const Vector xi0 = Vector::Constant(1, 5.0 * std::cos(0.3) - 4.0 * std::sin(0.3));
    const Vector zeta0 = default_zeta0(bd, xi0);
    CHECK(zeta0(0) ==
          doctest::Approx(-bd.alpha(0, 0) / bd.a1.m(0, 0) * xi0(0)).epsilon(1e-12));
}

TEST_SUITE_END();
