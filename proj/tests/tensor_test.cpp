#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "its/tensor.hpp"

using namespace its;

namespace {

// Reduces any tensor to a scalar with fixed weights so gradient errors
// cannot cancel the way a plain mean would let them.
Tensor weighted_sum(const Tensor& t, const Tensor& w) {
    const Tensor flat = reshape(t, {t.size()});
    return scale(mean(mul(flat, w)), static_cast<double>(t.size()));
}

Tensor random_tensor(const Shape& shape, RngState& rng) {
    return Tensor::uniform(shape, -2.0, 2.0, rng);
}

void check_primitive_gradient(const std::function<Tensor(Tape&, const Tensor&)>& f,
                              const Tensor& point, double tol = 1e-5) {
    const GradCheckReport report = grad_check(f, point, 1e-5, tol);
    INFO(report.table());
    CHECK(report.passed);
}

}  // namespace

TEST_CASE("forward values of elementwise primitives") {
    CHECK(sigmoid(Tensor::scalar(0.0)).value() == doctest::Approx(0.5));
    CHECK(its::tanh(Tensor::scalar(0.0)).value() == doctest::Approx(0.0));

    const Tensor s = softmax(Tensor::from_vector({0.0, std::log(3.0)}));
    CHECK(s(0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(s(1) == doctest::Approx(0.75).epsilon(1e-12));

    const Tensor a = add(Tensor::from_vector({1, 2}), Tensor::from_vector({3, 4}));
    CHECK(a(0) == 4.0);
    CHECK(a(1) == 6.0);
}

TEST_CASE("matmul against identity and known products") {
    RowMatrix m(2, 2);
    m << 1, 2, 3, 4;
    RowMatrix eye = RowMatrix::Identity(2, 2);
    const Tensor out = matmul(Tensor::from_matrix(m), Tensor::from_matrix(eye));
    CHECK(out(0, 0) == 1.0);
    CHECK(out(0, 1) == 2.0);
    CHECK(out(1, 0) == 3.0);
    CHECK(out(1, 1) == 4.0);

    const Tensor v = matmul(Tensor::from_matrix(m), Tensor::from_vector({1.0, 1.0}));
    CHECK(v(0) == 3.0);
    CHECK(v(1) == 7.0);
}

TEST_CASE("shape mismatches name the primitive and both shapes") {
    const Tensor a = Tensor::zeros({2, 3});
    const Tensor b = Tensor::zeros({4, 5});
    try {
        matmul(a, b);
        FAIL("expected shape error");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("matmul") != std::string::npos);
        CHECK(msg.find("[2 x 3]") != std::string::npos);
        CHECK(msg.find("[4 x 5]") != std::string::npos);
    }
    CHECK_THROWS_AS(add(a, b), std::invalid_argument);
    CHECK_THROWS_AS(mul(a, Tensor::zeros({2, 4})), std::invalid_argument);
}

TEST_CASE("backward on simple compositions") {
    SUBCASE("d(x*x)/dx at 3 is 6") {
        Tape tape;
        const Tensor x = tape.watch(Tensor::scalar(3.0));
        const Tensor y = mul(x, x);
        CHECK(tape.backward(y).at(x).value() == doctest::Approx(6.0));
    }
    SUBCASE("d(sigmoid)/dx at 0 is 0.25") {
        Tape tape;
        const Tensor x = tape.watch(Tensor::scalar(0.0));
        const Tensor y = sigmoid(x);
        CHECK(tape.backward(y).at(x).value() == doctest::Approx(0.25));
    }
    SUBCASE("untouched leaves read back as zero gradient") {
        Tape tape;
        const Tensor used = tape.watch(Tensor::scalar(2.0));
        const Tensor unused = tape.watch(Tensor::from_vector({1.0, 2.0, 3.0}));
        const Tensor y = mul(used, used);
        const GradientMap grads = tape.backward(y);
        CHECK_FALSE(grads.touched(unused));
        const Tensor zero = grads.at(unused);
        CHECK(zero.size() == 3);
        CHECK(zero.array().abs().maxCoeff() == 0.0);
    }
}

TEST_CASE("backward error paths") {
    Tape tape;
    CHECK_THROWS_AS(tape.backward(Tensor::scalar(1.0)), std::invalid_argument);
    const Tensor v = tape.watch(Tensor::from_vector({1.0, 2.0}));
    CHECK_THROWS_AS(tape.backward(v), std::invalid_argument);
}

TEST_CASE("grad_check worked examples") {
    SUBCASE("sum of squares at [1,2]") {
        const auto f = [](Tape&, const Tensor& x) { return sum_squares(x); };
        const GradCheckReport report = grad_check(f, Tensor::from_vector({1.0, 2.0}), 1e-5, 1e-7);
        CHECK(report.passed);
        CHECK(report.rows[0].analytic == doctest::Approx(2.0));
        CHECK(report.rows[1].analytic == doctest::Approx(4.0));
        CHECK(report.max_rel_err < 1e-7);
        CHECK(report.table().find("PASS") != std::string::npos);
    }
    SUBCASE("constant function has zero gradient everywhere") {
        const auto f = [](Tape&, const Tensor& x) {
            return mul(mean(x), Tensor::scalar(0.0));
        };
        const GradCheckReport report = grad_check(f, Tensor::from_vector({0.3, -0.7}), 1e-5, 1e-9);
        CHECK(report.passed);
        CHECK(report.rows[0].analytic == 0.0);
        CHECK(report.rows[1].analytic == 0.0);
    }
    SUBCASE("sum of tanh at 0 has gradient 1") {
        const auto f = [](Tape&, const Tensor& x) {
            return scale(mean(its::tanh(x)), static_cast<double>(x.size()));
        };
        const GradCheckReport report = grad_check(f, Tensor::from_vector({0.0}), 1e-5, 1e-7);
        CHECK(report.passed);
        CHECK(report.rows[0].analytic == doctest::Approx(1.0));
    }
    SUBCASE("non-scalar f is rejected") {
        const auto f = [](Tape&, const Tensor& x) { return add(x, x); };
        CHECK_THROWS_AS(grad_check(f, Tensor::from_vector({1.0, 2.0}), 1e-5, 1e-5),
                        std::invalid_argument);
    }
}

TEST_CASE("finite differences validate every primitive at random points") {
    RngState rng(20240817);
    const Shape vec{5};
    const Shape mat{3, 4};

    for (int trial = 0; trial < 3; ++trial) {
        const Tensor wv = random_tensor(vec, rng);
        const Tensor wm = random_tensor({12}, rng);
        const Tensor other_v = random_tensor(vec, rng);
        const Tensor other_m = random_tensor(mat, rng);

        check_primitive_gradient(
            [&](Tape&, const Tensor& x) { return weighted_sum(add(x, other_v), wv); },
            random_tensor(vec, rng));
        check_primitive_gradient(
            [&](Tape&, const Tensor& x) { return weighted_sum(sub(other_v, x), wv); },
            random_tensor(vec, rng));
        check_primitive_gradient(
            [&](Tape&, const Tensor& x) { return weighted_sum(mul(x, other_v), wv); },
            random_tensor(vec, rng));
        check_primitive_gradient(
            [&](Tape&, const Tensor& x) { return weighted_sum(scale(x, -1.7), wv); },
            random_tensor(vec, rng));
        check_primitive_gradient(
            [&](Tape&, const Tensor& x) { return weighted_sum(sigmoid(x), wv); },
            random_tensor(vec, rng));
        check_primitive_gradient(
            [&](Tape&, const Tensor& x) { return weighted_sum(its::tanh(x), wv); },
            random_tensor(vec, rng));
        check_primitive_gradient(
            [&](Tape&, const Tensor& x) { return weighted_sum(its::exp(x), wv); },
            random_tensor(vec, rng));
        // log needs positive inputs.
        check_primitive_gradient(
            [&](Tape&, const Tensor& x) { return weighted_sum(its::log(x), wv); },
            Tensor::uniform(vec, 0.2, 2.0, rng));
        check_primitive_gradient(
            [&](Tape&, const Tensor& x) { return weighted_sum(softmax(x), wv); },
            random_tensor(vec, rng));
        check_primitive_gradient(
            [&](Tape&, const Tensor& x) { return weighted_sum(softmax(x, 0), wm); },
            random_tensor(mat, rng));
        check_primitive_gradient(
            [&](Tape&, const Tensor& x) { return weighted_sum(softmax(x, 1), wm); },
            random_tensor(mat, rng));
        check_primitive_gradient([&](Tape&, const Tensor& x) { return mean(x); },
                                 random_tensor(vec, rng));
        const Tensor w4 = random_tensor({4}, rng);
        const Tensor w3 = random_tensor({3}, rng);
        const Tensor w9 = random_tensor({9}, rng);
        const Tensor w10 = random_tensor({10}, rng);
        const Tensor w15 = random_tensor({15}, rng);
        check_primitive_gradient(
            [&](Tape&, const Tensor& x) { return weighted_sum(mean(x, 0), w4); },
            random_tensor(mat, rng));
        check_primitive_gradient(
            [&](Tape&, const Tensor& x) { return weighted_sum(mean(x, 1), w3); },
            random_tensor(mat, rng));
        check_primitive_gradient([&](Tape&, const Tensor& x) { return sum_squares(x); },
                                 random_tensor(mat, rng));
        check_primitive_gradient(
            [&](Tape&, const Tensor& x) { return weighted_sum(matmul(x, other_v), wv); },
            random_tensor({5, 5}, rng));
        check_primitive_gradient(
            [&](Tape&, const Tensor& x) { return weighted_sum(matmul(other_m, x), w9); },
            random_tensor({4, 3}, rng));
        check_primitive_gradient(
            [&](Tape&, const Tensor& x) {
                const Tensor parts[] = {x, other_v};
                return weighted_sum(concat(parts), w10);
            },
            random_tensor(vec, rng));
        check_primitive_gradient(
            [&](Tape&, const Tensor& x) {
                const Tensor rows[] = {x, other_v, x};
                return weighted_sum(stack_rows(rows), w15);
            },
            random_tensor(vec, rng));
        check_primitive_gradient(
            [&](Tape&, const Tensor& x) {
                const Index ids[] = {2, 0, 2};
                return weighted_sum(take_rows(x, ids), wm);
            },
            random_tensor(mat, rng));
        check_primitive_gradient(
            [&](Tape&, const Tensor& x) { return weighted_sum(reshape(x, {4, 3}), wm); },
            random_tensor(mat, rng));
        // Clamp points kept away from the boundary so the derivative exists.
        check_primitive_gradient(
            [&](Tape&, const Tensor& x) { return weighted_sum(clamp(x, -1.0, 1.0), wv); },
            Tensor::uniform(vec, -0.8, 0.8, rng));

        const Tensor mask = dropout_mask(vec, 0.6, rng);
        check_primitive_gradient(
            [&](Tape&, const Tensor& x) { return weighted_sum(dropout(x, 0.6, mask), wv); },
            random_tensor(vec, rng));
    }
}

TEST_CASE("mean-of-softmax composite matches finite differences tightly") {
    RngState rng(7);
    // Fixed weights keep the composite's gradient nonzero; an unweighted
    // mean of a softmax is constant.
    const Tensor w = random_tensor({12}, rng);
    const auto f = [&](Tape&, const Tensor& x) {
        return mean(mul(reshape(softmax(x, 0), {12}), w));
    };
    const GradCheckReport report = grad_check(f, random_tensor({3, 4}, rng), 1e-5, 1e-6);
    INFO(report.table());
    CHECK(report.passed);
}

TEST_CASE("softmax output is a distribution along its axis") {
    RngState rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const Tensor m = Tensor::uniform({4, 6}, -8.0, 8.0, rng);
        const Tensor s = softmax(m, 0);
        for (Index c = 0; c < 6; ++c) {
            double sum = 0.0;
            for (Index r = 0; r < 4; ++r) {
                const double v = s(r, c);
                CHECK(v > 0.0);
                CHECK(v < 1.0);
                sum += v;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("dropout behavior") {
    RngState rng(5);
    const Tensor x = random_tensor({6}, rng);

    SUBCASE("keep probability 1 is the identity") {
        const Tensor y = dropout(x, 1.0, Tensor());
        CHECK((y.array() == x.array()).all());
    }
    SUBCASE("a fixed mask makes forward and backward deterministic") {
        const Tensor mask = Tensor::from_vector({1, 0, 1, 1, 0, 1});
        const Tensor y1 = dropout(x, 0.5, mask);
        const Tensor y2 = dropout(x, 0.5, mask);
        CHECK((y1.array() == y2.array()).all());
        CHECK(y1(1) == 0.0);
        CHECK(y1(0) == x(0) * 2.0);

        Tape t1, t2;
        const Tensor a1 = t1.watch(x);
        const Tensor a2 = t2.watch(x);
        const Tensor g1 = t1.backward(mean(dropout(a1, 0.5, mask))).at(a1);
        const Tensor g2 = t2.backward(mean(dropout(a2, 0.5, mask))).at(a2);
        CHECK((g1.array() == g2.array()).all());
    }
    SUBCASE("invalid keep probability is rejected") {
        CHECK_THROWS_AS(dropout(x, 0.0, Tensor()), std::invalid_argument);
        CHECK_THROWS_AS(dropout(x, 1.5, Tensor()), std::invalid_argument);
    }
}

TEST_CASE("seeded runs are bit-identical") {
    const auto run = [] {
        RngState rng(1234);
        const Tensor x = Tensor::uniform({4, 4}, -1.0, 1.0, rng);
        const Tensor w = Tensor::uniform({4, 4}, -1.0, 1.0, rng);
        Tape tape;
        const Tensor wt = tape.watch(w);
        const Tensor loss = sum_squares(its::tanh(matmul(wt, x)));
        const GradientMap grads = tape.backward(loss);
        return std::pair{loss.value(), grads.at(wt).array().sum()};
    };
    const auto [l1, g1] = run();
    const auto [l2, g2] = run();
    CHECK(l1 == l2);
    CHECK(g1 == g2);
}

TEST_CASE("rng fork gives independent deterministic streams") {
    RngState a(10);
    RngState b(10);
    CHECK(a.fork(1).next_u64() == b.fork(1).next_u64());
    CHECK(a.fork(1).next_u64() != a.fork(2).next_u64());
}
