#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <map>

#include "iu/replay.hpp"

using namespace iu;
using replay::ReplayBuffer;
using replay::Transition;

namespace {

Transition make_t(double tag, int sdim = 3, int tdim = 2) {
    Transition t;
    t.s = Eigen::VectorXd::Constant(sdim, tag);
    t.a = Eigen::Vector2d(tag, -tag);
    t.r = Eigen::VectorXd::Constant(tdim, tag);
    t.s_next = Eigen::VectorXd::Constant(sdim, tag + 0.5);
    return t;
}

}  // namespace

TEST_CASE("push: FIFO eviction at capacity") {
    ReplayBuffer buf(2);
    buf.push(make_t(1));
    buf.push(make_t(2));
    buf.push(make_t(3));
    CHECK(buf.size() == 2);
    CHECK(buf.at_fifo(0).s(0) == 2.0);
    CHECK(buf.at_fifo(1).s(0) == 3.0);
}

TEST_CASE("push: into empty gives size 1") {
    ReplayBuffer buf(5);
    buf.push(make_t(1));
    CHECK(buf.size() == 1);
}

TEST_CASE("push: wrong reward length rejected") {
    ReplayBuffer buf(4);
    buf.push(make_t(1, 3, 2));
    CHECK_THROWS_AS(buf.push(make_t(2, 3, 5)), ShapeError);
    CHECK_THROWS_AS(buf.push(make_t(2, 7, 2)), ShapeError);
    // s / s_next disagreement is rejected even on the first push
    Transition bad = make_t(1, 3, 2);
    bad.s_next = Eigen::VectorXd::Zero(4);
    ReplayBuffer buf2(4);
    CHECK_THROWS_AS(buf2.push(bad), ShapeError);
}

TEST_CASE("sample: empty buffer rejected; size 1 returns that element") {
    ReplayBuffer buf(4);
    RandomStream rng(1);
    CHECK_THROWS_AS(buf.sample(4, rng), ConfigError);
    buf.push(make_t(9));
    for (const auto& t : buf.sample(8, rng)) CHECK(t.s(0) == 9.0);
}

TEST_CASE("sample: uniform over contents (chi-squared, 10 elements, 100k draws)") {
    ReplayBuffer buf(10);
    for (int i = 0; i < 10; ++i) buf.push(make_t(i));
    RandomStream rng(123);
    std::map<int, long> counts;
    const long n = 100000;
    for (long i = 0; i < n; ++i)
        counts[static_cast<int>(buf.sample_one(rng).s(0))] += 1;
    // chi^2 with 9 dof; reject only below p ~ 0.001 (chi2 > 27.88)
    double chi2 = 0.0;
    const double expect = n / 10.0;
    for (int i = 0; i < 10; ++i) {
        const double d = counts[i] - expect;
        chi2 += d * d / expect;
    }
    CHECK(chi2 < 27.88);
    // and every element within 3 sigma of p = 0.1
    const double sigma = std::sqrt(n * 0.1 * 0.9);
    for (int i = 0; i < 10; ++i) CHECK(std::abs(counts[i] - expect) < 3 * sigma + 1);
}

TEST_CASE("sample: fixed seed reproduces the sequence; copies are bitwise") {
    ReplayBuffer buf(8);
    for (int i = 0; i < 8; ++i) buf.push(make_t(i * 0.1));
    RandomStream r1(7), r2(7);
    const auto a = buf.sample(32, r1);
    const auto b = buf.sample(32, r2);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].s == b[i].s);
        CHECK(a[i].a == b[i].a);
        CHECK(a[i].r == b[i].r);
        CHECK(a[i].s_next == b[i].s_next);
    }
    // and each sampled transition matches a stored one exactly
    for (const auto& t : a) {
        bool found = false;
        for (std::size_t i = 0; i < buf.size(); ++i)
            if (buf.at_fifo(i).s == t.s && buf.at_fifo(i).s_next == t.s_next) found = true;
        CHECK(found);
    }
}

TEST_CASE("dump/restore round trip keeps FIFO order") {
    ReplayBuffer buf(3);
    for (int i = 0; i < 5; ++i) buf.push(make_t(i));  // holds 2,3,4
    ckpt::Container c;
    buf.dump(c, "replay");
    ReplayBuffer back = ReplayBuffer::restore(c, "replay");
    CHECK(back.size() == 3);
    CHECK(back.capacity() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(back.at_fifo(i).s == buf.at_fifo(i).s);
}
