#include <doctest.h>

#include <cmath>

#include "bandflow/banded_matrix.hpp"
#include "bandflow/errors.hpp"
#include "test_support.hpp"

using namespace bandflow;

TEST_CASE("entries outside the band read as exact zeros") {
    BandedSymmetricMatrix h(5, 1);
    h.set(1, 2, 3.5);
    CHECK(h.get(2, 1) == 3.5);
    CHECK(h.get(0, 4) == 0.0);
    CHECK(h.get(4, 0) == 0.0);
    CHECK_THROWS_AS(h.set(0, 2, 1.0), InputError);
    CHECK_THROWS_AS(h.get(5, 0), InputError);
    CHECK_THROWS_AS(h.set(0, 0, std::nan("")), InputError);
}

TEST_CASE("constructor rejects empty matrices and too-wide bands") {
    CHECK_THROWS_AS(BandedSymmetricMatrix(0, 0), InputError);
    CHECK_THROWS_AS(BandedSymmetricMatrix(3, 3), InputError);
    CHECK_NOTHROW(BandedSymmetricMatrix(3, 2));
}

TEST_CASE("bands are laid out back to back") {
    BandedSymmetricMatrix h(4, 2);
    CHECK(h.values().size() == 4 + 3 + 2);
    h.set(2, 3, 7.0);
    h.set(0, 2, 9.0);
    CHECK(h.band(1)[2] == 7.0);
    CHECK(h.band(2)[0] == 9.0);
    CHECK(h.values()[4 + 2] == 7.0);
    CHECK(h.values()[7] == 9.0);
}

TEST_CASE("make_banded accepts either triangle and rejects conflicts") {
    auto h = make_banded(3, 1, {{{0, 0}, 1.0}, {{1, 0}, 2.0}, {{1, 2}, 4.0}});
    CHECK(h.get(0, 1) == 2.0);
    CHECK(h.get(2, 1) == 4.0);
    CHECK_NOTHROW(make_banded(3, 1, {{{0, 1}, 2.0}, {{1, 0}, 2.0}}));
    CHECK_THROWS_AS(make_banded(3, 1, {{{0, 1}, 2.0}, {{1, 0}, 2.5}}), InputError);
    CHECK_THROWS_AS(make_banded(3, 1, {{{0, 2}, 1.0}}), InputError);
}

TEST_CASE("dense round trip finds the smallest bandwidth") {
    const auto h = testsupport::random_banded(7, 2, 11);
    const DenseMatrix d = h.to_dense();
    const auto back = from_dense(d);
    CHECK(back.bandwidth() == 2);
    CHECK(back == h);
    DenseMatrix asym = d;
    asym(0, 1) += 1e-3;
    CHECK_THROWS_AS(from_dense(asym), InputError);
    CHECK_NOTHROW(from_dense(asym, 1e-2));
}

TEST_CASE("norms and traces") {
    const auto h = BandedSymmetricMatrix::tridiagonal(std::vector<double>{1, 2, 3}, std::vector<double>{1, -2});
    CHECK(trace(h) == 6.0);
    CHECK(frobenius_norm_sq(h) == doctest::Approx(1 + 4 + 9 + 2 * (1 + 4)));
    CHECK(offdiag_norm_sq(h) == doctest::Approx(10.0));
    CHECK(partial_trace(h, 1) == 1.0);
    CHECK(partial_trace(h, 2) == 3.0);
    CHECK(partial_trace(h, 3) == 6.0);
    CHECK_THROWS_AS(partial_trace(h, 0), InputError);
    CHECK_THROWS_AS(partial_trace(h, 4), InputError);
}

TEST_CASE("widening keeps every entry") {
    const auto h = testsupport::random_banded(6, 1, 3);
    const auto w = h.widened(4);
    CHECK(w.bandwidth() == 4);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) CHECK(w.get(i, j) == h.get(i, j));
}

TEST_CASE("irreducible blocks are cut only where no coupling crosses") {
    SUBCASE("tridiagonal with a zero coupling") {
        const auto h = BandedSymmetricMatrix::tridiagonal(std::vector<double>{1, 2, 3, 4},
                                                          std::vector<double>{1, 0, 1});
        const auto blocks = split_irreducible(h);
        REQUIRE(blocks.size() == 2);
        CHECK(blocks[0] == IrreducibleBlock{0, 2});
        CHECK(blocks[1] == IrreducibleBlock{2, 4});
    }
    SUBCASE("a longer coupling bridges a zero neighbour") {
        BandedSymmetricMatrix h(4, 2);
        h.set(0, 1, 1.0);
        h.set(1, 3, 1.0);
        const auto blocks = split_irreducible(h);
        REQUIRE(blocks.size() == 1);
        CHECK(blocks[0] == IrreducibleBlock{0, 4});
    }
    SUBCASE("diagonal matrices split into singletons") {
        const auto h = BandedSymmetricMatrix::diagonal(std::vector<double>{3, 1, 2});
        CHECK(split_irreducible(h).size() == 3);
    }
}

TEST_CASE("extract and insert blocks") {
    auto h = testsupport::random_banded(8, 2, 5);
    const IrreducibleBlock b{2, 6};
    auto sub = extract_block(h, b);
    CHECK(sub.dim() == 4);
    CHECK(sub.get(0, 2) == h.get(2, 4));
    sub.set(1, 1, 42.0);
    insert_block(h, sub, b);
    CHECK(h.get(3, 3) == 42.0);

    auto tiny = extract_block(h, {0, 2});
    CHECK(tiny.bandwidth() == 1);

    BandedSymmetricMatrix wide(4, 3);
    wide.set(0, 3, 1.0);
    CHECK_THROWS_AS(insert_block(h, wide, b), InputError);
}
