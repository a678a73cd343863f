#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "tailbounds/bounds.hpp"
#include "tailbounds/errors.hpp"
#include "tailbounds/exact.hpp"

using namespace tailbounds;

namespace {

TailQuery geo(std::uint64_t n, double lambda, double mu, Side s) {
  return make_query(make_spec(Family::Geometric, mu), n, lambda, s);
}

TailQuery expo(std::uint64_t n, double lambda, Side s) {
  return make_query(make_spec(Family::Exponential, 1.0), n, lambda, s);
}

}  // namespace

TEST(Theorem1, FrozenValues) {
  EXPECT_NEAR(thm1_bound(geo(10, 2.0, 1.0, Side::Upper)).bound(), 0.18286806033409508387, 1e-14);
  EXPECT_NEAR(thm1_bound(expo(5, 2.0, Side::Upper)).bound(), 0.21561430397073494709, 1e-14);
  const auto r = thm1_bound(geo(10, 2.0, 1.0, Side::Upper));
  EXPECT_EQ(r.direction, Direction::UpperBoundsTail);
  EXPECT_TRUE(r.applicable);
  EXPECT_EQ(r.method, Method::Theorem1);
}

TEST(Theorem1, LambdaOneIsTrivial) {
  for (Side s : {Side::Upper, Side::Lower}) {
    EXPECT_EQ(thm1_bound(geo(7, 1.0, 2.0, s)).bound(), 1.0);
    EXPECT_EQ(thm1_bound(expo(7, 1.0, s)).bound(), 1.0);
  }
}

TEST(Theorem1, SideMismatchIsInapplicable) {
  const auto r = thm1_bound(geo(10, 0.5, 1.0, Side::Upper));
  EXPECT_FALSE(r.applicable);
  EXPECT_EQ(r.bound(), 1.0);
  EXPECT_NE(r.notes.find("side mismatch"), std::string::npos);
}

TEST(Certificate, FrozenValues) {
  EXPECT_NEAR(certificate_bound(geo(10, 2.0, 1.0, Side::Upper)).bound(), 0.0017960194573585802747,
              1e-17);
  EXPECT_NEAR(certificate_bound(expo(1, 0.5, Side::Lower)).bound(), 0.30257713354237078014,
              1e-15);
  const auto paper1 = certificate_bound(expo(1, 2.0, Side::Upper), CertificateMode::PaperLiteral);
  EXPECT_NEAR(paper1.bound(), 0.27005633705824812449, 1e-15);
  EXPECT_EQ(paper1.method, Method::CertificatePaper);
  EXPECT_FALSE(paper1.notes.empty());
  EXPECT_NEAR(
      certificate_bound(expo(2, 2.0, Side::Upper), CertificateMode::PaperLiteral).bound(),
      0.14647735599899448024, 1e-15);
  EXPECT_NEAR(certificate_bound(expo(1, 2.0, Side::Upper)).bound(), 0.13502816852912406224,
              1e-15);
  EXPECT_NEAR(certificate_bound(expo(2, 2.0, Side::Upper)).bound(), 0.073238677999497240121,
              1e-15);
  EXPECT_EQ(certificate_bound(expo(2, 2.0, Side::Upper)).direction, Direction::LowerBoundsTail);
}

TEST(Certificate, Errors) {
  EXPECT_THROW(certificate_bound(geo(3, 2.0, 1.0, Side::Lower)), SideMismatch);
  EXPECT_THROW(certificate_bound(expo(3, 0.5, Side::Upper)), SideMismatch);
  // n lambda mu = 0.5 < 1
  EXPECT_THROW(certificate_bound(geo(1, 0.5, 1.0, Side::Lower)), PreconditionError);
}

TEST(Certificate, SandwichProperty) {
  tbtest::Gen gen(51);
  int checked = 0;
  while (checked < 400) {
    const bool geometric = gen.coin();
    const bool upper = gen.coin();
    const double mu = gen.log_uniform(0.02, 50.0);
    const double lambda = upper ? gen.uniform(1.05, 8.0) : gen.uniform(0.05, 0.95);
    const std::uint64_t n = gen.integer(1, 300);
    const auto q = make_query(make_spec(geometric ? Family::Geometric : Family::Exponential, mu),
                              n, lambda, upper ? Side::Upper : Side::Lower);
    BoundReport cert;
    try {
      cert = certificate_bound(q);
    } catch (const PreconditionError&) {
      continue;
    }
    ++checked;
    const double exact = exact_tail(q).log_value;
    EXPECT_LE(cert.log_bound, exact + 1e-9) << "n=" << n << " " << tbtest::describe(lambda, mu);
    EXPECT_LE(exact, thm1_bound(q).log_bound + 1e-9)
        << "n=" << n << " " << tbtest::describe(lambda, mu);
  }
}

TEST(Janson, Values) {
  EXPECT_NEAR(janson_exponent(2.0, 1.0), 0.094534891891835618022, 1e-15);
  EXPECT_NEAR(janson_exponent(10.0, 0.1), 0.22034481742619773244, 1e-15);
  EXPECT_DOUBLE_EQ(janson_quadratic(geo(1, 2.0, 1.0, Side::Upper)), 0.125);
  EXPECT_THROW(janson_bound(expo(2, 2.0, Side::Upper)), DomainError);
  EXPECT_FALSE(janson_bound(geo(2, 0.5, 1.0, Side::Upper)).applicable);
}

TEST(Janson, QuadraticDominatesOnlyAboveOne) {
  for (double mu : {0.1, 1.0, 10.0}) {
    EXPECT_GE(janson_quadratic(geo(1, 3.0, mu, Side::Upper)), janson_exponent(3.0, mu));
    EXPECT_LT(janson_quadratic(geo(1, 0.5, mu, Side::Lower)), janson_exponent(0.5, mu));
  }
  EXPECT_NEAR(janson_exponent(0.5, 0.1), 0.0010654702, 1e-10);
  EXPECT_NEAR(janson_quadratic(geo(1, 0.5, 0.1, Side::Lower)), 0.0010330579, 1e-10);
}

TEST(Agrawal, Cases) {
  EXPECT_DOUBLE_EQ(-agrawal_bound(geo(1, 2.0, 1.0, Side::Upper)).log_bound, 0.0625);
  const auto na = agrawal_bound(geo(1, 3.0, 2.0, Side::Upper));
  EXPECT_FALSE(na.applicable);
  EXPECT_EQ(na.bound(), 1.0);
  EXPECT_TRUE(agrawal_bound(geo(1, 1.5, 2.0, Side::Upper)).applicable);
  EXPECT_TRUE(agrawal_bound(geo(1, 0.2, 5.0, Side::Lower)).applicable);
  EXPECT_EQ(agrawal_bound(geo(4, 1.0, 5.0, Side::Upper)).log_bound, 0.0);
  EXPECT_THROW(agrawal_bound(expo(1, 2.0, Side::Upper)), DomainError);
}

TEST(Agrawal, UpperBoundsExactProperty) {
  tbtest::Gen gen(52);
  for (int i = 0; i < 300; ++i) {
    const bool upper = gen.coin();
    const double mu = gen.log_uniform(0.05, 20.0);
    const double lambda = upper ? gen.uniform(1.01, 6.0) : gen.uniform(0.05, 0.99);
    const auto q = geo(gen.integer(1, 200), lambda, mu, upper ? Side::Upper : Side::Lower);
    const auto a = agrawal_bound(q);
    const auto j = janson_bound(q);
    const double exact = exact_tail(q).log_value;
    if (a.applicable) {
      EXPECT_LE(exact, a.log_bound + 1e-9) << tbtest::describe(lambda, mu);
    }
    if (j.applicable) {
      EXPECT_LE(exact, j.log_bound + 1e-9) << tbtest::describe(lambda, mu);
    }
  }
}

TEST(CompareAll, Ordering) {
  const auto rs = compare_all(geo(1, 2.0, 1.0, Side::Upper));
  ASSERT_EQ(rs.size(), 4u);
  EXPECT_EQ(rs[0].method, Method::Theorem1);
  EXPECT_EQ(rs[1].method, Method::Janson);
  EXPECT_EQ(rs[2].method, Method::Agrawal);
  EXPECT_EQ(rs[3].method, Method::CertificateRepaired);
  EXPECT_NEAR(-rs[0].log_bound, 0.169899, 1e-6);
  EXPECT_NEAR(-rs[1].log_bound, 0.094535, 1e-6);

  const auto ex = compare_all(expo(3, 2.0, Side::Upper), CertificateMode::PaperLiteral);
  EXPECT_EQ(ex[0].method, Method::Theorem1);
  EXPECT_EQ(ex[1].method, Method::CertificatePaper);
  EXPECT_FALSE(ex[2].applicable);
  EXPECT_FALSE(ex[3].applicable);

  const auto pre = compare_all(geo(1, 0.5, 1.0, Side::Lower));
  EXPECT_FALSE(pre.back().applicable);
  EXPECT_EQ(pre.back().log_bound, kNegInf);
}

TEST(Strings, Names) {
  EXPECT_EQ(to_string(Method::CertificateRepaired), "certificate-repaired");
  EXPECT_EQ(to_string(Direction::LowerBoundsTail), "lower-bounds-tail");
  EXPECT_EQ(to_string(CertificateMode::PaperLiteral), "paper");
}
