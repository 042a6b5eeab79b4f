#include <gtest/gtest.h>

#include "common.hpp"

using namespace ptf;

TEST(CounterStream, FrozenKeys) {
  EXPECT_EQ(CounterStream(0, 0, 0).key(), 0xFBE988335F36C931ULL);
  EXPECT_EQ(CounterStream(1, 0, 0).key(), 0x6DF1421574B0D586ULL);
  EXPECT_EQ(CounterStream(7, 3, 2).key(), 0x9F6DE86C19C94E92ULL);
}

TEST(CounterStream, FrozenWords) {
  const CounterStream a(0, 0, 0);
  EXPECT_EQ(a.word(0), 0x9CE9044CF4430B33ULL);
  EXPECT_EQ(a.word(1), 0x7505F249B38B57FAULL);
  EXPECT_EQ(a.word(2), 0x60B1A5730FA7E2CFULL);
  EXPECT_EQ(a.u01(0), 0.6129305541874255);
  EXPECT_EQ(a.u01(1), 0.4571219854292797);
  EXPECT_EQ(a.u01(2), 0.37771066722021335);

  const CounterStream b(1, 0, 0);
  EXPECT_EQ(b.word(0), 0x96C9F513020798B9ULL);
  EXPECT_EQ(b.word(1), 0xF7DD055ED9EC356FULL);
  EXPECT_EQ(b.word(2), 0xED35E8A386754903ULL);
  EXPECT_EQ(b.u01(0), 0.5890191241651608);
  EXPECT_EQ(b.u01(1), 0.9682162624903163);
  EXPECT_EQ(b.u01(2), 0.9266038321715844);

  const CounterStream c(7, 3, 2);
  EXPECT_EQ(c.word(0), 0x5B7E185A19433B96ULL);
  EXPECT_EQ(c.u01(0), 0.35739280891108377);
}

TEST(CounterStream, OpenUnitInterval) {
  const CounterStream s(5, 9, 1);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  for (std::uint64_t j = 0; j < 100000; ++j) {
    const double u = s.u01(j);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / 100000.0, 0.5, 0.005);
  EXPECT_GT(s.um11(0), -1.0);
  EXPECT_LT(s.um11(0), 1.0);
}

TEST(CounterStream, StreamsDiffer) {
  EXPECT_NE(CounterStream(1, 0, 0).word(0), CounterStream(1, 0, 1).word(0));
  EXPECT_NE(CounterStream(1, 0, 0).word(0), CounterStream(1, 1, 0).word(0));
  EXPECT_NE(CounterStream(1, 0, 0).word(0), CounterStream(2, 0, 0).word(0));
}

TEST(Generate, FrozenSmallInstance) {
  const auto g = generate(2, 4, 7, 3);
  const Vector x = ptf::test::vec(
      {0.9521328443065518, 0.30422832251284, 0.4044123992918148, 0.5329423460840461});
  const Vector s = ptf::test::vec(
      {0.10552559241822052, 0.5091718456333132, 0.2648097843172739, 0.9348739746095123});
  Matrix a(2, 4);
  a << -0.28521438217783246, -0.238069346330522, 0.1208236013984969, 0.26720893039061266,
      0.5452358115381659, -0.922880897717287, 0.578536780116409, -0.7524141411868818;
  EXPECT_EQ(g.start.x, x);
  EXPECT_EQ(g.start.s, s);
  EXPECT_EQ(g.instance.A(), a);
  EXPECT_EQ(g.instance.c(), s);
  EXPECT_EQ(g.start.y, Vector::Zero(2));
  EXPECT_LE((g.instance.b() - a * x).norm(), 1e-15);
}
