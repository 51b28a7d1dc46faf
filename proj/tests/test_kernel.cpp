#include <doctest.h>

#include <cmath>
#include <random>

#include "unidec/kernel.hpp"

using namespace unidec;

namespace
{
constexpr auto ML = MaxStarMode::MaxLog;
constexpr auto EX = MaxStarMode::Exact;
} // namespace

TEST_CASE("max_star examples")
{
	CHECK(max_star(3, 5, ML) == 5);
	CHECK(max_star(0, 0, EX) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
	CHECK(max_star(2.0, 2.5, EX) == doctest::Approx(2.5 + std::log1p(std::exp(-0.5))).epsilon(1e-12));
	CHECK(max_star(2.0, 2.5, EX) == doctest::Approx(2.974077).epsilon(1e-6));
}

TEST_CASE("max_star returns the other input when one side is the sentinel")
{
	for (auto mode : {ML, EX})
	{
		CHECK(max_star(kNegInf, 1.5, mode) == 1.5);
		CHECK(max_star(-4.0, kNegInf, mode) == -4.0);
		CHECK(is_neg_inf(max_star(kNegInf, kNegInf, mode)));
		// sentinel shifted by a finite branch value is still the sentinel
		CHECK(max_star(kNegInf - 7.0, 0.25, mode) == 0.25);
	}
}

TEST_CASE("max_star ordering and commutativity")
{
	std::mt19937_64 rng(11);
	std::uniform_real_distribution<double> d(-20, 20);
	for (int i = 0; i < 2000; ++i)
	{
		const double x = d(rng), y = d(rng);
		CHECK(max_star(x, y, ML) == max_star(y, x, ML));
		CHECK(max_star(x, y, EX) == doctest::Approx(max_star(y, x, EX)).epsilon(1e-15));
		CHECK(max_star(x, y, EX) >= std::max(x, y));
		CHECK(max_star(x, y, ML) == std::max(x, y));
		// log-sum-exp oracle
		CHECK(max_star(x, y, EX) == doctest::Approx(std::log(std::exp(x) + std::exp(y))).epsilon(1e-12));
	}
	// the correction vanishes for widely separated inputs
	CHECK(max_star(0.0, 60.0, EX) - 60.0 < 1e-20);
}

TEST_CASE("alpha_step examples")
{
	CHECK(alpha_step({0, kNegInf}, 2, ML) == MetricPair{2, -2});
	CHECK(alpha_step({1, -1}, 0.5, ML) == MetricPair{1.5, 0.5});
	CHECK(alpha_step({2, -2}, -3, ML) == MetricPair{1, 5});
}

TEST_CASE("alpha_step counts one ALPHA per call")
{
	OpCounters c;
	alpha_step({0, 0}, 1, ML, &c);
	alpha_step({0, 0}, 1, EX, &c);
	CHECK(c.alpha == 2);
	CHECK(c.beta_llr == 0);
	CHECK(c.max == 0);
}

TEST_CASE("alpha_step properties")
{
	std::mt19937_64 rng(12);
	std::uniform_real_distribution<double> d(-10, 10);
	for (int i = 0; i < 1000; ++i)
	{
		const MetricPair p{d(rng), d(rng)};
		const double lam = d(rng), c = d(rng);
		for (auto mode : {ML, EX})
		{
			// swapping the states and negating lam leaves the output unchanged
			const MetricPair a = alpha_step(p, lam, mode);
			const MetricPair b = alpha_step({p.m1, p.m0}, -lam, mode);
			CHECK(a.m0 == doctest::Approx(b.m0).epsilon(1e-14));
			CHECK(a.m1 == doctest::Approx(b.m1).epsilon(1e-14));
			// shift equivariance
			const MetricPair s = alpha_step({p.m0 + c, p.m1 + c}, lam, mode);
			CHECK(s.m0 == doctest::Approx(a.m0 + c).epsilon(1e-12));
			CHECK(s.m1 == doctest::Approx(a.m1 + c).epsilon(1e-12));
		}
	}
}

TEST_CASE("beta_llr_step trivial example")
{
	const auto r = beta_llr_step({0, kNegInf}, {0, kNegInf}, 5, ML);
	CHECK(r.beta_cur == MetricPair{5, -5});
	// with beta_next = (0, -inf) the +lam pairing keeps the state-0 path only
	CHECK(r.out1 == 0);
	CHECK(is_neg_inf(r.out2));
}

TEST_CASE("beta_llr_step pairs alpha_prev with the incoming beta")
{
	// out1 = max(a0 + b0, a1 + b1), out2 = max(a0 + b1, a1 + b0)
	auto r = beta_llr_step({0, kNegInf}, {2, -2}, 1, ML);
	CHECK(r.beta_cur == MetricPair{1, -1});
	CHECK(r.out1 == 2);
	CHECK(r.out2 == -2);
	CHECK((r.out1 - r.out2) / 2 == 2); // weight-2 check node: the other message

	r = beta_llr_step({1, -1}, {1, -1}, 0, ML);
	CHECK(r.beta_cur == MetricPair{1, 1});
	CHECK(r.out1 == 2);
	CHECK(r.out2 == 0);
}

TEST_CASE("beta_llr_step properties")
{
	std::mt19937_64 rng(13);
	std::uniform_real_distribution<double> d(-10, 10);
	for (int i = 0; i < 1000; ++i)
	{
		const MetricPair bn{d(rng), d(rng)};
		const MetricPair ap{d(rng), d(rng)};
		const double lam = d(rng), c = d(rng);
		for (auto mode : {ML, EX})
		{
			const auto r = beta_llr_step(bn, ap, lam, mode);
			CHECK(r.beta_cur == alpha_step(bn, lam, mode));
			const auto ra = beta_llr_step(bn, {ap.m0 + c, ap.m1 + c}, lam, mode);
			const auto rb = beta_llr_step({bn.m0 + c, bn.m1 + c}, ap, lam, mode);
			CHECK(ra.out1 - ra.out2 == doctest::Approx(r.out1 - r.out2).epsilon(1e-10));
			CHECK(rb.out1 - rb.out2 == doctest::Approx(r.out1 - r.out2).epsilon(1e-10));
		}
	}
}

TEST_CASE("beta_llr_step counts one BetaLLR per call")
{
	OpCounters c;
	beta_llr_step({0, 0}, {0, 0}, 1, ML, &c);
	CHECK(c.beta_llr == 1);
	CHECK(c.alpha == 0);
}

TEST_CASE("normalize examples")
{
	CHECK(normalized({{3, 1}}) == std::vector<MetricPair>{{0, -2}});
	const auto s = normalized({{0, kNegInf}});
	CHECK(s[0].m0 == 0);
	CHECK(is_neg_inf(s[0].m1));
	CHECK(normalized({{5, 2}, {7, -1}}) == std::vector<MetricPair>{{-2, -5}, {0, -8}});
	CHECK_THROWS_AS(normalized({{kNegInf, kNegInf}}), DegenerateMetricError);
	CHECK_THROWS_AS(normalized({}), DegenerateMetricError);
}

TEST_CASE("normalize keeps differences")
{
	std::mt19937_64 rng(14);
	std::uniform_real_distribution<double> d(-50, 50);
	for (int i = 0; i < 200; ++i)
	{
		std::vector<MetricPair> v(4);
		for (auto &p : v)
			p = {d(rng), d(rng)};
		const auto n = normalized(v);
		double top = -1e300;
		for (const auto &p : n)
			top = std::max({top, p.m0, p.m1});
		CHECK(top == 0.0);
		for (std::size_t j = 0; j < v.size(); ++j)
			CHECK(v[j].m0 - v[j].m1 == doctest::Approx(n[j].m0 - n[j].m1).epsilon(1e-12));
	}
}

TEST_CASE("quantize examples")
{
	const QuantSpec q{true, 8, 4};
	CHECK(quantize(1.30, q) == 1.3125);
	CHECK(quantize(0.0, q) == 0.0);
	CHECK(quantize(0.0, QuantSpec{true, 16, 9}) == 0.0);
	CHECK(quantize(1000, q) == 7.9375);
	CHECK(quantize(-1000, q) == -8.0);
	CHECK(quantize(kNegInf, q) == -8.0);
	CHECK(q.max_value() == 7.9375);
	CHECK(q.step() == 0.0625);
}

TEST_CASE("quantize lands on the grid")
{
	const QuantSpec q{true, 12, 5};
	std::mt19937_64 rng(15);
	std::uniform_real_distribution<double> d(-70, 70);
	for (int i = 0; i < 1000; ++i)
	{
		const double x = d(rng);
		const double y = quantize(x, q);
		const double scaled = y * 32.0;
		CHECK(scaled == std::round(scaled));
		CHECK(y <= q.max_value());
		CHECK(y >= q.min_value());
		if (x > q.min_value() && x < q.max_value())
			CHECK(std::abs(y - x) <= q.step() / 2 + 1e-12);
	}
}

TEST_CASE("QuantSpec validation")
{
	CHECK_NOTHROW(QuantSpec{true, 8, 4}.validate());
	CHECK_THROWS_AS(QuantSpec({true, 8, 0}).validate(), std::invalid_argument);
	CHECK_THROWS_AS(QuantSpec({true, 8, 8}).validate(), std::invalid_argument);
	CHECK_THROWS_AS(QuantSpec({true, 33, 4}).validate(), std::invalid_argument);
}

TEST_CASE("SharedKernel forwards to the free functions and quantizes outputs")
{
	const SharedKernel plain(EX);
	OpCounters c;
	CHECK(plain.alpha({1, -1}, 0.3, &c) == alpha_step({1, -1}, 0.3, EX));
	const auto r = plain.beta_llr({0.5, 0}, {1, -1}, 0.3, &c);
	const auto ref = beta_llr_step({0.5, 0}, {1, -1}, 0.3, EX);
	CHECK(r.beta_cur == ref.beta_cur);
	CHECK(r.out1 == ref.out1);
	CHECK(r.out2 == ref.out2);
	CHECK(c.alpha == 1);
	CHECK(c.beta_llr == 1);

	const QuantSpec q{true, 8, 4};
	const SharedKernel fixed(EX, q);
	const auto a = fixed.alpha({1, -1}, 0.3, nullptr);
	CHECK(a.m0 == quantize(alpha_step({1, -1}, 0.3, EX).m0, q));
	CHECK(a.m1 == quantize(alpha_step({1, -1}, 0.3, EX).m1, q));
	CHECK(fixed.alpha({0, kNegInf}, 100, nullptr).m0 == q.max_value());
}

TEST_CASE("max* mode names")
{
	CHECK(parse_max_star_mode("maxlog") == ML);
	CHECK(parse_max_star_mode("exact") == EX);
	CHECK(to_string(EX) == "exact");
	CHECK_THROWS_AS(parse_max_star_mode("min"), std::invalid_argument);
}

TEST_CASE("sign convention")
{
	static_assert(kBitZeroIsPositive);
	CHECK(hard_decision(0.0) == 0);
	CHECK(hard_decision(1e-9) == 0);
	CHECK(hard_decision(-1e-9) == 1);
}
