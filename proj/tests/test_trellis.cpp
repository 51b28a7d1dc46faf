#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include "oracles.hpp"
#include "unidec/trellis.hpp"

using namespace unidec;

TEST_CASE("octal polynomials put D^0 first")
{
	CHECK(poly_from_octal("13", 3) == 0b1101u); // 1 + D^2 + D^3
	CHECK(poly_from_octal("15", 3) == 0b1011u); // 1 + D + D^3
	CHECK(poly_from_octal("3", 1) == 0b11u);
	CHECK(poly_to_octal(0b1101u, 3) == "13");
	CHECK(poly_to_octal(poly_from_octal("15", 3), 3) == "15");
	CHECK_THROWS_AS(poly_from_octal("23", 3), TrellisError);
	CHECK_THROWS_AS(poly_from_octal("19", 3), TrellisError);
	CHECK_THROWS_AS(poly_from_octal("", 3), TrellisError);
}

TEST_CASE("build_rsc_trellis")
{
	SUBCASE("LTE: 8 states, 16 edges, two in and two out per state")
	{
		const Trellis t = lte_trellis();
		CHECK(t.num_states == 8);
		CHECK(t.memory == 3);
		CHECK(t.edges.size() == 16);
		std::vector<int> in(8, 0), out(8, 0);
		for (const auto &e : t.edges)
		{
			++out[e.start_state];
			++in[e.end_state];
		}
		CHECK(std::all_of(in.begin(), in.end(), [](int n) { return n == 2; }));
		CHECK(std::all_of(out.begin(), out.end(), [](int n) { return n == 2; }));
	}
	SUBCASE("matches the shift-register oracle edge for edge")
	{
		const Trellis t = lte_trellis();
		for (const auto &e : oracle::rsc_edges(oracle::lte_rsc()))
		{
			const auto &le = t.edge(oracle::to_library_state(e.from, 3), static_cast<Bit>(e.u));
			CHECK(le.end_state == oracle::to_library_state(e.to, 3));
			CHECK(le.c == e.c);
			CHECK(le.u == e.u);
		}
	}
	SUBCASE("two-state toy: memory 1")
	{
		const Trellis t = build_rsc_trellis_octal("3", "3", 1);
		CHECK(t.num_states == 2);
		CHECK(t.edges.size() == 4);
		// state = last feedback value a; a = u ^ s, c = a ^ s = u
		for (int s = 0; s < 2; ++s)
			for (Bit u = 0; u < 2; ++u)
			{
				CHECK(t.edge(s, u).end_state == (u ^ s));
				CHECK(t.edge(s, u).c == u);
			}
	}
	SUBCASE("invalid inputs")
	{
		CHECK_THROWS_AS(build_rsc_trellis(1, 1, 0), TrellisError);
		CHECK_THROWS_AS(build_rsc_trellis(0b10, 0b11, 1), TrellisError); // no constant feedback term
		CHECK_THROWS_AS(build_rsc_trellis(0b1101, 0, 3), TrellisError);
		CHECK_THROWS_AS(build_rsc_trellis(0b11101, 0b1011, 3), TrellisError); // degree 4 > memory
	}
}

TEST_CASE("edge metric rule")
{
	CHECK(edge_metric_rule(0, 0).kind == GammaKind::Gamma1);
	CHECK(edge_metric_rule(0, 0).sign == 1);
	CHECK(edge_metric_rule(1, 1).kind == GammaKind::Gamma1);
	CHECK(edge_metric_rule(1, 1).sign == -1);
	CHECK(edge_metric_rule(1, 0).kind == GammaKind::Gamma2);
	CHECK(edge_metric_rule(1, 0).sign == 1);
	CHECK(edge_metric_rule(0, 1).kind == GammaKind::Gamma2);
	CHECK(edge_metric_rule(0, 1).sign == -1);
}

TEST_CASE("derive_butterflies")
{
	SUBCASE("LTE: four butterflies, each of one gamma kind, covering every edge once")
	{
		const Trellis t = lte_trellis();
		const auto bf = derive_butterflies(t);
		REQUIRE(bf.size() == 4);
		std::set<std::pair<int, int>> covered;
		std::set<int> prev, next;
		for (const auto &b : bf)
		{
			for (int p : b.prev_states)
			{
				CHECK(prev.insert(p).second);
				for (Bit u = 0; u < 2; ++u)
				{
					const auto &e = t.edge(p, u);
					CHECK((e.end_state == b.next_states[0] || e.end_state == b.next_states[1]));
					CHECK(edge_metric_rule(e.u, e.c).kind == b.gamma_kind);
					CHECK(covered.insert({p, u}).second);
				}
			}
			for (int n : b.next_states)
				CHECK(next.insert(n).second);
			// cross pattern: p0->n0 and p1->n1 carry +lam, the other two -lam
			auto sign_of = [&](int p, int n) {
				for (Bit u = 0; u < 2; ++u)
					if (t.edge(p, u).end_state == n)
						return edge_metric_rule(u, t.edge(p, u).c).sign;
				return 0;
			};
			CHECK(sign_of(b.prev_states[0], b.next_states[0]) == b.sign);
			CHECK(sign_of(b.prev_states[1], b.next_states[1]) == b.sign);
			CHECK(sign_of(b.prev_states[0], b.next_states[1]) == -b.sign);
			CHECK(sign_of(b.prev_states[1], b.next_states[0]) == -b.sign);
		}
		CHECK(covered.size() == 16);
		int g1 = 0;
		for (const auto &b : bf)
			g1 += b.gamma_kind == GammaKind::Gamma1;
		CHECK(g1 == 2);
	}
	SUBCASE("LTE: states {0,1} feed {0,4} through gamma1")
	{
		// the 1-based {1,2} -> {1,5} butterfly of the usual figure
		const auto bf = derive_butterflies(lte_trellis());
		const auto it = std::find_if(bf.begin(), bf.end(), [](const ButterflyPair &b) {
			return b.prev_states == std::array<int, 2>{0, 1};
		});
		REQUIRE(it != bf.end());
		CHECK(it->next_states == std::array<int, 2>{0, 4});
		CHECK(it->gamma_kind == GammaKind::Gamma1);
		CHECK(it->sign == 1);
	}
	SUBCASE("two-state toy: one butterfly")
	{
		const auto bf = derive_butterflies(build_rsc_trellis_octal("3", "3", 1));
		CHECK(bf.size() == 1);
	}
	SUBCASE("a non-recursive trellis mixes gamma kinds and is rejected")
	{
		// feedback 1, forward 1 + D: parity differs between the two edges into a state
		CHECK_THROWS_AS(derive_butterflies(build_rsc_trellis_octal("2", "3", 1)), TrellisError);
	}
	SUBCASE("other recursive codes decompose")
	{
		for (auto [fb, fw, m] : {std::tuple{"7", "5", 2}, std::tuple{"23", "35", 4}, std::tuple{"5", "7", 2}})
		{
			const Trellis t = build_rsc_trellis_octal(fb, fw, m);
			CHECK(derive_butterflies(t).size() == static_cast<std::size_t>(t.num_states / 2));
		}
	}
}

TEST_CASE("branch_metric_pair")
{
	auto g = branch_metric_pair(0, 0);
	CHECK(g.gamma1 == 0);
	CHECK(g.gamma2 == 0);
	g = branch_metric_pair(2, 1);
	CHECK(g.gamma1 == 3);
	CHECK(g.gamma2 == -1);
	g = branch_metric_pair(-1, 4);
	CHECK(g.gamma1 == 3);
	CHECK(g.gamma2 == 5);
	const auto n = branch_metric_pair(1, -4);
	CHECK(n.gamma1 == -3);
	CHECK(n.gamma2 == -5);
}

TEST_CASE("rsc_encode")
{
	const Trellis t = lte_trellis();
	SUBCASE("all-zero input")
	{
		const std::vector<Bit> zeros(20, 0);
		const auto r = rsc_encode(zeros, t, true);
		CHECK(std::all_of(r.parity.begin(), r.parity.end(), [](Bit b) { return b == 0; }));
		CHECK(r.tail_input == std::vector<Bit>(3, 0));
		CHECK(r.tail_parity == std::vector<Bit>(3, 0));
		CHECK(r.final_state == 0);
	}
	SUBCASE("impulse response")
	{
		std::vector<Bit> impulse(16, 0);
		impulse[0] = 1;
		const auto r = rsc_encode(impulse, t, false);
		// frozen from an independent shift-register run; period 7 after the first bit
		const std::vector<Bit> expect{1, 1, 1, 1, 0, 0, 1, 0, 1, 1, 1, 0, 0, 1, 0, 1};
		CHECK(r.parity == expect);
	}
	SUBCASE("termination reaches state 0 for every input up to K = 12")
	{
		for (std::size_t K : {1u, 5u, 12u})
			for (std::uint64_t w = 0; w < (1ull << K); ++w)
			{
				std::vector<Bit> bits(K);
				for (std::size_t k = 0; k < K; ++k)
					bits[k] = (w >> k) & 1;
				const auto r = rsc_encode(bits, t, true);
				if (r.final_state != 0)
				{
					FAIL("nonzero final state for K=" << K << " w=" << w);
				}
			}
	}
	SUBCASE("agrees with the oracle encoder")
	{
		std::mt19937_64 rng(21);
		for (int trial = 0; trial < 50; ++trial)
		{
			std::vector<Bit> bits(37);
			std::vector<int> ibits(37);
			for (std::size_t k = 0; k < bits.size(); ++k)
				ibits[k] = bits[k] = rng() & 1;
			const auto r = rsc_encode(bits, t, true);
			const auto o = oracle::rsc_run(oracle::lte_rsc(), ibits, true);
			for (std::size_t k = 0; k < bits.size(); ++k)
				CHECK(r.parity[k] == o.parity[k]);
			for (std::size_t k = 0; k < 3; ++k)
			{
				CHECK(r.tail_input[k] == o.u[bits.size() + k]);
				CHECK(r.tail_parity[k] == o.parity[bits.size() + k]);
			}
		}
	}
	SUBCASE("empty input")
	{
		CHECK_THROWS_AS(rsc_encode(std::vector<Bit>{}, t, true), std::invalid_argument);
	}
}

TEST_CASE("qpp_interleaver")
{
	CHECK(qpp_interleaver(8, 1, 2).map() == std::vector<std::size_t>{0, 3, 2, 5, 4, 7, 6, 1});
	CHECK(qpp_interleaver(16, 1, 0).map() == Permutation::identity(16).map());
	CHECK_THROWS_AS(qpp_interleaver(4, 2, 0), std::invalid_argument);
	CHECK_THROWS_AS(qpp_interleaver(1, 1, 0), std::invalid_argument);
	const auto p = qpp_interleaver(40, 3, 10);
	for (std::size_t i = 0; i < 40; ++i)
	{
		CHECK(p.inverse(p(i)) == i);
		CHECK(p(i) == (3 * i + 10 * i * i) % 40);
	}
}

TEST_CASE("LTE QPP table: every entry is a bijection")
{
	const auto table = load_qpp_table(UNIDEC_TEST_DATA_DIR "/qpp_lte.txt");
	CHECK(table.size() == 188);
	CHECK(table.begin()->first == 40);
	CHECK(table.rbegin()->first == 6144);
	CHECK(table.at(40) == std::pair<std::uint64_t, std::uint64_t>{3, 10});
	CHECK(table.at(1024) == std::pair<std::uint64_t, std::uint64_t>{31, 64});
	CHECK(table.at(6144) == std::pair<std::uint64_t, std::uint64_t>{263, 480});
	for (const auto &[K, f] : table)
	{
		// independent distinctness check, not the library constructor
		std::vector<char> seen(K, 0);
		bool ok = true;
		for (std::uint64_t i = 0; i < K; ++i)
		{
			const std::uint64_t j = (f.first * i + f.second * i * i) % K;
			ok = ok && !seen[j];
			seen[j] = 1;
		}
		CHECK_MESSAGE(ok, "K=" << K);
	}
}

TEST_CASE("Permutation")
{
	const Permutation p(std::vector<std::size_t>{2, 0, 1});
	const std::vector<int> v{10, 20, 30};
	const auto w = p.interleave<int>(v);
	CHECK(w == std::vector<int>{30, 10, 20});
	CHECK(p.deinterleave<int>(w) == v);
	CHECK_THROWS_AS(Permutation(std::vector<std::size_t>{0, 0, 1}), std::invalid_argument);
	CHECK_THROWS_AS(Permutation(std::vector<std::size_t>{0, 3}), std::invalid_argument);
	CHECK_THROWS_AS(p.interleave<int>(std::vector<int>{1, 2}), std::invalid_argument);
}

TEST_CASE("load_permutation")
{
	const std::string path = "test_perm.txt";
	{
		std::ofstream f(path);
		f << "# comment\n3\n0\n\n2\n1\n";
	}
	CHECK(load_permutation(path).map() == std::vector<std::size_t>{3, 0, 2, 1});
	{
		std::ofstream f(path);
		f << "0\n0\n";
	}
	CHECK_THROWS(load_permutation(path));
	std::remove(path.c_str());
	CHECK_THROWS(load_permutation("does_not_exist.txt"));
}

TEST_CASE("turbo_encode")
{
	const Trellis t = lte_trellis();
	const auto perm = qpp_interleaver(40, 3, 10);
	SUBCASE("all-zero")
	{
		const auto s = turbo_encode(std::vector<Bit>(40, 0), t, perm);
		const auto flat = s.flatten();
		CHECK(flat.size() == 3 * 40 + 4 * 3);
		CHECK(std::all_of(flat.begin(), flat.end(), [](Bit b) { return b == 0; }));
	}
	SUBCASE("streams")
	{
		std::mt19937_64 rng(22);
		std::vector<Bit> bits(40);
		for (auto &b : bits)
			b = rng() & 1;
		const auto s = turbo_encode(bits, t, perm);
		CHECK(s.systematic == bits);
		CHECK(s.parity1 == rsc_encode(bits, t, true).parity);
		const auto second = rsc_encode(perm.interleave<Bit>(bits), t, true);
		CHECK(s.parity2 == second.parity);
		CHECK(s.tail_sys2 == second.tail_input);
		CHECK(s.tail_par2 == second.tail_parity);
		const auto round = TurboStreams<Bit>::unflatten(s.flatten(), 40, 3);
		CHECK(round.flatten() == s.flatten());
		CHECK_THROWS_AS(TurboStreams<Bit>::unflatten(std::vector<Bit>(10), 40, 3), std::invalid_argument);
	}
	SUBCASE("size mismatch")
	{
		CHECK_THROWS_AS(turbo_encode(std::vector<Bit>(39, 0), t, perm), std::invalid_argument);
	}
}
