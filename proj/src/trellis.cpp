#include "unidec/trellis.hpp"

#include <fstream>
#include <sstream>

namespace unidec
{

Polynomial poly_from_octal(const std::string &octal, int memory)
{
	if (memory < 1 || memory > 16)
		throw TrellisError("trellis memory must be in [1, 16], got " + std::to_string(memory));
	if (octal.empty() || octal.find_first_not_of("01234567") != std::string::npos)
		throw TrellisError("invalid octal polynomial '" + octal + "'");
	const unsigned long v = std::stoul(octal, nullptr, 8);
	if (v >= (1ul << (memory + 1)))
		throw TrellisError("octal polynomial " + octal + " has more than memory+1 = " + std::to_string(memory + 1) +
		                   " coefficients");
	Polynomial p = 0;
	for (int i = 0; i <= memory; ++i)
		if ((v >> (memory - i)) & 1u)
			p |= Polynomial{1} << i;
	return p;
}

std::string poly_to_octal(Polynomial p, int memory)
{
	unsigned long v = 0;
	for (int i = 0; i <= memory; ++i)
		if ((p >> i) & 1u)
			v |= 1ul << (memory - i);
	std::ostringstream os;
	os << std::oct << v;
	return os.str();
}

namespace
{

// coefficient i (1..m) of the polynomial applied to register bit r_i
inline unsigned register_dot(Polynomial p, int state, int memory)
{
	unsigned acc = 0;
	for (int i = 1; i <= memory; ++i)
	{
		const unsigned r = (static_cast<unsigned>(state) >> (memory - i)) & 1u;
		acc ^= ((p >> i) & 1u) & r;
	}
	return acc;
}

} // namespace

Bit Trellis::tail_input(int state) const
{
	return static_cast<Bit>(register_dot(feedback_poly, state, memory));
}

Trellis build_rsc_trellis(Polynomial feedback_poly, Polynomial forward_poly, int memory)
{
	if (memory < 1 || memory > 16)
		throw TrellisError("trellis memory must be in [1, 16], got " + std::to_string(memory));
	const Polynomial limit = Polynomial{1} << (memory + 1);
	if (feedback_poly >= limit || forward_poly >= limit)
		throw TrellisError("polynomial degree exceeds memory " + std::to_string(memory));
	if ((feedback_poly & 1u) == 0)
		throw TrellisError("feedback polynomial must have constant term 1");
	if (forward_poly == 0)
		throw TrellisError("forward polynomial must be nonzero");

	Trellis t;
	t.memory = memory;
	t.num_states = 1 << memory;
	t.feedback_poly = feedback_poly;
	t.forward_poly = forward_poly;
	t.edges.resize(2 * static_cast<std::size_t>(t.num_states));
	for (int s = 0; s < t.num_states; ++s)
	{
		const unsigned fb = register_dot(feedback_poly, s, memory);
		const unsigned ff = register_dot(forward_poly, s, memory);
		for (unsigned u = 0; u < 2; ++u)
		{
			const unsigned a = u ^ fb;
			TrellisEdge e;
			e.start_state = s;
			e.end_state = static_cast<int>((a << (memory - 1)) | (static_cast<unsigned>(s) >> 1));
			e.u = static_cast<Bit>(u);
			e.c = static_cast<Bit>(((forward_poly & 1u) & a) ^ ff);
			t.edges[2 * s + u] = e;
		}
	}
	return t;
}

Trellis build_rsc_trellis_octal(const std::string &feedback_oct, const std::string &forward_oct, int memory)
{
	return build_rsc_trellis(poly_from_octal(feedback_oct, memory), poly_from_octal(forward_oct, memory), memory);
}

Trellis lte_trellis() { return build_rsc_trellis_octal("13", "15", 3); }

EdgeMetricRule edge_metric_rule(Bit u, Bit c) noexcept
{
	return {u == c ? GammaKind::Gamma1 : GammaKind::Gamma2, c == 0 ? 1 : -1};
}

std::vector<ButterflyPair> derive_butterflies(const Trellis &t)
{
	const int S = t.num_states;
	std::vector<std::vector<int>> predecessors(static_cast<std::size_t>(S));
	for (const auto &e : t.edges)
		predecessors[static_cast<std::size_t>(e.end_state)].push_back(e.start_state);
	for (const auto &p : predecessors)
		if (p.size() != 2)
			throw TrellisError("trellis is not butterfly-decomposable: a state does not have two incoming edges");

	auto find_edge = [&](int from, int to) -> const TrellisEdge * {
		for (Bit u = 0; u < 2; ++u)
			if (t.edge(from, u).end_state == to)
				return &t.edge(from, u);
		return nullptr;
	};

	std::vector<bool> used(static_cast<std::size_t>(S), false);
	std::vector<ButterflyPair> out;
	for (int p0 = 0; p0 < S; ++p0)
	{
		if (used[static_cast<std::size_t>(p0)])
			continue;
		int n0 = t.edge(p0, 0).end_state;
		int n1 = t.edge(p0, 1).end_state;
		if (n0 == n1)
			throw TrellisError("trellis is not butterfly-decomposable: parallel edges");
		if (n1 < n0)
			std::swap(n0, n1);
		const auto &preds = predecessors[static_cast<std::size_t>(n0)];
		const int p1 = preds[0] == p0 ? preds[1] : preds[0];
		const TrellisEdge *e00 = find_edge(p0, n0);
		const TrellisEdge *e01 = find_edge(p0, n1);
		const TrellisEdge *e10 = find_edge(p1, n0);
		const TrellisEdge *e11 = find_edge(p1, n1);
		if (p1 == p0 || used[static_cast<std::size_t>(p1)] || !e00 || !e01 || !e10 || !e11)
			throw TrellisError("trellis is not butterfly-decomposable: successor sets differ");

		const auto r00 = edge_metric_rule(e00->u, e00->c);
		const auto r01 = edge_metric_rule(e01->u, e01->c);
		const auto r10 = edge_metric_rule(e10->u, e10->c);
		const auto r11 = edge_metric_rule(e11->u, e11->c);
		const bool one_kind = r00.kind == r01.kind && r00.kind == r10.kind && r00.kind == r11.kind;
		const bool cross = r11.sign == r00.sign && r01.sign == -r00.sign && r10.sign == -r00.sign;
		if (!one_kind || !cross || e00->u != e11->u)
			throw TrellisError("trellis is not butterfly-decomposable: edges of states " + std::to_string(p0) + "," +
			                   std::to_string(p1) + " do not share one branch metric");

		ButterflyPair b;
		b.prev_states = {p0, p1};
		b.next_states = {n0, n1};
		b.gamma_kind = r00.kind;
		b.sign = r00.sign;
		b.u_plus = e00->u;
		out.push_back(b);
		used[static_cast<std::size_t>(p0)] = used[static_cast<std::size_t>(p1)] = true;
	}
	return out;
}

BranchMetrics branch_metric_pair(Llr l_sys_apriori, Llr l_parity) noexcept
{
	return {l_sys_apriori + l_parity, -l_sys_apriori + l_parity};
}

RscOutput rsc_encode(std::span<const Bit> bits, const Trellis &t, bool terminate)
{
	if (bits.empty())
		throw std::invalid_argument("rsc_encode: empty input");
	RscOutput out;
	out.parity.reserve(bits.size());
	int state = 0;
	for (const Bit b : bits)
	{
		const auto &e = t.edge(state, b & 1u);
		out.parity.push_back(e.c);
		state = e.end_state;
	}
	if (terminate)
	{
		for (int i = 0; i < t.memory; ++i)
		{
			const Bit u = t.tail_input(state);
			const auto &e = t.edge(state, u);
			out.tail_input.push_back(u);
			out.tail_parity.push_back(e.c);
			state = e.end_state;
		}
	}
	out.final_state = state;
	return out;
}

Permutation::Permutation(std::vector<std::size_t> map) : map_(std::move(map)), inverse_(map_.size())
{
	const std::size_t n = map_.size();
	std::vector<bool> seen(n, false);
	for (std::size_t i = 0; i < n; ++i)
	{
		const std::size_t j = map_[i];
		if (j >= n)
			throw std::invalid_argument("permutation index " + std::to_string(j) + " out of range for size " +
			                            std::to_string(n));
		if (seen[j])
			throw std::invalid_argument("permutation is not a bijection: index " + std::to_string(j) + " repeats");
		seen[j] = true;
		inverse_[j] = i;
	}
}

Permutation Permutation::identity(std::size_t size)
{
	std::vector<std::size_t> m(size);
	for (std::size_t i = 0; i < size; ++i)
		m[i] = i;
	return Permutation(std::move(m));
}

void Permutation::check_size(std::size_t n) const
{
	if (n != map_.size())
		throw std::invalid_argument("sequence length " + std::to_string(n) + " does not match interleaver size " +
		                            std::to_string(map_.size()));
}

Permutation qpp_interleaver(std::size_t K, std::uint64_t f1, std::uint64_t f2)
{
	if (K < 2)
		throw std::invalid_argument("QPP interleaver needs K >= 2");
	std::vector<std::size_t> m(K);
	const std::uint64_t k = K;
	for (std::uint64_t i = 0; i < k; ++i)
	{
		// (f1 i + f2 i^2) mod K without overflow for K up to 2^32
		const std::uint64_t a = (f1 % k) * i % k;
		const std::uint64_t b = (f2 % k) * (i * i % k) % k;
		m[i] = static_cast<std::size_t>((a + b) % k);
	}
	try
	{
		return Permutation(std::move(m));
	}
	catch (const std::invalid_argument &)
	{
		throw std::invalid_argument("QPP (K=" + std::to_string(K) + ", f1=" + std::to_string(f1) +
		                            ", f2=" + std::to_string(f2) + ") is not a bijection");
	}
}

std::map<std::size_t, std::pair<std::uint64_t, std::uint64_t>> load_qpp_table(const std::filesystem::path &path)
{
	std::ifstream in(path);
	if (!in)
		throw std::runtime_error("cannot open QPP table " + path.string());
	std::map<std::size_t, std::pair<std::uint64_t, std::uint64_t>> table;
	std::string line;
	int lineno = 0;
	while (std::getline(in, line))
	{
		++lineno;
		if (auto hash = line.find('#'); hash != std::string::npos)
			line.erase(hash);
		std::istringstream ls(line);
		std::size_t K;
		std::uint64_t f1, f2;
		if (!(ls >> K))
			continue;
		if (!(ls >> f1 >> f2))
			throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected 'K f1 f2'");
		table[K] = {f1, f2};
	}
	return table;
}

Permutation load_permutation(const std::filesystem::path &path)
{
	std::ifstream in(path);
	if (!in)
		throw std::runtime_error("cannot open interleaver file " + path.string());
	std::vector<std::size_t> m;
	std::string line;
	int lineno = 0;
	while (std::getline(in, line))
	{
		++lineno;
		if (auto hash = line.find('#'); hash != std::string::npos)
			line.erase(hash);
		if (line.find_first_not_of(" \t\r") == std::string::npos)
			continue;
		std::istringstream ls(line);
		std::string tok;
		while (ls >> tok)
		{
			std::size_t used = 0;
			long long v = -1;
			try
			{
				v = std::stoll(tok, &used);
			}
			catch (const std::exception &)
			{
			}
			if (v < 0 || used != tok.size())
				throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected a 0-based index, got '" +
				                         tok + "'");
			m.push_back(static_cast<std::size_t>(v));
		}
	}
	return Permutation(std::move(m));
}

TurboStreams<Bit> turbo_encode(std::span<const Bit> bits, const Trellis &t, const Permutation &perm)
{
	if (bits.size() != perm.size())
		throw std::invalid_argument("turbo_encode: " + std::to_string(bits.size()) +
		                            " bits for an interleaver of size " + std::to_string(perm.size()));
	TurboStreams<Bit> s;
	s.systematic.assign(bits.begin(), bits.end());
	auto enc1 = rsc_encode(bits, t, true);
	const auto permuted = perm.interleave(bits);
	auto enc2 = rsc_encode(permuted, t, true);
	s.parity1 = std::move(enc1.parity);
	s.tail_sys1 = std::move(enc1.tail_input);
	s.tail_par1 = std::move(enc1.tail_parity);
	s.parity2 = std::move(enc2.parity);
	s.tail_sys2 = std::move(enc2.tail_input);
	s.tail_par2 = std::move(enc2.tail_parity);
	return s;
}

} // namespace unidec
