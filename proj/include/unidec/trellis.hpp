#ifndef UNIDEC_TRELLIS_HPP_
#define UNIDEC_TRELLIS_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "unidec/kernel.hpp"

namespace unidec
{

class TrellisError : public std::invalid_argument
{
public:
	using std::invalid_argument::invalid_argument;
};

// Binary polynomial, bit i holds the coefficient of D^i.
using Polynomial = std::uint32_t;

// Octal generator notation as used for 3GPP codes: the most significant of the
// memory+1 bits is the D^0 coefficient, so "13" with memory 3 is 1 + D^2 + D^3.
Polynomial poly_from_octal(const std::string &octal, int memory);
std::string poly_to_octal(Polynomial p, int memory);

struct TrellisEdge
{
	int start_state = 0;
	int end_state = 0;
	Bit u = 0; // systematic (input) label
	Bit c = 0; // parity label
};

// Recursive systematic convolutional code trellis. The state holds the last
// `memory` feedback-register bits, most recent bit in the MSB.
struct Trellis
{
	int num_states = 0;
	int memory = 0;
	Polynomial feedback_poly = 0;
	Polynomial forward_poly = 0;
	// edges[2 * s + u] leaves state s on input u
	std::vector<TrellisEdge> edges;

	const TrellisEdge &edge(int state, Bit u) const { return edges[2 * state + u]; }
	// input that drives the feedback register with a zero (termination)
	Bit tail_input(int state) const;
};

Trellis build_rsc_trellis(Polynomial feedback_poly, Polynomial forward_poly, int memory);
Trellis build_rsc_trellis_octal(const std::string &feedback_oct, const std::string &forward_oct, int memory);
// 3GPP LTE constituent code: feedback 13, forward 15 (octal), memory 3.
Trellis lte_trellis();

enum class GammaKind
{
	Gamma1, // edges with u == c: metric +/-(sys + parity)
	Gamma2, // edges with u != c: metric +/-(parity - sys)
};

// Branch metric of an edge expressed through the two shared values:
// +g when the parity label is 0, -g when it is 1, g = gamma1 or gamma2.
struct EdgeMetricRule
{
	GammaKind kind;
	int sign;
};
EdgeMetricRule edge_metric_rule(Bit u, Bit c) noexcept;

// A 2x2 piece of the trellis whose four edges carry +lam/-lam in the cross
// pattern of the ALPHA unit: prev[0]->next[0] and prev[1]->next[1] carry +lam,
// the other two carry -lam, lam = sign * gamma(kind).
struct ButterflyPair
{
	std::array<int, 2> prev_states{};
	std::array<int, 2> next_states{};
	GammaKind gamma_kind = GammaKind::Gamma1;
	int sign = 1;
	Bit u_plus = 0; // input label shared by the two +lam edges
};

std::vector<ButterflyPair> derive_butterflies(const Trellis &t);

struct BranchMetrics
{
	Metric gamma1 = 0.0;
	Metric gamma2 = 0.0;
};

// gamma1 = a + p, gamma2 = -a + p with a = systematic + a priori LLR and p the
// parity LLR. The other two values are -gamma1 and -gamma2.
BranchMetrics branch_metric_pair(Llr l_sys_apriori, Llr l_parity) noexcept;

struct RscOutput
{
	std::vector<Bit> parity;
	std::vector<Bit> tail_input;
	std::vector<Bit> tail_parity;
	int final_state = 0;
};

RscOutput rsc_encode(std::span<const Bit> bits, const Trellis &t, bool terminate);

class Permutation
{
public:
	Permutation() = default;
	// throws std::invalid_argument unless map is a bijection on [0, size)
	explicit Permutation(std::vector<std::size_t> map);
	static Permutation identity(std::size_t size);

	std::size_t size() const { return map_.size(); }
	std::size_t operator()(std::size_t i) const { return map_[i]; }
	std::size_t inverse(std::size_t j) const { return inverse_[j]; }
	const std::vector<std::size_t> &map() const { return map_; }

	// out[i] = in[map(i)]
	template <typename T>
	std::vector<T> interleave(std::span<const T> in) const
	{
		check_size(in.size());
		std::vector<T> out(in.size());
		for (std::size_t i = 0; i < in.size(); ++i)
			out[i] = in[map_[i]];
		return out;
	}
	// out[map(i)] = in[i]
	template <typename T>
	std::vector<T> deinterleave(std::span<const T> in) const
	{
		check_size(in.size());
		std::vector<T> out(in.size());
		for (std::size_t i = 0; i < in.size(); ++i)
			out[map_[i]] = in[i];
		return out;
	}

private:
	void check_size(std::size_t n) const;

	std::vector<std::size_t> map_;
	std::vector<std::size_t> inverse_;
};

// map(i) = (f1 i + f2 i^2) mod K
Permutation qpp_interleaver(std::size_t K, std::uint64_t f1, std::uint64_t f2);

// "K f1 f2" per line, '#' starts a comment
std::map<std::size_t, std::pair<std::uint64_t, std::uint64_t>> load_qpp_table(const std::filesystem::path &path);
// one 0-based index per line
Permutation load_permutation(const std::filesystem::path &path);

// The seven streams of a rate-1/3 turbo code with both constituent encoders
// terminated. Used for bits and for LLRs.
template <typename T>
struct TurboStreams
{
	std::vector<T> systematic;
	std::vector<T> parity1;
	std::vector<T> parity2;
	std::vector<T> tail_sys1;
	std::vector<T> tail_par1;
	std::vector<T> tail_sys2;
	std::vector<T> tail_par2;

	std::size_t total_size() const
	{
		return systematic.size() + parity1.size() + parity2.size() + tail_sys1.size() + tail_par1.size() +
		       tail_sys2.size() + tail_par2.size();
	}

	// flat layout: sys, par1, par2, tail_sys1, tail_par1, tail_sys2, tail_par2
	std::vector<T> flatten() const
	{
		std::vector<T> out;
		out.reserve(total_size());
		for (const auto *v : {&systematic, &parity1, &parity2, &tail_sys1, &tail_par1, &tail_sys2, &tail_par2})
			out.insert(out.end(), v->begin(), v->end());
		return out;
	}

	static TurboStreams unflatten(std::span<const T> flat, std::size_t K, int memory)
	{
		const std::size_t m = static_cast<std::size_t>(memory);
		if (flat.size() != 3 * K + 4 * m)
			throw std::invalid_argument("turbo stream length " + std::to_string(flat.size()) + " != 3K + 4m = " +
			                            std::to_string(3 * K + 4 * m));
		TurboStreams s;
		std::size_t pos = 0;
		auto take = [&](std::vector<T> &v, std::size_t n) {
			v.assign(flat.begin() + pos, flat.begin() + pos + n);
			pos += n;
		};
		take(s.systematic, K);
		take(s.parity1, K);
		take(s.parity2, K);
		take(s.tail_sys1, m);
		take(s.tail_par1, m);
		take(s.tail_sys2, m);
		take(s.tail_par2, m);
		return s;
	}
};

TurboStreams<Bit> turbo_encode(std::span<const Bit> bits, const Trellis &t, const Permutation &perm);

} // namespace unidec

#endif // UNIDEC_TRELLIS_HPP_
