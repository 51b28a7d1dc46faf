#ifndef UNIDEC_KERNEL_HPP_
#define UNIDEC_KERNEL_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "unidec/instrument.hpp"

namespace unidec
{

using Llr = double;
using Metric = double;
using Bit = std::uint8_t;

// Sign convention shared by every module: LLR = log P(bit=0) / P(bit=1),
// so bit 0 maps to a positive LLR and to the BPSK symbol +1.
inline constexpr bool kBitZeroIsPositive = true;

// Hard decision with the tie rule LLR >= 0 -> 0.
constexpr Bit hard_decision(Llr l) noexcept { return l >= 0.0 ? Bit{0} : Bit{1}; }

// Stand-in for -inf in the log domain. A finite value keeps sentinel + finite
// orderable and lets quantization saturate it to the negative extreme.
inline constexpr Metric kNegInf = -1.0e30;

constexpr bool is_neg_inf(Metric x) noexcept { return x <= kNegInf; }

enum class MaxStarMode
{
	MaxLog,
	Exact,
};

struct MetricPair
{
	Metric m0 = 0.0;
	Metric m1 = kNegInf;

	friend bool operator==(const MetricPair &, const MetricPair &) = default;
};

struct BetaLlrOutput
{
	MetricPair beta_cur;
	Metric out1 = 0.0;
	Metric out2 = 0.0;
};

struct QuantSpec
{
	bool enabled = false;
	int total_bits = 16;
	int frac_bits = 4;

	// throws std::invalid_argument unless 0 < frac_bits < total_bits <= 32
	void validate() const;
	Metric step() const;
	Metric max_value() const;
	Metric min_value() const;
};

class DegenerateMetricError : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

Metric max_star(Metric x, Metric y, MaxStarMode mode) noexcept;

// ALPHA unit. One butterfly (or one supercode section):
//   out.m0 = max*(prev.m0 + lam, prev.m1 - lam)
//   out.m1 = max*(prev.m0 - lam, prev.m1 + lam)
// The backward recursion has the same form with beta in place of alpha.
MetricPair alpha_step(MetricPair prev, Llr lam, MaxStarMode mode, OpCounters *counters = nullptr) noexcept;

// BetaLLR unit. Runs one backward step (beta_cur = alpha_step(beta_next, lam))
// and, in the same call, the two state-pairing maxima across the section
// that lam is attached to:
//   out1 = max*(alpha_prev.m0 + beta_next.m0, alpha_prev.m1 + beta_next.m1)
//   out2 = max*(alpha_prev.m0 + beta_next.m1, alpha_prev.m1 + beta_next.m0)
// out1 collects the +lam edges and out2 the -lam edges, with the branch value
// itself left out. This is the supercode extrinsic for the section, and for
// a turbo butterfly it is one of the four parts of the bit LLR.
BetaLlrOutput beta_llr_step(MetricPair beta_next, MetricPair alpha_prev, Llr lam, MaxStarMode mode,
                            OpCounters *counters = nullptr) noexcept;

// Subtracts the largest finite metric of the set from every metric. Sentinels
// stay sentinels. Throws DegenerateMetricError if every metric is a sentinel.
void normalize(std::span<MetricPair> pairs);
std::vector<MetricPair> normalized(std::vector<MetricPair> pairs);

// Round to the nearest multiple of 2^-frac_bits, saturating to the range of a
// total_bits two's-complement word. The sentinel maps to the negative extreme.
Metric quantize(Metric x, const QuantSpec &q) noexcept;

// The pair of function units both decoders are written against. Decoders never
// compute a recursion step on their own; they go through this interface so a
// test double can observe or replace every call.
class KernelUnits
{
public:
	virtual ~KernelUnits() = default;

	virtual MetricPair alpha(MetricPair prev, Llr lam, OpCounters *counters) const = 0;
	virtual BetaLlrOutput beta_llr(MetricPair beta_next, MetricPair alpha_prev, Llr lam,
	                               OpCounters *counters) const = 0;
	virtual MaxStarMode mode() const = 0;
};

// Production kernel: alpha_step / beta_llr_step, plus quantization of every
// output when the QuantSpec is enabled.
class SharedKernel final : public KernelUnits
{
public:
	explicit SharedKernel(MaxStarMode mode = MaxStarMode::MaxLog, QuantSpec quant = {});

	MetricPair alpha(MetricPair prev, Llr lam, OpCounters *counters) const override;
	BetaLlrOutput beta_llr(MetricPair beta_next, MetricPair alpha_prev, Llr lam,
	                       OpCounters *counters) const override;
	MaxStarMode mode() const override { return mode_; }
	const QuantSpec &quant() const { return quant_; }

private:
	MaxStarMode mode_;
	QuantSpec quant_;
};

MaxStarMode parse_max_star_mode(const std::string &s);
std::string to_string(MaxStarMode mode);

} // namespace unidec

#endif // UNIDEC_KERNEL_HPP_
