#include "unidec/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace unidec
{

void QuantSpec::validate() const
{
	if (!(0 < frac_bits && frac_bits < total_bits && total_bits <= 32))
		throw std::invalid_argument("quantization requires 0 < frac_bits < total_bits <= 32, got total_bits=" +
		                            std::to_string(total_bits) + " frac_bits=" + std::to_string(frac_bits));
}

Metric QuantSpec::step() const { return std::ldexp(1.0, -frac_bits); }

Metric QuantSpec::max_value() const { return std::ldexp(1.0, total_bits - 1 - frac_bits) - step(); }

Metric QuantSpec::min_value() const { return -std::ldexp(1.0, total_bits - 1 - frac_bits); }

namespace
{
inline Metric clamp_sentinel(Metric x) noexcept { return x < kNegInf ? kNegInf : x; }
} // namespace

Metric max_star(Metric x, Metric y, MaxStarMode mode) noexcept
{
	if (is_neg_inf(x))
		return clamp_sentinel(y);
	if (is_neg_inf(y))
		return x;
	const Metric m = std::max(x, y);
	if (mode == MaxStarMode::MaxLog)
		return m;
	return m + std::log1p(std::exp(-std::abs(x - y)));
}

MetricPair alpha_step(MetricPair prev, Llr lam, MaxStarMode mode, OpCounters *counters) noexcept
{
	record(counters, OpKind::Alpha);
	record(counters, OpKind::Add, 2);
	record(counters, OpKind::Sub, 2);
	return {max_star(prev.m0 + lam, prev.m1 - lam, mode), max_star(prev.m0 - lam, prev.m1 + lam, mode)};
}

BetaLlrOutput beta_llr_step(MetricPair beta_next, MetricPair alpha_prev, Llr lam, MaxStarMode mode,
                            OpCounters *counters) noexcept
{
	record(counters, OpKind::BetaLlr);
	record(counters, OpKind::Add, 6);
	record(counters, OpKind::Sub, 2);
	BetaLlrOutput r;
	r.beta_cur = {max_star(beta_next.m0 + lam, beta_next.m1 - lam, mode),
	              max_star(beta_next.m0 - lam, beta_next.m1 + lam, mode)};
	r.out1 = max_star(alpha_prev.m0 + beta_next.m0, alpha_prev.m1 + beta_next.m1, mode);
	r.out2 = max_star(alpha_prev.m0 + beta_next.m1, alpha_prev.m1 + beta_next.m0, mode);
	return r;
}

void normalize(std::span<MetricPair> pairs)
{
	Metric top = kNegInf;
	for (const auto &p : pairs)
		top = std::max({top, p.m0, p.m1});
	if (is_neg_inf(top))
		throw DegenerateMetricError("normalize: every metric in the set is the -inf sentinel");
	for (auto &p : pairs)
	{
		p.m0 = is_neg_inf(p.m0) ? kNegInf : p.m0 - top;
		p.m1 = is_neg_inf(p.m1) ? kNegInf : p.m1 - top;
	}
}

std::vector<MetricPair> normalized(std::vector<MetricPair> pairs)
{
	normalize(pairs);
	return pairs;
}

Metric quantize(Metric x, const QuantSpec &q) noexcept
{
	const Metric lo = q.min_value();
	const Metric hi = q.max_value();
	if (is_neg_inf(x))
		return lo;
	const Metric scaled = std::nearbyint(std::ldexp(x, q.frac_bits));
	return std::clamp(std::ldexp(scaled, -q.frac_bits), lo, hi);
}

SharedKernel::SharedKernel(MaxStarMode mode, QuantSpec quant) : mode_(mode), quant_(quant)
{
	if (quant_.enabled)
		quant_.validate();
}

MetricPair SharedKernel::alpha(MetricPair prev, Llr lam, OpCounters *counters) const
{
	auto out = alpha_step(prev, lam, mode_, counters);
	if (quant_.enabled)
		out = {quantize(out.m0, quant_), quantize(out.m1, quant_)};
	return out;
}

BetaLlrOutput SharedKernel::beta_llr(MetricPair beta_next, MetricPair alpha_prev, Llr lam, OpCounters *counters) const
{
	auto out = beta_llr_step(beta_next, alpha_prev, lam, mode_, counters);
	if (quant_.enabled)
	{
		out.beta_cur = {quantize(out.beta_cur.m0, quant_), quantize(out.beta_cur.m1, quant_)};
		out.out1 = quantize(out.out1, quant_);
		out.out2 = quantize(out.out2, quant_);
	}
	return out;
}

MaxStarMode parse_max_star_mode(const std::string &s)
{
	if (s == "maxlog" || s == "max-log" || s == "MaxLog")
		return MaxStarMode::MaxLog;
	if (s == "exact" || s == "Exact")
		return MaxStarMode::Exact;
	throw std::invalid_argument("unknown max* mode '" + s + "' (expected maxlog or exact)");
}

std::string to_string(MaxStarMode mode) { return mode == MaxStarMode::MaxLog ? "maxlog" : "exact"; }

} // namespace unidec
