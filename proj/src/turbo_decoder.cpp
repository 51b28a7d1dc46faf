#include "unidec/turbo_decoder.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

namespace unidec
{

SisoDecoder::SisoDecoder(Trellis trellis, const KernelUnits &kernel, WindowConfig window, bool normalize)
    : trellis_(std::move(trellis)), butterflies_(derive_butterflies(trellis_)), kernel_(kernel), window_(window),
      normalize_(normalize)
{
	if (window_.window_len == 0)
		throw std::invalid_argument("window length must be >= 1");
}

std::vector<Metric> SisoDecoder::initial_alpha() const
{
	std::vector<Metric> a(static_cast<std::size_t>(trellis_.num_states), kNegInf);
	a[0] = 0.0;
	return a;
}

std::vector<Metric> SisoDecoder::terminated_beta() const { return initial_alpha(); }

void SisoDecoder::check_input(const SisoInput &in) const
{
	const std::size_t K = in.size();
	if (K == 0)
		throw std::invalid_argument("SISO input is empty");
	if (in.l_apriori.size() != K || in.l_parity.size() != K)
		throw std::invalid_argument("SISO input sequences differ in length");
	const auto m = static_cast<std::size_t>(trellis_.memory);
	if (in.tail_sys.size() != m || in.tail_parity.size() != m)
		throw std::invalid_argument("SISO tail length must equal trellis memory " + std::to_string(m));
}

BranchMetrics SisoDecoder::gammas(const SisoInput &in, std::size_t step, OpCounters *counters) const
{
	const std::size_t K = in.size();
	record(counters, OpKind::Add, 1);
	record(counters, OpKind::Sub, 1);
	BranchMetrics g;
	if (step < K)
	{
		record(counters, OpKind::Add, 1);
		g = branch_metric_pair(in.l_sys[step] + in.l_apriori[step], in.l_parity[step]);
	}
	else
	{
		g = branch_metric_pair(in.tail_sys[step - K], in.tail_parity[step - K]);
	}
	// Metrics run on the log-probability scale (half the LLR scale) so that
	// Exact mode is true log-MAP; LLR_app is then num - den without a 1/2.
	return {0.5 * g.gamma1, 0.5 * g.gamma2};
}

OpCounters *SisoDecoder::region(SisoCounters *counters, std::size_t step, std::size_t K) const
{
	if (counters == nullptr)
		return nullptr;
	return step < K ? &counters->data : &counters->tail;
}

namespace
{
inline Metric lam_of(const ButterflyPair &b, const BranchMetrics &g)
{
	return b.sign * (b.gamma_kind == GammaKind::Gamma1 ? g.gamma1 : g.gamma2);
}
} // namespace

AlphaWindow SisoDecoder::forward_sweep(const SisoInput &in, std::size_t begin, std::size_t end,
                                       std::span<const Metric> alpha_begin, SisoCounters *counters) const
{
	const std::size_t K = in.size();
	const std::size_t S = static_cast<std::size_t>(trellis_.num_states);
	if (alpha_begin.size() != S)
		throw std::invalid_argument("forward_sweep: boundary metric size mismatch");
	AlphaWindow w;
	w.begin = begin;
	w.end = end;
	w.num_states = trellis_.num_states;
	w.values.resize((end - begin + 1) * S);
	std::copy(alpha_begin.begin(), alpha_begin.end(), w.at(begin).begin());

	std::vector<MetricPair> out(butterflies_.size());
	for (std::size_t k = begin; k < end; ++k)
	{
		OpCounters *ctr = region(counters, k, K);
		const BranchMetrics g = gammas(in, k, ctr);
		const auto prev = w.at(k);
		for (std::size_t i = 0; i < butterflies_.size(); ++i)
		{
			const auto &b = butterflies_[i];
			out[i] = kernel_.alpha({prev[b.prev_states[0]], prev[b.prev_states[1]]}, lam_of(b, g), ctr);
		}
		if (normalize_)
			normalize(out);
		auto next = w.at(k + 1);
		for (std::size_t i = 0; i < butterflies_.size(); ++i)
		{
			next[butterflies_[i].next_states[0]] = out[i].m0;
			next[butterflies_[i].next_states[1]] = out[i].m1;
		}
	}
	return w;
}

std::vector<Llr> SisoDecoder::backward_llr_sweep(const SisoInput &in, const AlphaWindow &alpha,
                                                 std::span<const Metric> beta_end, SisoCounters *counters) const
{
	const std::size_t K = in.size();
	const std::size_t S = static_cast<std::size_t>(trellis_.num_states);
	if (beta_end.size() != S)
		throw std::invalid_argument("backward_llr_sweep: boundary metric size mismatch");
	const std::size_t data_end = std::min(alpha.end, K);
	std::vector<Llr> llr(data_end > alpha.begin ? data_end - alpha.begin : 0);

	std::vector<Metric> beta(beta_end.begin(), beta_end.end());
	std::vector<Metric> beta_prev(S);
	std::vector<MetricPair> cur(butterflies_.size());
	const MaxStarMode mode = kernel_.mode();

	for (std::size_t k = alpha.end; k-- > alpha.begin;)
	{
		OpCounters *ctr = region(counters, k, K);
		const BranchMetrics g = gammas(in, k, ctr);
		const auto a = alpha.at(k);
		Metric num = kNegInf;
		Metric den = kNegInf;
		for (std::size_t i = 0; i < butterflies_.size(); ++i)
		{
			const auto &b = butterflies_[i];
			const Metric lam = lam_of(b, g);
			const auto r = kernel_.beta_llr({beta[b.next_states[0]], beta[b.next_states[1]]},
			                                {a[b.prev_states[0]], a[b.prev_states[1]]}, lam, ctr);
			cur[i] = r.beta_cur;
			// out1 gathers the +lam edges, out2 the -lam edges
			const Metric plus = r.out1 + lam;
			const Metric minus = r.out2 - lam;
			const Metric zero_side = b.u_plus == 0 ? plus : minus;
			const Metric one_side = b.u_plus == 0 ? minus : plus;
			num = i == 0 ? zero_side : max_star(num, zero_side, mode);
			den = i == 0 ? one_side : max_star(den, one_side, mode);
		}
		record(ctr, OpKind::Add, butterflies_.size());
		record(ctr, OpKind::Sub, butterflies_.size() + 1);
		record(ctr, OpKind::Max, 2 * (butterflies_.size() - 1));
		if (k < K)
			llr[k - alpha.begin] = num - den;

		if (normalize_)
			normalize(cur);
		for (std::size_t i = 0; i < butterflies_.size(); ++i)
		{
			beta_prev[butterflies_[i].prev_states[0]] = cur[i].m0;
			beta_prev[butterflies_[i].prev_states[1]] = cur[i].m1;
		}
		beta.swap(beta_prev);
	}
	return llr;
}

std::vector<Metric> SisoDecoder::boundary_beta(const SisoInput &in, std::size_t boundary, SisoCounters *counters) const
{
	const std::size_t K = in.size();
	const std::size_t T = K + static_cast<std::size_t>(trellis_.memory);
	const std::size_t S = static_cast<std::size_t>(trellis_.num_states);
	if (boundary >= T)
		return terminated_beta();

	std::size_t start = T;
	std::vector<Metric> beta = terminated_beta();
	if (window_.beta_init == BetaInit::Acquisition && boundary + window_.window_len < T)
	{
		start = boundary + window_.window_len;
		beta.assign(S, 0.0);
	}
	OpCounters *ctr = counters ? &counters->acquisition : nullptr;
	std::vector<MetricPair> cur(butterflies_.size());
	std::vector<Metric> beta_prev(S);
	for (std::size_t k = start; k-- > boundary;)
	{
		const BranchMetrics g = gammas(in, k, ctr);
		for (std::size_t i = 0; i < butterflies_.size(); ++i)
		{
			const auto &b = butterflies_[i];
			cur[i] = kernel_.alpha({beta[b.next_states[0]], beta[b.next_states[1]]}, lam_of(b, g), ctr);
		}
		if (normalize_)
			normalize(cur);
		for (std::size_t i = 0; i < butterflies_.size(); ++i)
		{
			beta_prev[butterflies_[i].prev_states[0]] = cur[i].m0;
			beta_prev[butterflies_[i].prev_states[1]] = cur[i].m1;
		}
		beta.swap(beta_prev);
	}
	return beta;
}

std::vector<Llr> SisoDecoder::decode(const SisoInput &in, SisoCounters *counters) const
{
	check_input(in);
	const std::size_t K = in.size();
	const std::size_t T = K + static_cast<std::size_t>(trellis_.memory);
	const std::size_t W = std::min(window_.window_len, K);

	std::vector<Llr> extrinsic(K);
	std::vector<Metric> alpha_start = initial_alpha();
	for (std::size_t begin = 0; begin < K; begin += W)
	{
		// the last window also carries the termination steps
		const std::size_t end = begin + W >= K ? T : begin + W;
		const AlphaWindow aw = forward_sweep(in, begin, end, alpha_start, counters);
		const auto last = aw.at(end);
		alpha_start.assign(last.begin(), last.end());

		const std::vector<Metric> beta_end = boundary_beta(in, end, counters);
		const std::vector<Llr> app = backward_llr_sweep(in, aw, beta_end, counters);
		for (std::size_t i = 0; i < app.size(); ++i)
		{
			const std::size_t k = begin + i;
			extrinsic[k] = app[i] - (in.l_sys[k] + in.l_apriori[k]);
		}
		if (counters)
			counters->data.record(OpKind::Sub, app.size());
	}
	return extrinsic;
}

std::vector<Llr> siso_decode(const SisoInput &in, const Trellis &t, const WindowConfig &wc, const KernelUnits &kernel,
                             bool normalize, SisoCounters *counters)
{
	return SisoDecoder(t, kernel, wc, normalize).decode(in, counters);
}

namespace
{
std::unique_ptr<SharedKernel> make_owned_kernel(const TurboOptions &o)
{
	if (o.kernel != nullptr)
		return nullptr;
	return std::make_unique<SharedKernel>(o.mode, o.quant);
}
} // namespace

TurboDecoder::TurboDecoder(Trellis trellis, Permutation perm, TurboOptions options)
    : options_(options), owned_kernel_(make_owned_kernel(options_)), perm_(std::move(perm)),
      siso_(std::move(trellis), options_.kernel ? *options_.kernel : *owned_kernel_, options_.window,
            options_.normalize)
{
	if (options_.iterations < 1)
		throw std::invalid_argument("turbo decoder needs at least one iteration");
	if (perm_.size() == 0)
		throw std::invalid_argument("turbo decoder needs a non-empty interleaver");
}

TurboResult TurboDecoder::decode(const TurboStreams<Llr> &llrs) const { return decode(llrs, options_.iterations); }

TurboResult TurboDecoder::decode(const TurboStreams<Llr> &llrs, int iterations) const
{
	if (iterations < 1)
		throw std::invalid_argument("turbo decoder needs at least one iteration");
	const std::size_t K = perm_.size();
	const auto m = static_cast<std::size_t>(siso_.trellis().memory);
	if (llrs.systematic.size() != K || llrs.parity1.size() != K || llrs.parity2.size() != K)
		throw std::invalid_argument("turbo LLR streams must have length K = " + std::to_string(K));
	if (llrs.tail_sys1.size() != m || llrs.tail_par1.size() != m || llrs.tail_sys2.size() != m ||
	    llrs.tail_par2.size() != m)
		throw std::invalid_argument("turbo tail streams must have length memory = " + std::to_string(m));

	const std::vector<Llr> sys2 = perm_.interleave<Llr>(llrs.systematic);
	std::vector<Llr> apriori1(K, 0.0);
	std::vector<Llr> apriori2(K, 0.0);
	std::vector<Llr> ext2(K, 0.0);
	SisoCounters counters;
	TurboResult result;

	for (int it = 0; it < iterations; ++it)
	{
		const SisoInput in1{llrs.systematic, apriori1, llrs.parity1, llrs.tail_sys1, llrs.tail_par1};
		std::vector<Llr> ext1 = siso_.decode(in1, &counters);
		for (auto &e : ext1)
			e *= options_.extrinsic_scale;
		apriori2 = perm_.interleave<Llr>(ext1);

		const SisoInput in2{sys2, apriori2, llrs.parity2, llrs.tail_sys2, llrs.tail_par2};
		ext2 = siso_.decode(in2, &counters);
		result.siso_passes += 2;
		if (it + 1 < iterations)
		{
			for (auto &e : ext2)
				e *= options_.extrinsic_scale;
			apriori1 = perm_.deinterleave<Llr>(ext2);
		}
	}

	// final a posteriori values in interleaved order, brought back to natural order
	std::vector<Llr> app2(K);
	for (std::size_t i = 0; i < K; ++i)
		app2[i] = sys2[i] + apriori2[i] + ext2[i];
	counters.data.record(OpKind::Add, 2 * K);
	result.app_llrs = perm_.deinterleave<Llr>(app2);
	result.hard_bits.resize(K);
	for (std::size_t k = 0; k < K; ++k)
		result.hard_bits[k] = hard_decision(result.app_llrs[k]);
	counters.data.record(OpKind::Stream, K);

	result.iterations_run = iterations;
	result.counters = counters.data + counters.tail;
	result.tail_counters = counters.tail;
	result.acquisition_counters = counters.acquisition;
	return result;
}

TurboResult turbo_decode(const TurboStreams<Llr> &llrs, const Permutation &perm, const Trellis &t,
                         const TurboOptions &options)
{
	return TurboDecoder(t, perm, options).decode(llrs);
}

} // namespace unidec
