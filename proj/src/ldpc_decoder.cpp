#include "unidec/ldpc_decoder.hpp"

#include <algorithm>
#include <string>

namespace unidec
{

void check_node_update(std::span<const Llr> li, std::span<Llr> lo, const KernelUnits &kernel, OpCounters *counters)
{
	const std::size_t w = li.size();
	if (w < 2)
		throw DegenerateRowError("check node of weight " + std::to_string(w) + " cannot produce messages");
	if (lo.size() != w)
		throw std::invalid_argument("check_node_update: output size mismatch");

	// Section k of the two-state trellis carries +-Li_k / 2, the log-probability
	// scale, so that Exact mode is the true sum-product update. In MaxLog mode
	// the factor cancels against out1 - out2.
	// alpha_0 .. alpha_w; thread_local keeps the row loop allocation free
	thread_local std::vector<MetricPair> alpha;
	alpha.resize(w + 1);
	alpha[0] = MetricPair{0.0, kNegInf};
	for (std::size_t k = 1; k <= w; ++k)
		alpha[k] = kernel.alpha(alpha[k - 1], 0.5 * li[k - 1], counters);

	MetricPair beta{0.0, kNegInf};
	for (std::size_t k = w; k >= 1; --k)
	{
		const BetaLlrOutput r = kernel.beta_llr(beta, alpha[k - 1], 0.5 * li[k - 1], counters);
		lo[k - 1] = r.out1 - r.out2;
		beta = r.beta_cur;
	}
	record(counters, OpKind::Sub, w);
}

std::vector<Llr> check_node_update(std::span<const Llr> li, MaxStarMode mode, OpCounters *counters)
{
	const SharedKernel kernel(mode);
	std::vector<Llr> lo(li.size());
	check_node_update(li, lo, kernel, counters);
	return lo;
}

LdpcState::LdpcState(std::span<const Llr> lambda, const ParityCheckMatrix &h)
    : A(lambda.begin(), lambda.end()), Lp(h.edges(), 0.0)
{
	if (lambda.size() != h.N())
		throw std::invalid_argument("channel LLR length " + std::to_string(lambda.size()) + " != N = " +
		                            std::to_string(h.N()));
}

void layered_iteration(LdpcState &state, const ParityCheckMatrix &h, const KernelUnits &kernel, OpCounters *counters,
                       std::span<const std::size_t> row_order)
{
	if (state.A.size() != h.N() || state.Lp.size() != h.edges())
		throw std::invalid_argument("LDPC state does not match the parity-check matrix");
	if (!row_order.empty() && row_order.size() != h.M())
		throw std::invalid_argument("row order must list every row exactly once");

	thread_local std::vector<Llr> li;
	thread_local std::vector<Llr> lo;
	for (std::size_t idx = 0; idx < h.M(); ++idx)
	{
		const std::size_t j = row_order.empty() ? idx : row_order[idx];
		const auto &cols = h.row(j);
		const std::size_t w = cols.size();
		const std::size_t off = h.row_offset(j);
		li.resize(w);
		lo.resize(w);
		for (std::size_t k = 0; k < w; ++k)
			li[k] = state.A[cols[k]] - state.Lp[off + k];
		check_node_update(li, lo, kernel, counters);
		for (std::size_t k = 0; k < w; ++k)
		{
			state.A[cols[k]] = li[k] + lo[k];
			state.Lp[off + k] = lo[k];
		}
		record(counters, OpKind::Sub, w);
		record(counters, OpKind::Add, w);
	}
	++state.iteration;
}

bool parity_check(const ParityCheckMatrix &h, std::span<const Bit> bits)
{
	if (bits.size() != h.N())
		throw std::invalid_argument("parity_check: word length " + std::to_string(bits.size()) + " != N = " +
		                            std::to_string(h.N()));
	for (const auto &row : h.rows())
	{
		unsigned acc = 0;
		for (const std::size_t n : row)
			acc ^= bits[n] & 1u;
		if (acc)
			return false;
	}
	return true;
}

LdpcDecoder::LdpcDecoder(std::shared_ptr<const ParityCheckMatrix> h, LdpcOptions options)
    : h_(std::move(h)), options_(std::move(options))
{
	if (!h_)
		throw std::invalid_argument("LdpcDecoder needs a parity-check matrix");
	if (options_.max_iterations < 1)
		throw std::invalid_argument("LDPC decoder needs at least one iteration");
	for (std::size_t j = 0; j < h_->M(); ++j)
		if (h_->row(j).size() < 2)
			throw DegenerateRowError("row " + std::to_string(j) + " has weight " +
			                         std::to_string(h_->row(j).size()) + "; every row needs weight >= 2");
	if (!options_.row_order.empty())
	{
		std::vector<std::size_t> sorted = options_.row_order;
		std::sort(sorted.begin(), sorted.end());
		for (std::size_t i = 0; i < sorted.size(); ++i)
			if (sorted[i] != i || sorted.size() != h_->M())
				throw std::invalid_argument("row order must be a permutation of 0..M-1");
	}
	if (options_.kernel == nullptr)
		owned_kernel_ = std::make_unique<SharedKernel>(options_.mode, options_.quant);
	kernel_ = options_.kernel ? options_.kernel : owned_kernel_.get();
}

LdpcResult LdpcDecoder::decode(std::span<const Llr> lambda) const
{
	const ParityCheckMatrix &h = *h_;
	LdpcState state(lambda, h);
	LdpcResult result;
	result.hard_bits.resize(h.N());

	auto decide = [&] {
		for (std::size_t n = 0; n < h.N(); ++n)
			result.hard_bits[n] = hard_decision(state.A[n]);
	};

	for (int it = 0; it < options_.max_iterations; ++it)
	{
		layered_iteration(state, h, *kernel_, &result.counters, options_.row_order);
		if (options_.early_stop)
		{
			decide();
			if (parity_check(h, result.hard_bits))
			{
				result.converged = true;
				break;
			}
		}
	}
	if (!options_.early_stop)
	{
		decide();
		result.converged = parity_check(h, result.hard_bits);
	}
	result.counters.record(OpKind::Stream, h.N());
	result.iterations_used = state.iteration;
	result.posterior = std::move(state.A);
	return result;
}

LdpcResult ldpc_decode(std::span<const Llr> lambda, const ParityCheckMatrix &h, const LdpcOptions &options)
{
	// non-owning alias; the matrix outlives this call
	return LdpcDecoder(std::shared_ptr<const ParityCheckMatrix>(&h, [](const ParityCheckMatrix *) {}), options)
	    .decode(lambda);
}

} // namespace unidec
