#ifndef UNIDEC_LDPC_DECODER_HPP_
#define UNIDEC_LDPC_DECODER_HPP_

#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "unidec/instrument.hpp"
#include "unidec/kernel.hpp"
#include "unidec/ldpc_code.hpp"

namespace unidec
{

class DegenerateRowError : public std::invalid_argument
{
public:
	using std::invalid_argument::invalid_argument;
};

// Check-node update of one parity row viewed as a two-state trellis.
// Forward: alpha_0 = (0, -inf), alpha_k = ALPHA(alpha_{k-1}, li_k / 2), k = 1..w.
// Backward, fused with the outputs: beta_w = (0, -inf), and for k = w..1
//   (beta_{k-1}, out1, out2) = BetaLLR(beta_k, alpha_{k-1}, li_k / 2)
//   lo_k = out1 - out2
// so each unit runs exactly w times. Throws DegenerateRowError when w < 2.
void check_node_update(std::span<const Llr> li, std::span<Llr> lo, const KernelUnits &kernel,
                       OpCounters *counters = nullptr);
std::vector<Llr> check_node_update(std::span<const Llr> li, MaxStarMode mode, OpCounters *counters = nullptr);

struct LdpcState
{
	std::vector<Llr> A;  // posterior accumulators, one per column
	std::vector<Llr> Lp; // last check-node output per edge, row-major edge order
	int iteration = 0;

	LdpcState() = default;
	LdpcState(std::span<const Llr> lambda, const ParityCheckMatrix &h);
};

// One pass over all rows in `row_order` (ascending when empty):
//   li = A[pi_j] - Lp_j; lo = check_node_update(li); A[pi_j] = li + lo; Lp_j = lo
void layered_iteration(LdpcState &state, const ParityCheckMatrix &h, const KernelUnits &kernel,
                       OpCounters *counters = nullptr, std::span<const std::size_t> row_order = {});

bool parity_check(const ParityCheckMatrix &h, std::span<const Bit> bits);

struct LdpcOptions
{
	int max_iterations = 5;
	MaxStarMode mode = MaxStarMode::Exact;
	QuantSpec quant;
	bool early_stop = false;
	// row processing order, a permutation of 0..M-1; ascending when empty
	std::vector<std::size_t> row_order;
	// replaces the kernel built from mode/quant when set
	const KernelUnits *kernel = nullptr;
};

struct LdpcResult
{
	std::vector<Bit> hard_bits;
	std::vector<Llr> posterior;
	int iterations_used = 0;
	bool converged = false;
	OpCounters counters;
};

class LdpcDecoder
{
public:
	LdpcDecoder(std::shared_ptr<const ParityCheckMatrix> h, LdpcOptions options = {});

	LdpcResult decode(std::span<const Llr> lambda) const;

	const ParityCheckMatrix &code() const { return *h_; }
	const LdpcOptions &options() const { return options_; }

private:
	std::shared_ptr<const ParityCheckMatrix> h_;
	LdpcOptions options_;
	std::unique_ptr<SharedKernel> owned_kernel_;
	const KernelUnits *kernel_;
};

LdpcResult ldpc_decode(std::span<const Llr> lambda, const ParityCheckMatrix &h, const LdpcOptions &options);

} // namespace unidec

#endif // UNIDEC_LDPC_DECODER_HPP_
