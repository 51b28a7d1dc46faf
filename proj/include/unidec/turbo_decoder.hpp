#ifndef UNIDEC_TURBO_DECODER_HPP_
#define UNIDEC_TURBO_DECODER_HPP_

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "unidec/instrument.hpp"
#include "unidec/kernel.hpp"
#include "unidec/trellis.hpp"

namespace unidec
{

enum class BetaInit
{
	// interior window boundaries: backward warm-up over the next W steps
	// starting from equal metrics
	Acquisition,
	// interior window boundaries: backward run from the terminated block end,
	// so every window sees exact boundary metrics
	Termination,
};

struct WindowConfig
{
	std::size_t window_len = 64;
	BetaInit beta_init = BetaInit::Acquisition;
};

// Views into the LLRs of one constituent decoder. Data sequences have length
// K, tails have length memory. The views must outlive the decode call.
struct SisoInput
{
	std::span<const Llr> l_sys;
	std::span<const Llr> l_apriori;
	std::span<const Llr> l_parity;
	std::span<const Llr> tail_sys;
	std::span<const Llr> tail_parity;

	std::size_t size() const { return l_sys.size(); }
};

// Kernel calls of one or more SISO passes, split by trellis region.
struct SisoCounters
{
	OpCounters data;        // steps 0..K-1
	OpCounters tail;        // termination steps K..K+memory-1
	OpCounters acquisition; // boundary warm-up runs

	SisoCounters &operator+=(const SisoCounters &o)
	{
		data += o.data;
		tail += o.tail;
		acquisition += o.acquisition;
		return *this;
	}
};

// Forward metrics for trellis boundaries begin..end (inclusive), num_states
// values per boundary.
struct AlphaWindow
{
	std::size_t begin = 0;
	std::size_t end = 0;
	int num_states = 0;
	std::vector<Metric> values;

	std::span<const Metric> at(std::size_t boundary) const
	{
		return {values.data() + (boundary - begin) * static_cast<std::size_t>(num_states),
		        static_cast<std::size_t>(num_states)};
	}
	std::span<Metric> at(std::size_t boundary)
	{
		return {values.data() + (boundary - begin) * static_cast<std::size_t>(num_states),
		        static_cast<std::size_t>(num_states)};
	}
};

// Max-log-MAP (or log-MAP in Exact mode) constituent decoder. Every trellis
// step goes through the kernel: one ALPHA call per butterfly forward, one
// BetaLLR call per butterfly backward.
class SisoDecoder
{
public:
	SisoDecoder(Trellis trellis, const KernelUnits &kernel, WindowConfig window = {}, bool normalize = true);

	// Extrinsic LLRs: LLR_app - (l_sys + l_apriori), length K.
	std::vector<Llr> decode(const SisoInput &in, SisoCounters *counters = nullptr) const;

	// Forward recursion over steps [begin, end) from the metrics at boundary
	// `begin`. Steps >= K are termination steps.
	AlphaWindow forward_sweep(const SisoInput &in, std::size_t begin, std::size_t end,
	                          std::span<const Metric> alpha_begin, SisoCounters *counters = nullptr) const;

	// Backward recursion over the window with fused LLR output. beta_end holds
	// the metrics at boundary alpha.end. Returns LLR_app for the data steps of
	// the window (length min(end, K) - begin).
	std::vector<Llr> backward_llr_sweep(const SisoInput &in, const AlphaWindow &alpha,
	                                    std::span<const Metric> beta_end, SisoCounters *counters = nullptr) const;

	// Backward metrics at `boundary` per the window's beta_init policy.
	std::vector<Metric> boundary_beta(const SisoInput &in, std::size_t boundary, SisoCounters *counters) const;

	std::vector<Metric> initial_alpha() const;
	std::vector<Metric> terminated_beta() const;

	const Trellis &trellis() const { return trellis_; }
	const std::vector<ButterflyPair> &butterflies() const { return butterflies_; }
	const WindowConfig &window() const { return window_; }

private:
	BranchMetrics gammas(const SisoInput &in, std::size_t step, OpCounters *counters) const;
	OpCounters *region(SisoCounters *counters, std::size_t step, std::size_t K) const;
	void check_input(const SisoInput &in) const;

	Trellis trellis_;
	std::vector<ButterflyPair> butterflies_;
	const KernelUnits &kernel_;
	WindowConfig window_;
	bool normalize_;
};

std::vector<Llr> siso_decode(const SisoInput &in, const Trellis &t, const WindowConfig &wc, const KernelUnits &kernel,
                             bool normalize = true, SisoCounters *counters = nullptr);

struct TurboOptions
{
	WindowConfig window;
	int iterations = 6;
	MaxStarMode mode = MaxStarMode::MaxLog;
	QuantSpec quant;
	bool normalize = true;
	// multiplies the extrinsic before it becomes the partner's a priori input
	double extrinsic_scale = 1.0;
	// replaces the kernel built from mode/quant when set
	const KernelUnits *kernel = nullptr;
};

struct TurboResult
{
	std::vector<Bit> hard_bits;
	std::vector<Llr> app_llrs;
	int iterations_run = 0;
	std::uint64_t siso_passes = 0;
	// totals over data and tail steps; tail and acquisition broken out
	OpCounters counters;
	OpCounters tail_counters;
	OpCounters acquisition_counters;
};

class TurboDecoder
{
public:
	TurboDecoder(Trellis trellis, Permutation perm, TurboOptions options = {});

	TurboResult decode(const TurboStreams<Llr> &llrs) const;
	TurboResult decode(const TurboStreams<Llr> &llrs, int iterations) const;

	std::size_t block_length() const { return perm_.size(); }
	const Trellis &trellis() const { return siso_.trellis(); }
	const Permutation &permutation() const { return perm_; }
	const TurboOptions &options() const { return options_; }

private:
	TurboOptions options_;
	std::unique_ptr<SharedKernel> owned_kernel_;
	Permutation perm_;
	SisoDecoder siso_;
};

TurboResult turbo_decode(const TurboStreams<Llr> &llrs, const Permutation &perm, const Trellis &t,
                         const TurboOptions &options);

} // namespace unidec

#endif // UNIDEC_TURBO_DECODER_HPP_
