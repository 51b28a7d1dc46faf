#ifndef UNIDEC_INSTRUMENT_HPP_
#define UNIDEC_INSTRUMENT_HPP_

#include <cstdint>
#include <optional>
#include <string>

namespace unidec
{

enum class OpKind
{
	Add,
	Sub,
	Max,
	Alpha,
	BetaLlr,
	Stream,
};

// Invocation tallies for one decode job. ADD/SUB only count arithmetic in the
// kernel and decoder data paths, never loop bookkeeping.
struct OpCounters
{
	std::uint64_t add = 0;
	std::uint64_t sub = 0;
	std::uint64_t max = 0;
	std::uint64_t alpha = 0;
	std::uint64_t beta_llr = 0;
	std::uint64_t stream = 0;

	void record(OpKind kind, std::uint64_t n = 1) noexcept;
	std::uint64_t get(OpKind kind) const noexcept;

	OpCounters &operator+=(const OpCounters &o) noexcept;
	friend OpCounters operator+(OpCounters a, const OpCounters &b) noexcept { return a += b; }
	friend bool operator==(const OpCounters &, const OpCounters &) = default;
};

inline void record(OpCounters *counters, OpKind kind, std::uint64_t n = 1) noexcept
{
	if (counters != nullptr)
		counters->record(kind, n);
}

// bits per second = block_bits * clock_hz / (latency_cycles * iterations).
// Throws std::invalid_argument on non-positive inputs.
double throughput_model(double block_bits, double clock_hz, double latency_cycles, double iterations);

enum class DecoderKind
{
	Turbo,
	Ldpc,
};

struct ReportContext
{
	DecoderKind kind = DecoderKind::Ldpc;
	std::string code_id;

	// turbo
	std::uint64_t block_length = 0; // K
	int memory = 0;
	std::uint64_t siso_passes = 0;
	OpCounters tail;         // part of the totals spent on termination steps
	OpCounters acquisition;  // backward warm-up, not part of the totals

	// ldpc
	std::uint64_t edges = 0;
	std::uint64_t iterations = 0;
	std::uint64_t code_length = 0;
};

// Two-column count table in the order ADD, SUB, MAX, ALPHA, BetaLLR, STREAM,
// followed by the derived per-pass / per-iteration checks.
std::string report(const OpCounters &counters, const ReportContext &ctx);
std::string report_csv(const OpCounters &counters, const ReportContext &ctx);

struct ThroughputCheck
{
	std::string label;
	double block_bits;
	double clock_hz;
	double latency_cycles;
	double iterations;
	double published_mbps;
};

// Evaluates the model for a published operating point and states how far the
// published figure is from the model value.
std::string throughput_report(const ThroughputCheck &check);

} // namespace unidec

#endif // UNIDEC_INSTRUMENT_HPP_
