#include "unidec/instrument.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace unidec
{

void OpCounters::record(OpKind kind, std::uint64_t n) noexcept
{
	switch (kind)
	{
	case OpKind::Add: add += n; break;
	case OpKind::Sub: sub += n; break;
	case OpKind::Max: max += n; break;
	case OpKind::Alpha: alpha += n; break;
	case OpKind::BetaLlr: beta_llr += n; break;
	case OpKind::Stream: stream += n; break;
	}
}

std::uint64_t OpCounters::get(OpKind kind) const noexcept
{
	switch (kind)
	{
	case OpKind::Add: return add;
	case OpKind::Sub: return sub;
	case OpKind::Max: return max;
	case OpKind::Alpha: return alpha;
	case OpKind::BetaLlr: return beta_llr;
	case OpKind::Stream: return stream;
	}
	return 0;
}

OpCounters &OpCounters::operator+=(const OpCounters &o) noexcept
{
	add += o.add;
	sub += o.sub;
	max += o.max;
	alpha += o.alpha;
	beta_llr += o.beta_llr;
	stream += o.stream;
	return *this;
}

double throughput_model(double block_bits, double clock_hz, double latency_cycles, double iterations)
{
	if (!(block_bits > 0 && clock_hz > 0 && latency_cycles > 0 && iterations > 0))
		throw std::invalid_argument("throughput_model: all inputs must be positive");
	return block_bits * clock_hz / (latency_cycles * iterations);
}

namespace
{

struct Row
{
	const char *name;
	OpKind kind;
};

constexpr Row kRows[] = {
    {"ADD", OpKind::Add},     {"SUB", OpKind::Sub},         {"MAX", OpKind::Max},
    {"ALPHA", OpKind::Alpha}, {"BetaLLR", OpKind::BetaLlr}, {"STREAM", OpKind::Stream},
};

const char *check_mark(bool ok) { return ok ? "ok" : "MISMATCH"; }

} // namespace

std::string report(const OpCounters &counters, const ReportContext &ctx)
{
	std::ostringstream os;
	const bool turbo = ctx.kind == DecoderKind::Turbo;
	os << "# operation counts (" << (turbo ? "turbo" : "ldpc");
	if (!ctx.code_id.empty())
		os << ", " << ctx.code_id;
	os << ")\n";
	os << std::left << std::setw(10) << "operation" << std::right << std::setw(14) << "total";
	if (turbo)
		os << std::setw(14) << "per pass" << std::setw(14) << "tail";
	else
		os << std::setw(14) << "per iter";
	os << "\n";

	const std::uint64_t div = turbo ? ctx.siso_passes : ctx.iterations;
	for (const auto &row : kRows)
	{
		const std::uint64_t total = counters.get(row.kind);
		os << std::left << std::setw(10) << row.name << std::right << std::setw(14) << total;
		if (turbo)
		{
			const std::uint64_t tail = ctx.tail.get(row.kind);
			// per pass excludes termination steps; STREAM is per decode
			if (row.kind == OpKind::Stream)
				os << std::setw(14) << "-" << std::setw(14) << "-";
			else if (div > 0)
				os << std::setw(14) << (total - tail) / div << std::setw(14) << tail / div;
			else
				os << std::setw(14) << "-" << std::setw(14) << "-";
		}
		else
		{
			if (row.kind != OpKind::Stream && div > 0)
				os << std::setw(14) << total / div;
			else
				os << std::setw(14) << "-";
		}
		os << "\n";
	}

	os << "# checks\n";
	if (turbo)
	{
		const std::uint64_t butterflies = ctx.memory > 0 ? (1ull << (ctx.memory - 1)) : 0;
		const std::uint64_t per_pass_data = div > 0 ? (counters.alpha - ctx.tail.alpha) / div : 0;
		const std::uint64_t per_pass_tail = div > 0 ? ctx.tail.alpha / div : 0;
		os << "alpha per pass (data steps) = " << per_pass_data << ", expected " << butterflies << " x K = "
		   << butterflies * ctx.block_length << " [" << check_mark(per_pass_data == butterflies * ctx.block_length)
		   << "]\n";
		os << "alpha per pass (tail steps) = " << per_pass_tail << ", expected " << butterflies << " x memory = "
		   << butterflies * ctx.memory << " [" << check_mark(per_pass_tail == butterflies * ctx.memory) << "]\n";
		os << "alpha == betallr: " << check_mark(counters.alpha == counters.beta_llr) << "\n";
		os << "stream == K: " << check_mark(counters.stream == ctx.block_length) << "\n";
		if (ctx.acquisition.alpha > 0)
			os << "acquisition warm-up alpha calls (not in totals): " << ctx.acquisition.alpha << "\n";
	}
	else
	{
		const std::uint64_t per_iter = div > 0 ? counters.alpha / div : 0;
		os << "alpha per iteration = " << per_iter << ", expected edges = " << ctx.edges << " ["
		   << check_mark(per_iter == ctx.edges && counters.alpha == ctx.edges * div) << "]\n";
		os << "alpha == betallr: " << check_mark(counters.alpha == counters.beta_llr) << "\n";
		os << "max == 0: " << check_mark(counters.max == 0) << "\n";
		os << "stream == N: " << check_mark(counters.stream == ctx.code_length) << "\n";
	}
	os << "# ADD/SUB count kernel and decoder arithmetic only (no loop indexing); not comparable to published "
	      "ADD/SUB totals\n";
	return os.str();
}

std::string report_csv(const OpCounters &counters, const ReportContext &ctx)
{
	std::ostringstream os;
	os << "operation,total,tail\n";
	for (const auto &row : kRows)
		os << row.name << "," << counters.get(row.kind) << "," << ctx.tail.get(row.kind) << "\n";
	return os.str();
}

std::string throughput_report(const ThroughputCheck &check)
{
	const double model = throughput_model(check.block_bits, check.clock_hz, check.latency_cycles, check.iterations);
	const double model_mbps = model / 1e6;
	const double rel = (check.published_mbps - model_mbps) / model_mbps;
	std::ostringstream os;
	os << std::fixed << std::setprecision(2);
	os << check.label << ": model " << model_mbps << " Mbps (" << std::setprecision(0) << check.block_bits
	   << " bits x " << check.clock_hz / 1e6 << " MHz / (" << check.latency_cycles << " cycles x "
	   << check.iterations << " it)), published " << std::setprecision(2) << check.published_mbps
	   << " Mbps, discrepancy " << std::showpos << rel * 100.0 << std::noshowpos << "%\n";
	return os.str();
}

} // namespace unidec
