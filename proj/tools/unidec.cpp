// unidec: inspect codes, encode, decode, sweep and report op counts.
//
// Exit codes: 0 ok, 1 sweep failure budget exceeded, 2 usage or config error,
// 3 I/O or parse error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "unidec/channel.hpp"
#include "unidec/config.hpp"
#include "unidec/instrument.hpp"
#include "unidec/ldpc_code.hpp"
#include "unidec/ldpc_decoder.hpp"
#include "unidec/trellis.hpp"
#include "unidec/turbo_decoder.hpp"

namespace fs = std::filesystem;
using namespace unidec;

namespace
{

enum ExitCode
{
	kOk = 0,
	kBudgetExceeded = 1,
	kUsage = 2,
	kIo = 3,
};

// usage-level failure raised by the commands themselves (length mismatch etc.)
struct UsageError : std::invalid_argument
{
	using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error
{
	using std::runtime_error::runtime_error;
};

std::vector<std::string> read_lines(const fs::path &path)
{
	std::ifstream in(path);
	if (!in)
		throw IoError("cannot open " + path.string());
	std::vector<std::string> lines;
	std::string line;
	while (std::getline(in, line))
		lines.push_back(line);
	return lines;
}

bool blank(const std::string &s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

std::vector<Llr> read_llrs(const fs::path &path)
{
	std::vector<Llr> out;
	const auto lines = read_lines(path);
	for (std::size_t i = 0; i < lines.size(); ++i)
	{
		if (blank(lines[i]))
			continue;
		std::istringstream is(lines[i]);
		double v = 0.0;
		std::string rest;
		if (!(is >> v) || (is >> rest))
			throw IoError(path.string() + " line " + std::to_string(i + 1) + ": expected one decimal LLR, got '" +
			              lines[i] + "'");
		out.push_back(v);
	}
	return out;
}

std::vector<Bit> read_bits(const fs::path &path)
{
	std::vector<Bit> out;
	const auto lines = read_lines(path);
	for (std::size_t i = 0; i < lines.size(); ++i)
	{
		if (blank(lines[i]))
			continue;
		std::istringstream is(lines[i]);
		std::string tok;
		std::string rest;
		is >> tok;
		if ((tok != "0" && tok != "1") || (is >> rest))
			throw IoError(path.string() + " line " + std::to_string(i + 1) + ": expected 0 or 1, got '" + lines[i] +
			              "'");
		out.push_back(tok == "1" ? 1 : 0);
	}
	return out;
}

// Writes to a sibling temp file and renames, so a failure never leaves a
// half-written output behind.
void write_text(const fs::path &path, const std::string &text)
{
	fs::path tmp = path;
	tmp += ".tmp";
	{
		std::ofstream out(tmp);
		if (!out)
			throw IoError("cannot write " + path.string());
		out << text;
		if (!out)
			throw IoError("write failed for " + path.string());
	}
	std::error_code ec;
	fs::rename(tmp, path, ec);
	if (ec)
	{
		fs::remove(tmp, ec);
		throw IoError("cannot write " + path.string());
	}
}

template <typename T>
std::string one_per_line(const std::vector<T> &v)
{
	std::ostringstream os;
	os.precision(17);
	for (const auto &x : v)
	{
		if constexpr (std::is_same_v<T, Bit>)
			os << static_cast<int>(x) << "\n";
		else
			os << x << "\n";
	}
	return os.str();
}

RunConfig load_config(const std::string &path)
{
	RunConfig cfg = load_run_config(path);
	validate_run_config(cfg);
	return cfg;
}

std::string metadata(const RunConfig &cfg)
{
	std::string out;
	for (const auto &line : config_echo(cfg))
		out += "# " + line + "\n";
	return out;
}

// ---------------------------------------------------------------- inspect

int cmd_inspect(const std::string &code_file, const std::string &config_path)
{
	if (!config_path.empty())
	{
		const RunConfig cfg = load_config(config_path);
		if (cfg.mode == DecoderKind::Ldpc)
		{
			std::cout << "code: " << cfg.code_file.string() << "\n";
			std::cout << format_stats(code_stats(*make_parity_check_matrix(cfg)));
			return kOk;
		}
		const Trellis t = make_trellis(cfg);
		const auto bf = derive_butterflies(t);
		std::cout << "code: " << code_id(cfg) << "\n";
		std::cout << "states: " << t.num_states << "\n";
		std::cout << "memory: " << t.memory << "\n";
		std::cout << "feedback: " << poly_to_octal(t.feedback_poly, t.memory) << "\n";
		std::cout << "forward: " << poly_to_octal(t.forward_poly, t.memory) << "\n";
		std::cout << "butterflies: " << bf.size() << "\n";
		for (const auto &b : bf)
			std::cout << "  {" << b.prev_states[0] << "," << b.prev_states[1] << "} -> {" << b.next_states[0] << ","
			          << b.next_states[1] << "} " << (b.gamma_kind == GammaKind::Gamma1 ? "gamma1" : "gamma2")
			          << (b.sign > 0 ? " +" : " -") << "\n";
		std::cout << "block_length: " << cfg.block_length << "\n";
		std::cout << "stream_length: " << 3 * cfg.block_length + 4 * static_cast<std::size_t>(t.memory) << "\n";
		return kOk;
	}
	if (!fs::exists(code_file))
		throw IoError("code file not found: " + code_file);
	const ParityCheckMatrix h = load_parity_check_matrix(code_file);
	std::cout << "code: " << code_file << "\n";
	std::cout << format_stats(code_stats(h));
	return kOk;
}

// ---------------------------------------------------------------- encode

int cmd_encode(const std::string &config_path, const std::string &in_path, const std::string &out_path,
               double magnitude, bool as_bits)
{
	const RunConfig cfg = load_config(config_path);
	if (!(magnitude > 0.0))
		throw UsageError("--llr-magnitude must be positive");
	const std::vector<Bit> payload = read_bits(in_path);

	std::vector<Bit> coded;
	if (cfg.mode == DecoderKind::Turbo)
	{
		const Permutation perm = make_permutation(cfg);
		if (payload.size() != perm.size())
			throw UsageError("payload has " + std::to_string(payload.size()) + " bits, K = " +
			                 std::to_string(perm.size()));
		coded = turbo_encode(payload, make_trellis(cfg), perm).flatten();
	}
	else
	{
		const auto h = make_parity_check_matrix(cfg);
		const LdpcEncoder enc(*h);
		if (payload.size() != enc.message_length())
			throw UsageError("payload has " + std::to_string(payload.size()) + " bits, code needs " +
			                 std::to_string(enc.message_length()));
		coded = enc.encode(payload);
	}

	if (as_bits)
	{
		write_text(out_path, one_per_line(coded));
	}
	else
	{
		std::vector<Llr> llrs(coded.size());
		for (std::size_t i = 0; i < coded.size(); ++i)
			llrs[i] = coded[i] ? -magnitude : magnitude;
		write_text(out_path, one_per_line(llrs));
	}
	std::cout << "encoded " << payload.size() << " bits into " << coded.size() << " symbols\n";
	return kOk;
}

// ---------------------------------------------------------------- decode

int cmd_decode(const std::string &config_path, const std::string &in_path, const std::string &out_path,
               const std::string &report_path)
{
	const RunConfig cfg = load_config(config_path);
	const std::vector<Llr> llrs = read_llrs(in_path);

	std::vector<Bit> bits;
	std::string text;
	if (cfg.mode == DecoderKind::Turbo)
	{
		const Trellis t = make_trellis(cfg);
		const Permutation perm = make_permutation(cfg);
		const std::size_t want = 3 * perm.size() + 4 * static_cast<std::size_t>(t.memory);
		if (llrs.size() != want)
			throw UsageError("LLR file has " + std::to_string(llrs.size()) + " values, expected 3K + 4m = " +
			                 std::to_string(want));
		const auto streams = TurboStreams<Llr>::unflatten(llrs, perm.size(), t.memory);
		const TurboDecoder dec(t, perm, make_turbo_options(cfg));
		const TurboResult r = dec.decode(streams);
		bits = r.hard_bits;
		ReportContext ctx;
		ctx.kind = DecoderKind::Turbo;
		ctx.code_id = code_id(cfg);
		ctx.block_length = perm.size();
		ctx.memory = t.memory;
		ctx.siso_passes = r.siso_passes;
		ctx.tail = r.tail_counters;
		ctx.acquisition = r.acquisition_counters;
		text = "iterations_used: " + std::to_string(r.iterations_run) + "\n" + report(r.counters, ctx);
	}
	else
	{
		const auto h = make_parity_check_matrix(cfg);
		if (llrs.size() != h->N())
			throw UsageError("LLR file has " + std::to_string(llrs.size()) + " values, code length N = " +
			                 std::to_string(h->N()));
		const LdpcDecoder dec(h, make_ldpc_options(cfg, false));
		const LdpcResult r = dec.decode(llrs);
		bits = r.hard_bits;
		ReportContext ctx;
		ctx.kind = DecoderKind::Ldpc;
		ctx.code_id = code_id(cfg);
		ctx.edges = h->edges();
		ctx.iterations = static_cast<std::uint64_t>(r.iterations_used);
		ctx.code_length = h->N();
		text = "iterations_used: " + std::to_string(r.iterations_used) + "\n" +
		       "converged: " + (r.converged ? "true" : "false") + "\n" + report(r.counters, ctx);
	}

	write_text(out_path, one_per_line(bits));
	if (!report_path.empty())
		write_text(report_path, metadata(cfg) + text);
	std::cout << text;
	return kOk;
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(const std::string &config_path, const std::string &out_path, std::optional<std::uint64_t> seed,
              std::optional<unsigned> threads)
{
	RunConfig cfg = load_config(config_path);
	if (seed)
		cfg.seed = *seed;
	if (threads)
	{
		if (*threads < 1)
			throw UsageError("--threads must be >= 1");
		cfg.threads = *threads;
	}
	if (cfg.ebn0_db.empty())
		throw ConfigError("sweep needs channel.ebn0_db");
	fs::path out = out_path.empty() ? cfg.output.value_or(fs::path{}) : fs::path(out_path);

	const auto sim = make_simulator(cfg);
	SweepOptions so;
	so.ebn0_db = cfg.ebn0_db;
	so.budget = cfg.budget;
	so.seed = cfg.seed;
	so.threads = cfg.threads;
	const SweepResult result = run_sweep(*sim, so);

	std::vector<std::string> extra = config_echo(cfg);
	extra.push_back("effective seed = " + std::to_string(cfg.seed));
	const std::string csv = sweep_csv(result, extra);
	if (out.empty())
		std::cout << csv;
	else
		write_text(out, csv);

	std::uint64_t invalid = 0;
	for (const auto &p : result.points)
		invalid += p.invalid_converged;
	if (invalid > 0)
	{
		std::cerr << "error: " << invalid << " converged frames failed the parity check\n";
		return kBudgetExceeded;
	}
	if (cfg.failure_budget && result.total_frame_errors() > *cfg.failure_budget)
	{
		std::cerr << "decode failures " << result.total_frame_errors() << " exceed sim.failure_budget "
		          << *cfg.failure_budget << "\n";
		return kBudgetExceeded;
	}
	return kOk;
}

// ---------------------------------------------------------------- report

const std::vector<ThroughputCheck> &throughput_checks()
{
	static const std::vector<ThroughputCheck> checks = {
	    {"turbo K=6144 (3 x 6144 bits/iteration)", 18432.0, 200e6, 166224.0, 1.0, 22.64},
	    {"ldpc n=648, 1 iteration", 648.0, 200e6, 10368.0, 1.0, 10.12},
	    {"ldpc n=648, 5 iterations", 648.0, 200e6, 10368.0, 5.0, 10.12},
	};
	return checks;
}

int cmd_report(const std::string &config_path, const std::string &out_path)
{
	const RunConfig cfg = load_config(config_path);
	std::string text = metadata(cfg);
	if (cfg.mode == DecoderKind::Turbo)
	{
		const Trellis t = make_trellis(cfg);
		const Permutation perm = make_permutation(cfg);
		// op counts do not depend on the data; decode a clean all-zero frame
		const std::vector<Bit> zeros(perm.size(), 0);
		const auto enc = turbo_encode(zeros, t, perm).flatten();
		std::vector<Llr> llrs(enc.size());
		for (std::size_t i = 0; i < enc.size(); ++i)
			llrs[i] = enc[i] ? -4.0 : 4.0;
		const TurboDecoder dec(t, perm, make_turbo_options(cfg));
		const TurboResult r = dec.decode(TurboStreams<Llr>::unflatten(llrs, perm.size(), t.memory));
		ReportContext ctx;
		ctx.kind = DecoderKind::Turbo;
		ctx.code_id = code_id(cfg);
		ctx.block_length = perm.size();
		ctx.memory = t.memory;
		ctx.siso_passes = r.siso_passes;
		ctx.tail = r.tail_counters;
		ctx.acquisition = r.acquisition_counters;
		text += report(r.counters, ctx);
	}
	else
	{
		const auto h = make_parity_check_matrix(cfg);
		LdpcOptions o = make_ldpc_options(cfg, false);
		o.early_stop = false;
		const LdpcDecoder dec(h, o);
		const std::vector<Llr> llrs(h->N(), 4.0);
		const LdpcResult r = dec.decode(llrs);
		ReportContext ctx;
		ctx.kind = DecoderKind::Ldpc;
		ctx.code_id = code_id(cfg);
		ctx.edges = h->edges();
		ctx.iterations = static_cast<std::uint64_t>(r.iterations_used);
		ctx.code_length = h->N();
		text += report(r.counters, ctx);
	}
	text += "\nthroughput model: block_bits * clock / (latency_cycles * iterations)\n";
	for (const auto &c : throughput_checks())
		text += throughput_report(c);

	if (out_path.empty())
		std::cout << text;
	else
		write_text(out_path, text);
	return kOk;
}

} // namespace

int main(int argc, char **argv)
{
	CLI::App app{"unidec: shared-kernel turbo and LDPC decoding"};
	app.require_subcommand(1);

	std::string config;
	std::string in;
	std::string out;
	std::string report_out;
	std::string code_file;
	double magnitude = 10.0;
	bool as_bits = false;
	std::optional<std::uint64_t> seed;
	std::optional<unsigned> threads;

	auto *inspect = app.add_subcommand("inspect", "print code statistics or a trellis summary");
	inspect->add_option("code", code_file, "alist or base-matrix file");
	inspect->add_option("--config", config, "run configuration");

	auto *encode = app.add_subcommand("encode", "encode payload bits into LLR-ready streams");
	encode->add_option("--config", config, "run configuration")->required();
	encode->add_option("--in", in, "payload bits, one per line")->required();
	encode->add_option("--out", out, "output file")->required();
	encode->add_option("--llr-magnitude", magnitude, "LLR magnitude for clean symbols");
	encode->add_flag("--bits", as_bits, "write coded bits instead of LLRs");

	auto *decode = app.add_subcommand("decode", "decode an LLR file into hard bits");
	decode->add_option("--config", config, "run configuration")->required();
	decode->add_option("--in", in, "LLRs, one per line")->required();
	decode->add_option("--out", out, "hard bits output")->required();
	decode->add_option("--report", report_out, "write the counter report here too");

	auto *sweep = app.add_subcommand("sweep", "BER/FER simulation over channel.ebn0_db");
	sweep->add_option("--config", config, "run configuration")->required();
	sweep->add_option("--out", out, "CSV output (default: output.path or stdout)");
	sweep->add_option("--seed", seed, "overrides channel.seed");
	sweep->add_option("--threads", threads, "overrides sim.threads");

	auto *rep = app.add_subcommand("report", "operation counts for one decode plus throughput model checks");
	rep->add_option("--config", config, "run configuration")->required();
	rep->add_option("--out", out, "output file (default stdout)");

	try
	{
		app.parse(argc, argv);
	}
	catch (const CLI::ParseError &e)
	{
		const int rc = app.exit(e);
		return rc == 0 ? kOk : kUsage;
	}

	try
	{
		if (*inspect)
		{
			if (code_file.empty() == config.empty())
				throw UsageError("inspect needs exactly one of <code> or --config");
			return cmd_inspect(code_file, config);
		}
		if (*encode)
			return cmd_encode(config, in, out, magnitude, as_bits);
		if (*decode)
			return cmd_decode(config, in, out, report_out);
		if (*sweep)
			return cmd_sweep(config, out, seed, threads);
		if (*rep)
			return cmd_report(config, out);
	}
	catch (const LdpcParseError &e)
	{
		std::cerr << "parse error: " << e.what() << "\n";
		return kIo;
	}
	catch (const std::invalid_argument &e)
	{
		// ConfigError, TrellisError, UsageError and length mismatches
		std::cerr << "error: " << e.what() << "\n";
		return kUsage;
	}
	catch (const std::exception &e)
	{
		std::cerr << "error: " << e.what() << "\n";
		return kIo;
	}
	return kUsage;
}
