#include "unidec/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#ifndef UNIDEC_DATA_DIR
#define UNIDEC_DATA_DIR "data"
#endif

namespace unidec
{

namespace
{

std::string trim(const std::string &s)
{
	const auto b = s.find_first_not_of(" \t\r");
	if (b == std::string::npos)
		return {};
	const auto e = s.find_last_not_of(" \t\r");
	return s.substr(b, e - b + 1);
}

const std::set<std::string> &known_keys()
{
	static const std::set<std::string> keys = {
	    "mode",
	    "trellis.feedback_oct",
	    "trellis.forward_oct",
	    "trellis.memory",
	    "turbo.block_length",
	    "interleaver.kind",
	    "interleaver.f1",
	    "interleaver.f2",
	    "interleaver.file",
	    "interleaver.table",
	    "ldpc.code",
	    "ldpc.format",
	    "decoder.iterations",
	    "decoder.max_star",
	    "decoder.window",
	    "decoder.beta_init",
	    "decoder.normalize",
	    "decoder.extrinsic_scale",
	    "decoder.early_stop",
	    "decoder.quant.enabled",
	    "decoder.quant.total_bits",
	    "decoder.quant.frac_bits",
	    "channel.ebn0_db",
	    "channel.seed",
	    "channel.zero_codeword",
	    "sim.max_frames",
	    "sim.min_frame_errors",
	    "sim.min_bit_errors",
	    "sim.batch",
	    "sim.failure_budget",
	    "sim.threads",
	    "output.path",
	};
	return keys;
}

std::uint64_t to_u64(const std::string &key, const std::string &v)
{
	try
	{
		std::size_t used = 0;
		if (!v.empty() && v[0] == '-')
			throw std::invalid_argument(v);
		const unsigned long long x = std::stoull(v, &used);
		if (used != v.size())
			throw std::invalid_argument(v);
		return x;
	}
	catch (const std::exception &)
	{
		throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
	}
}

int to_int(const std::string &key, const std::string &v)
{
	try
	{
		std::size_t used = 0;
		const int x = std::stoi(v, &used);
		if (used != v.size())
			throw std::invalid_argument(v);
		return x;
	}
	catch (const std::exception &)
	{
		throw ConfigError(key + ": expected an integer, got '" + v + "'");
	}
}

double to_double(const std::string &key, const std::string &v)
{
	try
	{
		std::size_t used = 0;
		const double x = std::stod(v, &used);
		if (used != v.size())
			throw std::invalid_argument(v);
		return x;
	}
	catch (const std::exception &)
	{
		throw ConfigError(key + ": expected a number, got '" + v + "'");
	}
}

bool to_bool(const std::string &key, const std::string &v)
{
	if (v == "true" || v == "1" || v == "yes" || v == "on")
		return true;
	if (v == "false" || v == "0" || v == "no" || v == "off")
		return false;
	throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<double> to_double_list(const std::string &key, const std::string &v)
{
	std::vector<double> out;
	std::string item;
	std::istringstream is(v);
	while (std::getline(is, item, ','))
	{
		item = trim(item);
		if (item.empty())
			throw ConfigError(key + ": empty item in list '" + v + "'");
		out.push_back(to_double(key, item));
	}
	if (out.empty())
		throw ConfigError(key + ": expected a comma-separated list of numbers");
	return out;
}

std::filesystem::path resolve(const std::filesystem::path &base, const std::string &v)
{
	std::filesystem::path p(v);
	if (p.is_relative() && !base.empty())
		p = base / p;
	return p;
}

} // namespace

int RunConfig::effective_iterations() const
{
	if (iterations > 0)
		return iterations;
	return mode == DecoderKind::Turbo ? 6 : 5;
}

MaxStarMode RunConfig::effective_max_star() const
{
	if (max_star)
		return *max_star;
	return mode == DecoderKind::Turbo ? MaxStarMode::MaxLog : MaxStarMode::Exact;
}

bool RunConfig::effective_early_stop(bool sweep) const
{
	if (early_stop)
		return *early_stop;
	return sweep;
}

RunConfig parse_run_config(const std::string &text, const std::filesystem::path &base_dir)
{
	RunConfig cfg;
	cfg.qpp_table = default_qpp_table();
	std::istringstream in(text);
	std::string raw;
	int lineno = 0;
	std::set<std::string> seen;
	while (std::getline(in, raw))
	{
		++lineno;
		if (auto hash = raw.find('#'); hash != std::string::npos)
			raw.erase(hash);
		const std::string line = trim(raw);
		if (line.empty())
			continue;
		const auto eq = line.find('=');
		if (eq == std::string::npos)
			throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
		const std::string key = trim(line.substr(0, eq));
		const std::string v = trim(line.substr(eq + 1));
		if (!known_keys().count(key))
			throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
		if (!seen.insert(key).second)
			throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
		if (v.empty())
			throw ConfigError("config line " + std::to_string(lineno) + ": empty value for '" + key + "'");
		cfg.entries.emplace_back(key, v);

		if (key == "mode")
		{
			if (v == "turbo")
				cfg.mode = DecoderKind::Turbo;
			else if (v == "ldpc")
				cfg.mode = DecoderKind::Ldpc;
			else
				throw ConfigError("mode: expected turbo or ldpc, got '" + v + "'");
		}
		else if (key == "trellis.feedback_oct")
			cfg.feedback_oct = v;
		else if (key == "trellis.forward_oct")
			cfg.forward_oct = v;
		else if (key == "trellis.memory")
			cfg.memory = to_int(key, v);
		else if (key == "turbo.block_length")
			cfg.block_length = to_u64(key, v);
		else if (key == "interleaver.kind")
		{
			if (v == "qpp")
				cfg.interleaver = InterleaverKind::Qpp;
			else if (v == "file")
				cfg.interleaver = InterleaverKind::File;
			else
				throw ConfigError("interleaver.kind: expected qpp or file, got '" + v + "'");
		}
		else if (key == "interleaver.f1")
			cfg.f1 = to_u64(key, v);
		else if (key == "interleaver.f2")
			cfg.f2 = to_u64(key, v);
		else if (key == "interleaver.file")
			cfg.interleaver_file = resolve(base_dir, v);
		else if (key == "interleaver.table")
			cfg.qpp_table = resolve(base_dir, v);
		else if (key == "ldpc.code")
			cfg.code_file = resolve(base_dir, v);
		else if (key == "ldpc.format")
		{
			if (v == "alist")
				cfg.code_format = CodeFileFormat::Alist;
			else if (v == "base")
				cfg.code_format = CodeFileFormat::BaseMatrix;
			else if (v == "auto")
				cfg.code_format = CodeFileFormat::Auto;
			else
				throw ConfigError("ldpc.format: expected alist, base or auto, got '" + v + "'");
		}
		else if (key == "decoder.iterations")
			cfg.iterations = to_int(key, v);
		else if (key == "decoder.max_star")
		{
			try
			{
				cfg.max_star = parse_max_star_mode(v);
			}
			catch (const std::invalid_argument &e)
			{
				throw ConfigError(std::string("decoder.max_star: ") + e.what());
			}
		}
		else if (key == "decoder.window")
			cfg.window = to_u64(key, v);
		else if (key == "decoder.beta_init")
		{
			if (v == "acquisition")
				cfg.beta_init = BetaInit::Acquisition;
			else if (v == "termination")
				cfg.beta_init = BetaInit::Termination;
			else
				throw ConfigError("decoder.beta_init: expected acquisition or termination, got '" + v + "'");
		}
		else if (key == "decoder.normalize")
			cfg.normalize = to_bool(key, v);
		else if (key == "decoder.extrinsic_scale")
			cfg.extrinsic_scale = to_double(key, v);
		else if (key == "decoder.early_stop")
			cfg.early_stop = to_bool(key, v);
		else if (key == "decoder.quant.enabled")
			cfg.quant.enabled = to_bool(key, v);
		else if (key == "decoder.quant.total_bits")
			cfg.quant.total_bits = to_int(key, v);
		else if (key == "decoder.quant.frac_bits")
			cfg.quant.frac_bits = to_int(key, v);
		else if (key == "channel.ebn0_db")
			cfg.ebn0_db = to_double_list(key, v);
		else if (key == "channel.seed")
			cfg.seed = to_u64(key, v);
		else if (key == "channel.zero_codeword")
			cfg.zero_codeword = to_bool(key, v);
		else if (key == "sim.max_frames")
			cfg.budget.max_frames = to_u64(key, v);
		else if (key == "sim.min_frame_errors")
			cfg.budget.min_frame_errors = to_u64(key, v);
		else if (key == "sim.min_bit_errors")
			cfg.budget.min_bit_errors = to_u64(key, v);
		else if (key == "sim.batch")
			cfg.budget.batch = to_u64(key, v);
		else if (key == "sim.failure_budget")
			cfg.failure_budget = to_u64(key, v);
		else if (key == "sim.threads")
			cfg.threads = static_cast<unsigned>(to_u64(key, v));
		else if (key == "output.path")
			cfg.output = resolve(base_dir, v);
	}

	// range checks that need no file access
	if (cfg.iterations < 0)
		throw ConfigError("decoder.iterations must be >= 1");
	if (cfg.window < 1)
		throw ConfigError("decoder.window must be >= 1");
	if (cfg.budget.max_frames < 1)
		throw ConfigError("sim.max_frames must be >= 1");
	if (cfg.budget.batch < 1)
		throw ConfigError("sim.batch must be >= 1");
	if (cfg.threads < 1)
		throw ConfigError("sim.threads must be >= 1");
	if (!(cfg.extrinsic_scale > 0.0))
		throw ConfigError("decoder.extrinsic_scale must be positive");
	if (cfg.quant.enabled)
	{
		try
		{
			cfg.quant.validate();
		}
		catch (const std::invalid_argument &e)
		{
			throw ConfigError(e.what());
		}
	}
	if (cfg.mode == DecoderKind::Turbo)
	{
		if (cfg.block_length < 2 && cfg.interleaver == InterleaverKind::Qpp)
			throw ConfigError("turbo.block_length must be >= 2 for a QPP interleaver");
		if (cfg.f1.has_value() != cfg.f2.has_value())
			throw ConfigError("interleaver.f1 and interleaver.f2 must be given together");
		if (cfg.interleaver == InterleaverKind::File && cfg.interleaver_file.empty())
			throw ConfigError("interleaver.kind = file needs interleaver.file");
	}
	else if (cfg.code_file.empty())
	{
		throw ConfigError("mode = ldpc needs ldpc.code");
	}
	return cfg;
}

RunConfig load_run_config(const std::filesystem::path &path)
{
	std::ifstream in(path);
	if (!in)
		throw std::runtime_error("cannot open config file " + path.string());
	std::stringstream ss;
	ss << in.rdbuf();
	return parse_run_config(ss.str(), path.parent_path());
}

std::filesystem::path default_qpp_table()
{
	if (const char *dir = std::getenv("UNIDEC_DATA_DIR"))
		return std::filesystem::path(dir) / "qpp_lte.txt";
	return std::filesystem::path(UNIDEC_DATA_DIR) / "qpp_lte.txt";
}

Trellis make_trellis(const RunConfig &cfg)
{
	try
	{
		return build_rsc_trellis_octal(cfg.feedback_oct, cfg.forward_oct, cfg.memory);
	}
	catch (const TrellisError &e)
	{
		throw ConfigError(e.what());
	}
}

Permutation make_permutation(const RunConfig &cfg)
{
	if (cfg.interleaver == InterleaverKind::File)
	{
		Permutation p = load_permutation(cfg.interleaver_file);
		if (cfg.block_length != 0 && p.size() != cfg.block_length)
			throw ConfigError("interleaver file has " + std::to_string(p.size()) + " entries, turbo.block_length is " +
			                  std::to_string(cfg.block_length));
		return p;
	}
	std::uint64_t f1 = 0;
	std::uint64_t f2 = 0;
	if (cfg.f1)
	{
		f1 = *cfg.f1;
		f2 = *cfg.f2;
	}
	else
	{
		const auto table = load_qpp_table(cfg.qpp_table);
		const auto it = table.find(cfg.block_length);
		if (it == table.end())
			throw ConfigError("no QPP coefficients for K = " + std::to_string(cfg.block_length) + " in " +
			                  cfg.qpp_table.string() + "; set interleaver.f1/f2");
		f1 = it->second.first;
		f2 = it->second.second;
	}
	try
	{
		return qpp_interleaver(cfg.block_length, f1, f2);
	}
	catch (const std::invalid_argument &e)
	{
		throw ConfigError(e.what());
	}
}

std::shared_ptr<const ParityCheckMatrix> make_parity_check_matrix(const RunConfig &cfg)
{
	return std::make_shared<const ParityCheckMatrix>(load_parity_check_matrix(cfg.code_file, cfg.code_format));
}

TurboOptions make_turbo_options(const RunConfig &cfg)
{
	TurboOptions o;
	o.window = {cfg.window, cfg.beta_init};
	o.iterations = cfg.effective_iterations();
	o.mode = cfg.effective_max_star();
	o.quant = cfg.quant;
	o.normalize = cfg.normalize;
	o.extrinsic_scale = cfg.extrinsic_scale;
	return o;
}

LdpcOptions make_ldpc_options(const RunConfig &cfg, bool sweep)
{
	LdpcOptions o;
	o.max_iterations = cfg.effective_iterations();
	o.mode = cfg.effective_max_star();
	o.quant = cfg.quant;
	o.early_stop = cfg.effective_early_stop(sweep);
	return o;
}

std::string code_id(const RunConfig &cfg)
{
	if (cfg.mode == DecoderKind::Turbo)
		return "turbo(" + cfg.feedback_oct + "," + cfg.forward_oct + ") K=" + std::to_string(cfg.block_length);
	return "ldpc " + cfg.code_file.filename().string();
}

std::unique_ptr<FrameSimulator> make_simulator(const RunConfig &cfg)
{
	if (cfg.mode == DecoderKind::Turbo)
		return std::make_unique<TurboFrameSimulator>(make_trellis(cfg), make_permutation(cfg), make_turbo_options(cfg),
		                                             code_id(cfg));
	return std::make_unique<LdpcFrameSimulator>(make_parity_check_matrix(cfg), make_ldpc_options(cfg, true),
	                                            cfg.zero_codeword, code_id(cfg));
}

void validate_run_config(const RunConfig &cfg)
{
	if (cfg.mode == DecoderKind::Turbo)
	{
		const Trellis t = make_trellis(cfg);
		try
		{
			(void)derive_butterflies(t);
		}
		catch (const TrellisError &e)
		{
			throw ConfigError(e.what());
		}
		const Permutation p = make_permutation(cfg);
		if (cfg.window > p.size())
			throw ConfigError("decoder.window must not exceed the block length");
	}
	else
	{
		if (!std::filesystem::exists(cfg.code_file))
			throw std::runtime_error("code file not found: " + cfg.code_file.string());
		const auto h = make_parity_check_matrix(cfg);
		const auto stats = code_stats(*h);
		if (!stats.decodable)
			throw ConfigError("code " + cfg.code_file.string() + " has a row of weight < 2");
		if (!cfg.zero_codeword)
			(void)LdpcEncoder(*h);
	}
}

std::vector<std::string> config_echo(const RunConfig &cfg)
{
	std::vector<std::string> out;
	for (const auto &[k, v] : cfg.entries)
		out.push_back("config " + k + " = " + v);
	return out;
}

} // namespace unidec
