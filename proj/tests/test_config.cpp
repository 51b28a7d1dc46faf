#include <doctest.h>

#include <fstream>

#include "unidec/config.hpp"

using namespace unidec;
namespace fs = std::filesystem;

namespace
{

const std::string kLdpc = "mode = ldpc\nldpc.code = " UNIDEC_TEST_DATA_DIR "/80211n_r12_n648.txt\n";
const std::string kTurbo = "mode = turbo\nturbo.block_length = 128\n";

std::string config_error(const std::string &text)
{
	try
	{
		parse_run_config(text);
	}
	catch (const ConfigError &e)
	{
		return e.what();
	}
	return "";
}

} // namespace

TEST_CASE("defaults follow the decoder kind")
{
	const RunConfig l = parse_run_config(kLdpc);
	CHECK(l.mode == DecoderKind::Ldpc);
	CHECK(l.effective_iterations() == 5);
	CHECK(l.effective_max_star() == MaxStarMode::Exact);
	CHECK(l.effective_early_stop(true));
	CHECK_FALSE(l.effective_early_stop(false));
	CHECK(l.zero_codeword);

	const RunConfig t = parse_run_config(kTurbo);
	CHECK(t.mode == DecoderKind::Turbo);
	CHECK(t.effective_iterations() == 6);
	CHECK(t.effective_max_star() == MaxStarMode::MaxLog);
	CHECK(t.window == 64);
	CHECK(t.beta_init == BetaInit::Acquisition);
	CHECK(t.normalize);
	CHECK(t.qpp_table == default_qpp_table());
}

TEST_CASE("values are parsed into the run config")
{
	const RunConfig c = parse_run_config(kTurbo + "# a comment line\n"
	                                              "decoder.iterations = 3   # trailing comment\n"
	                                              "decoder.max_star = exact\n"
	                                              "decoder.window = 16\n"
	                                              "decoder.beta_init = termination\n"
	                                              "decoder.normalize = off\n"
	                                              "decoder.extrinsic_scale = 0.75\n"
	                                              "decoder.quant.enabled = yes\n"
	                                              "decoder.quant.total_bits = 10\n"
	                                              "decoder.quant.frac_bits = 2\n"
	                                              "channel.ebn0_db = 0, 0.5,1.25\n"
	                                              "channel.seed = 42\n"
	                                              "sim.max_frames = 77\n"
	                                              "sim.min_frame_errors = 9\n"
	                                              "sim.min_bit_errors = 500\n"
	                                              "sim.batch = 4\n"
	                                              "sim.failure_budget = 3\n"
	                                              "sim.threads = 2\n");
	CHECK(c.effective_iterations() == 3);
	CHECK(c.effective_max_star() == MaxStarMode::Exact);
	CHECK(c.window == 16);
	CHECK(c.beta_init == BetaInit::Termination);
	CHECK_FALSE(c.normalize);
	CHECK(c.extrinsic_scale == 0.75);
	CHECK(c.quant.enabled);
	CHECK(c.quant.total_bits == 10);
	CHECK(c.quant.frac_bits == 2);
	CHECK(c.ebn0_db == std::vector<double>{0.0, 0.5, 1.25});
	CHECK(c.seed == 42);
	CHECK(c.budget.max_frames == 77);
	CHECK(c.budget.min_frame_errors == 9);
	CHECK(c.budget.min_bit_errors == 500);
	CHECK(c.budget.batch == 4);
	CHECK(c.failure_budget == 3u);
	CHECK(c.threads == 2);
	CHECK(c.entries.size() == 19);
	CHECK(c.entries.front() == std::pair<std::string, std::string>{"mode", "turbo"});

	const TurboOptions o = make_turbo_options(c);
	CHECK(o.iterations == 3);
	CHECK(o.window.window_len == 16);
	CHECK(o.extrinsic_scale == 0.75);
	CHECK_FALSE(o.normalize);
	CHECK(config_echo(c).front() == "config mode = turbo");
}

TEST_CASE("config errors")
{
	CHECK(config_error(kLdpc + "decoder.colour = red\n").find("unknown key 'decoder.colour'") != std::string::npos);
	CHECK(config_error(kLdpc + "mode = ldpc\n").find("duplicate key 'mode'") != std::string::npos);
	CHECK(config_error(kLdpc + "channel.seed =\n").find("empty value") != std::string::npos);
	CHECK(config_error(kLdpc + "just words\n").find("line 3") != std::string::npos);
	CHECK_FALSE(config_error("mode = both\n").empty());
	CHECK_FALSE(config_error(kLdpc + "decoder.iterations = -1\n").empty());
	CHECK_FALSE(config_error(kLdpc + "decoder.iterations = 2x\n").empty());
	CHECK_FALSE(config_error(kLdpc + "decoder.early_stop = maybe\n").empty());
	CHECK_FALSE(config_error(kLdpc + "decoder.max_star = linear\n").empty());
	CHECK_FALSE(config_error(kLdpc + "sim.batch = 0\n").empty());
	CHECK_FALSE(config_error(kLdpc + "sim.threads = 0\n").empty());
	CHECK_FALSE(config_error(kLdpc + "channel.ebn0_db = 1,,2\n").empty());
	CHECK_FALSE(config_error(kLdpc + "decoder.extrinsic_scale = 0\n").empty());
	CHECK_FALSE(config_error(kLdpc + "decoder.quant.enabled = true\ndecoder.quant.frac_bits = 20\n").empty());
	CHECK_FALSE(config_error(kLdpc + "ldpc.format = yaml\n").empty());
	CHECK_FALSE(config_error("mode = ldpc\n").empty());
	CHECK_FALSE(config_error("mode = turbo\n").empty());
	CHECK_FALSE(config_error(kTurbo + "interleaver.f1 = 3\n").empty());
	CHECK_FALSE(config_error(kTurbo + "interleaver.kind = file\n").empty());
	CHECK_FALSE(config_error(kTurbo + "decoder.beta_init = guess\n").empty());
}

TEST_CASE("validation loads everything up front")
{
	CHECK_NOTHROW(validate_run_config(parse_run_config(kLdpc)));
	CHECK_NOTHROW(validate_run_config(parse_run_config(kLdpc + "channel.zero_codeword = false\n")));
	CHECK_NOTHROW(validate_run_config(parse_run_config(kTurbo)));

	// K = 41 is not in the table and no coefficients are given
	CHECK_THROWS_AS(validate_run_config(parse_run_config("mode = turbo\nturbo.block_length = 41\n")), ConfigError);
	CHECK_NOTHROW(validate_run_config(
	    parse_run_config("mode = turbo\nturbo.block_length = 40\ninterleaver.f1 = 3\ninterleaver.f2 = 10\ndecoder.window = 8\n")));
	// not a permutation
	CHECK_THROWS_AS(validate_run_config(
	                    parse_run_config("mode = turbo\nturbo.block_length = 40\ninterleaver.f1 = 2\ninterleaver.f2 = 10\n")),
	                ConfigError);
	CHECK_THROWS_AS(validate_run_config(parse_run_config(kTurbo + "decoder.window = 129\n")), ConfigError);
	CHECK_THROWS_AS(validate_run_config(parse_run_config(kTurbo + "trellis.feedback_oct = 19\n")), ConfigError);
	CHECK_THROWS(validate_run_config(parse_run_config("mode = ldpc\nldpc.code = /nonexistent/code.alist\n")));
}

TEST_CASE("relative paths resolve against the config file")
{
	const fs::path dir = fs::temp_directory_path() / "unidec_test_config";
	fs::create_directories(dir / "sub");
	{
		std::ofstream(dir / "sub" / "perm.txt") << "# identity\n0 1\n2 3\n";
		std::ofstream(dir / "run.cfg") << "mode = turbo\n"
		                                  "turbo.block_length = 4\n"
		                                  "interleaver.kind = file\n"
		                                  "interleaver.file = sub/perm.txt\n"
		                                  "decoder.window = 4\n"
		                                  "output.path = out.csv\n";
	}
	const RunConfig c = load_run_config(dir / "run.cfg");
	CHECK(c.interleaver_file == dir / "sub" / "perm.txt");
	CHECK(c.output == dir / "out.csv");
	CHECK(make_permutation(c).size() == 4);
	CHECK_NOTHROW(validate_run_config(c));
	fs::remove_all(dir);
	CHECK_THROWS_AS(load_run_config(dir / "run.cfg"), std::runtime_error);
}

TEST_CASE("shipped configs are valid")
{
	for (const char *name : {"turbo_k1024.cfg", "turbo_k6144.cfg", "ldpc_80211n.cfg"})
	{
		CAPTURE(name);
		const RunConfig c = load_run_config(fs::path(UNIDEC_CONFIG_DIR) / name);
		CHECK_NOTHROW(validate_run_config(c));
		if (c.mode == DecoderKind::Ldpc || c.block_length == 1024)
			CHECK_FALSE(c.ebn0_db.empty());
		const auto sim = make_simulator(c);
		CHECK(sim->rate() > 0.0);
	}
	const RunConfig k1024 = load_run_config(fs::path(UNIDEC_CONFIG_DIR) / "turbo_k1024.cfg");
	CHECK(make_permutation(k1024).size() == 1024);
	CHECK(code_id(k1024) == "turbo(13,15) K=1024");
}
