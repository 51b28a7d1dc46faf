#ifndef UNIDEC_CONFIG_HPP_
#define UNIDEC_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "unidec/channel.hpp"
#include "unidec/instrument.hpp"
#include "unidec/ldpc_code.hpp"
#include "unidec/ldpc_decoder.hpp"
#include "unidec/trellis.hpp"
#include "unidec/turbo_decoder.hpp"

namespace unidec
{

// Bad key, bad value, or a value out of range.
class ConfigError : public std::invalid_argument
{
public:
	using std::invalid_argument::invalid_argument;
};

enum class InterleaverKind
{
	Qpp,
	File,
};

// Flat "key = value" configuration. Keys carry dotted section prefixes; '#'
// starts a comment. Relative paths resolve against the config file directory.
struct RunConfig
{
	DecoderKind mode = DecoderKind::Ldpc;

	// turbo code
	std::string feedback_oct = "13";
	std::string forward_oct = "15";
	int memory = 3;
	std::size_t block_length = 0;
	InterleaverKind interleaver = InterleaverKind::Qpp;
	std::optional<std::uint64_t> f1;
	std::optional<std::uint64_t> f2;
	std::filesystem::path interleaver_file;
	std::filesystem::path qpp_table;

	// ldpc code
	std::filesystem::path code_file;
	CodeFileFormat code_format = CodeFileFormat::Auto;

	// decoder
	int iterations = 0; // 0 -> 6 for turbo, 5 for ldpc
	std::optional<MaxStarMode> max_star;
	std::size_t window = 64;
	BetaInit beta_init = BetaInit::Acquisition;
	bool normalize = true;
	double extrinsic_scale = 1.0;
	std::optional<bool> early_stop;
	QuantSpec quant;

	// channel and simulation
	std::vector<double> ebn0_db;
	std::uint64_t seed = 1;
	bool zero_codeword = true;
	FrameBudget budget;
	std::optional<std::uint64_t> failure_budget;
	unsigned threads = 1;

	std::optional<std::filesystem::path> output;

	// every key as written, in file order
	std::vector<std::pair<std::string, std::string>> entries;

	int effective_iterations() const;
	MaxStarMode effective_max_star() const;
	bool effective_early_stop(bool sweep) const;
};

RunConfig parse_run_config(const std::string &text, const std::filesystem::path &base_dir = {});
// throws std::runtime_error if the file cannot be read
RunConfig load_run_config(const std::filesystem::path &path);

// Checks referenced files exist and the code can be built. Loads everything
// once so no command starts work on an invalid configuration.
void validate_run_config(const RunConfig &cfg);

Trellis make_trellis(const RunConfig &cfg);
Permutation make_permutation(const RunConfig &cfg);
std::shared_ptr<const ParityCheckMatrix> make_parity_check_matrix(const RunConfig &cfg);
TurboOptions make_turbo_options(const RunConfig &cfg);
LdpcOptions make_ldpc_options(const RunConfig &cfg, bool sweep);
std::unique_ptr<FrameSimulator> make_simulator(const RunConfig &cfg);
std::string code_id(const RunConfig &cfg);

// "key = value" lines suitable for echoing into output metadata
std::vector<std::string> config_echo(const RunConfig &cfg);

std::filesystem::path default_qpp_table();

} // namespace unidec

#endif // UNIDEC_CONFIG_HPP_
