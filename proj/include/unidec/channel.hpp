#ifndef UNIDEC_CHANNEL_HPP_
#define UNIDEC_CHANNEL_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "unidec/kernel.hpp"
#include "unidec/ldpc_decoder.hpp"
#include "unidec/turbo_decoder.hpp"

namespace unidec
{

// Frame randomness. Each (seed, point, frame, lane) tuple seeds its own
// mt19937_64 through splitmix64, so a frame's payload and noise do not depend
// on which worker runs it or on the decoder under test.
using Rng = std::mt19937_64;
inline constexpr const char *kRngId = "mt19937_64 seeded by splitmix64(seed, point, frame, lane); "
                                      "std::normal_distribution";

std::uint64_t splitmix64(std::uint64_t x) noexcept;
Rng frame_rng(std::uint64_t seed, std::uint64_t point, std::uint64_t frame, std::uint64_t lane);

enum Lane : std::uint64_t
{
	kPayloadLane = 0,
	kNoiseLane = 1,
};

// Unit-energy BPSK: sigma2 = 1 / (2 rate 10^(ebn0/10)).
double ebn0_to_sigma2(double ebn0_db, double rate);

struct ChannelSpec
{
	double ebn0_db = 0.0;
	double code_rate = 0.5;
	std::uint64_t seed = 1;

	double sigma2() const { return ebn0_to_sigma2(ebn0_db, code_rate); }
};

// 0 -> +1, 1 -> -1
std::vector<double> bpsk_modulate(std::span<const Bit> bits);
// y = x + n with n ~ N(0, sigma2); throws std::invalid_argument if sigma2 <= 0
std::vector<double> awgn(std::span<const double> symbols, double sigma2, Rng &rng);
inline Llr channel_llr(double y, double sigma2) { return 2.0 * y / sigma2; }
std::vector<Llr> channel_llrs(std::span<const double> y, double sigma2);

class RankDeficientError : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

// Systematic encoder from a one-time GF(2) elimination of H. Information bits
// go to the non-pivot columns; pivot columns are solved from them.
class LdpcEncoder
{
public:
	// throws RankDeficientError when H does not have full row rank
	explicit LdpcEncoder(const ParityCheckMatrix &h);

	std::size_t message_length() const { return info_columns_.size(); }
	std::size_t code_length() const { return n_; }
	const std::vector<std::size_t> &info_columns() const { return info_columns_; }

	std::vector<Bit> encode(std::span<const Bit> message) const;

private:
	std::size_t n_ = 0;
	std::vector<std::size_t> info_columns_;
	std::vector<std::size_t> pivot_columns_;
	// for pivot row r: the info-column slots whose sum gives bit pivot_columns_[r]
	std::vector<std::vector<std::size_t>> pivot_deps_;
};

std::vector<Bit> ldpc_zero_codeword(const ParityCheckMatrix &h);
// Zero-mode when message is empty, otherwise systematic encoding.
std::vector<Bit> ldpc_encode_or_zero(std::span<const Bit> message, const ParityCheckMatrix &h);

struct FrameOutcome
{
	std::uint64_t bit_errors = 0;
	bool frame_error = false;
	int iterations = 0;
	bool converged = false;
	// converged frames whose hard decision fails the parity check (must stay 0)
	bool invalid_converged = false;
};

// One code + decoder configuration, able to simulate a single frame.
class FrameSimulator
{
public:
	virtual ~FrameSimulator() = default;

	virtual std::string code_id() const = 0;
	virtual std::string decoder_params() const = 0;
	virtual double rate() const = 0;
	// bits compared per frame
	virtual std::size_t compared_bits() const = 0;
	virtual FrameOutcome run_frame(std::uint64_t seed, std::uint64_t point, std::uint64_t frame,
	                               double sigma2) const = 0;
};

class TurboFrameSimulator final : public FrameSimulator
{
public:
	TurboFrameSimulator(Trellis trellis, Permutation perm, TurboOptions options, std::string code_id = "turbo");

	std::string code_id() const override { return code_id_; }
	std::string decoder_params() const override;
	double rate() const override;
	std::size_t compared_bits() const override { return decoder_.block_length(); }
	FrameOutcome run_frame(std::uint64_t seed, std::uint64_t point, std::uint64_t frame,
	                       double sigma2) const override;

	const TurboDecoder &decoder() const { return decoder_; }

private:
	TurboDecoder decoder_;
	std::string code_id_;
};

class LdpcFrameSimulator final : public FrameSimulator
{
public:
	// zero_codeword = false draws random messages through LdpcEncoder
	LdpcFrameSimulator(std::shared_ptr<const ParityCheckMatrix> h, LdpcOptions options, bool zero_codeword = true,
	                   std::string code_id = "ldpc");

	std::string code_id() const override { return code_id_; }
	std::string decoder_params() const override;
	double rate() const override;
	std::size_t compared_bits() const override { return decoder_.code().N(); }
	FrameOutcome run_frame(std::uint64_t seed, std::uint64_t point, std::uint64_t frame,
	                       double sigma2) const override;

private:
	LdpcDecoder decoder_;
	std::optional<LdpcEncoder> encoder_;
	std::string code_id_;
};

struct FrameBudget
{
	std::uint64_t max_frames = 1000;
	// stop a point early once this many frame errors were seen (0 = never)
	std::uint64_t min_frame_errors = 0;
	// stop a point early once this many bit errors were seen (0 = never)
	std::uint64_t min_bit_errors = 0;
	// frames per scheduling batch; stopping is only checked between batches
	std::uint64_t batch = 32;
};

struct SweepOptions
{
	std::vector<double> ebn0_db;
	FrameBudget budget;
	std::uint64_t seed = 1;
	unsigned threads = 1;
};

struct SweepPoint
{
	double ebn0_db = 0.0;
	double sigma2 = 0.0;
	std::uint64_t frames = 0;
	std::uint64_t bits_per_frame = 0;
	std::uint64_t bit_errors = 0;
	std::uint64_t frame_errors = 0;
	std::uint64_t iterations = 0;
	std::uint64_t converged_frames = 0;
	std::uint64_t invalid_converged = 0;

	double ber() const;
	double fer() const;
	double avg_iterations() const;

	friend bool operator==(const SweepPoint &, const SweepPoint &) = default;
};

struct SweepResult
{
	std::vector<SweepPoint> points;
	std::uint64_t seed = 0;
	std::string code_id;
	std::string decoder_params;
	std::string rng_id = kRngId;

	std::uint64_t total_frames() const;
	std::uint64_t total_bit_errors() const;
	std::uint64_t total_frame_errors() const;

	friend bool operator==(const SweepResult &, const SweepResult &) = default;
};

SweepResult run_sweep(const FrameSimulator &sim, const SweepOptions &options);

// CSV with '#'-prefixed metadata lines, then
// ebn0_db,frames,bit_errors,ber,frame_errors,fer,avg_iterations
std::string sweep_csv(const SweepResult &result, const std::vector<std::string> &extra_metadata = {});

} // namespace unidec

#endif // UNIDEC_CHANNEL_HPP_
