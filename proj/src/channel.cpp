#include "unidec/channel.hpp"

#include <atomic>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>

namespace unidec
{

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
	x += 0x9e3779b97f4a7c15ull;
	x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
	x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
	return x ^ (x >> 31);
}

Rng frame_rng(std::uint64_t seed, std::uint64_t point, std::uint64_t frame, std::uint64_t lane)
{
	std::uint64_t h = splitmix64(seed);
	h = splitmix64(h ^ point);
	h = splitmix64(h ^ frame);
	h = splitmix64(h ^ lane);
	return Rng(h);
}

double ebn0_to_sigma2(double ebn0_db, double rate)
{
	if (!(rate > 0.0 && rate <= 1.0))
		throw std::invalid_argument("code rate must be in (0, 1]");
	return 1.0 / (2.0 * rate * std::pow(10.0, ebn0_db / 10.0));
}

std::vector<double> bpsk_modulate(std::span<const Bit> bits)
{
	std::vector<double> x(bits.size());
	for (std::size_t i = 0; i < bits.size(); ++i)
		x[i] = bits[i] ? -1.0 : 1.0;
	return x;
}

std::vector<double> awgn(std::span<const double> symbols, double sigma2, Rng &rng)
{
	if (!(sigma2 > 0.0))
		throw std::invalid_argument("noise variance must be positive");
	std::normal_distribution<double> noise(0.0, std::sqrt(sigma2));
	std::vector<double> y(symbols.size());
	for (std::size_t i = 0; i < symbols.size(); ++i)
		y[i] = symbols[i] + noise(rng);
	return y;
}

std::vector<Llr> channel_llrs(std::span<const double> y, double sigma2)
{
	if (!(sigma2 > 0.0))
		throw std::invalid_argument("noise variance must be positive");
	std::vector<Llr> l(y.size());
	for (std::size_t i = 0; i < y.size(); ++i)
		l[i] = channel_llr(y[i], sigma2);
	return l;
}

LdpcEncoder::LdpcEncoder(const ParityCheckMatrix &h) : n_(h.N())
{
	const std::size_t M = h.M();
	const std::size_t N = h.N();
	const std::size_t words = (N + 63) / 64;
	std::vector<std::vector<std::uint64_t>> rows(M, std::vector<std::uint64_t>(words, 0));
	for (std::size_t j = 0; j < M; ++j)
		for (const std::size_t n : h.row(j))
			rows[j][n / 64] |= std::uint64_t{1} << (n % 64);
	auto bit = [](const std::vector<std::uint64_t> &r, std::size_t c) { return (r[c / 64] >> (c % 64)) & 1u; };

	// reduced row echelon form, pivots taken from the rightmost columns so the
	// message occupies the leading positions when H allows it
	std::size_t rank = 0;
	std::vector<bool> is_pivot(N, false);
	for (std::size_t c = N; c-- > 0 && rank < M;)
	{
		std::size_t p = rank;
		while (p < M && !bit(rows[p], c))
			++p;
		if (p == M)
			continue;
		std::swap(rows[rank], rows[p]);
		for (std::size_t r = 0; r < M; ++r)
			if (r != rank && bit(rows[r], c))
				for (std::size_t w = 0; w < words; ++w)
					rows[r][w] ^= rows[rank][w];
		pivot_columns_.push_back(c);
		is_pivot[c] = true;
		++rank;
	}
	if (rank < M)
		throw RankDeficientError("parity-check matrix has rank " + std::to_string(rank) + " < M = " +
		                         std::to_string(M) + "; systematic encoding needs full row rank");

	std::vector<std::size_t> slot(N, 0);
	for (std::size_t c = 0; c < N; ++c)
		if (!is_pivot[c])
		{
			slot[c] = info_columns_.size();
			info_columns_.push_back(c);
		}
	pivot_deps_.resize(rank);
	for (std::size_t r = 0; r < rank; ++r)
		for (const std::size_t c : info_columns_)
			if (bit(rows[r], c))
				pivot_deps_[r].push_back(slot[c]);
}

std::vector<Bit> LdpcEncoder::encode(std::span<const Bit> message) const
{
	if (message.size() != info_columns_.size())
		throw std::invalid_argument("LDPC message length " + std::to_string(message.size()) + " != K = " +
		                            std::to_string(info_columns_.size()));
	std::vector<Bit> x(n_, 0);
	for (std::size_t i = 0; i < info_columns_.size(); ++i)
		x[info_columns_[i]] = message[i] & 1u;
	for (std::size_t r = 0; r < pivot_columns_.size(); ++r)
	{
		unsigned acc = 0;
		for (const std::size_t s : pivot_deps_[r])
			acc ^= message[s] & 1u;
		x[pivot_columns_[r]] = static_cast<Bit>(acc);
	}
	return x;
}

std::vector<Bit> ldpc_zero_codeword(const ParityCheckMatrix &h) { return std::vector<Bit>(h.N(), 0); }

std::vector<Bit> ldpc_encode_or_zero(std::span<const Bit> message, const ParityCheckMatrix &h)
{
	if (message.empty())
		return ldpc_zero_codeword(h);
	return LdpcEncoder(h).encode(message);
}

namespace
{
std::vector<Bit> random_bits(Rng &rng, std::size_t n)
{
	std::vector<Bit> bits(n);
	std::uint64_t word = 0;
	for (std::size_t i = 0; i < n; ++i)
	{
		if (i % 64 == 0)
			word = rng();
		bits[i] = static_cast<Bit>((word >> (i % 64)) & 1u);
	}
	return bits;
}
} // namespace

TurboFrameSimulator::TurboFrameSimulator(Trellis trellis, Permutation perm, TurboOptions options, std::string code_id)
    : decoder_(std::move(trellis), std::move(perm), options), code_id_(std::move(code_id))
{
}

double TurboFrameSimulator::rate() const
{
	const double K = static_cast<double>(decoder_.block_length());
	return K / (3.0 * K + 4.0 * decoder_.trellis().memory);
}

std::string TurboFrameSimulator::decoder_params() const
{
	const auto &o = decoder_.options();
	std::ostringstream os;
	os << "turbo K=" << decoder_.block_length() << " iterations=" << o.iterations << " max_star=" << to_string(o.mode)
	   << " window=" << o.window.window_len
	   << " beta_init=" << (o.window.beta_init == BetaInit::Acquisition ? "acquisition" : "termination")
	   << " normalize=" << (o.normalize ? "true" : "false") << " extrinsic_scale=" << o.extrinsic_scale;
	if (o.quant.enabled)
		os << " quant=" << o.quant.total_bits << "." << o.quant.frac_bits;
	return os.str();
}

FrameOutcome TurboFrameSimulator::run_frame(std::uint64_t seed, std::uint64_t point, std::uint64_t frame,
                                            double sigma2) const
{
	Rng payload_rng = frame_rng(seed, point, frame, kPayloadLane);
	Rng noise_rng = frame_rng(seed, point, frame, kNoiseLane);
	const std::size_t K = decoder_.block_length();
	const std::vector<Bit> bits = random_bits(payload_rng, K);
	const auto code = turbo_encode(bits, decoder_.trellis(), decoder_.permutation());
	const std::vector<Bit> flat = code.flatten();
	const auto y = awgn(bpsk_modulate(flat), sigma2, noise_rng);
	const auto llr = channel_llrs(y, sigma2);
	const auto streams = TurboStreams<Llr>::unflatten(llr, K, decoder_.trellis().memory);
	const TurboResult r = decoder_.decode(streams);

	FrameOutcome out;
	for (std::size_t k = 0; k < K; ++k)
		out.bit_errors += r.hard_bits[k] != bits[k];
	out.frame_error = out.bit_errors > 0;
	out.iterations = r.iterations_run;
	return out;
}

LdpcFrameSimulator::LdpcFrameSimulator(std::shared_ptr<const ParityCheckMatrix> h, LdpcOptions options,
                                       bool zero_codeword, std::string code_id)
    : decoder_(h, std::move(options)), code_id_(std::move(code_id))
{
	if (!zero_codeword)
		encoder_.emplace(*h);
}

double LdpcFrameSimulator::rate() const
{
	const auto &h = decoder_.code();
	if (encoder_)
		return static_cast<double>(encoder_->message_length()) / static_cast<double>(h.N());
	return static_cast<double>(h.N() - h.M()) / static_cast<double>(h.N());
}

std::string LdpcFrameSimulator::decoder_params() const
{
	const auto &o = decoder_.options();
	std::ostringstream os;
	os << "ldpc N=" << decoder_.code().N() << " M=" << decoder_.code().M() << " max_iterations=" << o.max_iterations
	   << " max_star=" << to_string(o.mode) << " early_stop=" << (o.early_stop ? "true" : "false")
	   << " codewords=" << (encoder_ ? "encoded" : "all-zero");
	if (o.quant.enabled)
		os << " quant=" << o.quant.total_bits << "." << o.quant.frac_bits;
	return os.str();
}

FrameOutcome LdpcFrameSimulator::run_frame(std::uint64_t seed, std::uint64_t point, std::uint64_t frame,
                                           double sigma2) const
{
	const ParityCheckMatrix &h = decoder_.code();
	std::vector<Bit> word;
	if (encoder_)
	{
		Rng payload_rng = frame_rng(seed, point, frame, kPayloadLane);
		word = encoder_->encode(random_bits(payload_rng, encoder_->message_length()));
	}
	else
	{
		word = ldpc_zero_codeword(h);
	}
	Rng noise_rng = frame_rng(seed, point, frame, kNoiseLane);
	const auto y = awgn(bpsk_modulate(word), sigma2, noise_rng);
	const auto llr = channel_llrs(y, sigma2);
	const LdpcResult r = decoder_.decode(llr);

	FrameOutcome out;
	for (std::size_t n = 0; n < h.N(); ++n)
		out.bit_errors += r.hard_bits[n] != word[n];
	out.frame_error = out.bit_errors > 0;
	out.iterations = r.iterations_used;
	out.converged = r.converged;
	out.invalid_converged = r.converged && !parity_check(h, r.hard_bits);
	return out;
}

double SweepPoint::ber() const
{
	const double bits = static_cast<double>(frames) * static_cast<double>(bits_per_frame);
	return bits > 0 ? static_cast<double>(bit_errors) / bits : 0.0;
}

double SweepPoint::fer() const
{
	return frames > 0 ? static_cast<double>(frame_errors) / static_cast<double>(frames) : 0.0;
}

double SweepPoint::avg_iterations() const
{
	return frames > 0 ? static_cast<double>(iterations) / static_cast<double>(frames) : 0.0;
}

std::uint64_t SweepResult::total_frames() const
{
	std::uint64_t t = 0;
	for (const auto &p : points)
		t += p.frames;
	return t;
}

std::uint64_t SweepResult::total_bit_errors() const
{
	std::uint64_t t = 0;
	for (const auto &p : points)
		t += p.bit_errors;
	return t;
}

std::uint64_t SweepResult::total_frame_errors() const
{
	std::uint64_t t = 0;
	for (const auto &p : points)
		t += p.frame_errors;
	return t;
}

namespace
{

void run_batch(const FrameSimulator &sim, std::uint64_t seed, std::uint64_t point, std::uint64_t first,
               std::vector<FrameOutcome> &outcomes, double sigma2, unsigned threads)
{
	const std::size_t n = outcomes.size();
	if (threads <= 1 || n <= 1)
	{
		for (std::size_t i = 0; i < n; ++i)
			outcomes[i] = sim.run_frame(seed, point, first + i, sigma2);
		return;
	}
	std::atomic<std::size_t> next{0};
	std::vector<std::exception_ptr> errors(threads);
	std::vector<std::thread> pool;
	for (unsigned t = 0; t < threads; ++t)
		pool.emplace_back([&, t] {
			try
			{
				for (std::size_t i = next++; i < n; i = next++)
					outcomes[i] = sim.run_frame(seed, point, first + i, sigma2);
			}
			catch (...)
			{
				errors[t] = std::current_exception();
			}
		});
	for (auto &th : pool)
		th.join();
	for (const auto &e : errors)
		if (e)
			std::rethrow_exception(e);
}

} // namespace

SweepResult run_sweep(const FrameSimulator &sim, const SweepOptions &options)
{
	if (options.ebn0_db.empty())
		throw std::invalid_argument("sweep needs at least one Eb/N0 point");
	if (options.budget.max_frames < 1 || options.budget.batch < 1)
		throw std::invalid_argument("frame budget and batch size must be >= 1");

	SweepResult result;
	result.seed = options.seed;
	result.code_id = sim.code_id();
	result.decoder_params = sim.decoder_params();
	const auto &budget = options.budget;

	for (std::size_t pi = 0; pi < options.ebn0_db.size(); ++pi)
	{
		SweepPoint p;
		p.ebn0_db = options.ebn0_db[pi];
		p.sigma2 = ebn0_to_sigma2(p.ebn0_db, sim.rate());
		p.bits_per_frame = sim.compared_bits();
		std::vector<FrameOutcome> outcomes;
		while (p.frames < budget.max_frames)
		{
			const std::uint64_t n = std::min(budget.batch, budget.max_frames - p.frames);
			outcomes.assign(n, FrameOutcome{});
			run_batch(sim, options.seed, pi, p.frames, outcomes, p.sigma2, options.threads);
			for (const auto &o : outcomes)
			{
				p.bit_errors += o.bit_errors;
				p.frame_errors += o.frame_error;
				p.iterations += static_cast<std::uint64_t>(o.iterations);
				p.converged_frames += o.converged;
				p.invalid_converged += o.invalid_converged;
			}
			p.frames += n;
			if (budget.min_frame_errors > 0 && p.frame_errors >= budget.min_frame_errors)
				break;
			if (budget.min_bit_errors > 0 && p.bit_errors >= budget.min_bit_errors)
				break;
		}
		result.points.push_back(p);
	}
	return result;
}

std::string sweep_csv(const SweepResult &result, const std::vector<std::string> &extra_metadata)
{
	std::ostringstream os;
	os << "# seed: " << result.seed << "\n";
	os << "# code: " << result.code_id << "\n";
	os << "# decoder: " << result.decoder_params << "\n";
	os << "# rng: " << result.rng_id << "\n";
	for (const auto &m : extra_metadata)
		os << "# " << m << "\n";
	os << "ebn0_db,frames,bit_errors,ber,frame_errors,fer,avg_iterations\n";
	for (const auto &p : result.points)
	{
		os << p.ebn0_db << "," << p.frames << "," << p.bit_errors << "," << std::setprecision(6) << std::scientific
		   << p.ber() << "," << p.frame_errors << "," << p.fer() << "," << std::defaultfloat << std::setprecision(6)
		   << p.avg_iterations() << "\n";
	}
	return os.str();
}

} // namespace unidec
