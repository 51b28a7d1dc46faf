#ifndef UNIDEC_LDPC_CODE_HPP_
#define UNIDEC_LDPC_CODE_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace unidec
{

class LdpcParseError : public std::runtime_error
{
public:
	enum class Kind
	{
		Empty,
		Malformed,       // missing tokens or bad counts
		IndexOutOfRange, // an index outside [1, N] or [1, M]
		Inconsistent,    // row and column sections disagree
	};

	LdpcParseError(Kind kind, int line, const std::string &what);

	Kind kind() const { return kind_; }
	// 1-based line of the offending token, 0 when not tied to a line
	int line() const { return line_; }

private:
	Kind kind_;
	int line_;
};

// Base matrix of a quasi-cyclic code: shift values in [0, Z) or -1 for the
// all-zero block.
struct BaseMatrix
{
	static constexpr int kEmpty = -1;

	int rows = 0;
	int cols = 0;
	int lift = 0; // Z
	std::vector<int> entries; // row-major

	int at(int r, int c) const { return entries[static_cast<std::size_t>(r * cols + c)]; }
	std::size_t nonempty() const;
	void validate() const;
};

// Sparse parity-check matrix. Row adjacency lists are ascending column
// indices; column adjacency is derived and kept consistent.
class ParityCheckMatrix
{
public:
	ParityCheckMatrix() = default;
	// throws std::invalid_argument on out-of-range or duplicate indices
	ParityCheckMatrix(std::size_t M, std::size_t N, std::vector<std::vector<std::size_t>> rows,
	                  std::optional<BaseMatrix> qc_meta = std::nullopt);

	std::size_t M() const { return M_; }
	std::size_t N() const { return N_; }
	std::size_t edges() const { return edges_; }

	const std::vector<std::vector<std::size_t>> &rows() const { return rows_; }
	const std::vector<std::vector<std::size_t>> &cols() const { return cols_; }
	const std::vector<std::size_t> &row(std::size_t j) const { return rows_[j]; }
	// index of the first edge of row j in row-major edge order
	std::size_t row_offset(std::size_t j) const { return row_offset_[j]; }
	const std::optional<BaseMatrix> &qc_meta() const { return qc_meta_; }

	friend bool operator==(const ParityCheckMatrix &a, const ParityCheckMatrix &b)
	{
		return a.M_ == b.M_ && a.N_ == b.N_ && a.rows_ == b.rows_;
	}

private:
	std::size_t M_ = 0;
	std::size_t N_ = 0;
	std::size_t edges_ = 0;
	std::vector<std::vector<std::size_t>> rows_;
	std::vector<std::vector<std::size_t>> cols_;
	std::vector<std::size_t> row_offset_;
	std::optional<BaseMatrix> qc_meta_;
};

// Block (r, c) with shift s puts a 1 at (r Z + i, c Z + (i + s) mod Z).
ParityCheckMatrix expand_base_matrix(const BaseMatrix &b);

// Header "rows cols Z", then `rows` lines of `cols` integers, -1 = empty.
BaseMatrix parse_base_matrix(const std::string &text);
ParityCheckMatrix parse_alist(const std::string &text);
std::string write_alist(const ParityCheckMatrix &h);

enum class CodeFileFormat
{
	Auto,
	Alist,
	BaseMatrix,
};

// Auto picks alist for *.alist and base matrix otherwise.
ParityCheckMatrix load_parity_check_matrix(const std::filesystem::path &path,
                                           CodeFileFormat format = CodeFileFormat::Auto);

struct CodeStats
{
	std::size_t M = 0;
	std::size_t N = 0;
	std::size_t edges = 0;
	std::size_t min_row_weight = 0;
	std::size_t max_row_weight = 0;
	std::size_t min_col_weight = 0;
	std::size_t max_col_weight = 0;
	double rate = 0.0; // (N - M) / N, ignoring rank deficiency
	bool decodable = true; // false when some row has weight < 2
};

CodeStats code_stats(const ParityCheckMatrix &h);
std::string format_stats(const CodeStats &s);

} // namespace unidec

#endif // UNIDEC_LDPC_CODE_HPP_
