#include "unidec/ldpc_code.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace unidec
{

namespace
{
const char *kind_name(LdpcParseError::Kind k)
{
	switch (k)
	{
	case LdpcParseError::Kind::Empty: return "empty input";
	case LdpcParseError::Kind::Malformed: return "malformed";
	case LdpcParseError::Kind::IndexOutOfRange: return "index out of range";
	case LdpcParseError::Kind::Inconsistent: return "inconsistent";
	}
	return "";
}

std::string with_line(int line, const std::string &what)
{
	return line > 0 ? "line " + std::to_string(line) + ": " + what : what;
}
} // namespace

LdpcParseError::LdpcParseError(Kind kind, int line, const std::string &what)
    : std::runtime_error(with_line(line, std::string(kind_name(kind)) + ": " + what)), kind_(kind), line_(line)
{
}

std::size_t BaseMatrix::nonempty() const
{
	return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](int s) { return s != kEmpty; }));
}

void BaseMatrix::validate() const
{
	if (rows <= 0 || cols <= 0 || lift <= 0)
		throw std::invalid_argument("base matrix dimensions and lift must be positive");
	if (entries.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
		throw std::invalid_argument("base matrix has " + std::to_string(entries.size()) + " entries, expected " +
		                            std::to_string(rows * cols));
	for (std::size_t i = 0; i < entries.size(); ++i)
	{
		const int s = entries[i];
		if (s != kEmpty && (s < 0 || s >= lift))
			throw std::invalid_argument("base matrix shift " + std::to_string(s) + " at (" +
			                            std::to_string(i / static_cast<std::size_t>(cols)) + "," +
			                            std::to_string(i % static_cast<std::size_t>(cols)) + ") outside [0, " +
			                            std::to_string(lift) + ")");
	}
}

ParityCheckMatrix::ParityCheckMatrix(std::size_t M, std::size_t N, std::vector<std::vector<std::size_t>> rows,
                                     std::optional<BaseMatrix> qc_meta)
    : M_(M), N_(N), rows_(std::move(rows)), cols_(N), row_offset_(M), qc_meta_(std::move(qc_meta))
{
	if (rows_.size() != M_)
		throw std::invalid_argument("parity-check matrix: " + std::to_string(rows_.size()) + " rows given, M = " +
		                            std::to_string(M_));
	for (std::size_t j = 0; j < M_; ++j)
	{
		auto &r = rows_[j];
		std::sort(r.begin(), r.end());
		if (std::adjacent_find(r.begin(), r.end()) != r.end())
			throw std::invalid_argument("parity-check matrix: duplicate column in row " + std::to_string(j));
		row_offset_[j] = edges_;
		for (const std::size_t n : r)
		{
			if (n >= N_)
				throw std::invalid_argument("parity-check matrix: column " + std::to_string(n) + " >= N in row " +
				                            std::to_string(j));
			cols_[n].push_back(j);
		}
		edges_ += r.size();
	}
}

ParityCheckMatrix expand_base_matrix(const BaseMatrix &b)
{
	b.validate();
	const std::size_t Z = static_cast<std::size_t>(b.lift);
	std::vector<std::vector<std::size_t>> rows(static_cast<std::size_t>(b.rows) * Z);
	for (int r = 0; r < b.rows; ++r)
		for (int c = 0; c < b.cols; ++c)
		{
			const int s = b.at(r, c);
			if (s == BaseMatrix::kEmpty)
				continue;
			for (std::size_t i = 0; i < Z; ++i)
				rows[static_cast<std::size_t>(r) * Z + i].push_back(static_cast<std::size_t>(c) * Z +
				                                                     (i + static_cast<std::size_t>(s)) % Z);
		}
	return ParityCheckMatrix(static_cast<std::size_t>(b.rows) * Z, static_cast<std::size_t>(b.cols) * Z,
	                         std::move(rows), b);
}

namespace
{

struct Line
{
	int number;
	std::vector<long long> values;
};

// Non-blank lines of integers. '#' starts a comment.
std::vector<Line> integer_lines(const std::string &text)
{
	std::vector<Line> out;
	std::istringstream in(text);
	std::string raw;
	int lineno = 0;
	while (std::getline(in, raw))
	{
		++lineno;
		if (auto hash = raw.find('#'); hash != std::string::npos)
			raw.erase(hash);
		std::istringstream ls(raw);
		Line l{lineno, {}};
		std::string tok;
		while (ls >> tok)
		{
			try
			{
				std::size_t used = 0;
				const long long v = std::stoll(tok, &used);
				if (used != tok.size())
					throw std::invalid_argument(tok);
				l.values.push_back(v);
			}
			catch (const std::exception &)
			{
				throw LdpcParseError(LdpcParseError::Kind::Malformed, lineno, "not an integer: '" + tok + "'");
			}
		}
		if (!l.values.empty())
			out.push_back(std::move(l));
	}
	return out;
}

} // namespace

BaseMatrix parse_base_matrix(const std::string &text)
{
	const auto lines = integer_lines(text);
	if (lines.empty())
		throw LdpcParseError(LdpcParseError::Kind::Empty, 0, "no base matrix data");
	const auto &hdr = lines[0];
	if (hdr.values.size() != 3 || hdr.values[0] <= 0 || hdr.values[1] <= 0 || hdr.values[2] <= 0)
		throw LdpcParseError(LdpcParseError::Kind::Malformed, hdr.number, "expected header 'rows cols Z'");
	BaseMatrix b;
	b.rows = static_cast<int>(hdr.values[0]);
	b.cols = static_cast<int>(hdr.values[1]);
	b.lift = static_cast<int>(hdr.values[2]);
	if (lines.size() != static_cast<std::size_t>(b.rows) + 1)
		throw LdpcParseError(LdpcParseError::Kind::Malformed, lines.back().number,
		                     "expected " + std::to_string(b.rows) + " matrix rows, found " +
		                         std::to_string(lines.size() - 1));
	for (int r = 0; r < b.rows; ++r)
	{
		const auto &l = lines[static_cast<std::size_t>(r) + 1];
		if (l.values.size() != static_cast<std::size_t>(b.cols))
			throw LdpcParseError(LdpcParseError::Kind::Malformed, l.number,
			                     "expected " + std::to_string(b.cols) + " entries, found " +
			                         std::to_string(l.values.size()));
		for (const long long s : l.values)
		{
			if (s < -1 || s >= b.lift)
				throw LdpcParseError(LdpcParseError::Kind::IndexOutOfRange, l.number,
				                     "shift " + std::to_string(s) + " outside [0, " + std::to_string(b.lift) + ")");
			b.entries.push_back(static_cast<int>(s));
		}
	}
	return b;
}

ParityCheckMatrix parse_alist(const std::string &text)
{
	using K = LdpcParseError::Kind;
	const auto lines = integer_lines(text);
	if (lines.empty())
		throw LdpcParseError(K::Empty, 0, "no alist data");
	auto need = [&](std::size_t idx, const char *what) -> const Line & {
		if (idx >= lines.size())
			throw LdpcParseError(K::Malformed, lines.back().number, std::string("missing ") + what);
		return lines[idx];
	};

	const Line &dims = need(0, "dimensions");
	if (dims.values.size() != 2 || dims.values[0] <= 0 || dims.values[1] <= 0)
		throw LdpcParseError(K::Malformed, dims.number, "expected 'N M'");
	const auto N = static_cast<std::size_t>(dims.values[0]);
	const auto M = static_cast<std::size_t>(dims.values[1]);

	const Line &maxdeg = need(1, "maximum degrees");
	if (maxdeg.values.size() != 2 || maxdeg.values[0] < 0 || maxdeg.values[1] < 0)
		throw LdpcParseError(K::Malformed, maxdeg.number, "expected 'max_col_degree max_row_degree'");

	const Line &coldeg = need(2, "column degrees");
	if (coldeg.values.size() != N)
		throw LdpcParseError(K::Malformed, coldeg.number,
		                     "expected " + std::to_string(N) + " column degrees, found " +
		                         std::to_string(coldeg.values.size()));
	const Line &rowdeg = need(3, "row degrees");
	if (rowdeg.values.size() != M)
		throw LdpcParseError(K::Malformed, rowdeg.number,
		                     "expected " + std::to_string(M) + " row degrees, found " +
		                         std::to_string(rowdeg.values.size()));

	auto read_lists = [&](std::size_t first, std::size_t count, const Line &degrees, long long max_degree,
	                      std::size_t bound, const char *what) {
		std::vector<std::vector<std::size_t>> lists(count);
		for (std::size_t i = 0; i < count; ++i)
		{
			const Line &l = need(first + i, what);
			const long long deg = degrees.values[i];
			if (deg < 0 || deg > max_degree)
				throw LdpcParseError(K::Malformed, degrees.number,
				                     std::string(what) + " " + std::to_string(i + 1) + " degree " +
				                         std::to_string(deg) + " exceeds declared maximum");
			for (const long long v : l.values)
			{
				if (v == 0)
					continue; // padding
				if (v < 0 || static_cast<std::size_t>(v) > bound)
					throw LdpcParseError(K::IndexOutOfRange, l.number,
					                     "index " + std::to_string(v) + " outside [1, " + std::to_string(bound) + "]");
				lists[i].push_back(static_cast<std::size_t>(v - 1));
			}
			if (static_cast<long long>(lists[i].size()) != deg)
				throw LdpcParseError(K::Malformed, l.number,
				                     std::string(what) + " " + std::to_string(i + 1) + " lists " +
				                         std::to_string(lists[i].size()) + " entries, degree says " +
				                         std::to_string(deg));
		}
		return lists;
	};

	const auto col_lists = read_lists(4, N, coldeg, maxdeg.values[0], M, "column");
	const auto row_lists = read_lists(4 + N, M, rowdeg, maxdeg.values[1], N, "row");
	if (lines.size() > 4 + N + M)
		throw LdpcParseError(K::Malformed, lines[4 + N + M].number, "trailing data after row lists");

	// every (row, col) pair must appear in both views
	std::set<std::pair<std::size_t, std::size_t>> from_cols;
	for (std::size_t n = 0; n < N; ++n)
		for (const std::size_t m : col_lists[n])
			if (!from_cols.insert({m, n}).second)
				throw LdpcParseError(K::Inconsistent, lines[4 + n].number,
				                     "column " + std::to_string(n + 1) + " repeats row " + std::to_string(m + 1));
	std::size_t row_entries = 0;
	for (std::size_t m = 0; m < M; ++m)
		for (const std::size_t n : row_lists[m])
		{
			++row_entries;
			if (!from_cols.count({m, n}))
				throw LdpcParseError(K::Inconsistent, lines[4 + N + m].number,
				                     "row " + std::to_string(m + 1) + " lists column " + std::to_string(n + 1) +
				                         " but that column does not list the row");
		}
	if (row_entries != from_cols.size())
		throw LdpcParseError(K::Inconsistent, 0, "row and column sections have different entry counts");

	try
	{
		return ParityCheckMatrix(M, N, row_lists);
	}
	catch (const std::invalid_argument &e)
	{
		throw LdpcParseError(K::Inconsistent, 0, e.what());
	}
}

std::string write_alist(const ParityCheckMatrix &h)
{
	std::size_t max_col = 0;
	std::size_t max_row = 0;
	for (const auto &c : h.cols())
		max_col = std::max(max_col, c.size());
	for (const auto &r : h.rows())
		max_row = std::max(max_row, r.size());

	std::ostringstream os;
	os << h.N() << " " << h.M() << "\n" << max_col << " " << max_row << "\n";
	auto degrees = [&](const auto &lists) {
		for (std::size_t i = 0; i < lists.size(); ++i)
			os << (i ? " " : "") << lists[i].size();
		os << "\n";
	};
	degrees(h.cols());
	degrees(h.rows());
	auto entries = [&](const auto &lists, std::size_t width) {
		for (const auto &l : lists)
		{
			for (std::size_t i = 0; i < width; ++i)
				os << (i ? " " : "") << (i < l.size() ? l[i] + 1 : 0);
			os << "\n";
		}
	};
	entries(h.cols(), max_col);
	entries(h.rows(), max_row);
	return os.str();
}

ParityCheckMatrix load_parity_check_matrix(const std::filesystem::path &path, CodeFileFormat format)
{
	std::ifstream in(path);
	if (!in)
		throw std::runtime_error("cannot open code file " + path.string());
	std::stringstream ss;
	ss << in.rdbuf();
	if (format == CodeFileFormat::Auto)
		format = path.extension() == ".alist" ? CodeFileFormat::Alist : CodeFileFormat::BaseMatrix;
	if (format == CodeFileFormat::Alist)
		return parse_alist(ss.str());
	return expand_base_matrix(parse_base_matrix(ss.str()));
}

CodeStats code_stats(const ParityCheckMatrix &h)
{
	CodeStats s;
	s.M = h.M();
	s.N = h.N();
	s.edges = h.edges();
	if (!h.rows().empty())
	{
		auto [rmin, rmax] = std::minmax_element(h.rows().begin(), h.rows().end(),
		                                        [](const auto &a, const auto &b) { return a.size() < b.size(); });
		s.min_row_weight = rmin->size();
		s.max_row_weight = rmax->size();
	}
	if (!h.cols().empty())
	{
		auto [cmin, cmax] = std::minmax_element(h.cols().begin(), h.cols().end(),
		                                        [](const auto &a, const auto &b) { return a.size() < b.size(); });
		s.min_col_weight = cmin->size();
		s.max_col_weight = cmax->size();
	}
	s.rate = h.N() > 0 ? static_cast<double>(h.N() - h.M()) / static_cast<double>(h.N()) : 0.0;
	s.decodable = s.M > 0 && s.min_row_weight >= 2;
	return s;
}

std::string format_stats(const CodeStats &s)
{
	std::ostringstream os;
	os << "M: " << s.M << "\n"
	   << "N: " << s.N << "\n"
	   << "edges: " << s.edges << "\n"
	   << "row weight: " << s.min_row_weight << ".." << s.max_row_weight << "\n"
	   << "column weight: " << s.min_col_weight << ".." << s.max_col_weight << "\n"
	   << "rate: " << s.rate << "\n";
	if (!s.decodable)
		os << "warning: a row has weight < 2; the layered decoder rejects this matrix\n";
	return os.str();
}

} // namespace unidec
