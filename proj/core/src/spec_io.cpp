#include "itact/spec_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace itact {

namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& root, std::string origin) : root_(root), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& msg) const {
    throw InvalidInput(origin_ + ": " + (pointer.empty() ? "/" : pointer) + ": " + msg);
  }

  const json& at(const std::string& key) const {
    if (!root_.is_object()) fail("", "top level must be an object");
    auto it = root_.find(key);
    if (it == root_.end()) fail("/" + key, "missing field");
    return *it;
  }

  std::size_t alphabet(const json& alph, const std::string& name) const {
    auto it = alph.find(name);
    if (it == alph.end()) fail("/alphabets/" + name, "missing alphabet size");
    if (!it->is_number_integer() || it->get<long long>() < 1)
      fail("/alphabets/" + name, "alphabet size must be a positive integer");
    return it->get<std::size_t>();
  }

  // Flattens a nested array of the given shape in row-major order.
  std::vector<double> tensor(const std::string& key, const std::vector<std::size_t>& shape,
                             const std::vector<std::string>& labels) const {
    std::vector<double> out;
    walk(at(key), "/" + key, shape, labels, 0, out);
    return out;
  }

  bool flag(const std::string& key, bool fallback) const {
    auto it = root_.find(key);
    if (it == root_.end()) return fallback;
    if (!it->is_boolean()) fail("/" + key, "expected true or false");
    return it->get<bool>();
  }

  const std::string& origin() const { return origin_; }

 private:
  void walk(const json& node, const std::string& ptr, const std::vector<std::size_t>& shape,
            const std::vector<std::string>& labels, std::size_t depth, std::vector<double>& out) const {
    if (depth == shape.size()) {
      if (!node.is_number()) fail(ptr, "expected a number");
      const double v = node.get<double>();
      if (!std::isfinite(v)) fail(ptr, "non-finite value");
      out.push_back(v);
      return;
    }
    if (!node.is_array()) fail(ptr, "expected an array indexed by " + labels[depth]);
    if (node.size() != shape[depth]) {
      fail(ptr, "alphabet mismatch: " + std::to_string(node.size()) + " entries along " + labels[depth] +
                    ", alphabet size is " + std::to_string(shape[depth]));
    }
    for (std::size_t i = 0; i < node.size(); ++i)
      walk(node[i], ptr + "/" + std::to_string(i), shape, labels, depth + 1, out);
  }

  const json& root_;
  std::string origin_;
};

// Rows of `table` with `width` entries each; a negative entry or a bad sum is
// reported against the pointer of that row.
void check_rows(const Reader& r, const std::string& key, const std::vector<double>& table, std::size_t width,
                const std::vector<std::size_t>& row_shape) {
  for (std::size_t row = 0; row * width < table.size(); ++row) {
    std::string ptr = "/" + key;
    std::size_t rem = row;
    std::vector<std::size_t> idx(row_shape.size());
    for (std::size_t k = row_shape.size(); k-- > 0;) {
      idx[k] = rem % row_shape[k];
      rem /= row_shape[k];
    }
    for (std::size_t i : idx) ptr += "/" + std::to_string(i);
    double sum = 0.0;
    for (std::size_t c = 0; c < width; ++c) {
      const double p = table[row * width + c];
      if (p < 0.0) r.fail(ptr, "negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRenormTolerance) {
      std::ostringstream os;
      os.precision(12);
      os << "probabilities sum to " << sum << " (tolerance " << kRenormTolerance << ")";
      r.fail(ptr, os.str());
    }
  }
}

template <class F>
auto relabel(const Reader& r, F&& build) {
  try {
    return build();
  } catch (const InvalidInput& e) {
    throw InvalidInput(r.origin() + ": " + e.what());
  }
}

SourceSpec read_source(const Reader& r) {
  const json& alph = r.at("alphabets");
  if (!alph.is_object()) r.fail("/alphabets", "expected an object of sizes");
  const std::size_t nx = r.alphabet(alph, "X"), na = r.alphabet(alph, "A"), nse = r.alphabet(alph, "Se"),
                    nsd = r.alphabet(alph, "Sd"), nxh = r.alphabet(alph, "Xhat");
  auto source = r.tensor("source", {nx}, {"X"});
  auto si = r.tensor("si_channel", {nx, na, nse, nsd}, {"X", "A", "Se", "Sd"});
  auto dist = r.tensor("distortion", {nx, nxh}, {"X", "Xhat"});
  auto cost = r.tensor("cost", {na}, {"A"});
  check_rows(r, "source", source, nx, {});
  check_rows(r, "si_channel", si, nse * nsd, {nx, na});
  for (std::size_t i = 0; i < dist.size(); ++i)
    if (dist[i] < 0.0) r.fail("/distortion/" + std::to_string(i / nxh) + "/" + std::to_string(i % nxh), "negative distortion");
  for (std::size_t i = 0; i < cost.size(); ++i)
    if (cost[i] < 0.0) r.fail("/cost/" + std::to_string(i), "negative cost");
  return relabel(r, [&] {
    return make_source_spec(Pmf(std::move(source), "source"), na, nse, nsd, nxh, std::move(si), std::move(dist),
                            std::move(cost));
  });
}

ChannelSpec read_channel(const Reader& r) {
  const json& alph = r.at("alphabets");
  if (!alph.is_object()) r.fail("/alphabets", "expected an object of sizes");
  const std::size_t na = r.alphabet(alph, "A"), nse = r.alphabet(alph, "Se"), nsd = r.alphabet(alph, "Sd"),
                    nx = r.alphabet(alph, "X"), ny = r.alphabet(alph, "Y");
  const bool dep = r.flag("action_dependent", false);
  auto state = r.tensor("state_channel", {na, nse, nsd}, {"A", "Se", "Sd"});
  check_rows(r, "state_channel", state, nse * nsd, {na});
  std::vector<double> main;
  if (dep) {
    main = r.tensor("main_channel", {nx, nse, nsd, na, ny}, {"X", "Se", "Sd", "A", "Y"});
    check_rows(r, "main_channel", main, ny, {nx, nse, nsd, na});
  } else {
    main = r.tensor("main_channel", {nx, nse, nsd, ny}, {"X", "Se", "Sd", "Y"});
    check_rows(r, "main_channel", main, ny, {nx, nse, nsd});
  }
  return relabel(r, [&] { return make_channel_spec(na, nse, nsd, nx, ny, std::move(state), std::move(main), dep); });
}

json nest(std::span<const double> flat, const std::vector<std::size_t>& shape, std::size_t depth = 0,
          std::size_t offset = 0) {
  if (depth == shape.size()) return flat[offset];
  std::size_t stride = 1;
  for (std::size_t k = depth + 1; k < shape.size(); ++k) stride *= shape[k];
  json arr = json::array();
  for (std::size_t i = 0; i < shape[depth]; ++i) arr.push_back(nest(flat, shape, depth + 1, offset + i * stride));
  return arr;
}

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

}  // namespace

AnySpec parse_spec(std::string_view text, std::string_view origin) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    if (auto p = msg.find("]: "); p != std::string::npos) msg = msg.substr(p + 3);
    throw InvalidInput(std::string(origin) + ":" + line_col(text, e.byte > 0 ? e.byte - 1 : 0) +
                       ": JSON syntax error: " + msg);
  }
  const Reader r(root, std::string(origin));
  const json& kind = r.at("kind");
  if (kind == "source") return read_source(r);
  if (kind == "channel") return read_channel(r);
  r.fail("/kind", "expected \"source\" or \"channel\"");
}

AnySpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput(path.string() + ": cannot open spec file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str(), path.string());
}

std::string emit_spec(const SourceSpec& s) {
  json j;
  j["kind"] = "source";
  j["alphabets"] = {{"X", s.nx}, {"A", s.na}, {"Se", s.nse}, {"Sd", s.nsd}, {"Xhat", s.nxh}};
  j["source"] = nest(s.source.probs(), {s.nx});
  j["si_channel"] = nest(s.si_channel.table(), {s.nx, s.na, s.nse, s.nsd});
  j["distortion"] = nest(s.distortion, {s.nx, s.nxh});
  j["cost"] = nest(s.cost, {s.na});
  return j.dump(2) + "\n";
}

std::string emit_spec(const ChannelSpec& s) {
  json j;
  j["kind"] = "channel";
  j["alphabets"] = {{"A", s.na}, {"Se", s.nse}, {"Sd", s.nsd}, {"X", s.nx}, {"Y", s.ny}};
  j["action_dependent"] = s.action_dependent;
  j["state_channel"] = nest(s.state_channel.table(), {s.na, s.nse, s.nsd});
  if (s.action_dependent)
    j["main_channel"] = nest(s.main_channel.table(), {s.nx, s.nse, s.nsd, s.na, s.ny});
  else
    j["main_channel"] = nest(s.main_channel.table(), {s.nx, s.nse, s.nsd, s.ny});
  return j.dump(2) + "\n";
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<double> parse_grid(std::string_view text) {
  auto num = [&](std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
      throw InvalidInput("grid: cannot parse number '" + std::string(s) + "' in '" + std::string(text) + "'");
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const auto a = text.find(':');
    const auto b = text.find(':', a + 1);
    if (b == std::string_view::npos || text.find(':', b + 1) != std::string_view::npos)
      throw InvalidInput("grid: expected start:step:count, got '" + std::string(text) + "'");
    const double start = num(text.substr(0, a));
    const double step = num(text.substr(a + 1, b - a - 1));
    const double count = num(text.substr(b + 1));
    if (count < 1 || count != std::floor(count) || count > 1e6)
      throw InvalidInput("grid: count must be a positive integer in '" + std::string(text) + "'");
    for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i) out.push_back(start + step * static_cast<double>(i));
    return out;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(num(text.substr(pos, end - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> columns) : out_(out), columns_(columns.size()) {
  out_ << "# itact v1\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << csv_escape(columns[i]);
  out_ << "\n";
}

void CsvWriter::field(std::string_view text) {
  if (filled_ == columns_) throw InvalidInput("csv: too many fields in row");
  out_ << (filled_ ? "," : "") << text;
  ++filled_;
}

CsvWriter& CsvWriter::operator<<(double v) {
  field(format_number(v));
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long v) {
  field(std::to_string(v));
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view v) {
  field(csv_escape(v));
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_)
    throw InvalidInput("csv: row has " + std::to_string(filled_) + " fields, header has " + std::to_string(columns_));
  out_ << "\n";
  filled_ = 0;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw InvalidInput("csv: no column named '" + std::string(name) + "'");
}

double CsvTable::number(std::size_t row, std::string_view name) const {
  const std::string& s = rows.at(row).at(column(name));
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidInput("csv: column '" + std::string(name) + "' holds non-numeric '" + s + "'");
  }
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line) || line != "# itact v1") throw InvalidInput("csv: missing '# itact v1' header");
  if (!std::getline(in, line)) throw InvalidInput("csv: missing column header");
  t.columns = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != t.columns.size()) throw InvalidInput("csv: ragged row");
    t.rows.push_back(std::move(fields));
  }
  return t;
}

std::string sim_reports_json(const std::vector<SimReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) {
    json j;
    j["scheme"] = r.scheme;
    j["n"] = r.n;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["epsilon"] = r.epsilon;
    j["rate_margin"] = r.rate_margin;
    j["rates"] = r.rates;
    j["outer_words"] = r.outer_words;
    j["inner_words"] = r.inner_words;
    j["bins"] = r.bins;
    j["empirical_distortion"] = r.empirical_distortion;
    j["p_cr"] = r.p_cr;
    j["p_me"] = r.p_me;
    j["p_xe"] = r.p_xe;
    j["encoder_failure_rate"] = r.encoder_failure_rate;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

void write_trace_csv(std::ostream& out, const SimReport& report, const std::vector<TrialTrace>& trace) {
  CsvWriter w(out, {"scheme", "n", "trial", "encoder_failed", "cr_mismatch", "message_error", "input_error",
                    "distortion"});
  for (const auto& t : trace) {
    w << report.scheme << report.n << t.trial << t.encoder_failed << t.cr_mismatch << t.message_error
      << t.input_error << t.distortion;
    w.end_row();
  }
}

}  // namespace itact
